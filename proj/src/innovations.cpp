#include "lpclt/innovations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "lpclt/numeric.hpp"
#include "lpclt/random.hpp"

namespace lpclt::innovations {

namespace {

constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max();

// Reverse cumulative sums, accumulated from the small end.
std::vector<double> suffix_sums(const std::vector<double>& v, bool squared) {
  std::vector<double> out(v.size() + 1, 0.0);
  CompensatedSum s;
  for (std::size_t i = v.size(); i-- > 0;) {
    s.add(squared ? v[i] * v[i] : v[i]);
    out[i] = s.value();
  }
  return out;
}

double standard_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

// ---------------------------------------------------------------------------

NullSequence NullSequence::inverse_log(double shift) {
  if (!(shift > 1.0) || !std::isfinite(shift)) {
    throw PreconditionError("inverse-log null sequence needs shift > 1");
  }
  return NullSequence(Kind::kInverseLog, shift, 0.0);
}

NullSequence NullSequence::power(double scale, double exponent) {
  if (!(scale >= 0.0) || !(exponent > 0.0) || !std::isfinite(scale) || !std::isfinite(exponent)) {
    throw PreconditionError("power null sequence needs scale >= 0 and exponent > 0");
  }
  return NullSequence(Kind::kPower, scale, exponent);
}

NullSequence NullSequence::zero() { return NullSequence(Kind::kZero, 0.0, 0.0); }

double NullSequence::operator()(std::int64_t n) const {
  const double x = static_cast<double>(n);
  switch (kind_) {
    case Kind::kInverseLog:
      return 1.0 / std::log(x + p1_);
    case Kind::kPower:
      return p1_ * std::pow(x, -p2_);
    case Kind::kZero:
      return 0.0;
  }
  return 0.0;
}

std::string NullSequence::describe() const {
  std::ostringstream s;
  switch (kind_) {
    case Kind::kInverseLog:
      s << "1/log(n+" << p1_ << ")";
      break;
    case Kind::kPower:
      s << p1_ << "*n^-" << p2_;
      break;
    case Kind::kZero:
      s << "0";
      break;
  }
  return s.str();
}

double Prop3Construction::coefficient(std::int64_t j) const {
  if (j < 0) return 0.0;
  if (j >= materialized_length()) {
    std::ostringstream s;
    s << "counterexample coefficient u_" << j << " lies beyond the materialized range "
      << materialized_length();
    throw PreconditionError(s.str());
  }
  return u[static_cast<std::size_t>(j)];
}

Prop3Construction proposition3_weights(const NullSequence& psi, std::int64_t cutoff) {
  if (cutoff < 2) throw PreconditionError("counterexample cutoff must be at least 2");
  Prop3Construction c;
  c.psi = psi;
  c.cutoff = cutoff;
  c.n.push_back(1);

  // Scan psi once; m only moves forward because the levels decrease.
  std::int64_t m = 1;
  double prev = psi(1);
  if (!(prev >= 0.0)) throw PreconditionError("null sequence must be nonnegative");
  for (std::int64_t k = 1;; ++k) {
    const double level = 1.0 / static_cast<double>((k + 1) * (k + 1));
    while (m <= cutoff && psi(m) > level) {
      ++m;
      const double cur = psi(m);
      if (cur > prev) {
        std::ostringstream s;
        s << "null sequence increases at n = " << m;
        throw PreconditionError(s.str());
      }
      prev = cur;
    }
    const std::int64_t gap_floor = 2 * c.n.back() + 1;
    const std::int64_t next = std::max(gap_floor, m);
    if (m > cutoff || next > cutoff) {
      if (c.n.size() == 1) {
        std::ostringstream s;
        s << "level 1/" << (k + 1) * (k + 1) << " not reached before cutoff " << cutoff;
        throw PreconditionError(s.str());
      }
      break;
    }
    c.n.push_back(next);
  }

  c.u.assign(static_cast<std::size_t>(c.n.back()), 0.0);
  c.u[0] = 1.0;
  for (std::size_t k = 0; k + 1 < c.n.size(); ++k) {
    const double v = 1.0 / static_cast<double>(c.n[k + 1]);
    std::fill(c.u.begin() + c.n[k], c.u.begin() + c.n[k + 1], v);
  }
  const Prop3InvariantCheck check = verify_invariants(c);
  if (!check.all()) throw CertificationError("counterexample invariants failed: " + check.detail);
  return c;
}

Prop3InvariantCheck verify_invariants(const Prop3Construction& c) {
  Prop3InvariantCheck r;
  std::ostringstream why;
  r.gap = c.n.size() >= 1 && c.n[0] == 1;
  for (std::size_t k = 0; k + 1 < c.n.size(); ++k) {
    if (!(2 * (c.n[k + 1] - c.n[k]) > c.n[k + 1])) {
      r.gap = false;
      why << "gap fails at k=" << k + 1 << "; ";
    }
  }
  // Each j is checked against the tightest level that applies to it.
  r.level = true;
  const auto len = c.materialized_length();
  for (std::size_t k = 0; k < c.n.size(); ++k) {
    const std::int64_t hi = k + 1 < c.n.size() ? c.n[k + 1] : len;
    const double level = 1.0 / static_cast<double>((k + 1) * (k + 1));
    for (std::int64_t j = c.n[k]; j < hi; ++j) {
      if (c.psi(j) > level) {
        r.level = false;
        why << "psi_" << j << " above 1/" << (k + 1) * (k + 1) << "; ";
        break;
      }
    }
  }
  r.piecewise = len == c.n.back() && len >= 1 && c.u[0] == 1.0;
  for (std::size_t k = 0; k + 1 < c.n.size() && r.piecewise; ++k) {
    const double v = 1.0 / static_cast<double>(c.n[k + 1]);
    for (std::int64_t j = c.n[k]; j < c.n[k + 1]; ++j) {
      if (c.u[static_cast<std::size_t>(j)] != v) {
        r.piecewise = false;
        why << "u_" << j << " off its block value; ";
        break;
      }
    }
  }
  r.detail = why.str();
  return r;
}

// ---------------------------------------------------------------------------

CausalCoefficients::CausalCoefficients(Kind k) : kind_(std::move(k)) {
  const std::vector<double>* stored = nullptr;
  if (auto* t = std::get_if<TableCoefficients>(&kind_)) stored = &t->values;
  if (auto* p = std::get_if<Prop3Coefficients>(&kind_)) stored = &(*p)->u;
  if (stored != nullptr) {
    suffix_ = std::make_shared<const std::vector<double>>(suffix_sums(*stored, false));
    suffix_sq_ = std::make_shared<const std::vector<double>>(suffix_sums(*stored, true));
  }
}

CausalCoefficients CausalCoefficients::geometric(double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw PreconditionError("geometric coefficients need 0 < ratio < 1");
  }
  return CausalCoefficients(GeometricCoefficients{ratio});
}

CausalCoefficients CausalCoefficients::table(std::vector<double> values) {
  if (values.empty()) throw PreconditionError("coefficient table is empty");
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw PreconditionError("causal coefficients must be finite and nonnegative");
    }
  }
  return CausalCoefficients(TableCoefficients{std::move(values)});
}

CausalCoefficients CausalCoefficients::proposition3(Prop3Construction construction) {
  return CausalCoefficients(
      std::make_shared<const Prop3Construction>(std::move(construction)));
}

std::string_view CausalCoefficients::kind_name() const noexcept {
  switch (kind_.index()) {
    case 0:
      return "geometric";
    case 1:
      return "table";
    default:
      return "proposition3";
  }
}

double CausalCoefficients::at(std::int64_t i) const {
  if (i < 0) return 0.0;
  if (auto* g = std::get_if<GeometricCoefficients>(&kind_)) {
    return std::pow(g->ratio, static_cast<double>(i));
  }
  if (auto* t = std::get_if<TableCoefficients>(&kind_)) {
    return i < static_cast<std::int64_t>(t->values.size()) ? t->values[static_cast<std::size_t>(i)]
                                                           : 0.0;
  }
  return std::get<Prop3Coefficients>(kind_)->coefficient(i);
}

std::int64_t CausalCoefficients::known_length() const noexcept {
  if (auto* p = std::get_if<Prop3Coefficients>(&kind_)) return (*p)->materialized_length();
  return kUnbounded;
}

bool CausalCoefficients::summable() const noexcept {
  return !std::holds_alternative<Prop3Coefficients>(kind_);
}

double CausalCoefficients::sum_from(std::int64_t i) const {
  i = std::max<std::int64_t>(i, 0);
  if (auto* g = std::get_if<GeometricCoefficients>(&kind_)) {
    return std::pow(g->ratio, static_cast<double>(i)) / (1.0 - g->ratio);
  }
  if (std::holds_alternative<TableCoefficients>(kind_)) {
    const auto& s = *suffix_;
    return i < static_cast<std::int64_t>(s.size()) ? s[static_cast<std::size_t>(i)] : 0.0;
  }
  throw PreconditionError("coefficient sum diverges for the counterexample sequence");
}

Bracket CausalCoefficients::sq_sum_from(std::int64_t i) const {
  i = std::max<std::int64_t>(i, 0);
  if (auto* g = std::get_if<GeometricCoefficients>(&kind_)) {
    const double v = std::pow(g->ratio, 2.0 * static_cast<double>(i)) / (1.0 - g->ratio * g->ratio);
    return {v, v};
  }
  const auto& s = *suffix_sq_;
  const double stored = i < static_cast<std::int64_t>(s.size()) ? s[static_cast<std::size_t>(i)] : 0.0;
  if (std::holds_alternative<TableCoefficients>(kind_)) return {stored, stored};
  return {stored, stored + std::get<Prop3Coefficients>(kind_)->unmaterialized_sq_bound()};
}

// ---------------------------------------------------------------------------

PredictableFactor PredictableFactor::tanh(double scale) {
  if (!(std::fabs(scale) < 1.0)) throw PreconditionError("tanh factor needs |scale| < 1");
  PredictableFactor h;
  h.scale_ = scale;
  h.finish();
  return h;
}

PredictableFactor PredictableFactor::table(std::vector<double> knots, std::vector<double> values) {
  if (knots.size() < 2 || knots.size() != values.size()) {
    throw PreconditionError("factor table needs at least two (knot, value) pairs");
  }
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i]) || !std::isfinite(values[i])) {
      throw PreconditionError("factor table entries must be finite");
    }
    if (i > 0 && !(knots[i] > knots[i - 1])) {
      throw PreconditionError("factor table knots must increase strictly");
    }
  }
  PredictableFactor h;
  h.knots_ = std::move(knots);
  h.values_ = std::move(values);
  h.finish();
  return h;
}

double PredictableFactor::operator()(double z) const {
  if (knots_.empty()) return 1.0 + scale_ * std::tanh(z);
  if (z <= knots_.front()) return values_.front();
  if (z >= knots_.back()) return values_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), z);
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  const double t = (z - knots_[i - 1]) / (knots_[i] - knots_[i - 1]);
  return values_[i - 1] + t * (values_[i] - values_[i - 1]);
}

void PredictableFactor::finish() {
  auto sq = [this](double z) {
    const double v = (*this)(z);
    return v * v * standard_normal_pdf(z);
  };
  if (knots_.empty()) {
    bound_ = 1.0 + std::fabs(scale_);
    second_moment_ = gauss_legendre_composite(sq, -12.0, 12.0, 96);
    return;
  }
  bound_ = 0.0;
  for (double v : values_) bound_ = std::max(bound_, std::fabs(v));
  // Exact constant tails plus Gauss-Legendre on each linear piece.
  CompensatedSum s;
  s.add(values_.front() * values_.front() * normal_cdf(knots_.front()));
  s.add(values_.back() * values_.back() * normal_cdf(-knots_.back()));
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const int panels = std::max(1, static_cast<int>(std::ceil(knots_[i + 1] - knots_[i])) * 4);
    s.add(gauss_legendre_composite(sq, knots_[i], knots_[i + 1], panels));
  }
  second_moment_ = s.value();
}

// ---------------------------------------------------------------------------

InnovationModel InnovationModel::iid(IidDistribution d) { return InnovationModel(IidModel{d}); }

InnovationModel InnovationModel::mds_product(PredictableFactor h) {
  return InnovationModel(MdsProductModel{std::move(h)});
}

InnovationModel InnovationModel::causal_linear(CausalCoefficients u) {
  return InnovationModel(CausalLinearModel{std::move(u)});
}

InnovationModel InnovationModel::bernoulli_shift(maps::CatalogMap g, int bit_depth) {
  if (bit_depth < 1 || bit_depth > 64) {
    throw PreconditionError("bit depth must lie in [1, 64]");
  }
  return InnovationModel(BernoulliShiftModel{std::move(g), bit_depth});
}

InnovationModel InnovationModel::nonergodic_scale(std::vector<ScaleComponent> components) {
  if (components.empty()) throw PreconditionError("scale mixture needs at least one component");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.probability > 0.0) || !(c.scale > 0.0) || !std::isfinite(c.scale)) {
      throw PreconditionError("scale components need probability > 0 and scale > 0");
    }
    total += c.probability;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    throw PreconditionError("scale component probabilities must sum to 1");
  }
  return InnovationModel(NonergodicScaleModel{std::move(components)});
}

std::string_view InnovationModel::kind_name() const noexcept {
  switch (kind_.index()) {
    case 0:
      return "iid";
    case 1:
      return "mds-product";
    case 2:
      return "causal-linear";
    case 3:
      return "bernoulli-shift";
    default:
      return "nonergodic-scale";
  }
}

Certificates InnovationModel::certificates() const noexcept {
  if (auto* b = std::get_if<BernoulliShiftModel>(&kind_)) {
    const bool closed = b->map.kind() != maps::MapKind::kOscillating;
    return {closed, false, false, false};
  }
  return {true, true, true, true};
}

double InnovationModel::second_moment() const {
  if (std::holds_alternative<IidModel>(kind_)) return 1.0;
  if (auto* m = std::get_if<MdsProductModel>(&kind_)) return m->h.second_moment();
  if (auto* c = std::get_if<CausalLinearModel>(&kind_)) return c->u.sq_sum_from(0).mid();
  if (auto* b = std::get_if<BernoulliShiftModel>(&kind_)) return b->map.variance();
  const auto& ne = std::get<NonergodicScaleModel>(kind_);
  CompensatedSum s;
  for (const auto& c : ne.components) s.add(c.probability * c.scale * c.scale);
  return s.value();
}

bool InnovationModel::is_martingale_difference() const noexcept {
  if (auto* c = std::get_if<CausalLinearModel>(&kind_)) {
    auto* t = std::get_if<TableCoefficients>(&c->u.kind());
    return t != nullptr && std::all_of(t->values.begin() + 1, t->values.end(),
                                       [](double v) { return v == 0.0; });
  }
  if (auto* b = std::get_if<BernoulliShiftModel>(&kind_)) {
    return b->map.digit_measurable().value_or(0) == 1;
  }
  return true;
}

// ---------------------------------------------------------------------------

std::int64_t warmup_depth(const InnovationModel& model) {
  const auto& k = model.kind();
  if (std::holds_alternative<MdsProductModel>(k)) return 1;
  if (auto* b = std::get_if<BernoulliShiftModel>(&k)) return b->bit_depth - 1;
  if (auto* c = std::get_if<CausalLinearModel>(&k)) {
    if (auto* g = std::get_if<GeometricCoefficients>(&c->u.kind())) {
      // Omitted L2 mass at the first output: rho^{2(W+1)} / (1 - rho^2).
      const double target = kSampleTruncationTol * kSampleTruncationTol;
      const double r2 = g->ratio * g->ratio;
      std::int64_t w = 0;
      while (std::pow(r2, static_cast<double>(w + 1)) / (1.0 - r2) >= target) ++w;
      return w;
    }
    if (auto* t = std::get_if<TableCoefficients>(&c->u.kind())) {
      return static_cast<std::int64_t>(t->values.size()) - 1;
    }
    throw CertificationError(
        "truncation depth not certified for the counterexample coefficients: the stored "
        "coefficients leave up to 1/n_K of L2 mass");
  }
  return 0;
}

std::size_t realized_component(const NonergodicScaleModel& model, std::uint64_t seed) {
  const double u = CounterRng(seed, Stream::kScale).uniform(0);
  double cum = 0.0;
  for (std::size_t i = 0; i < model.components.size(); ++i) {
    cum += model.components[i].probability;
    if (u < cum) return i;
  }
  return model.components.size() - 1;
}

namespace {

void certify_bernoulli(const BernoulliShiftModel& b) {
  if (b.map.digit_measurable()) {
    if (b.bit_depth >= *b.map.digit_measurable()) return;
  } else if (auto lip = b.map.lipschitz()) {
    if (*lip * std::ldexp(1.0, -b.bit_depth - 1) < kSampleTruncationTol) return;
  }
  std::ostringstream s;
  s << "truncation not certified for bernoulli-shift map " << b.map.name() << " at bit depth "
    << b.bit_depth;
  throw CertificationError(s.str());
}

std::vector<double> sample_bernoulli(const BernoulliShiftModel& b, IndexRange r,
                                     std::uint64_t seed) {
  certify_bernoulli(b);
  const CounterRng rng(seed, Stream::kBits);
  const int d = b.bit_depth;
  const std::uint64_t top = std::uint64_t{1} << (d - 1);
  // s holds eps_m (most significant) down to eps_{m-d+1}.
  std::uint64_t s = 0;
  for (std::int64_t m = r.first - d + 1; m < r.first; ++m) {
    s = (s >> 1) | (rng.bit(m) ? top : 0);
  }
  const long double scale = std::ldexp(1.0L, -d);
  const double mean = b.map.mean();
  std::vector<double> out(static_cast<std::size_t>(r.size()));
  for (std::int64_t m = r.first; m <= r.last; ++m) {
    s = (s >> 1) | (rng.bit(m) ? top : 0);
    double y = static_cast<double>((static_cast<long double>(s) + 0.5L) * scale);
    y = std::clamp(y, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
    out[static_cast<std::size_t>(m - r.first)] = b.map(y) - mean;
  }
  return out;
}

std::vector<double> sample_causal(const CausalLinearModel& c, IndexRange r, std::uint64_t seed) {
  const std::int64_t w = warmup_depth(InnovationModel::causal_linear(c.u));
  const CounterRng rng(seed, Stream::kPrimary);
  std::vector<double> y(static_cast<std::size_t>(r.size() + w));
  rng.fill_normals(r.first - w, y);
  std::vector<double> out(static_cast<std::size_t>(r.size()));
  if (auto* g = std::get_if<GeometricCoefficients>(&c.u.kind())) {
    double x = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      x = g->ratio * x + y[i];
      if (i >= static_cast<std::size_t>(w)) out[i - static_cast<std::size_t>(w)] = x;
    }
    return out;
  }
  const auto& u = std::get<TableCoefficients>(c.u.kind()).values;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const std::size_t base = k + static_cast<std::size_t>(w);
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * y[base - i];
    out[k] = acc;
  }
  return out;
}

}  // namespace

std::vector<double> sample_path(const InnovationModel& model, IndexRange range,
                                std::uint64_t seed) {
  if (range.size() < 0) throw PreconditionError("index range is reversed");
  const auto n = static_cast<std::size_t>(range.size());
  const auto& k = model.kind();
  if (auto* iid = std::get_if<IidModel>(&k)) {
    std::vector<double> out(n);
    const CounterRng rng(seed, Stream::kPrimary);
    switch (iid->distribution) {
      case IidDistribution::kNormal:
        rng.fill_normals(range.first, out);
        break;
      case IidDistribution::kRademacher:
        for (std::size_t i = 0; i < n; ++i) {
          out[i] = rng.bit(range.first + static_cast<std::int64_t>(i)) ? 1.0 : -1.0;
        }
        break;
      case IidDistribution::kCenteredUniform:
        for (std::size_t i = 0; i < n; ++i) {
          const double u = rng.uniform(range.first + static_cast<std::int64_t>(i));
          out[i] = std::sqrt(3.0) * (2.0 * u - 1.0);
        }
        break;
    }
    return out;
  }
  if (auto* m = std::get_if<MdsProductModel>(&k)) {
    std::vector<double> z(n + 1);
    CounterRng(seed, Stream::kPrimary).fill_normals(range.first - 1, z);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = z[i + 1] * m->h(z[i]);
    return out;
  }
  if (auto* c = std::get_if<CausalLinearModel>(&k)) return sample_causal(*c, range, seed);
  if (auto* b = std::get_if<BernoulliShiftModel>(&k)) return sample_bernoulli(*b, range, seed);
  const auto& ne = std::get<NonergodicScaleModel>(k);
  const double v = ne.components[realized_component(ne, seed)].scale;
  std::vector<double> out(n);
  CounterRng(seed, Stream::kPrimary).fill_normals(range.first, out);
  for (double& x : out) x *= v;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Variance of g over [a, a + h] (times h), centered at the cell mean, with
// each cell split into `split` Gauss-Legendre panels.
double cell_variance_mass(const maps::CatalogMap& g, double a, double h, int split) {
  const GaussRule rule = gauss_legendre_rule();
  const double ph = h / split;
  std::vector<double> xs;
  std::vector<double> ws;
  xs.reserve(rule.nodes.size() * static_cast<std::size_t>(split));
  ws.reserve(xs.capacity());
  for (int p = 0; p < split; ++p) {
    const double lo = a + p * ph;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      // Near depth 52 a cell is two ulps wide and nodes can round onto its end.
      xs.push_back(std::clamp(lo + 0.5 * ph * (rule.nodes[i] + 1.0), a, std::nextafter(a + h, a)));
      ws.push_back(0.5 * ph * rule.weights[i]);
    }
  }
  const double ref = g(a + 0.5 * h);
  CompensatedSum m1;
  std::vector<double> dv(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    dv[i] = g(xs[i]) - ref;
    m1.add(ws[i] * dv[i]);
  }
  const double mean = m1.value() / h;
  CompensatedSum m2;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = dv[i] - mean;
    m2.add(ws[i] * e * e);
  }
  return m2.value();
}

double projection_norm_sq(const maps::CatalogMap& g, int n, int points, int split) {
  const double h = std::ldexp(1.0, -n);
  const auto cells = std::int64_t{1} << std::min(n, 62);
  CompensatedSum s;
  if (n <= 30 && cells <= points) {
    for (std::int64_t c = 0; c < cells; ++c) {
      s.add(cell_variance_mass(g, static_cast<double>(c) * h, h, split));
    }
    return s.value();
  }
  // Too many cells to visit. The cell mass F(a) is smooth in the cell start a
  // on a run of cells c0..c1 free of jumps, so sum F(c h) over the run is
  // (1/h) int F + (F(c0 h) + F(c1 h))/2 up to a relative O(h^2). Cells that
  // contain a jump are summed one by one; a jump on a cell edge only ends a run.
  const GaussRule rule = gauss_legendre_rule();
  const auto last = cells - 1;
  std::vector<std::pair<std::int64_t, bool>> bad;  // (cell, contains the jump)
  for (double b : g.breakpoints()) {
    const double q = b / h;
    const auto c = static_cast<std::int64_t>(std::floor(q));
    if (c >= 0 && c <= last) bad.emplace_back(c, static_cast<double>(c) != q);
  }
  std::sort(bad.begin(), bad.end());
  bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
  const int panels = std::max(1, points / static_cast<int>(rule.nodes.size())) * split;
  auto run = [&](std::int64_t c0, std::int64_t c1) {
    if (c0 > c1) return;
    const double lo = static_cast<double>(c0) * h;
    const double hi = static_cast<double>(c1) * h;
    s.add(0.5 * (cell_variance_mass(g, lo, h, 1) + (c1 > c0 ? cell_variance_mass(g, hi, h, 1) : 0.0)));
    if (c1 == c0) return;
    const double len = hi - lo;
    const int m = std::max(1, static_cast<int>(std::ceil(panels * len)));
    const double ph = len / m;
    for (int p = 0; p < m; ++p) {
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = lo + (p + 0.5 * (rule.nodes[i] + 1.0)) * ph;
        s.add(0.5 * ph * rule.weights[i] * cell_variance_mass(g, x, h, 1) / h);
      }
    }
  };
  std::int64_t start = 0;
  for (const auto& [c, inside] : bad) {
    if (c < start) continue;
    run(start, c - 1);
    start = c;
    if (inside) {
      s.add(cell_variance_mass(g, static_cast<double>(c) * h, h, split));
      start = c + 1;
    }
  }
  run(start, last);
  return s.value();
}

}  // namespace

double bernoulli_dyadic_projection_norm(const maps::CatalogMap& g, int n, int quadrature_points) {
  if (n < 1 || n > 52) throw PreconditionError("projection depth n must lie in [1, 52]");
  if (quadrature_points < 20) throw PreconditionError("need at least 20 quadrature points");
  const double coarse = std::sqrt(std::max(0.0, projection_norm_sq(g, n, quadrature_points, 1)));
  const double fine = std::sqrt(std::max(0.0, projection_norm_sq(g, n, quadrature_points, 2)));
  const double tol = 1e-7 * std::max(coarse, fine) + 1e-15;
  if (!(std::fabs(coarse - fine) <= tol)) {
    std::ostringstream s;
    s << "projection norm quadrature did not converge for " << g.name() << " at n = " << n
      << " (" << coarse << " vs " << fine << ")";
    throw CertificationError(s.str());
  }
  return fine;
}

}  // namespace lpclt::innovations
