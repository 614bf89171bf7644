#include "lpclt/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "lpclt/numeric.hpp"

namespace lpclt::cli {

using nlohmann::json;

namespace {

// Position lookup for diagnostics: the line of the first occurrence of the
// quoted key (the parser does not keep positions of values).
class Source {
 public:
  Source(std::string_view text, std::string_view name) : text_(text), name_(name) {}

  [[nodiscard]] int line_of_key(std::string_view key) const {
    const std::string quoted = "\"" + std::string(key) + "\"";
    const auto pos = text_.find(quoted);
    return pos == std::string_view::npos ? 0 : line_at(pos);
  }
  [[nodiscard]] int line_at(std::size_t byte) const {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text_.size(); ++i) line += text_[i] == '\n';
    return line;
  }
  [[noreturn]] void fail(int line, std::string_view field, std::string_view why) const {
    std::ostringstream s;
    s << name_ << ":" << line << ": " << field << ": " << why;
    throw ConfigError(s.str());
  }

 private:
  std::string_view text_;
  std::string name_;
};

// One JSON object with tracked field use; finish() rejects leftovers.
class Reader {
 public:
  Reader(const json& j, std::string path, const Source& src)
      : j_(j), path_(std::move(path)), src_(src) {
    if (!j_.is_object()) src_.fail(src_.line_of_key(last_segment()), path_, "expected an object");
  }

  [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  T get(const std::string& key, T fallback) {
    if (!j_.contains(key)) {
      used_.insert(key);
      return fallback;
    }
    return require<T>(key);
  }

  template <class T>
  T require(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) src_.fail(src_.line_of_key(last_segment()), field(key), "required field missing");
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!j_.at(key).is_number()) throw std::invalid_argument("expected a number");
      } else if constexpr (std::is_integral_v<T>) {
        if (!j_.at(key).is_number_integer()) throw std::invalid_argument("expected an integer");
      }
      return j_.at(key).get<T>();
    } catch (const std::exception& e) {
      src_.fail(src_.line_of_key(key), field(key), e.what());
    }
  }

  Reader object(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) src_.fail(src_.line_of_key(last_segment()), field(key), "required field missing");
    return Reader(j_.at(key), field(key), src_);
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) src_.fail(src_.line_of_key(last_segment()), field(key), "required field missing");
    return j_.at(key);
  }

  [[nodiscard]] std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  [[nodiscard]] const std::string& path() const noexcept { return path_; }
  [[nodiscard]] const Source& source() const noexcept { return src_; }

  [[noreturn]] void fail(const std::string& key, std::string_view why) const {
    src_.fail(src_.line_of_key(key), field(key), why);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) src_.fail(src_.line_of_key(k), field(k), "unknown field");
    }
  }

 private:
  [[nodiscard]] std::string last_segment() const {
    const auto dot = path_.rfind('.');
    return dot == std::string::npos ? path_ : path_.substr(dot + 1);
  }
  const json& j_;
  std::string path_;
  const Source& src_;
  std::set<std::string> used_;
};

// Library precondition errors become field diagnostics.
template <class F>
auto guarded(const Reader& r, const std::string& key, F f) {
  try {
    return f();
  } catch (const PreconditionError& e) {
    r.fail(key, e.what());
  }
}

innovations::NullSequence parse_psi(Reader r) {
  const auto kind = r.require<std::string>("kind");
  innovations::NullSequence out = innovations::NullSequence::zero();
  if (kind == "inverse-log") {
    const double shift = r.get<double>("shift", 2.0);
    out = guarded(r, "shift", [&] { return innovations::NullSequence::inverse_log(shift); });
  } else if (kind == "power") {
    const double c = r.get<double>("scale", 1.0);
    const double e = r.require<double>("exponent");
    out = guarded(r, "exponent", [&] { return innovations::NullSequence::power(c, e); });
  } else if (kind != "zero") {
    r.fail("kind", "unknown null sequence '" + kind + "' (inverse-log, power, zero)");
  }
  r.finish();
  return out;
}

maps::CatalogMap parse_map(Reader r) {
  const auto kind = r.require<std::string>("kind");
  maps::CatalogMap out = maps::CatalogMap::linear();
  if (kind == "square") {
    out = maps::CatalogMap::square();
  } else if (kind == "half-indicator") {
    out = maps::CatalogMap::half_indicator();
  } else if (kind == "oscillating") {
    const double p = r.require<double>("p");
    const double a = r.require<double>("a");
    out = guarded(r, "p", [&] { return maps::CatalogMap::oscillating(p, a); });
  } else if (kind != "linear") {
    r.fail("kind", "unknown map '" + kind + "' (linear, square, half-indicator, oscillating)");
  }
  r.finish();
  return out;
}

innovations::InnovationModel parse_model(Reader r, std::int64_t cutoff_default) {
  using namespace innovations;
  const auto kind = r.require<std::string>("kind");
  std::optional<InnovationModel> out;
  if (kind == "iid") {
    const auto d = r.get<std::string>("distribution", "normal");
    if (d == "normal") {
      out = InnovationModel::iid(IidDistribution::kNormal);
    } else if (d == "rademacher") {
      out = InnovationModel::iid(IidDistribution::kRademacher);
    } else if (d == "centered-uniform") {
      out = InnovationModel::iid(IidDistribution::kCenteredUniform);
    } else {
      r.fail("distribution", "unknown distribution '" + d + "' (normal, rademacher, centered-uniform)");
    }
  } else if (kind == "mds-product") {
    PredictableFactor h = PredictableFactor::tanh();
    if (r.has("h")) {
      Reader hr = r.object("h");
      const auto hk = hr.require<std::string>("kind");
      if (hk == "tanh") {
        const double scale = hr.get<double>("scale", 0.5);
        h = guarded(hr, "scale", [&] { return PredictableFactor::tanh(scale); });
      } else if (hk == "table") {
        auto knots = hr.require<std::vector<double>>("knots");
        auto values = hr.require<std::vector<double>>("values");
        h = guarded(hr, "knots", [&] { return PredictableFactor::table(knots, values); });
      } else {
        hr.fail("kind", "unknown factor '" + hk + "' (tanh, table)");
      }
      hr.finish();
    } else {
      (void)r.get<int>("h", 0);
    }
    out = InnovationModel::mds_product(h);
  } else if (kind == "causal-linear") {
    Reader cr = r.object("coefficients");
    const auto ck = cr.require<std::string>("kind");
    if (ck == "geometric") {
      const double ratio = cr.require<double>("ratio");
      out = guarded(cr, "ratio", [&] {
        return InnovationModel::causal_linear(CausalCoefficients::geometric(ratio));
      });
    } else if (ck == "table") {
      auto values = cr.require<std::vector<double>>("values");
      out = guarded(cr, "values", [&] {
        return InnovationModel::causal_linear(CausalCoefficients::table(values));
      });
    } else if (ck == "proposition3") {
      const auto psi = parse_psi(cr.object("psi"));
      const auto cutoff = cr.get<std::int64_t>("cutoff", cutoff_default);
      out = guarded(cr, "cutoff", [&] {
        return InnovationModel::causal_linear(
            CausalCoefficients::proposition3(proposition3_weights(psi, cutoff)));
      });
    } else {
      cr.fail("kind", "unknown coefficients '" + ck + "' (geometric, table, proposition3)");
    }
    cr.finish();
  } else if (kind == "bernoulli-shift") {
    const auto g = parse_map(r.object("map"));
    const int depth = r.get<int>("bit_depth", 64);
    out = guarded(r, "bit_depth", [&] { return InnovationModel::bernoulli_shift(g, depth); });
  } else if (kind == "nonergodic-scale") {
    const json& comps = r.raw("components");
    if (!comps.is_array()) r.fail("components", "expected an array");
    std::vector<ScaleComponent> cs;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      Reader c(comps[i], r.field("components") + "[" + std::to_string(i) + "]", r.source());
      cs.push_back({c.require<double>("probability"), c.require<double>("scale")});
      c.finish();
    }
    out = guarded(r, "components", [&] { return InnovationModel::nonergodic_scale(cs); });
  } else {
    r.fail("kind",
           "unknown model '" + kind +
               "' (iid, mds-product, causal-linear, bernoulli-shift, nonergodic-scale)");
  }
  r.finish();
  return *out;
}

weights::WeightSequence parse_weights(Reader r) {
  using weights::WeightSequence;
  const auto kind = r.require<std::string>("kind");
  std::optional<WeightSequence> out;
  if (kind == "partial-sum-delta") {
    out = WeightSequence::partial_sum_delta();
  } else if (kind == "power-decay") {
    const double beta = r.require<double>("exponent");
    out = guarded(r, "exponent", [&] { return WeightSequence::power_decay(beta); });
  } else if (kind == "geometric") {
    const double ratio = r.require<double>("ratio");
    out = guarded(r, "ratio", [&] { return WeightSequence::geometric(ratio); });
  } else if (kind == "finite-support") {
    const auto offset = r.get<std::int64_t>("offset", 0);
    auto values = r.require<std::vector<double>>("values");
    out = guarded(r, "values", [&] { return WeightSequence::finite_support(offset, values); });
  } else {
    r.fail("kind",
           "unknown weights '" + kind + "' (partial-sum-delta, power-decay, geometric, finite-support)");
  }
  r.finish();
  return *out;
}

harness::Target parse_target(Reader r) {
  const auto kind = r.require<std::string>("kind");
  std::vector<harness::MixtureComponent> comps;
  if (kind == "normal") {
    comps.push_back({1.0, r.require<double>("variance")});
  } else if (kind == "mixture") {
    const json& cs = r.raw("components");
    if (!cs.is_array()) r.fail("components", "expected an array");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      Reader c(cs[i], r.field("components") + "[" + std::to_string(i) + "]", r.source());
      comps.push_back({c.require<double>("weight"), c.require<double>("variance")});
      c.finish();
    }
  } else {
    r.fail("kind", "unknown target '" + kind + "' (normal, mixture)");
  }
  r.finish();
  return guarded(r, "kind", [&] { return harness::mixture_cdf(comps); });
}

conditions::AlphaSequence parse_alpha(Reader r) {
  using conditions::AlphaSequence;
  const auto kind = r.require<std::string>("kind");
  std::optional<AlphaSequence> out;
  if (kind == "power") {
    const double c = r.get<double>("c", 1.0);
    const double s = r.require<double>("exponent");
    out = guarded(r, "exponent", [&] { return AlphaSequence::power(c, s); });
  } else if (kind == "geometric") {
    const double c = r.get<double>("c", 1.0);
    const double ratio = r.require<double>("ratio");
    out = guarded(r, "ratio", [&] { return AlphaSequence::geometric(c, ratio); });
  } else if (kind == "m-dependent") {
    const double c = r.get<double>("c", 0.25);
    const auto m = r.require<std::int64_t>("m");
    out = guarded(r, "m", [&] { return AlphaSequence::m_dependent(c, m); });
  } else if (kind == "zero") {
    out = AlphaSequence::zero();
  } else {
    r.fail("kind", "unknown alpha sequence '" + kind + "' (power, geometric, m-dependent, zero)");
  }
  r.finish();
  return *out;
}

conditions::QuantileFunction parse_quantile(Reader r) {
  using conditions::QuantileFunction;
  const auto kind = r.require<std::string>("kind");
  std::optional<QuantileFunction> out;
  if (kind == "constant") {
    const double c = r.require<double>("c");
    out = guarded(r, "c", [&] { return QuantileFunction::constant(c); });
  } else if (kind == "power") {
    const double c = r.get<double>("c", 1.0);
    const double e = r.require<double>("exponent");
    out = guarded(r, "exponent", [&] { return QuantileFunction::power(c, e); });
  } else {
    r.fail("kind", "unknown quantile function '" + kind + "' (constant, power)");
  }
  r.finish();
  return *out;
}

std::optional<std::string> parse_verdict(Reader& r, const std::string& key) {
  if (!r.has(key)) {
    (void)r.get<int>(key, 0);
    return std::nullopt;
  }
  const auto v = r.require<std::string>(key);
  if (key == "spectral") {
    if (v != "finite" && v != "possibly unbounded") {
      r.fail(key, "spectral status must be finite or possibly unbounded");
    }
  } else if (v != "satisfied" && v != "violated" && v != "inconclusive") {
    r.fail(key, "verdict must be satisfied, violated or inconclusive");
  }
  return v;
}

ExperimentKind parse_kind(Reader& r) {
  const auto k = r.require<std::string>("experiment");
  if (k == "clt") return ExperimentKind::kClt;
  if (k == "variance-trace") return ExperimentKind::kVarianceTrace;
  if (k == "conditions") return ExperimentKind::kConditions;
  if (k == "counterexample") return ExperimentKind::kCounterexample;
  if (k == "lemmas") return ExperimentKind::kLemmas;
  r.fail("experiment", "unknown experiment '" + k +
                           "' (clt, variance-trace, conditions, counterexample, lemmas)");
}

}  // namespace

std::string_view to_string(ExperimentKind k) noexcept {
  switch (k) {
    case ExperimentKind::kClt:
      return "clt";
    case ExperimentKind::kVarianceTrace:
      return "variance-trace";
    case ExperimentKind::kConditions:
      return "conditions";
    case ExperimentKind::kCounterexample:
      return "counterexample";
    case ExperimentKind::kLemmas:
      return "lemmas";
  }
  return "clt";
}

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
  const Source src(text, source);
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    src.fail(src.line_at(e.byte == 0 ? 0 : e.byte - 1), "(document)", e.what());
  }
  Reader r(root, "", src);
  ExperimentConfig c;
  c.schema_version = r.require<int>("schema_version");
  if (c.schema_version != kSchemaVersion) {
    r.fail("schema_version", "unsupported schema version " + std::to_string(c.schema_version));
  }
  c.kind = parse_kind(r);
  c.replicates = r.get<std::int64_t>("replicates", c.replicates);
  if (c.replicates < 1) r.fail("replicates", "must be >= 1");
  c.seed = r.get<std::uint64_t>("seed", c.seed);

  if (r.has("n")) {
    const json& n = r.raw("n");
    if (n.is_number_integer()) {
      c.n.push_back(n.get<std::int64_t>());
    } else if (n.is_array()) {
      for (const auto& v : n) {
        if (!v.is_number_integer()) r.fail("n", "expected integers");
        c.n.push_back(v.get<std::int64_t>());
      }
    } else {
      r.fail("n", "expected an integer or a list of integers");
    }
    for (auto v : c.n) {
      if (v < 1) r.fail("n", "every n must be >= 1");
    }
  }

  if (r.has("tolerances")) {
    Reader t = r.object("tolerances");
    c.rel_tail_tol = t.get<double>("rel_tail_tol", c.rel_tail_tol);
    if (!(c.rel_tail_tol > 0.0 && c.rel_tail_tol < 1.0)) t.fail("rel_tail_tol", "must lie in (0, 1)");
    c.ks_threshold = t.get<double>("ks_threshold", c.ks_threshold);
    if (!(c.ks_threshold > 0.0 && c.ks_threshold <= 1.0)) t.fail("ks_threshold", "must lie in (0, 1]");
    if (t.has("variance_rel_tol")) c.variance_rel_tol = t.require<double>("variance_rel_tol");
    if (t.has("ratio_rel_tol")) c.ratio_rel_tol = t.require<double>("ratio_rel_tol");
    t.finish();
  }

  // The counterexample section feeds the model parser's cutoff default.
  if (r.has("counterexample")) {
    Reader ce = r.object("counterexample");
    c.psi = parse_psi(ce.object("psi"));
    c.cutoff = ce.get<std::int64_t>("cutoff", c.cutoff);
    ce.finish();
  }
  if (r.has("model")) c.model = parse_model(r.object("model"), c.cutoff);
  if (r.has("weights")) c.weights = parse_weights(r.object("weights"));

  if (r.has("target")) {
    const json& t = r.raw("target");
    if (!(t.is_string() && t.get<std::string>() == "auto")) {
      c.target = parse_target(Reader(t, "target", src));
    }
  }
  if (r.has("alternatives")) {
    const json& alts = r.raw("alternatives");
    if (!alts.is_array()) r.fail("alternatives", "expected an array");
    for (std::size_t i = 0; i < alts.size(); ++i) {
      Reader a(alts[i], "alternatives[" + std::to_string(i) + "]", src);
      AlternativeTarget alt;
      alt.target = parse_target(a.object("target"));
      alt.min_ks = a.get<double>("min_ks", alt.min_ks);
      a.finish();
      c.alternatives.push_back(std::move(alt));
    }
  }

  if (r.has("conditions")) {
    Reader cr = r.object("conditions");
    if (cr.has("expect")) {
      Reader e = cr.object("expect");
      for (const auto& [k, v] : cr.raw("expect").items()) {
        (void)v;
        if (auto verdict = parse_verdict(e, k)) c.expect[k] = *verdict;
      }
      e.finish();
    }
    c.integral_t = cr.get<double>("integral_t", c.integral_t);
    if (!(c.integral_t > 1.0)) cr.fail("integral_t", "must exceed 1");
    c.shells = cr.get<int>("shells", c.shells);
    if (c.shells < 8) cr.fail("shells", "need at least 8 shells");
    c.functional_n_cap = cr.get<int>("functional_n_cap", c.functional_n_cap);
    if (c.functional_n_cap < 1) cr.fail("functional_n_cap", "must be >= 1");
    c.series_cap = cr.get<std::int64_t>("series_cap", c.series_cap);
    if (c.series_cap < 1) cr.fail("series_cap", "must be >= 1");
    if (cr.has("mixingale")) {
      Reader m = cr.object("mixingale");
      MixingaleSpec spec;
      spec.q = parse_quantile(m.object("q"));
      spec.alpha = parse_alpha(m.object("alpha"));
      spec.k_cap = m.get<std::int64_t>("k_cap", spec.k_cap);
      if (spec.k_cap < 1) m.fail("k_cap", "must be >= 1");
      spec.family = m.get<std::string>("family", spec.family);
      if (spec.family != "alpha-bar" && spec.family != "alpha") {
        m.fail("family", "must be alpha-bar or alpha");
      }
      spec.expect = parse_verdict(m, "expect");
      m.finish();
      c.mixingale = spec;
    }
    if (cr.has("moment_form")) {
      const json& mf = cr.raw("moment_form");
      if (!mf.is_array()) cr.fail("moment_form", "expected an array");
      for (std::size_t i = 0; i < mf.size(); ++i) {
        Reader m(mf[i], "conditions.moment_form[" + std::to_string(i) + "]", src);
        MomentFormSpec spec;
        spec.t = m.require<double>("t");
        if (!(spec.t > 2.0)) m.fail("t", "must exceed 2");
        spec.alpha = parse_alpha(m.object("alpha"));
        spec.k_cap = m.get<std::int64_t>("k_cap", spec.k_cap);
        if (spec.k_cap < 1) m.fail("k_cap", "must be >= 1");
        spec.expect = parse_verdict(m, "expect");
        m.finish();
        c.moment_form.push_back(spec);
      }
    }
    cr.finish();
  }

  if (r.has("lemmas")) {
    Reader l = r.object("lemmas");
    c.block_size = l.get<std::int64_t>("block_size", c.block_size);
    if (c.block_size < 1) l.fail("block_size", "must be >= 1");
    c.property_instances = l.get<std::int64_t>("property_instances", c.property_instances);
    if (c.property_instances < 0) l.fail("property_instances", "must be >= 0");
    c.trend_max = l.get<double>("trend_max", c.trend_max);
    l.finish();
  }

  if (r.has("outputs")) {
    Reader o = r.object("outputs");
    c.report = o.get<std::string>("report", c.report);
    c.metadata = o.get<std::string>("metadata", c.metadata);
    c.trace_csv = o.get<std::string>("trace_csv", c.trace_csv);
    c.values_csv = o.get<std::string>("values_csv", c.values_csv);
    o.finish();
  }
  r.finish();

  // Cross-field requirements per experiment.
  auto need = [&](bool ok, const char* field, const char* why) {
    if (!ok) src.fail(src.line_of_key("experiment"), field, why);
  };
  switch (c.kind) {
    case ExperimentKind::kClt:
      need(c.model.has_value(), "model", "required for clt");
      need(c.weights.has_value(), "weights", "required for clt");
      need(!c.n.empty(), "n", "required for clt");
      break;
    case ExperimentKind::kVarianceTrace:
      need(c.model.has_value(), "model", "required for variance-trace");
      need(c.weights.has_value(), "weights", "required for variance-trace");
      need(!c.n.empty(), "n", "required for variance-trace");
      break;
    case ExperimentKind::kConditions:
      need(c.model.has_value() || c.mixingale.has_value() || !c.moment_form.empty(), "model",
           "conditions needs a model or a mixingale/moment_form section");
      break;
    case ExperimentKind::kCounterexample:
      need(c.psi.has_value(), "counterexample", "required for counterexample");
      break;
    case ExperimentKind::kLemmas:
      need(c.weights.has_value(), "weights", "required for lemmas");
      need(!c.n.empty(), "n", "required for lemmas");
      break;
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ":0: (document): cannot read file");
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str(), path.string());
}

std::string model_catalog() {
  return R"(models
  iid                 distribution: normal | rademacher | centered-uniform (unit variance)
  mds-product         xi_k = Z_k h(Z_{k-1}); h: {kind: tanh, scale (|scale| < 1, default 0.5)}
                      or {kind: table, knots: [..], values: [..]} (piecewise linear)
  causal-linear       xi_k = sum_{i>=0} u_i Y_{k-i}; coefficients:
                        {kind: geometric, ratio in (0,1)}
                        {kind: table, values: [u_0, u_1, ...] (>= 0)}
                        {kind: proposition3, psi: <null sequence>, cutoff}
  bernoulli-shift     xi_n = g(Y_n) - int g, Y_n = sum_k 2^{-k-1} eps_{n-k}; map: <map>, bit_depth (1..64, default 64)
  nonergodic-scale    xi_k = V N_k, V drawn once per path; components: [{probability, scale}, ...]

maps
  linear              x - 1/2
  square              x^2
  half-indicator      1{x<1/2} - 1/2
  oscillating         x^{-p}[1+log(2/x)]^{-a} sin(1/x); p in [0, 1/2], a >= 0 (a > 1/2 when p = 1/2)

weights
  partial-sum-delta   a_0 = 1
  power-decay         a_j = (1+j)^{-exponent}, j >= 0; exponent > 1/2
  geometric           a_j = ratio^j, j >= 0; ratio in (0,1)
  finite-support      offset, values: [a_offset, a_{offset+1}, ...]

null sequences (psi)
  inverse-log         1/log(n+shift), shift > 1 (default 2)
  power               scale * n^{-exponent}
  zero                0

alpha sequences
  power               c k^{-exponent}
  geometric           c ratio^k
  m-dependent         c for k <= m, 0 afterwards
  zero                0

quantile functions
  constant            Q(u) = c
  power               Q(u) = c u^{-exponent}, 0 <= exponent < 1/2
)";
}

}  // namespace lpclt::cli
