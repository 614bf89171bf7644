#include "lpclt/cli/report_json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace lpclt::cli {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

Json trace(const std::vector<std::pair<std::int64_t, double>>& xs) {
  Json out = Json::array();
  for (const auto& [k, v] : xs) out.push_back(Json::array({k, number(v)}));
  return out;
}

std::string_view iid_name(innovations::IidDistribution d) {
  switch (d) {
    case innovations::IidDistribution::kNormal:
      return "normal";
    case innovations::IidDistribution::kRademacher:
      return "rademacher";
    case innovations::IidDistribution::kCenteredUniform:
      return "centered-uniform";
  }
  return "normal";
}

}  // namespace

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json to_json(const harness::CltReport& r) {
  Json j;
  j["n"] = r.n;
  j["replicates"] = r.replicates;
  j["empirical_mean"] = number(r.empirical_mean);
  j["empirical_variance"] = number(r.empirical_variance);
  j["ks_distance"] = number(r.ks_distance);
  j["ks_threshold"] = number(r.ks_threshold);
  j["target"] = target_json(harness::MixtureCdf(r.target));
  j["pass"] = r.pass;
  return j;
}

Json to_json(const harness::VarianceRatio& v) {
  return Json{{"ratio", number(v.ratio)}, {"ci_halfwidth", number(v.ci_halfwidth)}};
}

Json to_json(const conditions::ConditionReport& r) {
  Json j;
  j["condition_id"] = r.condition_id;
  j["verdict"] = std::string(conditions::to_string(r.verdict));
  j["value"] = r.value ? number(*r.value) : Json(nullptr);
  j["tail_bound"] = number(r.tail_bound);
  j["partial_sums"] = trace(r.partial_sums);
  j["notes"] = r.notes;
  return j;
}

Json to_json(const spectral::LongRunVariance& lrv) {
  Json j;
  j["status"] = lrv.finite() ? "finite" : "possibly unbounded";
  j["value"] = lrv.finite() ? number(lrv.value) : Json(nullptr);
  j["error_bound"] = number(lrv.error_bound);
  j["partial_sums"] = trace(lrv.partial_sums);
  return j;
}

Json to_json(const innovations::Prop3InvariantCheck& c) {
  return Json{{"gap", c.gap},
              {"level", c.level},
              {"piecewise", c.piecewise},
              {"all", c.all()},
              {"detail", c.detail}};
}

Json to_json(const weights::PropertySummary& s) {
  return Json{{"instances", s.instances},
              {"failures", s.failures},
              {"max_ratio", number(s.max_ratio)},
              {"first_failure", s.first_failure}};
}

Json target_json(const harness::Target& t) {
  Json comps = Json::array();
  for (const auto& c : t.components()) {
    comps.push_back(Json{{"weight", number(c.weight)}, {"variance", number(c.variance)}});
  }
  return Json{{"components", comps}, {"variance", number(t.variance())}};
}

Json describe(const innovations::InnovationModel& m) {
  using namespace innovations;
  Json j;
  j["kind"] = std::string(m.kind_name());
  std::visit(Overloaded{
                 [&](const IidModel& x) { j["distribution"] = std::string(iid_name(x.distribution)); },
                 [&](const MdsProductModel& x) {
                   if (x.h.is_tanh()) {
                     j["h"] = Json{{"kind", "tanh"}, {"scale", x.h.scale()}};
                   } else {
                     j["h"] = Json{{"kind", "table"}, {"knots", x.h.knots()}, {"values", x.h.values()}};
                   }
                 },
                 [&](const CausalLinearModel& x) {
                   Json c;
                   c["kind"] = std::string(x.u.kind_name());
                   std::visit(Overloaded{
                                  [&](const GeometricCoefficients& g) { c["ratio"] = g.ratio; },
                                  [&](const TableCoefficients& t) { c["values"] = t.values; },
                                  [&](const Prop3Coefficients& p) {
                                    c["psi"] = p->psi.describe();
                                    c["cutoff"] = p->cutoff;
                                    c["block_ends"] = p->n;
                                    c["materialized_length"] = p->materialized_length();
                                  },
                              },
                              x.u.kind());
                   j["coefficients"] = c;
                 },
                 [&](const BernoulliShiftModel& x) {
                   j["map"] = Json{{"name", x.map.name()}, {"expression", x.map.expression()}};
                   j["bit_depth"] = x.bit_depth;
                 },
                 [&](const NonergodicScaleModel& x) {
                   Json cs = Json::array();
                   for (const auto& c : x.components) {
                     cs.push_back(Json{{"probability", c.probability}, {"scale", c.scale}});
                   }
                   j["components"] = cs;
                 },
             },
             m.kind());
  return j;
}

Json describe(const weights::WeightSequence& w) {
  using namespace weights;
  Json j;
  j["kind"] = std::string(w.kind_name());
  std::visit(Overloaded{
                 [&](const FiniteSupport& x) {
                   j["offset"] = x.offset;
                   j["values"] = x.values;
                 },
                 [&](const PowerDecay& x) { j["exponent"] = x.exponent; },
                 [&](const Geometric& x) { j["ratio"] = x.ratio; },
                 [&](const PartialSumDelta&) {},
             },
             w.kind());
  return j;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  char buf[64];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace lpclt::cli
