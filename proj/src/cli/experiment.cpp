#include "lpclt/cli/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

#include "lpclt/numeric.hpp"

namespace lpclt::cli {

namespace {

std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

class Runner {
 public:
  Runner(const ExperimentConfig& c, const RunOptions& o)
      : c_(c), o_(o), seed_(o.seed.value_or(c.seed)) {}

  RunResult run() {
    report_["schema_version"] = kSchemaVersion;
    report_["experiment"] = std::string(to_string(c_.kind));
    report_["seed"] = seed_;
    if (c_.model) report_["model"] = describe(*c_.model);
    if (c_.weights) report_["weights"] = describe(*c_.weights);
    switch (c_.kind) {
      case ExperimentKind::kClt:
        clt();
        break;
      case ExperimentKind::kVarianceTrace:
        variance_trace();
        break;
      case ExperimentKind::kConditions:
        conditions_run();
        break;
      case ExperimentKind::kCounterexample:
        counterexample();
        break;
      case ExperimentKind::kLemmas:
        lemmas();
        break;
    }
    Json checks = Json::array();
    bool all = true;
    for (const auto& ch : result_.checks) {
      checks.push_back(Json{{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
      all = all && ch.passed;
    }
    report_["checks"] = checks;
    report_["pass"] = all;
    result_.exit_code = all ? kExitOk : kExitCheckFailed;
    result_.report = report_;
    if (o_.write_files) write_json(o_.out_dir / c_.report, report_);
    return result_;
  }

 private:
  void check(std::string name, bool passed, std::string detail) {
    result_.checks.push_back({std::move(name), passed, std::move(detail)});
  }

  std::filesystem::path out(const std::string& name) const { return o_.out_dir / name; }

  // name.ext -> name_n<N>.ext when several n share one output.
  std::string per_n(const std::string& name, std::int64_t n) const {
    if (c_.n.size() <= 1) return name;
    const auto dot = name.rfind('.');
    const std::string tag = "_n" + std::to_string(n);
    return dot == std::string::npos ? name + tag : name.substr(0, dot) + tag + name.substr(dot);
  }

  std::int64_t autocov_lags() const {
    std::int64_t k = 4096;
    if (auto* cl = std::get_if<innovations::CausalLinearModel>(&c_.model->kind())) {
      k = std::min(k, cl->u.known_length() - 1);
    }
    return k;
  }

  void expect(const std::map<std::string, std::string>& expected, const Json& reports,
              const std::optional<std::string>& spectral_status) {
    for (const auto& [id, want] : expected) {
      std::optional<std::string> got;
      if (id == "spectral") {
        got = spectral_status;
      } else {
        for (const auto& r : reports) {
          if (r["condition_id"] == id) got = r["verdict"].get<std::string>();
        }
      }
      if (!got) {
        check(id, false, "expected " + want + ", condition not evaluated");
      } else {
        check(id, *got == want, "expected " + want + ", got " + *got);
      }
    }
  }

  void clt() {
    const harness::Target target = c_.target ? *c_.target : harness::default_target(*c_.model);
    report_["target"] = target_json(target);
    Json runs = Json::array();
    for (std::int64_t n : c_.n) {
      harness::SimulationConfig sc;
      sc.model = *c_.model;
      sc.weights = *c_.weights;
      sc.n = n;
      sc.replicates = c_.replicates;
      sc.master_seed = seed_;
      sc.rel_tail_tol = c_.rel_tail_tol;
      sc.target = target;
      sc.ks_threshold = c_.ks_threshold;
      sc.workers = o_.workers;
      const auto values = harness::replicate_values(sc);
      const auto rep = harness::clt_report(sc, values);
      Json j = to_json(rep);
      const std::string tag = "n=" + std::to_string(n);
      check("clt " + tag, rep.pass,
            "KS " + fmt(rep.ks_distance) + " vs threshold " + fmt(rep.ks_threshold));

      if (values.size() >= 30) {
        const auto vr = harness::variance_ratio_from(values);
        j["variance_ratio"] = to_json(vr);
        if (c_.variance_rel_tol) {
          const double rel = std::fabs(vr.ratio - target.variance()) / target.variance();
          check("variance-ratio " + tag, rel <= *c_.variance_rel_tol,
                "empirical " + fmt(vr.ratio) + ", target " + fmt(target.variance()) +
                    ", rel err " + fmt(rel) + " (tol " + fmt(*c_.variance_rel_tol) + ")");
        }
      }
      if (c_.ratio_rel_tol) {
        const auto g = spectral::autocovariance(*c_.model, autocov_lags());
        const std::int64_t ns[] = {n};
        const auto p = spectral::variance_ratio_trace(*c_.weights, g, ns, c_.rel_tail_tol).front();
        const double rel = std::fabs(p.ratio - target.variance()) / target.variance();
        j["analytic_ratio"] = number(p.ratio);
        check("analytic-ratio " + tag, rel <= *c_.ratio_rel_tol,
              "Var(S_n)/b_n^2 " + fmt(p.ratio) + ", target " + fmt(target.variance()) +
                  ", rel err " + fmt(rel) + " (tol " + fmt(*c_.ratio_rel_tol) + ")");
      }
      Json alts = Json::array();
      for (std::size_t i = 0; i < c_.alternatives.size(); ++i) {
        const auto& alt = c_.alternatives[i];
        const double ks = harness::ks_distance(values, [&](double x) { return alt.target(x); });
        alts.push_back(Json{{"target", target_json(alt.target)},
                            {"ks_distance", number(ks)},
                            {"min_ks", number(alt.min_ks)}});
        check("separation " + tag + " alt " + std::to_string(i), ks > alt.min_ks,
              "KS vs alternative " + fmt(ks) + " must exceed " + fmt(alt.min_ks));
      }
      j["alternatives"] = alts;
      runs.push_back(j);
      if (o_.write_files && !c_.values_csv.empty()) {
        std::vector<std::vector<double>> rows;
        rows.reserve(values.size());
        for (double v : values) rows.push_back({v});
        write_csv(out(per_n(c_.values_csv, n)), {"value"}, rows);
      }
    }
    report_["runs"] = runs;
  }

  void variance_trace() {
    const auto g = spectral::autocovariance(*c_.model, autocov_lags());
    const auto lrv = spectral::long_run_variance(g);
    report_["long_run_variance"] = to_json(lrv);
    std::optional<double> target;
    if (c_.target) {
      target = c_.target->variance();
    } else if (lrv.finite()) {
      target = lrv.value;
    }
    const auto trace = spectral::variance_ratio_trace(*c_.weights, g, c_.n, c_.rel_tail_tol);
    Json rows_json = Json::array();
    std::vector<std::vector<double>> rows;
    for (const auto& p : trace) {
      const double t = target.value_or(std::nan(""));
      const double rel = std::fabs(p.ratio - t) / t;
      rows.push_back({static_cast<double>(p.n), p.ratio, t, rel});
      rows_json.push_back(Json{{"n", p.n},
                               {"var_sn", number(p.var_sn)},
                               {"bn_sq", number(p.bn_sq)},
                               {"ratio", number(p.ratio)},
                               {"rel_err", number(rel)}});
    }
    report_["trace"] = rows_json;
    report_["target_variance"] = target ? number(*target) : Json(nullptr);
    if (o_.write_files) write_csv(out(c_.trace_csv), {"n", "ratio", "target", "rel_err"}, rows);
    if (c_.ratio_rel_tol) {
      if (!target) {
        check("analytic-ratio", false, "no finite target variance");
      } else {
        const auto& last = trace.back();
        const double rel = std::fabs(last.ratio - *target) / *target;
        check("analytic-ratio n=" + std::to_string(last.n), rel <= *c_.ratio_rel_tol,
              "Var(S_n)/b_n^2 " + fmt(last.ratio) + ", target " + fmt(*target) + ", rel err " +
                  fmt(rel) + " (tol " + fmt(*c_.ratio_rel_tol) + ")");
      }
    }
  }

  // Spectral status for a model, or empty when autocovariances are not
  // certified for it.
  std::optional<std::string> spectral_section(const innovations::InnovationModel& m,
                                              std::int64_t k_max) {
    try {
      const auto g = spectral::autocovariance(m, k_max);
      const auto lrv = spectral::long_run_variance(g);
      Json s = to_json(lrv);
      s["covariance_partial_sums"] = Json::array();
      for (const auto& [k, v] : spectral::covariance_partial_sums(g)) {
        s["covariance_partial_sums"].push_back(Json::array({k, number(v)}));
      }
      report_["spectral"] = s;
      return s["status"].get<std::string>();
    } catch (const CertificationError& e) {
      report_["spectral"] = Json{{"status", "inconclusive"}, {"notes", e.what()}};
      return "inconclusive";
    }
  }

  void conditions_run() {
    Json reports = Json::array();
    std::optional<std::string> spectral_status;
    if (c_.model) {
      const auto& m = *c_.model;
      reports.push_back(to_json(conditions::gamma_report(m)));
      reports.push_back(to_json(conditions::cesaro_report(m)));
      reports.push_back(to_json(conditions::projective_sum(m)));
      reports.push_back(to_json(conditions::maxwell_woodroofe_sum(m, c_.series_cap)));
      if (c_.psi) {
        reports.push_back(to_json(conditions::maxwell_woodroofe_weighted(m, *c_.psi, c_.series_cap)));
      }
      if (auto* b = std::get_if<innovations::BernoulliShiftModel>(&m.kind())) {
        reports.push_back(to_json(conditions::functional_iid_sum(b->map, c_.functional_n_cap)));
        reports.push_back(
            to_json(conditions::bernoulli_integral_11(b->map, c_.integral_t, c_.shells)));
      }
      spectral_status = spectral_section(m, autocov_lags());
    }
    if (c_.mixingale) {
      const auto& mx = *c_.mixingale;
      const auto r = conditions::mixingale_integral_13(mx.q, mx.alpha, mx.k_cap, mx.family);
      Json j = to_json(r);
      j["q"] = mx.q.describe();
      j["alpha"] = mx.alpha.describe();
      reports.push_back(j);
      if (mx.expect) {
        const std::string got(conditions::to_string(r.verdict));
        check("mixingale-integral", got == *mx.expect, "expected " + *mx.expect + ", got " + got);
      }
    }
    for (std::size_t i = 0; i < c_.moment_form.size(); ++i) {
      const auto& mf = c_.moment_form[i];
      const auto r = conditions::moment_form_sufficient(mf.t, mf.alpha, mf.k_cap);
      Json j = to_json(r);
      j["t"] = mf.t;
      j["alpha"] = mf.alpha.describe();
      reports.push_back(j);
      if (mf.expect) {
        const std::string got(conditions::to_string(r.verdict));
        check("moment-form[" + std::to_string(i) + "] " + mf.alpha.describe(), got == *mf.expect,
              "expected " + *mf.expect + ", got " + got);
      }
    }
    report_["conditions"] = reports;
    expect(c_.expect, reports, spectral_status);
  }

  void counterexample() {
    const auto construction = innovations::proposition3_weights(*c_.psi, c_.cutoff);
    const auto inv = innovations::verify_invariants(construction);
    const auto model = innovations::InnovationModel::causal_linear(
        innovations::CausalCoefficients::proposition3(construction));
    const std::int64_t len = construction.materialized_length();
    report_["model"] = describe(model);
    report_["construction"] = Json{{"psi", c_.psi->describe()},
                                   {"cutoff", c_.cutoff},
                                   {"block_ends", construction.n},
                                   {"materialized_length", len},
                                   {"unmaterialized_sq_bound", number(construction.unmaterialized_sq_bound())}};
    report_["invariants"] = to_json(inv);
    check("invariants", inv.all(), inv.detail.empty() ? "gap, level and piecewise hold" : inv.detail);

    Json reports = Json::array();
    reports.push_back(to_json(conditions::projective_sum(model)));
    reports.push_back(to_json(conditions::maxwell_woodroofe_sum(model, len)));
    reports.push_back(to_json(conditions::maxwell_woodroofe_weighted(model, *c_.psi, len)));
    reports.push_back(to_json(conditions::gamma_report(model)));
    reports.push_back(to_json(conditions::cesaro_report(model)));
    report_["conditions"] = reports;
    const auto status = spectral_section(model, std::min<std::int64_t>(len - 1, 1 << 16));
    expect(c_.expect, reports, status);
  }

  void lemmas() {
    std::vector<std::vector<double>> rows;
    Json trace = Json::array();
    for (std::int64_t n : c_.n) {
      const auto w = weights::window_coefficients(*c_.weights, n, c_.rel_tail_tol);
      const auto sr = weights::smoothness_ratios(w);
      const auto ba = weights::block_averages(w, c_.block_size);
      rows.push_back({static_cast<double>(n), sr.r1, sr.r2, ba.s1, ba.s2});
      trace.push_back(Json{{"n", n},
                           {"r1", number(sr.r1)},
                           {"r2", number(sr.r2)},
                           {"s1", number(ba.s1)},
                           {"s2", number(ba.s2)},
                           {"support", w.size()},
                           {"tail_bound", number(w.tail_bound)}});
    }
    report_["block_size"] = c_.block_size;
    report_["trace"] = trace;
    if (o_.write_files) write_csv(out(c_.trace_csv), {"n", "r1", "r2", "s1", "s2"}, rows);

    for (std::size_t col : {std::size_t{1}, std::size_t{3}}) {
      const std::string name = col == 1 ? "r1" : "s1";
      bool decreasing = true;
      for (std::size_t i = 1; i < rows.size(); ++i) decreasing = decreasing && rows[i][col] < rows[i - 1][col];
      check(name + " decreasing", decreasing,
            "from " + fmt(rows.front()[col]) + " to " + fmt(rows.back()[col]) + " over " +
                std::to_string(rows.size()) + " values of n");
      check(name + " final", rows.back()[col] < c_.trend_max,
            fmt(rows.back()[col]) + " < " + fmt(c_.trend_max));
    }

    const auto wu = weights::wu_property_suite(c_.property_instances, seed_);
    const auto cov = spectral::covariance_bound_suite(c_.property_instances, seed_);
    report_["wu_inequality"] = to_json(wu);
    report_["covariance_bound"] = to_json(cov);
    check("wu-inequality", wu.failures == 0,
          std::to_string(wu.failures) + " failures in " + std::to_string(wu.instances) +
              " instances, max lhs/rhs " + fmt(wu.max_ratio));
    check("covariance-bound", cov.failures == 0,
          std::to_string(cov.failures) + " failures in " + std::to_string(cov.instances) +
              " instances, max lhs/rhs " + fmt(cov.max_ratio));
  }

  const ExperimentConfig& c_;
  const RunOptions& o_;
  std::uint64_t seed_;
  Json report_ = Json::object();
  RunResult result_;
};

}  // namespace

std::string format_check(const Check& c) {
  return std::string(c.passed ? "PASS " : "FAIL ") + c.name + ": " + c.detail;
}

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  try {
    if (options.write_files) std::filesystem::create_directories(options.out_dir);
    const auto start = std::chrono::steady_clock::now();
    RunResult r = Runner(config, options).run();
    if (options.write_files) {
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
      const std::time_t now = std::time(nullptr);
      char stamp[32];
      std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
      write_json(options.out_dir / config.metadata,
                 Json{{"runtime_ms", ms}, {"timestamp", stamp}, {"workers", options.workers}});
    }
    return r;
  } catch (const CertificationError& e) {
    RunResult r;
    r.exit_code = kExitCertification;
    r.error = std::string("certification failure: ") + e.what();
    return r;
  } catch (const PreconditionError& e) {
    RunResult r;
    r.exit_code = kExitConfigError;
    r.error = std::string("invalid configuration: ") + e.what();
    return r;
  } catch (const ConfigError& e) {
    RunResult r;
    r.exit_code = kExitConfigError;
    r.error = e.what();
    return r;
  }
}

}  // namespace lpclt::cli
