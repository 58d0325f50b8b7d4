#include "commands.hpp"

#include <stlasso/evaluate.hpp>
#include <stlasso/fourier.hpp>
#include <stlasso/inference.hpp>
#include <stlasso/io.hpp>
#include <stlasso/serialize.hpp>
#include <stlasso/version.hpp>

#include <Eigen/Core>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace stlasso::cli {

namespace {

namespace fs = std::filesystem;

// Simulated panels are stamped from this hour (2020-01-01T00:00:00).
constexpr std::int64_t kSimulationStart = 438288;

std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Collects outputs and writes manifest.json last.
class Run {
 public:
  Run(const RunConfig& cfg, std::string command) : cfg_(cfg), command_(std::move(command)) {
    fs::create_directories(cfg_.out);
  }

  void input(const std::string& path) {
    const std::string bytes = slurp(path);
    inputs_.push_back(Json{{"path", path}, {"bytes", bytes.size()}, {"fnv1a64", fnv1a64(bytes)}});
  }

  void output(const std::string& name, const std::string& content) {
    const fs::path path = fs::path(cfg_.out) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed for " + path.string());
    outputs_.push_back(Json{{"file", name}, {"bytes", content.size()}, {"fnv1a64", fnv1a64(content)}});
  }

  void warn(const std::string& message) {
    std::cerr << "warning: " << message << '\n';
    warnings_.push_back(message);
  }

  void finish() {
    Json m;
    m["tool"] = "stlasso";
    m["version"] = version();
    m["command"] = command_;
    m["seed"] = cfg_.seed;
    m["threads"] = cfg_.threads;
    m["config"] = cfg_.to_json();
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    m["warnings"] = warnings_;
    m["build"] = Json{{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                    "." + std::to_string(EIGEN_MINOR_VERSION)},
                      {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                   std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                   std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                      {"compiler", __VERSION__}};
    const fs::path path = fs::path(cfg_.out) / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    out << m.dump(2) << '\n';
    if (!out) throw Error("cannot write " + path.string());
  }

 private:
  const RunConfig& cfg_;
  std::string command_;
  Json inputs_ = Json::array();
  Json outputs_ = Json::array();
  Json warnings_ = Json::array();
};

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions o = cfg.solver;
  o.lags = cfg.lags;
  o.seed = cfg.seed;
  return o;
}

struct LoadedPanel {
  PanelData panel;
  std::vector<std::string> ids;
  std::vector<std::string> regressors;
  std::int64_t start = 0;
};

LoadedPanel load_panel(const RunConfig& cfg, Run& run) {
  if (cfg.data.panel.empty()) throw ConfigError("no input panel (use --panel or data.panel)");
  IngestOptions io;
  io.completeness_threshold = cfg.data.completeness;
  if (cfg.data.start) io.start = parse_timestamp(*cfg.data.start);
  if (cfg.data.end) io.end = parse_timestamp(*cfg.data.end);
  run.input(cfg.data.panel);
  IngestResult ing = ingest_files({cfg.data.panel}, io);
  for (const auto& r : ing.report) {
    if (!r.kept) {
      run.warn("station " + r.id + " dropped: completeness " + format_double(r.completeness) + " below " +
               format_double(cfg.data.completeness));
    }
  }

  LoadedPanel lp;
  lp.ids = ing.station_ids;
  lp.start = ing.start_hour;
  lp.regressors = ing.regressor_names;
  lp.panel = std::move(ing.panel);
  if (cfg.fourier.enabled || cfg.fourier.intercept) {
    std::vector<double> periods;
    if (cfg.fourier.enabled) {
      for (const auto& f : cfg.fourier.frequencies) periods.push_back(named_period(f));
      periods.insert(periods.end(), cfg.fourier.extra_periods.begin(), cfg.fourier.extra_periods.end());
    }
    const Index n = lp.panel.n();
    const Index T = lp.panel.T();
    const auto design = fourier_design(T, lp.start, n, periods);
    const Index k0 = lp.panel.k();
    const Index extra = (cfg.fourier.intercept ? 1 : 0) + static_cast<Index>(2 * periods.size());
    std::vector<Matrix> x(static_cast<std::size_t>(T), Matrix(n, k0 + extra));
    for (Index t = 0; t < T; ++t) {
      auto& xt = x[static_cast<std::size_t>(t)];
      if (k0 > 0) xt.leftCols(k0) = lp.panel.x[static_cast<std::size_t>(t)];
      Index c = k0;
      if (cfg.fourier.intercept) xt.col(c++).setOnes();
      xt.rightCols(extra - (c - k0)) = design[static_cast<std::size_t>(t)];
    }
    if (cfg.fourier.intercept) lp.regressors.push_back("intercept");
    for (auto& name : fourier_names(periods)) lp.regressors.push_back(std::move(name));
    lp.panel = PanelData(lp.panel.y, std::move(x));
  }
  lp.panel.validate(cfg.lags);
  return lp;
}

FitResult load_fit(const RunConfig& cfg, Run& run) {
  if (cfg.fit.empty()) throw ConfigError("no fit result given (use --fit)");
  run.input(cfg.fit);
  return fit_result_from_json(slurp(cfg.fit));
}

PenaltyConfig required_penalty(const RunConfig& cfg, const char* command) {
  if (!cfg.penalty) {
    throw ConfigError(std::string(command) + " needs a penalty (--lambda1/2/3 or penalty in the config)");
  }
  return *cfg.penalty;
}

void report_fit(const FitResult& f) {
  std::cout << "objective " << format_double(f.objective) << ", loglik " << format_double(f.loglik) << ", "
            << f.iterations << " iterations, " << f.message << ", " << f.active_sets.count()
            << " nonzero coefficients\n";
}

}  // namespace

void run_simulate(const RunConfig& cfg) {
  Run run(cfg, "simulate");
  DgpConfig dgp = cfg.dgp;
  dgp.seed = cfg.seed;
  dgp.lags = cfg.lags;
  const ModelParams truth = make_true_params(dgp);
  const PanelData panel = simulate_panel(truth, dgp);
  std::vector<std::string> ids;
  for (Index i = 0; i < panel.n(); ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "s%03d", static_cast<int>(i + 1));
    ids.emplace_back(buf);
  }
  std::ostringstream csv;
  write_panel_csv(csv, panel, ids, kSimulationStart);
  run.output("panel.csv", csv.str());
  run.output("truth.json", params_to_json(truth));
  run.finish();
  std::cout << "simulated n=" << panel.n() << " T=" << panel.T() << " k=" << panel.k() << '\n';
}

void run_fit(const RunConfig& cfg) {
  Run run(cfg, "fit");
  const LoadedPanel lp = load_panel(cfg, run);
  const FitResult f = fit(lp.panel, required_penalty(cfg, "fit"), solver_options(cfg));
  if (!f.feasible) run.warn("fit is not feasible: " + f.message);
  run.output("fit_result.json", fit_result_to_json(f));
  run.finish();
  report_fit(f);
}

void run_cv(const RunConfig& cfg) {
  Run run(cfg, "cv");
  const LoadedPanel lp = load_panel(cfg, run);
  CvPlan plan = cfg.plan();
  plan.refit_full = true;
  const GridSearchResult gs = grid_search(lp.panel, plan, solver_options(cfg), cfg.threads);
  std::ostringstream table;
  write_cv_table_csv(table, gs);
  run.output("cv_scores.csv", table.str());
  run.output("fit_result.json", fit_result_to_json(*gs.full_fit));
  run.finish();
  std::cout << "best lambda (" << format_double(gs.best.lambda1) << ", " << format_double(gs.best.lambda2) << ", "
            << format_double(gs.best.lambda3) << "), cv rmse " << format_double(gs.best_score) << '\n';
  report_fit(*gs.full_fit);
}

void run_mc(const RunConfig& cfg) {
  Run run(cfg, "mc");
  std::vector<McConfig> configs;
  std::vector<McResult> results;
  std::ostringstream records;
  for (int side : cfg.mc.sides) {
    for (Index T : cfg.mc.Ts) {
      McConfig mc;
      mc.dgp = cfg.dgp;
      mc.dgp.side = side;
      mc.dgp.T = T;
      mc.dgp.seed = cfg.seed;
      mc.dgp.lags = cfg.lags;
      mc.reps = cfg.mc.reps;
      mc.opts = solver_options(cfg);
      mc.threads = cfg.threads;
      if (cfg.mc.use_cv) mc.plan = cfg.plan();
      else mc.penalty = required_penalty(cfg, "mc with mode=fixed");
      McResult res = monte_carlo(mc);
      write_mc_records_jsonl(records, mc, res, cfg.mc.timing);
      std::cout << "n=" << mc.dgp.n() << " T=" << T << ": " << res.summary.reps_ok << " ok, "
                << res.summary.reps_failed << " failed\n";
      configs.push_back(std::move(mc));
      results.push_back(std::move(res));
    }
  }
  std::ostringstream table;
  write_mc_table_csv(table, configs, results, cfg.mc.timing);
  run.output("mc_table.csv", table.str());
  run.output("mc_records.jsonl", records.str());
  run.finish();
}

void run_infer(const RunConfig& cfg) {
  Run run(cfg, "infer");
  const FitResult selected = load_fit(cfg, run);
  const LoadedPanel lp = load_panel(cfg, run);
  check_compatible(selected.params, lp.panel);
  const InferenceResult r = infer(lp.panel, selected.params, cfg.tau, solver_options(cfg), cfg.threads);
  if (!r.hessian_ok) run.warn("observed information is not positive definite; standard errors omitted");
  for (const auto& name : r.excluded) run.warn(name + " is on a constraint boundary and was left out of the Hessian");

  // Regressor names replace beta[j] labels when the panel carries them.
  InferenceResult labelled = r;
  for (auto& name : labelled.names) {
    if (name.rfind("beta[", 0) != 0) continue;
    const auto j = static_cast<std::size_t>(std::stoul(name.substr(5)));
    if (j < lp.regressors.size()) name = lp.regressors[j];
  }
  std::ostringstream csv;
  write_inference_csv(csv, labelled);
  run.output("inference.csv", csv.str());

  const Matrix omega = precision_diagnostic(r.estimates);
  std::ostringstream prec;
  prec << "station_id";
  for (const auto& id : lp.ids) prec << ',' << id;
  prec << '\n';
  for (Index i = 0; i < omega.rows(); ++i) {
    prec << lp.ids[static_cast<std::size_t>(i)];
    for (Index j = 0; j < omega.cols(); ++j) prec << ',' << format_double(omega(i, j));
    prec << '\n';
  }
  run.output("precision.csv", prec.str());
  run.output("refit_params.json", params_to_json(r.estimates));
  run.finish();
  std::cout << r.theta.size() << " parameters, hessian " << (r.hessian_ok ? "ok" : "not positive definite") << '\n';
}

void run_compare(const RunConfig& cfg) {
  Run run(cfg, "compare");
  const LoadedPanel lp = load_panel(cfg, run);
  FitResult st;
  if (!cfg.fit.empty()) {
    st = load_fit(cfg, run);
    check_compatible(st.params, lp.panel);
  } else if (cfg.penalty) {
    st = fit(lp.panel, *cfg.penalty, solver_options(cfg));
    run.output("fit_result.json", fit_result_to_json(st));
  } else {
    CvPlan plan = cfg.plan();
    plan.refit_full = true;
    st = *grid_search(lp.panel, plan, solver_options(cfg), cfg.threads).full_fit;
    run.output("fit_result.json", fit_result_to_json(st));
  }
  std::vector<BaselineResult> rows{fit_ols(lp.panel, cfg.lags), fit_var1(lp.panel, cfg.lags),
                                   summarize_fit(lp.panel, st)};
  for (const auto& r : rows)
    if (r.rank_deficient) run.warn(r.model + " design is rank deficient; minimum-norm solution used");
  std::ostringstream csv;
  write_comparison_csv(csv, rows);
  run.output("comparison.csv", csv.str());
  run.finish();
  for (const auto& r : rows) {
    std::cout << r.model << ": mse " << format_double(r.mse) << ", aic " << format_double(r.aic) << ", bic "
              << format_double(r.bic) << '\n';
  }
}

void run_check(const RunConfig& cfg) {
  Run run(cfg, "check");
  const ModelParams p = load_fit(cfg, run).params;
  const StationarityReport s = stationarity_check(p);
  const auto violations = invariant_violations(p, cfg.solver.row_margin);
  Json doc{{"n", p.n()},
           {"k", p.k()},
           {"lags", p.lags()},
           {"stationary", s.stationary},
           {"norm_value", std::isfinite(s.norm_value) ? Json(s.norm_value) : Json(nullptr)},
           {"invertible", s.invertible},
           {"max_row_sum", s.max_row_sum},
           {"max_phi_sum", s.max_phi_sum},
           {"row_sum_ok", s.row_sum_ok},
           {"phi_sum_ok", s.phi_sum_ok},
           {"violations", violations},
           {"feasible", violations.empty() && s.stationary}};
  run.output("check.json", doc.dump(2) + "\n");
  run.finish();
  std::cout << (violations.empty() && s.stationary ? "feasible" : "not feasible") << ", stability norm "
            << (std::isfinite(s.norm_value) ? format_double(s.norm_value) : "inf") << '\n';
  for (const auto& v : violations) std::cout << "  " << v << '\n';
}

}  // namespace stlasso::cli
