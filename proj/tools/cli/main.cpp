// stlasso command-line interface.
//
// Exit codes: 0 success, 1 computational failure, 2 usage or configuration error.

#include "commands.hpp"
#include "config.hpp"

#include <stlasso/errors.hpp>
#include <stlasso/version.hpp>

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <optional>

namespace {

using stlasso::cli::RunConfig;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  std::optional<int> lags;
  std::optional<std::string> panel;
  std::optional<std::string> fit;
  std::optional<double> lambda1, lambda2, lambda3;
  std::optional<int> side;
  std::optional<stlasso::Index> T;
  std::optional<double> rho;
  std::optional<stlasso::Index> burn_in;
  std::optional<int> reps;
  std::vector<int> sides;
  std::vector<stlasso::Index> Ts;
  std::optional<std::string> mode;
  std::optional<double> tau;
  bool fourier = false;
  bool timing = false;
};

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : stlasso::cli::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.out) cfg.out = *o.out;
  if (o.lags) cfg.lags = *o.lags;
  if (o.panel) cfg.data.panel = *o.panel;
  if (o.fit) cfg.fit = *o.fit;
  if (o.lambda1 || o.lambda2 || o.lambda3) {
    stlasso::PenaltyConfig p = cfg.penalty.value_or(stlasso::PenaltyConfig{});
    if (o.lambda1) p.lambda1 = *o.lambda1;
    if (o.lambda2) p.lambda2 = *o.lambda2;
    if (o.lambda3) p.lambda3 = *o.lambda3;
    cfg.penalty = p;
  }
  if (o.side) cfg.dgp.side = *o.side;
  if (o.T) cfg.dgp.T = *o.T;
  if (o.rho) cfg.dgp.rho = *o.rho;
  if (o.burn_in) cfg.dgp.burn_in = *o.burn_in;
  if (o.reps) cfg.mc.reps = *o.reps;
  if (!o.sides.empty()) cfg.mc.sides = o.sides;
  if (!o.Ts.empty()) cfg.mc.Ts = o.Ts;
  if (o.mode) {
    if (*o.mode != "cv" && *o.mode != "fixed") throw stlasso::ConfigError("--mode must be cv or fixed");
    cfg.mc.use_cv = *o.mode == "cv";
  }
  if (o.tau) cfg.tau = *o.tau;
  if (o.fourier) cfg.fourier.enabled = true;
  if (o.timing) cfg.mc.timing = true;
  if (cfg.threads < 1) throw stlasso::ConfigError("--threads must be >= 1");
  if (cfg.lags < 1) throw stlasso::ConfigError("lags must be >= 1");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse spatial weight matrix estimation for spatiotemporal panels"};
  app.set_version_flag("--version", stlasso::version());
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "Master seed");
  app.add_option("--threads", o.threads, "Worker threads");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--lags", o.lags, "Temporal lag order P");

  std::function<void(const RunConfig&)> action;
  auto sub = [&](const char* name, const char* help, void (*fn)(const RunConfig&)) {
    CLI::App* s = app.add_subcommand(name, help);
    s->callback([&action, fn] { action = fn; });
    return s;
  };
  auto penalty_flags = [&](CLI::App* s) {
    s->add_option("--lambda1", o.lambda1, "Weight-matrix penalty");
    s->add_option("--lambda2", o.lambda2, "Temporal penalty");
    s->add_option("--lambda3", o.lambda3, "Regression penalty");
  };
  auto panel_flags = [&](CLI::App* s) {
    s->add_option("--panel", o.panel, "Long-format panel CSV");
    s->add_flag("--fourier", o.fourier, "Append the seasonal Fourier regressors");
  };

  CLI::App* simulate = sub("simulate", "Simulate a lattice panel", stlasso::cli::run_simulate);
  simulate->add_option("--side", o.side, "Lattice side (n = side^2)");
  simulate->add_option("--T", o.T, "Recorded time points");
  simulate->add_option("--rho", o.rho, "Spatial coefficient");
  simulate->add_option("--burn-in", o.burn_in, "Discarded warm-up steps");

  CLI::App* fit = sub("fit", "Penalized fit at a fixed penalty", stlasso::cli::run_fit);
  panel_flags(fit);
  penalty_flags(fit);

  CLI::App* cv = sub("cv", "Blocked cross-validation over the penalty grid", stlasso::cli::run_cv);
  panel_flags(cv);

  CLI::App* mc = sub("mc", "Monte Carlo parameter-recovery study", stlasso::cli::run_mc);
  mc->add_option("--reps", o.reps, "Replications per cell");
  mc->add_option("--side", o.sides, "Lattice sides");
  mc->add_option("--T", o.Ts, "Series lengths");
  mc->add_option("--mode", o.mode, "cv or fixed");
  mc->add_flag("--timing", o.timing, "Record wall-clock times (outputs are then not reproducible)");
  penalty_flags(mc);

  CLI::App* infer = sub("infer", "Unpenalized refit and standard errors", stlasso::cli::run_infer);
  panel_flags(infer);
  infer->add_option("--fit", o.fit, "FitResult JSON");
  infer->add_option("--tau", o.tau, "Support threshold");

  CLI::App* compare = sub("compare", "MSE/AIC/BIC against OLS and VAR(1)", stlasso::cli::run_compare);
  panel_flags(compare);
  compare->add_option("--fit", o.fit, "Use this FitResult instead of fitting");
  penalty_flags(compare);

  CLI::App* check = sub("check", "Stationarity and feasibility report", stlasso::cli::run_check);
  check->add_option("--params,--fit", o.fit, "Params or FitResult JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const RunConfig cfg = resolve(o);
    action(cfg);
  } catch (const stlasso::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
