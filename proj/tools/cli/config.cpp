#include "config.hpp"

#include <stlasso/errors.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace stlasso::cli {

namespace {

void allow_only(const Json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError("config: " + where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("config: unknown key '" + where + "." + key + "'");
  }
}

template <typename T>
void read(const Json& obj, const char* key, T& dst, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError("config: bad value for '" + where + "." + key + "'");
  }
}

Json penalty_json(const PenaltyConfig& p) {
  return Json{{"lambda1", p.lambda1}, {"lambda2", p.lambda2}, {"lambda3", p.lambda3}};
}

}  // namespace

CvPlan RunConfig::plan() const {
  CvPlan p;
  p.n_blocks = n_blocks;
  p.grid = CvPlan::product_grid(grid1, grid2, grid3);
  return p;
}

void apply_json(RunConfig& cfg, const Json& doc) {
  allow_only(doc, "root",
             {"seed", "threads", "lags", "penalty", "grid", "solver", "dgp", "mc", "data", "fourier", "fit",
              "inference", "out"});
  read(doc, "seed", cfg.seed, "root");
  read(doc, "threads", cfg.threads, "root");
  read(doc, "lags", cfg.lags, "root");
  read(doc, "fit", cfg.fit, "root");
  read(doc, "out", cfg.out, "root");
  if (doc.contains("penalty")) {
    const Json& p = doc["penalty"];
    if (p.is_null()) {
      cfg.penalty.reset();
    } else {
      allow_only(p, "penalty", {"lambda1", "lambda2", "lambda3"});
      PenaltyConfig pen = cfg.penalty.value_or(PenaltyConfig{});
      read(p, "lambda1", pen.lambda1, "penalty");
      read(p, "lambda2", pen.lambda2, "penalty");
      read(p, "lambda3", pen.lambda3, "penalty");
      cfg.penalty = pen;
    }
  }
  if (doc.contains("grid")) {
    const Json& g = doc["grid"];
    allow_only(g, "grid", {"lambda1", "lambda2", "lambda3", "n_blocks"});
    read(g, "lambda1", cfg.grid1, "grid");
    read(g, "lambda2", cfg.grid2, "grid");
    read(g, "lambda3", cfg.grid3, "grid");
    read(g, "n_blocks", cfg.n_blocks, "grid");
  }
  if (doc.contains("solver")) {
    const Json& s = doc["solver"];
    allow_only(s, "solver", {"max_iter", "tol_obj", "tol_feas", "zero_threshold", "restarts", "row_margin",
                             "phi_margin", "max_outer"});
    read(s, "max_iter", cfg.solver.max_iter, "solver");
    read(s, "tol_obj", cfg.solver.tol_obj, "solver");
    read(s, "tol_feas", cfg.solver.tol_feas, "solver");
    read(s, "zero_threshold", cfg.solver.zero_threshold, "solver");
    read(s, "restarts", cfg.solver.restarts, "solver");
    read(s, "row_margin", cfg.solver.row_margin, "solver");
    read(s, "phi_margin", cfg.solver.phi_margin, "solver");
    read(s, "max_outer", cfg.solver.max_outer, "solver");
  }
  if (doc.contains("dgp")) {
    const Json& d = doc["dgp"];
    allow_only(d, "dgp", {"side", "T", "beta", "rho", "phi_zero_fraction", "phi_value", "sigma2", "burn_in"});
    read(d, "side", cfg.dgp.side, "dgp");
    read(d, "T", cfg.dgp.T, "dgp");
    read(d, "rho", cfg.dgp.rho, "dgp");
    read(d, "phi_zero_fraction", cfg.dgp.phi.zero_fraction, "dgp");
    read(d, "phi_value", cfg.dgp.phi.value, "dgp");
    read(d, "sigma2", cfg.dgp.sigma2_true, "dgp");
    read(d, "burn_in", cfg.dgp.burn_in, "dgp");
    if (d.contains("beta")) {
      std::vector<double> beta;
      read(d, "beta", beta, "dgp");
      cfg.dgp.beta_true = Eigen::Map<const Vector>(beta.data(), static_cast<Index>(beta.size()));
    }
  }
  if (doc.contains("mc")) {
    const Json& m = doc["mc"];
    allow_only(m, "mc", {"reps", "sides", "Ts", "mode", "timing"});
    read(m, "reps", cfg.mc.reps, "mc");
    read(m, "sides", cfg.mc.sides, "mc");
    read(m, "Ts", cfg.mc.Ts, "mc");
    read(m, "timing", cfg.mc.timing, "mc");
    if (m.contains("mode")) {
      std::string mode;
      read(m, "mode", mode, "mc");
      if (mode != "cv" && mode != "fixed") throw ConfigError("config: mc.mode must be \"cv\" or \"fixed\"");
      cfg.mc.use_cv = mode == "cv";
    }
  }
  if (doc.contains("data")) {
    const Json& d = doc["data"];
    allow_only(d, "data", {"panel", "stations", "completeness", "start", "end"});
    read(d, "panel", cfg.data.panel, "data");
    read(d, "stations", cfg.data.stations, "data");
    read(d, "completeness", cfg.data.completeness, "data");
    for (const char* key : {"start", "end"}) {
      if (!d.contains(key)) continue;
      std::string value;
      read(d, key, value, "data");
      (key[0] == 's' ? cfg.data.start : cfg.data.end) = value;
    }
  }
  if (doc.contains("fourier")) {
    const Json& f = doc["fourier"];
    allow_only(f, "fourier", {"enabled", "frequencies", "extra_periods", "intercept"});
    cfg.fourier.enabled = true;
    read(f, "enabled", cfg.fourier.enabled, "fourier");
    read(f, "frequencies", cfg.fourier.frequencies, "fourier");
    read(f, "extra_periods", cfg.fourier.extra_periods, "fourier");
    read(f, "intercept", cfg.fourier.intercept, "fourier");
  }
  if (doc.contains("inference")) {
    const Json& i = doc["inference"];
    allow_only(i, "inference", {"tau"});
    read(i, "tau", cfg.tau, "inference");
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + path + ": " + e.what());
  }
  RunConfig cfg;
  apply_json(cfg, doc);
  // Relative input paths are taken relative to the config file.
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  for (std::string* p : {&cfg.data.panel, &cfg.data.stations, &cfg.fit}) {
    if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).lexically_normal().string();
  }
  return cfg;
}

Json RunConfig::to_json() const {
  Json doc;
  doc["seed"] = seed;
  doc["threads"] = threads;
  doc["lags"] = lags;
  doc["penalty"] = penalty ? penalty_json(*penalty) : Json(nullptr);
  doc["grid"] = Json{{"lambda1", grid1}, {"lambda2", grid2}, {"lambda3", grid3}, {"n_blocks", n_blocks}};
  doc["solver"] = Json{{"max_iter", solver.max_iter},         {"tol_obj", solver.tol_obj},
                       {"tol_feas", solver.tol_feas},         {"zero_threshold", solver.zero_threshold},
                       {"restarts", solver.restarts},         {"row_margin", solver.row_margin},
                       {"phi_margin", solver.phi_margin},     {"max_outer", solver.max_outer}};
  std::vector<double> beta(dgp.beta_true.data(), dgp.beta_true.data() + dgp.beta_true.size());
  doc["dgp"] = Json{{"side", dgp.side},
                    {"T", dgp.T},
                    {"beta", beta},
                    {"rho", dgp.rho},
                    {"phi_zero_fraction", dgp.phi.zero_fraction},
                    {"phi_value", dgp.phi.value},
                    {"sigma2", dgp.sigma2_true},
                    {"burn_in", dgp.burn_in}};
  doc["mc"] = Json{{"reps", mc.reps}, {"sides", mc.sides}, {"Ts", mc.Ts}, {"mode", mc.use_cv ? "cv" : "fixed"},
                   {"timing", mc.timing}};
  Json dj{{"panel", data.panel}, {"stations", data.stations}, {"completeness", data.completeness}};
  if (data.start) dj["start"] = *data.start;
  if (data.end) dj["end"] = *data.end;
  doc["data"] = dj;
  doc["fourier"] = Json{{"enabled", fourier.enabled},
                        {"frequencies", fourier.frequencies},
                        {"extra_periods", fourier.extra_periods},
                        {"intercept", fourier.intercept}};
  doc["fit"] = fit;
  doc["inference"] = Json{{"tau", tau}};
  doc["out"] = out;
  return doc;
}

}  // namespace stlasso::cli
