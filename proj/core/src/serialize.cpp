#include "stlasso/serialize.hpp"

#include "stlasso/io.hpp"

#include <json.hpp>

#include <cmath>
#include <ostream>

namespace stlasso {

namespace {

using Json = nlohmann::ordered_json;

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string csv_number(double v) { return std::isfinite(v) ? format_double(v) : "NA"; }

Json params_json(const ModelParams& p) {
  Json beta = Json::array();
  for (Index j = 0; j < p.k(); ++j) beta.push_back(p.beta[j]);
  Json phi = Json::array();
  for (int l = 0; l < p.lags(); ++l) {
    Json row = Json::array();
    for (Index i = 0; i < p.n(); ++i) row.push_back(p.phi(l, i));
    phi.push_back(std::move(row));
  }
  Json w = Json::array();
  for (Index i = 0; i < p.n(); ++i)
    for (Index j = 0; j < p.n(); ++j) w.push_back(p.w(i, j));
  return Json{{"beta", beta}, {"phi", phi}, {"w", w}, {"sigma2", p.sigma2}};
}

Json header(const char* schema, const ModelParams& p) {
  return Json{{"schema", schema}, {"version", kFitResultVersion}, {"n", p.n()}, {"k", p.k()}, {"lags", p.lags()}};
}

double get_double(const Json& j, const char* what) {
  if (!j.is_number()) throw IngestError(std::string("json: ") + what + " must be a number");
  return j.get<double>();
}

ModelParams params_from(const Json& doc) {
  try {
    const Index n = doc.at("n").get<Index>();
    const Index k = doc.at("k").get<Index>();
    const int lags = doc.at("lags").get<int>();
    if (n < 1 || k < 0 || lags < 1) throw IngestError("json: bad dimensions");
    const Json& pj = doc.at("params");
    ModelParams p = ModelParams::zeros(n, k, lags);
    const Json& beta = pj.at("beta");
    const Json& phi = pj.at("phi");
    const Json& w = pj.at("w");
    if (!beta.is_array() || static_cast<Index>(beta.size()) != k) throw IngestError("json: params.beta must have k entries");
    if (!phi.is_array() || static_cast<int>(phi.size()) != lags) throw IngestError("json: params.phi must have lags rows");
    if (!w.is_array() || static_cast<Index>(w.size()) != n * n) throw IngestError("json: params.w must have n*n entries");
    for (Index j = 0; j < k; ++j) p.beta[j] = get_double(beta[static_cast<std::size_t>(j)], "beta");
    for (int l = 0; l < lags; ++l) {
      const Json& row = phi[static_cast<std::size_t>(l)];
      if (!row.is_array() || static_cast<Index>(row.size()) != n) throw IngestError("json: params.phi rows must have n entries");
      for (Index i = 0; i < n; ++i) p.phi(l, i) = get_double(row[static_cast<std::size_t>(i)], "phi");
    }
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) p.w(i, j) = get_double(w[static_cast<std::size_t>(i * n + j)], "w");
    p.sigma2 = get_double(pj.at("sigma2"), "sigma2");
    return p;
  } catch (const Json::exception& e) {
    throw IngestError(std::string("json: ") + e.what());
  }
}

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw IngestError(std::string("json: ") + e.what());
  }
}

}  // namespace

std::string fit_result_to_json(const FitResult& fit) {
  const ModelParams& p = fit.params;
  Json doc = header("stlasso.fit_result", p);
  doc["params"] = params_json(p);
  doc["penalty"] = Json{{"lambda1", fit.penalty.lambda1}, {"lambda2", fit.penalty.lambda2}, {"lambda3", fit.penalty.lambda3}};
  doc["objective"] = number(fit.objective);
  doc["loglik"] = number(fit.loglik);
  doc["iterations"] = fit.iterations;
  doc["converged"] = fit.converged;
  doc["feasible"] = fit.feasible;
  doc["message"] = fit.message;

  Json beta = Json::array(), phi = Json::array(), w = Json::array();
  const Support& a = fit.active_sets;
  for (Index j = 0; j < a.beta.size(); ++j)
    if (a.beta[j]) beta.push_back(j);
  for (Index l = 0; l < a.phi.rows(); ++l)
    for (Index i = 0; i < a.phi.cols(); ++i)
      if (a.phi(l, i)) phi.push_back(Json::array({l, i}));
  for (Index i = 0; i < a.w.rows(); ++i)
    for (Index j = 0; j < a.w.cols(); ++j)
      if (a.w(i, j)) w.push_back(Json::array({i, j}));
  doc["active_sets"] = Json{{"beta", beta}, {"phi", phi}, {"w", w}};

  const StationarityReport& s = fit.stationarity;
  doc["stationarity"] = Json{{"stationary", s.stationary},
                             {"norm_value", number(s.norm_value)},
                             {"max_row_sum", s.max_row_sum},
                             {"max_phi_sum", s.max_phi_sum}};
  Json trace = Json::array();
  for (double v : fit.trace) trace.push_back(number(v));
  doc["trace"] = trace;
  return doc.dump(2) + "\n";
}

FitResult fit_result_from_json(const std::string& text) {
  const Json doc = parse(text);
  if (!doc.is_object() || !doc.contains("schema")) throw IngestError("json: missing schema tag");
  const std::string schema = doc["schema"].is_string() ? doc["schema"].get<std::string>() : "";
  if (schema != "stlasso.fit_result" && schema != "stlasso.params") {
    throw IngestError("json: unsupported schema '" + schema + "'");
  }
  if (!doc.contains("version") || doc["version"] != kFitResultVersion) throw IngestError("json: unsupported version");
  FitResult fit;
  fit.params = params_from(doc);
  fit.active_sets = Support::of(fit.params, 0.0);
  fit.stationarity = stationarity_check(fit.params);
  if (schema == "stlasso.params") return fit;
  try {
    const Json& pen = doc.at("penalty");
    fit.penalty = {get_double(pen.at("lambda1"), "lambda1"), get_double(pen.at("lambda2"), "lambda2"),
                   get_double(pen.at("lambda3"), "lambda3")};
    fit.objective = doc.at("objective").is_null() ? INFINITY : get_double(doc.at("objective"), "objective");
    fit.loglik = doc.at("loglik").is_null() ? -INFINITY : get_double(doc.at("loglik"), "loglik");
    fit.iterations = doc.at("iterations").get<int>();
    fit.converged = doc.at("converged").get<bool>();
    fit.feasible = doc.at("feasible").get<bool>();
    fit.message = doc.at("message").get<std::string>();
    for (const auto& v : doc.at("trace")) fit.trace.push_back(v.is_null() ? INFINITY : v.get<double>());
  } catch (const Json::exception& e) {
    throw IngestError(std::string("json: ") + e.what());
  }
  return fit;
}

std::string params_to_json(const ModelParams& params) {
  Json doc = header("stlasso.params", params);
  doc["params"] = params_json(params);
  return doc.dump(2) + "\n";
}

ModelParams params_from_json(const std::string& text) { return fit_result_from_json(text).params; }

std::vector<std::string> validate_fit_result_json(const std::string& text) {
  std::vector<std::string> errs;
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    return {std::string("not JSON: ") + e.what()};
  }
  if (!doc.is_object()) return {"document is not an object"};
  if (doc.value("schema", "") != "stlasso.fit_result") errs.push_back("schema must be \"stlasso.fit_result\"");
  if (!doc.contains("version") || doc["version"] != kFitResultVersion) errs.push_back("version must be 1");
  const char* required[] = {"n", "k", "lags", "params", "penalty", "objective", "loglik", "iterations",
                            "converged", "feasible", "message", "active_sets", "stationarity", "trace"};
  for (const char* key : required)
    if (!doc.contains(key)) errs.push_back(std::string("missing key ") + key);
  if (!errs.empty()) return errs;
  try {
    const ModelParams p = params_from(doc);
    if (!doc["converged"].is_boolean() || !doc["feasible"].is_boolean()) errs.push_back("flags must be booleans");
    if (!doc["trace"].is_array()) errs.push_back("trace must be an array");
    for (const char* key : {"beta", "phi", "w"})
      if (!doc["active_sets"].contains(key) || !doc["active_sets"][key].is_array()) {
        errs.push_back(std::string("active_sets.") + key + " must be an array");
      }
    if (errs.empty()) {
      // active sets must list exactly the nonzero entries
      const Support nonzero = Support::of(p, 0.0);
      Index listed = doc["active_sets"]["beta"].size() + doc["active_sets"]["phi"].size() + doc["active_sets"]["w"].size();
      if (listed != nonzero.count()) errs.push_back("active_sets disagree with nonzero params");
    }
    if (doc["feasible"] == true) {
      for (const auto& v : invariant_violations(p)) errs.push_back("feasible fit violates: " + v);
    }
  } catch (const Error& e) {
    errs.push_back(e.what());
  }
  return errs;
}

void write_inference_csv(std::ostream& out, const InferenceResult& r) {
  out << "parameter,group,estimate,se,z,lcl,ucl\n";
  for (Index i = 0; i < r.theta.size(); ++i) {
    const auto s = static_cast<std::size_t>(i);
    out << quote_csv(s < r.names.size() ? r.names[s] : "theta" + std::to_string(i)) << ','
        << quote_csv(s < r.groups.size() ? r.groups[s] : "") << ',' << csv_number(r.theta[i]) << ','
        << csv_number(r.se[i]) << ',' << csv_number(r.z[i]) << ',' << csv_number(r.ci_lower[i]) << ','
        << csv_number(r.ci_upper[i]) << '\n';
  }
}

void write_cv_table_csv(std::ostream& out, const GridSearchResult& result) {
  out << "lambda1,lambda2,lambda3,fold,rmse,status\n";
  for (const auto& row : result.table) {
    const std::string lam = format_double(row.penalty.lambda1) + ',' + format_double(row.penalty.lambda2) + ',' +
                            format_double(row.penalty.lambda3);
    for (const auto& f : row.folds) {
      std::string status = f.status;
      for (char& c : status)
        if (c == ',' || c == '\n') c = ';';
      out << lam << ',' << f.fold << ',' << (std::isfinite(f.rmse) ? format_double(f.rmse) : "inf") << ','
          << status << '\n';
    }
    out << lam << ",pooled," << (std::isfinite(row.score) ? format_double(row.score) : "inf") << ','
        << (row.ok() ? "ok" : "failed") << '\n';
  }
}

void write_mc_table_csv(std::ostream& out, const std::vector<McConfig>& configs,
                        const std::vector<McResult>& results, bool with_timing) {
  if (configs.size() != results.size()) throw DimensionError("write_mc_table_csv: list lengths differ");
  out << "group,statistic";
  for (const auto& c : configs) out << ",n" << c.dgp.n() << "_T" << c.dgp.T;
  out << '\n';

  using Getter = std::optional<MetricRow> (*)(const McSummary&);
  const std::pair<const char*, Getter> groups[] = {
      {"beta", [](const McSummary& s) -> std::optional<MetricRow> { return s.beta; }},
      {"phi", [](const McSummary& s) -> std::optional<MetricRow> { return s.phi; }},
      {"W", [](const McSummary& s) -> std::optional<MetricRow> { return s.w_all; }},
      {"W=0", [](const McSummary& s) { return s.w_zero; }},
      {"W!=0", [](const McSummary& s) { return s.w_nonzero; }},
      {"sigma2", [](const McSummary& s) -> std::optional<MetricRow> { return s.sigma; }},
  };
  for (const auto& [name, get] : groups) {
    for (const char* stat : {"bias", "mae", "rmse"}) {
      out << name << ',' << stat;
      for (const auto& r : results) {
        const auto row = get(r.summary);
        if (!row) {
          out << ",--";
          continue;
        }
        const double v = stat[0] == 'b' ? row->bias : (stat[0] == 'm' ? row->mae : row->rmse);
        out << ',' << format_double(v);
      }
      out << '\n';
    }
  }
  out << "W=0,zero_recovery";
  for (const auto& r : results) out << ',' << (r.summary.zero_recovery ? format_double(*r.summary.zero_recovery) : "--");
  out << "\nmodel,parameters";
  for (const auto& c : configs) out << ',' << ParamLayout(c.dgp.n(), c.dgp.k(), c.dgp.lags).reported_count();
  out << "\nmodel,reps_ok";
  for (const auto& r : results) out << ',' << r.summary.reps_ok;
  out << "\nmodel,reps_failed";
  for (const auto& r : results) out << ',' << r.summary.reps_failed;
  out << '\n';
  if (with_timing) {
    out << "time,mean_seconds";
    for (const auto& r : results) out << ',' << format_double(r.summary.mean_seconds);
    out << '\n';
  }
}

void write_mc_records_jsonl(std::ostream& out, const McConfig& config, const McResult& result, bool with_timing) {
  for (const auto& rec : result.records) {
    Json j{{"side", config.dgp.side},
           {"T", config.dgp.T},
           {"rep", rec.rep},
           {"seed", rec.seed},
           {"ok", rec.ok},
           {"status", rec.status},
           {"penalty", Json{{"lambda1", rec.penalty.lambda1}, {"lambda2", rec.penalty.lambda2}, {"lambda3", rec.penalty.lambda3}}},
           {"cv_score", number(rec.cv_score)},
           {"iterations", rec.iterations},
           {"converged", rec.converged},
           {"feasible", rec.feasible},
           {"stationary", rec.stationary},
           {"norm_value", number(rec.norm_value)},
           {"zero_fraction", number(rec.zero_fraction)}};
    if (rec.ok) j["params"] = params_json(rec.estimate);
    if (with_timing) j["seconds"] = rec.seconds;
    out << j.dump() << '\n';
  }
}

void write_comparison_csv(std::ostream& out, const std::vector<BaselineResult>& rows) {
  out << "model,n_params,n_obs,loglik,mse,aic,bic,rank_deficient\n";
  for (const auto& r : rows) {
    out << r.model << ',' << r.n_params << ',' << r.n_obs << ',' << csv_number(r.loglik) << ',' << csv_number(r.mse)
        << ',' << csv_number(r.aic) << ',' << csv_number(r.bic) << ',' << (r.rank_deficient ? "true" : "false") << '\n';
  }
}

}  // namespace stlasso
