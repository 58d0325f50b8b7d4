#pragma once

// JSON and CSV output formats. The FitResult document layout is described in
// docs/fit_result.schema.json.

#include "stlasso/evaluate.hpp"
#include "stlasso/inference.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace stlasso {

inline constexpr int kFitResultVersion = 1;

/// "stlasso.fit_result" document, pretty-printed with two-space indent.
std::string fit_result_to_json(const FitResult& fit);
/// Inverse of fit_result_to_json (trace, params, flags, penalty). Also accepts a
/// "stlasso.params" document, in which case only params is filled. Throws IngestError.
FitResult fit_result_from_json(const std::string& text);

/// "stlasso.params" document holding just the parameters.
std::string params_to_json(const ModelParams& params);
ModelParams params_from_json(const std::string& text);

/// Structural checks of a fit_result document; empty means valid.
std::vector<std::string> validate_fit_result_json(const std::string& text);

/// Columns parameter,group,estimate,se,z,lcl,ucl. Missing values are written as NA.
void write_inference_csv(std::ostream& out, const InferenceResult& result);

/// Columns lambda1,lambda2,lambda3,fold,rmse,status; each triple also gets a "pooled" row.
void write_cv_table_csv(std::ostream& out, const GridSearchResult& result);

/// Rows group,statistic; one value column per result, labelled n<n>_T<T>. Groups without
/// entries are written as "--". Timing rows are emitted only when `with_timing` is set.
void write_mc_table_csv(std::ostream& out, const std::vector<McConfig>& configs,
                        const std::vector<McResult>& results, bool with_timing);
/// One JSON object per replication.
void write_mc_records_jsonl(std::ostream& out, const McConfig& config, const McResult& result,
                            bool with_timing);

/// Columns model,n_params,n_obs,loglik,mse,aic,bic,rank_deficient.
void write_comparison_csv(std::ostream& out, const std::vector<BaselineResult>& rows);

}  // namespace stlasso
