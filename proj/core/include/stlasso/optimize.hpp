#pragma once

#include "stlasso/errors.hpp"
#include "stlasso/likelihood.hpp"
#include "stlasso/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stlasso {

enum class InitStrategy {
  kDefault,  // initialize(): least squares beta, per-station AR phi, uniform small W
  kGiven,    // SolverOptions::start
};

struct SolverOptions {
  int lags = 1;
  int max_iter = 300;
  double tol_obj = 1e-10;
  double tol_feas = 1e-8;
  double zero_threshold = 1e-4;
  InitStrategy init = InitStrategy::kDefault;
  std::optional<ModelParams> start;
  std::uint64_t seed = 0;
  /// Extra randomized starts (perturbations of the initial point); best objective wins.
  int restarts = 0;
  double row_margin = 1e-6;
  double phi_margin = 1e-6;
  int max_outer = 8;
  int qp_max_iter = 20000;

  void validate() const;
};

struct FitResult {
  ModelParams params;
  PenaltyConfig penalty;
  double objective = 0.0;  // penalized negative log-likelihood at params
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  bool feasible = false;
  Support active_sets;       // entries of params that are nonzero
  std::vector<double> trace;  // objective after each accepted step (first entry: start)
  StationarityReport stationarity;
  std::string message;
};

/// Raised when the objective turns non-finite mid-iteration; carries the trace so far.
class SolverDivergence : public NumericalError {
 public:
  SolverDivergence(const std::string& what, std::vector<double> trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

/// Feasible starting point (see InitStrategy::kDefault). Always passes stationarity_check.
ModelParams initialize(const PanelData& panel, int lags);
ModelParams initialize(const PanelData& panel, const Sample& sample, int lags);

/// Penalized maximum likelihood fit over the whole panel.
FitResult fit(const PanelData& panel, const PenaltyConfig& pen, const SolverOptions& opts);

/// Fit restricted to `sample` (e.g. cross-validation training segments) with the
/// coordinates outside `free` frozen at zero.
FitResult fit(const PanelData& panel, const Sample& sample, const PenaltyConfig& pen,
              const SolverOptions& opts, const Support& free);

/// Gradient of the smooth objective -ln L + lambda1 sum w + lambda2 sum phi + lambda3 sum|beta|
/// with respect to the packed parameter vector (ParamLayout ordering, sigma2 on its natural
/// scale). The beta penalty contributes lambda3 * sign(beta), zero at beta = 0.
Vector objective_gradient(const ModelParams& params, const PanelData& panel,
                          const PenaltyConfig& pen);
Vector objective_gradient(const ModelParams& params, const PanelData& panel,
                          const PenaltyConfig& pen, const Sample& sample);

}  // namespace stlasso
