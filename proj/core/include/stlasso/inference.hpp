#pragma once

// Post-selection inference: unpenalized refit on the selected support, observed
// information from a central-difference Hessian, Wald standard errors and intervals.
//
// Sign convention: the information matrix is the Hessian of the *negative*
// log-likelihood. Standard errors are conditional on the selected support.

#include "stlasso/optimize.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace stlasso {

/// Entries with |value| > tau (diagonal of W excluded). Everything else is frozen at zero.
Support support(const ModelParams& params, double tau);

/// Maximizes the unpenalized log-likelihood over the support coordinates (plus sigma2)
/// under the same constraints as fit(); off-support entries are exactly zero.
FitResult refit_unpenalized(const PanelData& panel, const Support& support, const SolverOptions& opts);

/// Default central-difference step for coordinate value v: max(1e-5, 1e-4 |v|).
double default_hessian_step(double value);

/// Central-difference Hessian of f at x. Diagonal: [f(x+h e_i) - 2 f(x) + f(x-h e_i)] / h^2;
/// off-diagonal: the four-point formula with steps h_i, h_j. Exactly symmetric.
/// `steps` defaults to default_hessian_step per coordinate. If f throws at a stencil point
/// a DomainError naming `names[i]` (or the index) is raised. Rows are evaluated on up to
/// `threads` workers; the result does not depend on the thread count.
Matrix numerical_hessian(const std::function<double(const Vector&)>& f, const Vector& x,
                         const std::optional<Vector>& steps = std::nullopt,
                         const std::vector<std::string>& names = {}, int threads = 1);

/// Coordinates used for Wald inference: support entries of beta, phi, W that are not on a
/// constraint boundary, plus sigma2 (natural scale).
struct InferenceCoordinates {
  ParamLayout layout;
  std::vector<Index> indices;            // into layout.pack(params)
  std::vector<std::string> excluded;     // boundary-active support entries
};

InferenceCoordinates inference_coordinates(const ModelParams& params, const Support& support,
                                           double row_margin = 1e-6, double phi_margin = 1e-6,
                                           double boundary_tol = 1e-8);

/// Observed information (Hessian of -ln L) over `coords` at params.
Matrix observed_information(const PanelData& panel, const ModelParams& params,
                            const InferenceCoordinates& coords, int threads = 1);

struct InferenceResult {
  ModelParams estimates;
  std::vector<std::string> names;
  std::vector<std::string> groups;
  Vector theta;
  Vector se;
  Vector z;
  Vector ci_lower;
  Vector ci_upper;
  bool hessian_ok = false;
  std::vector<std::string> excluded;
};

/// Cov = information^{-1}; SE = sqrt(diag Cov); z = theta / SE; CI = theta +- 1.96 SE.
/// A non positive-definite information matrix yields hessian_ok = false and NaN SEs.
InferenceResult standard_errors(const Matrix& information, const Vector& theta,
                                std::vector<std::string> names = {},
                                std::vector<std::string> groups = {});

/// support -> refit -> observed information -> standard errors.
/// The refit starts from `selected`, so its log-likelihood is at least that of `selected`.
InferenceResult infer(const PanelData& panel, const ModelParams& selected, double tau,
                      const SolverOptions& opts, int threads = 1);

/// Approximate precision matrix (1/sigma2)(I - W')(I - W), valid for weak temporal dependence.
Matrix precision_diagnostic(const ModelParams& params);

}  // namespace stlasso
