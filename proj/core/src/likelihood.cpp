#include "stlasso/likelihood.hpp"

#include "stlasso/errors.hpp"

#include <cmath>
#include <numbers>

namespace stlasso {

namespace {

void check_sample(const PanelData& panel, const Sample& sample, int lags) {
  for (Index t : sample.times) {
    if (t < lags || t >= panel.T()) throw DimensionError("sample time outside [P, T)");
  }
}

}  // namespace

Matrix residuals(const ModelParams& params, const PanelData& panel, const Sample& sample) {
  check_compatible(params, panel);
  const int P = params.lags();
  check_sample(panel, sample, P);
  const Index n = panel.n();
  const Matrix i_minus_w = Matrix::Identity(n, n) - params.w;
  Matrix eps(n, sample.size());
  for (Index c = 0; c < sample.size(); ++c) {
    const Index t = sample.times[c];
    Vector e = i_minus_w * panel.y.col(t);
    if (params.k() > 0) e.noalias() -= panel.x[t] * params.beta;
    for (int p = 0; p < P; ++p) {
      e.array() -= params.phi.row(p).transpose().array() * panel.y.col(t - p - 1).array();
    }
    eps.col(c) = e;
  }
  return eps;
}

Matrix residuals(const ModelParams& params, const PanelData& panel) {
  if (panel.T() <= params.lags()) throw DimensionError("residuals: T must exceed P");
  return residuals(params, panel, Sample::full(panel.T(), params.lags()));
}

double log_det_term(const Matrix& w) {
  if (w.rows() != w.cols()) throw DimensionError("log_det_term: w must be square");
  const Index n = w.rows();
  const Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(n, n) - w);
  const auto& u = lu.matrixLU();
  double log_abs_det = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double d = std::abs(u(i, i));
    if (d == 0.0 || !std::isfinite(d)) throw SingularityError("I - W is singular");
    log_abs_det += std::log(d);
  }
  if (log_abs_det < std::log(kSingularDeterminant)) {
    throw SingularityError("|det(I - W)| below singularity tolerance");
  }
  return log_abs_det;
}

double log_likelihood(const ModelParams& params, const PanelData& panel, const Sample& sample) {
  if (!(params.sigma2 > 0.0)) throw DomainError("log_likelihood: sigma2 must be > 0");
  const double teff = static_cast<double>(sample.size());
  const double n = static_cast<double>(panel.n());
  const double logdet = log_det_term(params.w);
  const double ssr = residuals(params, panel, sample).squaredNorm();
  return teff * logdet - 0.5 * n * teff * std::log(2.0 * std::numbers::pi * params.sigma2) -
         ssr / (2.0 * params.sigma2);
}

double log_likelihood(const ModelParams& params, const PanelData& panel) {
  return log_likelihood(params, panel, Sample::full(panel.T(), params.lags()));
}

double penalty_value(const ModelParams& params, const PenaltyConfig& pen) {
  pen.validate();
  double w_sum = params.w.cwiseAbs().sum() - params.w.diagonal().cwiseAbs().sum();
  return pen.lambda1 * w_sum + pen.lambda2 * params.phi.cwiseAbs().sum() +
         pen.lambda3 * params.beta.cwiseAbs().sum();
}

double penalized_objective(const ModelParams& params, const PanelData& panel,
                           const PenaltyConfig& pen, const Sample& sample) {
  return -log_likelihood(params, panel, sample) + penalty_value(params, pen);
}

double penalized_objective(const ModelParams& params, const PanelData& panel,
                           const PenaltyConfig& pen) {
  return penalized_objective(params, panel, pen, Sample::full(panel.T(), params.lags()));
}

Matrix one_step_predictions(const ModelParams& params, const PanelData& panel,
                            const std::vector<Index>& times) {
  check_compatible(params, panel);
  const int P = params.lags();
  const Index n = panel.n();
  const Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(n, n) - params.w);
  Matrix rhs(n, static_cast<Index>(times.size()));
  for (std::size_t c = 0; c < times.size(); ++c) {
    const Index t = times[c];
    if (t < P || t >= panel.T()) throw DimensionError("prediction time outside [P, T)");
    Vector r = Vector::Zero(n);
    if (params.k() > 0) r.noalias() += panel.x[t] * params.beta;
    for (int p = 0; p < P; ++p) {
      r.array() += params.phi.row(p).transpose().array() * panel.y.col(t - p - 1).array();
    }
    rhs.col(static_cast<Index>(c)) = r;
  }
  return lu.solve(rhs);
}

}  // namespace stlasso
