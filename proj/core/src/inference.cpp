#include "stlasso/inference.hpp"

#include "stlasso/parallel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace stlasso {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kZ975 = 1.96;

std::string coordinate_label(const std::vector<std::string>& names, Index i) {
  if (i < 0) return "nothing (center point)";
  if (static_cast<std::size_t>(i) < names.size()) return names[static_cast<std::size_t>(i)];
  return "coordinate " + std::to_string(i);
}

}  // namespace

Support support(const ModelParams& params, double tau) {
  if (!(tau >= 0.0)) throw DomainError("support: tau must be >= 0");
  return Support::of(params, tau);
}

FitResult refit_unpenalized(const PanelData& panel, const Support& sup, const SolverOptions& opts) {
  SolverOptions o = opts;
  // The support is fixed by the caller; thresholding again could only shrink it.
  o.zero_threshold = 0.0;
  return fit(panel, Sample::full(panel.T(), o.lags), PenaltyConfig{}, o, sup);
}

double default_hessian_step(double value) { return std::max(1e-5, 1e-4 * std::abs(value)); }

Matrix numerical_hessian(const std::function<double(const Vector&)>& f, const Vector& x,
                         const std::optional<Vector>& steps, const std::vector<std::string>& names,
                         int threads) {
  const Index d = x.size();
  Vector h(d);
  if (steps) {
    if (steps->size() != d) throw DimensionError("numerical_hessian: step vector has the wrong size");
    h = *steps;
  } else {
    for (Index i = 0; i < d; ++i) h[i] = default_hessian_step(x[i]);
  }
  for (Index i = 0; i < d; ++i)
    if (!(h[i] > 0.0)) throw DomainError("numerical_hessian: steps must be > 0");

  auto eval = [&](const Vector& at, Index culprit) {
    double v = 0.0;
    try {
      v = f(at);
    } catch (const std::exception& e) {
      throw DomainError("numerical_hessian: evaluation failed when perturbing " +
                        coordinate_label(names, culprit) + ": " + e.what());
    }
    if (!std::isfinite(v)) {
      throw DomainError("numerical_hessian: non-finite value when perturbing " +
                        coordinate_label(names, culprit));
    }
    return v;
  };

  const double f0 = eval(x, -1);
  Matrix hess = Matrix::Zero(d, d);
  // Row i fills hess(i, j) for j <= i; the upper triangle is mirrored afterwards.
  parallel_for(static_cast<std::size_t>(d), threads, [&](std::size_t row) {
    const Index i = static_cast<Index>(row);
    Vector p = x;
    p[i] = x[i] + h[i];
    const double fp = eval(p, i);
    p[i] = x[i] - h[i];
    const double fm = eval(p, i);
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    for (Index j = 0; j < i; ++j) {
      Vector q = x;
      q[i] = x[i] + h[i];
      q[j] = x[j] + h[j];
      const double fpp = eval(q, i);
      q[j] = x[j] - h[j];
      const double fpm = eval(q, i);
      q[i] = x[i] - h[i];
      const double fmm = eval(q, i);
      q[j] = x[j] + h[j];
      const double fmp = eval(q, i);
      hess(i, j) = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
    }
  });
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < i; ++j) hess(j, i) = hess(i, j);
  return hess;
}

InferenceCoordinates inference_coordinates(const ModelParams& params, const Support& sup,
                                           double row_margin, double phi_margin,
                                           double boundary_tol) {
  InferenceCoordinates c{ParamLayout(params), {}, {}};
  const Index n = params.n();
  const int lags = params.lags();
  auto keep = [&](bool active, Index index) {
    if (active) c.excluded.push_back(c.layout.name(index));
    else c.indices.push_back(index);
  };

  for (Index j = 0; j < params.k(); ++j)
    if (sup.beta[j]) c.indices.push_back(c.layout.beta_index(j));

  for (int p = 0; p < lags; ++p) {
    for (Index i = 0; i < n; ++i) {
      if (!sup.phi(p, i)) continue;
      const bool block_full = params.phi.col(i).sum() >= 1.0 - phi_margin - boundary_tol;
      keep(block_full || params.phi(p, i) <= boundary_tol, c.layout.phi_index(p, i));
    }
  }
  for (Index i = 0; i < n; ++i) {
    const bool row_full = params.w.row(i).sum() >= 1.0 - row_margin - boundary_tol;
    for (Index j = 0; j < n; ++j) {
      if (i == j || !sup.w(i, j)) continue;
      keep(row_full || params.w(i, j) <= boundary_tol, c.layout.w_index(i, j));
    }
  }
  c.indices.push_back(c.layout.sigma2_index());
  return c;
}

Matrix observed_information(const PanelData& panel, const ModelParams& params,
                            const InferenceCoordinates& coords, int threads) {
  check_compatible(params, panel);
  const Vector full = coords.layout.pack(params);
  const Sample sample = Sample::full(panel.T(), params.lags());
  Vector theta(static_cast<Index>(coords.indices.size()));
  std::vector<std::string> names;
  for (std::size_t c = 0; c < coords.indices.size(); ++c) {
    theta[static_cast<Index>(c)] = full[coords.indices[c]];
    names.push_back(coords.layout.name(coords.indices[c]));
  }
  auto negloglik = [&](const Vector& sub) {
    Vector v = full;
    for (std::size_t c = 0; c < coords.indices.size(); ++c) v[coords.indices[c]] = sub[static_cast<Index>(c)];
    return -log_likelihood(coords.layout.unpack(v), panel, sample);
  };
  return numerical_hessian(negloglik, theta, std::nullopt, names, threads);
}

InferenceResult standard_errors(const Matrix& information, const Vector& theta,
                                std::vector<std::string> names, std::vector<std::string> groups) {
  const Index d = theta.size();
  if (information.rows() != d || information.cols() != d) {
    throw DimensionError("standard_errors: information matrix does not match theta");
  }
  InferenceResult r;
  r.theta = theta;
  r.names = std::move(names);
  r.groups = std::move(groups);
  r.se = Vector::Constant(d, kNaN);
  r.z = Vector::Constant(d, kNaN);
  r.ci_lower = Vector::Constant(d, kNaN);
  r.ci_upper = Vector::Constant(d, kNaN);

  const Eigen::LLT<Matrix> llt(information);
  if (d == 0 || llt.info() != Eigen::Success || !information.allFinite()) {
    r.hessian_ok = d == 0;
    return r;
  }
  const Matrix cov = llt.solve(Matrix::Identity(d, d));
  for (Index i = 0; i < d; ++i) {
    if (!(cov(i, i) > 0.0) || !std::isfinite(cov(i, i))) {
      r.se.setConstant(kNaN);
      r.hessian_ok = false;
      return r;
    }
    r.se[i] = std::sqrt(cov(i, i));
  }
  r.hessian_ok = true;
  r.z = theta.cwiseQuotient(r.se);
  r.ci_lower = theta - kZ975 * r.se;
  r.ci_upper = theta + kZ975 * r.se;
  return r;
}

InferenceResult infer(const PanelData& panel, const ModelParams& selected, double tau,
                      const SolverOptions& opts, int threads) {
  const Support sup = support(selected, tau);
  SolverOptions o = opts;
  o.init = InitStrategy::kGiven;
  o.start = selected;
  const FitResult refit = refit_unpenalized(panel, sup, o);
  if (!refit.feasible) throw NumericalError("infer: refit is infeasible: " + refit.message);

  const InferenceCoordinates coords =
      inference_coordinates(refit.params, sup, opts.row_margin, opts.phi_margin);
  const Matrix info = observed_information(panel, refit.params, coords, threads);
  const Vector full = coords.layout.pack(refit.params);
  Vector theta(static_cast<Index>(coords.indices.size()));
  std::vector<std::string> names;
  std::vector<std::string> groups;
  for (std::size_t c = 0; c < coords.indices.size(); ++c) {
    theta[static_cast<Index>(c)] = full[coords.indices[c]];
    names.push_back(coords.layout.name(coords.indices[c]));
    groups.push_back(coords.layout.group(coords.indices[c]));
  }
  InferenceResult r = standard_errors(info, theta, std::move(names), std::move(groups));
  r.estimates = refit.params;
  r.excluded = coords.excluded;
  return r;
}

Matrix precision_diagnostic(const ModelParams& params) {
  if (!(params.sigma2 > 0.0)) throw DomainError("precision_diagnostic: sigma2 must be > 0");
  const Index n = params.n();
  const Matrix a = Matrix::Identity(n, n) - params.w;
  return (a.transpose() * a) / params.sigma2;
}

}  // namespace stlasso
