#include "stlasso/optimize.hpp"

#include "stlasso/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace stlasso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Spectral norm target for the stability constraint handled by the augmented Lagrangian.
constexpr double kNormCap = 1.0 - 1e-6;
constexpr double kArmijo = 1e-4;

// Initial phi is kept at or below this norm of (I - W)^{-1} Phi.
constexpr double kInitNormCap = 0.95;
constexpr double kInitPhiCap = 0.95;
constexpr double kInitWeightMass = 0.1;

/// Augmented-Lagrangian term for c(x) = ||(I - W)^{-1} Phi||_2 - kNormCap <= 0.
struct StabilityPenalty {
  double multiplier = 0.0;
  double mu = 1e3;

  double value(double c) const {
    const double a = std::max(0.0, multiplier + mu * c);
    return (a * a - multiplier * multiplier) / (2.0 * mu);
  }
  double slope(double c) const { return std::max(0.0, multiplier + mu * c); }
};

struct Merit {
  const PenalizedProblem& problem;
  const StabilityPenalty& stability;

  /// f + l1 + AL term; +inf when the point is numerically singular.
  double operator()(const Vector& x) const {
    try {
      const double v = problem.value(x) + problem.l1(x) +
                       stability.value(problem.spectral_norm(x, nullptr) - kNormCap);
      return std::isfinite(v) ? v : kInf;
    } catch (const SingularityError&) {
      return kInf;
    }
  }
};

/// ADMM on the quadratic model
///   min_z g'(z - x) + 1/2 (z - x)' B (z - x) + lambda3 |z_beta|_1   s.t. z feasible,
/// splitting the quadratic (solved through B = V diag(lam) V') from the prox. The penalty
/// parameter rho is rebalanced whenever one residual dominates the other.
Vector solve_qp(const PenalizedProblem& pb, const Vector& x, const Vector& g, const Matrix& v,
                const Vector& lam, Vector z, int max_iter) {
  const Index dim = x.size();
  // The median eigenvalue is a robust starting scale: a few near-null directions would
  // otherwise drag a geometric-mean choice far below the bulk of the spectrum.
  Vector sorted = lam;
  std::nth_element(sorted.data(), sorted.data() + dim / 2, sorted.data() + dim);
  double rho = sorted[dim / 2];
  constexpr double kRelax = 1.6;
  constexpr double kInexact = 1e-3;
  constexpr double kTol = 1e-10;
  const Vector vtg = v.transpose() * g;
  Vector u = Vector::Zero(dim);  // scaled dual variable
  for (int it = 0; it < max_iter; ++it) {
    const Vector rhs = rho * (v.transpose() * (z - u - x)) - vtg;
    const Vector d = x + v * rhs.cwiseQuotient((lam.array() + rho).matrix());
    const Vector relaxed = kRelax * d + (1.0 - kRelax) * z;
    Vector next = relaxed + u;
    pb.prox(next, 1.0 / rho);
    u += relaxed - next;
    const double primal = (d - next).lpNorm<Eigen::Infinity>();
    const double dual = rho * (next - z).lpNorm<Eigen::Infinity>();
    z = std::move(next);
    const double scale = 1.0 + std::max(d.lpNorm<Eigen::Infinity>(), z.lpNorm<Eigen::Infinity>());
    // Inexact solves while the outer step is long; the tolerance tightens as it shrinks.
    const double step = kInexact * (z - x).lpNorm<Eigen::Infinity>();
    if (primal <= std::max(kTol * scale, step) &&
        dual <= std::max(kTol * (1.0 + rho * u.lpNorm<Eigen::Infinity>()), rho * step))
      break;
    if (it % 20 == 19) {
      if (primal > 10.0 * dual) {
        rho *= 4.0;
        u /= 4.0;
      } else if (dual > 10.0 * primal) {
        rho /= 4.0;
        u *= 4.0;
      }
    }
  }
  return z;
}

double quadratic_model(const PenalizedProblem& pb, const Vector& x, const Vector& g, const Matrix& b,
                       const Vector& z) {
  const Vector d = z - x;
  return g.dot(d) + 0.5 * d.dot(b * d) + pb.l1(z);
}

struct SolveState {
  Vector x;
  double objective = kInf;  // f + l1
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

/// Sequential quadratic programming on the polyhedral feasible set with an augmented
/// Lagrangian outer loop for the spectral-norm stability constraint.
SolveState solve(const PenalizedProblem& pb, Vector x, const SolverOptions& opts) {
  SolveState st;
  pb.project(x);
  StabilityPenalty stability;
  const Merit merit{pb, stability};

  auto objective = [&](const Vector& v) { return pb.value(v) + pb.l1(v); };
  st.objective = objective(x);
  if (!std::isfinite(st.objective)) throw InitializationError("fit: objective is not finite at the start");
  st.trace.push_back(st.objective);

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    double current = merit(x);
    st.converged = false;
    while (st.iterations < opts.max_iter) {
      ++st.iterations;
      Vector g;
      pb.value_and_gradient(x, g);
      Matrix h = pb.hessian(x);
      Vector norm_grad;
      const double c = pb.spectral_norm(x, &norm_grad) - kNormCap;
      const double slope = stability.slope(c);
      if (slope > 0.0) {
        g += slope * norm_grad;
        h.noalias() += stability.mu * norm_grad * norm_grad.transpose();
      }
      if (!g.allFinite() || !h.allFinite()) {
        throw SolverDivergence("fit: non-finite gradient or Hessian", st.trace);
      }

      // Convexified model Hessian: eigenvalues replaced by their magnitudes, floored.
      const Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
      const Vector lam = eig.eigenvalues().cwiseAbs();
      const double top = std::max(lam.maxCoeff(), 1e-12);
      const Vector lam_mod = lam.cwiseMax(std::max(1e-10, 1e-10 * top));
      const Matrix& v = eig.eigenvectors();
      const Matrix b = v * lam_mod.asDiagonal() * v.transpose();

      // Start the subproblem from the better of x and the projected Newton point.
      Vector newton = x - v * (lam_mod.cwiseInverse().asDiagonal() * (v.transpose() * g));
      pb.prox(newton, 1.0 / top);
      Vector z0 = quadratic_model(pb, x, g, b, newton) < quadratic_model(pb, x, g, b, x) ? newton : x;
      const Vector z = solve_qp(pb, x, g, v, lam_mod, std::move(z0), opts.qp_max_iter);

      const Vector d = z - x;
      const double predicted = g.dot(d) + pb.l1(z) - pb.l1(x);
      if (!(predicted < 0.0) || d.lpNorm<Eigen::Infinity>() == 0.0) {
        st.converged = true;
        break;
      }

      double alpha = 1.0;
      Vector trial;
      double trial_merit = kInf;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        trial = x + alpha * d;
        trial_merit = merit(trial);
        if (trial_merit <= current + kArmijo * alpha * predicted) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        // No decrease along a descent direction: x is stationary to working precision.
        st.converged = true;
        break;
      }
      const double change = std::abs(current - trial_merit) / std::max(1.0, std::abs(current));
      x = std::move(trial);
      current = trial_merit;
      st.objective = objective(x);
      if (!std::isfinite(st.objective)) throw SolverDivergence("fit: objective became non-finite", st.trace);
      st.trace.push_back(st.objective);
      if (change < opts.tol_obj) {
        st.converged = true;
        break;
      }
    }

    const double violation = pb.spectral_norm(x, nullptr) - kNormCap;
    if (violation <= opts.tol_feas || st.iterations >= opts.max_iter) break;
    stability.multiplier = std::max(0.0, stability.multiplier + stability.mu * violation);
    stability.mu *= 10.0;
  }
  st.x = std::move(x);
  return st;
}

/// Least squares with a rank check; returns nullopt on rank deficiency.
std::optional<Vector> least_squares(const Matrix& a, const Vector& b) {
  if (a.cols() == 0) return Vector(0);
  const Eigen::ColPivHouseholderQR<Matrix> qr(a);
  if (qr.rank() < a.cols()) return std::nullopt;
  return Vector(qr.solve(b));
}

/// Scales phi down until ||(I - W)^{-1} Phi|| <= cap.
void enforce_stable_start(ModelParams& p, double cap) {
  const StationarityReport st = stationarity_check(p);
  if (!st.invertible) throw InitializationError("initialize: I - W is singular");
  if (st.norm_value > cap) p.phi *= cap / st.norm_value;
}

FitResult finish(const PanelData& panel, const Sample& sample, const PenaltyConfig& pen,
                 const SolverOptions& opts, const PenalizedProblem& pb, SolveState st) {
  FitResult r;
  r.penalty = pen;
  r.params = pb.to_params(st.x);
  const double tau = opts.zero_threshold;
  auto mop = [tau](double& v) {
    if (std::abs(v) < tau) v = 0.0;
  };
  std::for_each(r.params.beta.data(), r.params.beta.data() + r.params.beta.size(), mop);
  std::for_each(r.params.phi.data(), r.params.phi.data() + r.params.phi.size(), mop);
  std::for_each(r.params.w.data(), r.params.w.data() + r.params.w.size(), mop);
  r.params.w.diagonal().setZero();

  r.active_sets = Support::of(r.params, 0.0);
  r.iterations = st.iterations;
  r.converged = st.converged;
  r.trace = std::move(st.trace);
  r.stationarity = stationarity_check(r.params);
  const auto violations = invariant_violations(r.params, opts.row_margin, opts.tol_feas);
  r.feasible = violations.empty() && r.stationarity.stationary;
  if (!violations.empty()) r.message = "infeasible: " + violations.front();
  else if (!r.stationarity.stationary) r.message = "rejected: stability norm >= 1";
  else r.message = r.converged ? "converged" : "iteration limit reached";
  try {
    r.loglik = log_likelihood(r.params, panel, sample);
    r.objective = -r.loglik + penalty_value(r.params, pen);
  } catch (const Error& e) {
    r.feasible = false;
    r.loglik = -kInf;
    r.objective = kInf;
    r.message = e.what();
  }
  return r;
}

}  // namespace

void SolverOptions::validate() const {
  if (lags < 1) throw ConfigError("solver: lags must be >= 1");
  if (max_iter < 1) throw ConfigError("solver: max_iter must be >= 1");
  if (!(tol_obj > 0.0) || !(tol_feas > 0.0)) throw ConfigError("solver: tolerances must be > 0");
  if (!(zero_threshold >= 0.0)) throw ConfigError("solver: zero_threshold must be >= 0");
  if (restarts < 0) throw ConfigError("solver: restarts must be >= 0");
  if (!(row_margin > 0.0 && row_margin < 1.0) || !(phi_margin > 0.0 && phi_margin < 1.0)) {
    throw ConfigError("solver: margins must lie in (0, 1)");
  }
  if (init == InitStrategy::kGiven && !start) throw ConfigError("solver: init=given needs a start");
  if (max_outer < 1 || qp_max_iter < 1) throw ConfigError("solver: iteration caps must be >= 1");
}

ModelParams initialize(const PanelData& panel, int lags) {
  return initialize(panel, Sample::full(panel.T(), lags), lags);
}

ModelParams initialize(const PanelData& panel, const Sample& sample, int lags) {
  panel.validate(lags);
  const Index n = panel.n();
  const Index k = panel.k();
  const Index teff = sample.size();
  if (teff < 1) throw InitializationError("initialize: empty sample");
  ModelParams p = ModelParams::zeros(n, k, lags);

  // Pooled regression of y_t on X_t, ignoring lags and W.
  if (k > 0) {
    Matrix a(n * teff, k);
    Vector b(n * teff);
    for (Index r = 0; r < teff; ++r) {
      const Index t = sample.times[static_cast<std::size_t>(r)];
      a.middleRows(r * n, n) = panel.x[static_cast<std::size_t>(t)];
      b.segment(r * n, n) = panel.y.col(t);
    }
    if (auto beta = least_squares(a, b)) p.beta = *beta;
  }

  // Per-station autoregression of order P without intercept.
  for (Index i = 0; i < n; ++i) {
    Matrix a(teff, lags);
    Vector b(teff);
    for (Index r = 0; r < teff; ++r) {
      const Index t = sample.times[static_cast<std::size_t>(r)];
      b[r] = panel.y(i, t);
      for (int l = 0; l < lags; ++l) a(r, l) = panel.y(i, t - l - 1);
    }
    Vector coef = least_squares(a, b).value_or(Vector::Zero(lags));
    coef = coef.cwiseMax(0.0).cwiseMin(kInitPhiCap);
    if (coef.sum() > kInitPhiCap) coef *= kInitPhiCap / coef.sum();
    p.phi.col(i) = coef;
  }

  p.w.setConstant(kInitWeightMass / static_cast<double>(n - 1));
  p.w.diagonal().setZero();
  enforce_stable_start(p, kInitNormCap);

  const Matrix eps = residuals(p, panel, sample);
  const double var = eps.squaredNorm() / static_cast<double>(eps.size());
  p.sigma2 = std::clamp(var, std::exp(-30.0), std::exp(30.0));
  return p;
}

FitResult fit(const PanelData& panel, const PenaltyConfig& pen, const SolverOptions& opts) {
  panel.validate(opts.lags);
  return fit(panel, Sample::full(panel.T(), opts.lags), pen, opts,
             Support::all(panel.n(), panel.k(), opts.lags));
}

FitResult fit(const PanelData& panel, const Sample& sample, const PenaltyConfig& pen,
              const SolverOptions& opts, const Support& free) {
  opts.validate();
  pen.validate();
  panel.validate(opts.lags);

  FeasibleSetMargins margins;
  margins.row = opts.row_margin;
  margins.phi = opts.phi_margin;
  const PenalizedProblem pb(panel, sample, opts.lags, pen, free, margins);

  ModelParams start;
  if (opts.init == InitStrategy::kGiven) {
    start = *opts.start;
    check_compatible(start, panel);
    if (start.lags() != opts.lags) throw ConfigError("fit: start has the wrong lag order");
    if (!(start.sigma2 > 0.0)) start.sigma2 = std::exp(margins.log_sigma2_min);
  } else {
    start = initialize(panel, sample, opts.lags);
  }

  auto x0 = pb.to_vector(start);
  pb.project(x0);
  SolveState best = solve(pb, x0, opts);

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int r = 0; r < opts.restarts; ++r) {
    ModelParams p = start;
    const Index n = panel.n();
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j)
        if (i != j) p.w(i, j) = unit(rng) * 0.5 / static_cast<double>(n - 1);
      for (int l = 0; l < opts.lags; ++l) p.phi(l, i) = unit(rng) * 0.5 / opts.lags;
    }
    try {
      enforce_stable_start(p, kInitNormCap);
      Vector xr = pb.to_vector(p);
      pb.project(xr);
      SolveState cand = solve(pb, xr, opts);
      if (cand.objective < best.objective) best = std::move(cand);
    } catch (const Error&) {
      // a failed restart leaves the incumbent in place
    }
  }
  return finish(panel, sample, pen, opts, pb, std::move(best));
}

Vector objective_gradient(const ModelParams& params, const PanelData& panel,
                          const PenaltyConfig& pen) {
  return objective_gradient(params, panel, pen, Sample::full(panel.T(), params.lags()));
}

Vector objective_gradient(const ModelParams& params, const PanelData& panel,
                          const PenaltyConfig& pen, const Sample& sample) {
  check_compatible(params, panel);
  const PenalizedProblem pb(panel, sample, params.lags(), pen,
                            Support::all(panel.n(), panel.k(), params.lags()));
  // With every coordinate free the decision vector matches ParamLayout except for the
  // last entry, which is log sigma2.
  Vector g;
  pb.value_and_gradient(pb.to_vector(params), g);
  g[g.size() - 1] /= params.sigma2;
  for (Index j = 0; j < params.k(); ++j) {
    const double b = params.beta[j];
    g[j] += pen.lambda3 * static_cast<double>((b > 0.0) - (b < 0.0));
  }
  return g;
}

}  // namespace stlasso
