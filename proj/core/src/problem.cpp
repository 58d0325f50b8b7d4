#include "stlasso/problem.hpp"

#include "stlasso/errors.hpp"
#include "stlasso/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace stlasso {

void project_capped_simplex(Eigen::Ref<Vector> v, double radius) {
  v = v.cwiseMax(0.0);
  if (v.sum() <= radius) return;
  // Projection onto {u >= 0, sum u = radius}: u = max(v - theta, 0).
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t r = 0; r < sorted.size(); ++r) {
    cumulative += sorted[r];
    const double candidate = (cumulative - radius) / static_cast<double>(r + 1);
    if (sorted[r] - candidate > 0.0) theta = candidate;
  }
  v = (v.array() - theta).cwiseMax(0.0);
}

PenalizedProblem::PenalizedProblem(const PanelData& panel, Sample sample, int lags,
                                   const PenaltyConfig& pen, const Support& free,
                                   FeasibleSetMargins margins)
    : n_(panel.n()),
      k_(panel.k()),
      lags_(lags),
      teff_(sample.size()),
      pen_(pen),
      free_(free),
      margins_(margins) {
  pen.validate();
  if (free.beta.size() != k_ || free.phi.rows() != lags || free.phi.cols() != n_ ||
      free.w.rows() != n_ || free.w.cols() != n_) {
    throw DimensionError("problem: support shape does not match panel");
  }
  if (teff_ < 1) throw DomainError("problem: empty effective sample");
  for (Index t : sample.times) {
    if (t < lags || t >= panel.T()) throw DimensionError("problem: sample time outside [P, T)");
  }

  w_rows_.resize(static_cast<std::size_t>(n_));
  phi_blocks_.resize(static_cast<std::size_t>(n_));
  for (Index j = 0; j < k_; ++j) {
    if (!free.beta[j]) continue;
    beta_idx_.push_back(static_cast<Index>(coords_.size()));
    coords_.push_back({Coord::Kind::kBeta, j, 0});
  }
  for (int p = 0; p < lags; ++p)
    for (Index i = 0; i < n_; ++i) {
      if (!free.phi(p, i)) continue;
      phi_blocks_[static_cast<std::size_t>(i)].push_back(static_cast<Index>(coords_.size()));
      coords_.push_back({Coord::Kind::kPhi, p, i});
    }
  for (Index i = 0; i < n_; ++i)
    for (Index j = 0; j < n_; ++j) {
      if (i == j || !free.w(i, j)) continue;
      w_rows_[static_cast<std::size_t>(i)].push_back(static_cast<Index>(coords_.size()));
      coords_.push_back({Coord::Kind::kW, i, j});
    }
  dim_ = static_cast<Index>(coords_.size()) + 1;

  const Index dtheta = dim_ - 1;
  gram_ = Matrix::Zero(dtheta, dtheta);
  local_design_.resize(static_cast<std::size_t>(n_));
  local_target_.resize(static_cast<std::size_t>(n_));
  local_cols_.resize(static_cast<std::size_t>(n_));
  for (Index i = 0; i < n_; ++i) {
    auto& cols = local_cols_[static_cast<std::size_t>(i)];
    for (Index c : beta_idx_) cols.push_back(c);
    for (Index c : phi_blocks_[static_cast<std::size_t>(i)]) cols.push_back(c);
    for (Index c : w_rows_[static_cast<std::size_t>(i)]) cols.push_back(c);

    Matrix z(teff_, static_cast<Index>(cols.size()));
    Vector target(teff_);
    for (Index r = 0; r < teff_; ++r) {
      const Index t = sample.times[static_cast<std::size_t>(r)];
      target[r] = panel.y(i, t);
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const Coord& co = coords_[static_cast<std::size_t>(cols[c])];
        double v = 0.0;
        switch (co.kind) {
          case Coord::Kind::kBeta: v = panel.x[static_cast<std::size_t>(t)](i, co.a); break;
          case Coord::Kind::kPhi: v = panel.y(i, t - co.a - 1); break;
          case Coord::Kind::kW: v = panel.y(co.b, t); break;
        }
        z(r, static_cast<Index>(c)) = v;
      }
    }
    const Matrix local_gram = z.transpose() * z;
    for (std::size_t a = 0; a < cols.size(); ++a)
      for (std::size_t b = 0; b < cols.size(); ++b)
        gram_(cols[a], cols[b]) += local_gram(static_cast<Index>(a), static_cast<Index>(b));
    local_design_[static_cast<std::size_t>(i)] = std::move(z);
    local_target_[static_cast<std::size_t>(i)] = std::move(target);
  }
}

Vector PenalizedProblem::to_vector(const ModelParams& params) const {
  if (params.n() != n_ || params.k() != k_ || params.lags() != lags_) {
    throw DimensionError("problem: params do not match");
  }
  if (!(params.sigma2 > 0.0)) throw DomainError("problem: sigma2 must be > 0");
  Vector x(dim_);
  for (std::size_t c = 0; c < coords_.size(); ++c) {
    const Coord& co = coords_[c];
    double v = 0.0;
    switch (co.kind) {
      case Coord::Kind::kBeta: v = params.beta[co.a]; break;
      case Coord::Kind::kPhi: v = params.phi(co.a, co.b); break;
      case Coord::Kind::kW: v = params.w(co.a, co.b); break;
    }
    x[static_cast<Index>(c)] = v;
  }
  x[dim_ - 1] = std::log(params.sigma2);
  return x;
}

ModelParams PenalizedProblem::to_params(const Vector& x) const {
  ModelParams p = ModelParams::zeros(n_, k_, lags_);
  for (std::size_t c = 0; c < coords_.size(); ++c) {
    const Coord& co = coords_[c];
    const double v = x[static_cast<Index>(c)];
    switch (co.kind) {
      case Coord::Kind::kBeta: p.beta[co.a] = v; break;
      case Coord::Kind::kPhi: p.phi(co.a, co.b) = v; break;
      case Coord::Kind::kW: p.w(co.a, co.b) = v; break;
    }
  }
  p.sigma2 = std::exp(x[dim_ - 1]);
  return p;
}

Matrix PenalizedProblem::weights(const Vector& x) const {
  Matrix w = Matrix::Zero(n_, n_);
  for (Index i = 0; i < n_; ++i)
    for (Index c : w_rows_[static_cast<std::size_t>(i)]) w(i, coords_[static_cast<std::size_t>(c)].b) = x[c];
  return w;
}

double PenalizedProblem::residual_terms(const Vector& x, Vector* half_ssr_grad) const {
  double ssr = 0.0;
  if (half_ssr_grad) half_ssr_grad->setZero(dim_ - 1);
  for (Index i = 0; i < n_; ++i) {
    const auto& cols = local_cols_[static_cast<std::size_t>(i)];
    Vector theta(static_cast<Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) theta[static_cast<Index>(c)] = x[cols[c]];
    const Matrix& z = local_design_[static_cast<std::size_t>(i)];
    Vector e = local_target_[static_cast<std::size_t>(i)];
    if (!cols.empty()) e.noalias() -= z * theta;
    ssr += e.squaredNorm();
    if (half_ssr_grad && !cols.empty()) {
      const Vector zte = z.transpose() * e;
      for (std::size_t c = 0; c < cols.size(); ++c) (*half_ssr_grad)[cols[c]] -= zte[static_cast<Index>(c)];
    }
  }
  return ssr;
}

double PenalizedProblem::ssr(const Vector& x) const { return residual_terms(x, nullptr); }

double PenalizedProblem::value(const Vector& x) const {
  const double s = x[dim_ - 1];
  const double teff = static_cast<double>(teff_);
  const double logdet = log_det_term(weights(x));
  const double ssr = residual_terms(x, nullptr);
  double linear = 0.0;
  for (std::size_t c = 0; c < coords_.size(); ++c) {
    if (coords_[c].kind == Coord::Kind::kW) linear += pen_.lambda1 * x[static_cast<Index>(c)];
    if (coords_[c].kind == Coord::Kind::kPhi) linear += pen_.lambda2 * x[static_cast<Index>(c)];
  }
  return -teff * logdet + 0.5 * static_cast<double>(n_) * teff * (std::log(2.0 * std::numbers::pi) + s) +
         0.5 * std::exp(-s) * ssr + linear;
}

double PenalizedProblem::value_and_gradient(const Vector& x, Vector& grad) const {
  const double s = x[dim_ - 1];
  const double teff = static_cast<double>(teff_);
  const Matrix w = weights(x);
  const double logdet = log_det_term(w);
  const Matrix m = Eigen::PartialPivLU<Matrix>(Matrix::Identity(n_, n_) - w).inverse();

  Vector half_grad;
  const double ssr = residual_terms(x, &half_grad);
  const double scale = std::exp(-s);

  grad.resize(dim_);
  double linear = 0.0;
  for (std::size_t c = 0; c < coords_.size(); ++c) {
    const Coord& co = coords_[c];
    const auto ci = static_cast<Index>(c);
    double g = scale * half_grad[ci];
    if (co.kind == Coord::Kind::kW) {
      // d/dw_ij of -ln det(I - W) is [(I - W)^{-1}]_{ji}
      g += teff * m(co.b, co.a) + pen_.lambda1;
      linear += pen_.lambda1 * x[ci];
    } else if (co.kind == Coord::Kind::kPhi) {
      g += pen_.lambda2;
      linear += pen_.lambda2 * x[ci];
    }
    grad[ci] = g;
  }
  const double half_n_teff = 0.5 * static_cast<double>(n_) * teff;
  grad[dim_ - 1] = half_n_teff - 0.5 * scale * ssr;
  return -teff * logdet + half_n_teff * (std::log(2.0 * std::numbers::pi) + s) + 0.5 * scale * ssr +
         linear;
}

Matrix PenalizedProblem::hessian(const Vector& x) const {
  const double s = x[dim_ - 1];
  const double scale = std::exp(-s);
  const double teff = static_cast<double>(teff_);
  const Index dtheta = dim_ - 1;

  Matrix h = Matrix::Zero(dim_, dim_);
  h.topLeftCorner(dtheta, dtheta) = scale * gram_;

  // -T ln det(I - W): second derivative wrt (w_ij, w_kl) is T M_jk M_li
  const Matrix m = Eigen::PartialPivLU<Matrix>(Matrix::Identity(n_, n_) - weights(x)).inverse();
  std::vector<Index> w_coords;
  for (const auto& row : w_rows_) w_coords.insert(w_coords.end(), row.begin(), row.end());
  for (Index a : w_coords) {
    const Coord& ca = coords_[static_cast<std::size_t>(a)];
    for (Index b : w_coords) {
      const Coord& cb = coords_[static_cast<std::size_t>(b)];
      h(a, b) += teff * m(ca.b, cb.a) * m(cb.b, ca.a);
    }
  }

  Vector half_grad;
  const double ssr = residual_terms(x, &half_grad);
  h.block(0, dtheta, dtheta, 1) = -scale * half_grad;
  h.block(dtheta, 0, 1, dtheta) = -scale * half_grad.transpose();
  h(dtheta, dtheta) = 0.5 * scale * ssr;
  return h;
}

double PenalizedProblem::l1(const Vector& x) const {
  double s = 0.0;
  for (Index c : beta_idx_) s += std::abs(x[c]);
  return pen_.lambda3 * s;
}

void PenalizedProblem::project(Vector& x) const {
  auto project_block = [&](const std::vector<Index>& idx, double radius) {
    if (idx.empty()) return;
    Vector v(static_cast<Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) v[static_cast<Index>(c)] = x[idx[c]];
    project_capped_simplex(v, radius);
    for (std::size_t c = 0; c < idx.size(); ++c) x[idx[c]] = v[static_cast<Index>(c)];
  };
  for (Index i = 0; i < n_; ++i) {
    project_block(w_rows_[static_cast<std::size_t>(i)], 1.0 - margins_.row);
    project_block(phi_blocks_[static_cast<std::size_t>(i)], 1.0 - margins_.phi);
  }
  x[dim_ - 1] = std::clamp(x[dim_ - 1], margins_.log_sigma2_min, margins_.log_sigma2_max);
}

void PenalizedProblem::prox(Vector& x, double step) const {
  project(x);
  const double thr = step * pen_.lambda3;
  if (thr <= 0.0) return;
  for (Index c : beta_idx_) {
    const double v = x[c];
    x[c] = v > thr ? v - thr : (v < -thr ? v + thr : 0.0);
  }
}

double PenalizedProblem::spectral_norm(const Vector& x, Vector* grad) const {
  const Matrix w = weights(x);
  Vector phi_total = Vector::Zero(n_);
  for (Index i = 0; i < n_; ++i)
    for (Index c : phi_blocks_[static_cast<std::size_t>(i)]) phi_total[i] += x[c];
  const Matrix m = Eigen::PartialPivLU<Matrix>(Matrix::Identity(n_, n_) - w).inverse();
  const Matrix a = m * phi_total.asDiagonal();
  const Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double norm = svd.singularValues()(0);
  if (grad) {
    grad->setZero(dim_);
    const Vector u = svd.matrixU().col(0);
    const Vector v = svd.matrixV().col(0);
    const Vector mtu = m.transpose() * u;
    const Vector av = a * v;
    for (std::size_t c = 0; c < coords_.size(); ++c) {
      const Coord& co = coords_[c];
      if (co.kind == Coord::Kind::kW) (*grad)[static_cast<Index>(c)] = mtu[co.a] * av[co.b];
      if (co.kind == Coord::Kind::kPhi) (*grad)[static_cast<Index>(c)] = mtu[co.b] * v[co.b];
    }
  }
  return norm;
}

}  // namespace stlasso
