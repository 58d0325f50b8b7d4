#include "stlasso/model.hpp"

#include "stlasso/errors.hpp"

#include <cmath>
#include <sstream>

namespace stlasso {

PanelData::PanelData(Matrix responses, std::vector<Matrix> regressors)
    : y(std::move(responses)), x(std::move(regressors)) {
  if (static_cast<Index>(x.size()) != y.cols()) {
    std::ostringstream os;
    os << "panel: " << x.size() << " regressor matrices for " << y.cols() << " time points";
    throw DimensionError(os.str());
  }
  const Index k = x.empty() ? 0 : x.front().cols();
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (x[t].rows() != y.rows() || x[t].cols() != k) {
      std::ostringstream os;
      os << "panel: X_" << t << " is " << x[t].rows() << "x" << x[t].cols() << ", expected "
         << y.rows() << "x" << k;
      throw DimensionError(os.str());
    }
  }
  if (!y.allFinite()) throw DomainError("panel: responses contain missing or non-finite values");
  for (const auto& xt : x) {
    if (!xt.allFinite()) throw DomainError("panel: regressors contain missing or non-finite values");
  }
}

void PanelData::validate(int lags) const {
  if (n() < 2) throw DomainError("panel: need at least 2 locations");
  if (lags < 1) throw DomainError("panel: lag order must be >= 1");
  if (T() < lags + 2) {
    std::ostringstream os;
    os << "panel: T = " << T() << " is below P + 2 = " << lags + 2;
    throw DomainError(os.str());
  }
  if (static_cast<Index>(x.size()) != T()) throw DimensionError("panel: regressor count != T");
}

ModelParams ModelParams::zeros(Index n, Index k, int lags, double sigma2) {
  ModelParams p;
  p.beta = Vector::Zero(k);
  p.phi = Matrix::Zero(lags, n);
  p.w = Matrix::Zero(n, n);
  p.sigma2 = sigma2;
  return p;
}

std::vector<std::string> invariant_violations(const ModelParams& params, double row_margin,
                                              double tol) {
  std::vector<std::string> out;
  const Index n = params.n();
  if (params.w.cols() != n) out.push_back("w is not square");
  if (params.phi.cols() != n) out.push_back("phi column count != n");
  if (!out.empty()) return out;
  for (Index i = 0; i < n; ++i) {
    if (params.w(i, i) != 0.0) out.push_back("w[" + std::to_string(i) + "," + std::to_string(i) + "] != 0");
    double row = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (params.w(i, j) < -tol) {
        out.push_back("w[" + std::to_string(i) + "," + std::to_string(j) + "] < 0");
      }
      row += params.w(i, j);
    }
    if (row > 1.0 - row_margin + tol) out.push_back("row sum of w[" + std::to_string(i) + "] >= 1");
  }
  for (Index p = 0; p < params.phi.rows(); ++p) {
    for (Index i = 0; i < n; ++i) {
      const double v = params.phi(p, i);
      if (v < -tol || v > 1.0 + tol) {
        out.push_back("phi" + std::to_string(p + 1) + "[" + std::to_string(i) + "] outside [0,1]");
      }
    }
  }
  if (!(params.sigma2 > 0.0) || !std::isfinite(params.sigma2)) out.push_back("sigma2 <= 0");
  if (!params.beta.allFinite() || !params.phi.allFinite() || !params.w.allFinite()) {
    out.push_back("non-finite parameter");
  }
  return out;
}

void check_compatible(const ModelParams& params, const PanelData& panel) {
  if (params.n() != panel.n() || params.w.cols() != panel.n() || params.phi.cols() != panel.n()) {
    throw DimensionError("params/panel location count mismatch");
  }
  if (params.k() != panel.k()) throw DimensionError("params/panel regressor count mismatch");
}

void PenaltyConfig::validate() const {
  for (double l : {lambda1, lambda2, lambda3}) {
    if (!std::isfinite(l) || l < 0.0) throw DomainError("penalty weights must be finite and >= 0");
  }
}

ParamLayout::ParamLayout(Index n, Index k, int lags) : n_(n), k_(k), lags_(lags) {
  if (n < 1 || k < 0 || lags < 0) throw DomainError("invalid parameter layout");
}

ParamLayout::ParamLayout(const ModelParams& like) : ParamLayout(like.n(), like.k(), like.lags()) {}

Index ParamLayout::w_index(Index i, Index j) const {
  // row i holds n-1 entries; skip the diagonal
  return k_ + lags_ * n_ + i * (n_ - 1) + (j < i ? j : j - 1);
}

Vector ParamLayout::pack(const ModelParams& params) const {
  if (params.n() != n_ || params.k() != k_ || params.lags() != lags_) {
    throw DimensionError("pack: params do not match layout");
  }
  Vector theta(size());
  for (Index j = 0; j < k_; ++j) theta[beta_index(j)] = params.beta[j];
  for (int p = 0; p < lags_; ++p)
    for (Index i = 0; i < n_; ++i) theta[phi_index(p, i)] = params.phi(p, i);
  for (Index i = 0; i < n_; ++i)
    for (Index j = 0; j < n_; ++j)
      if (i != j) theta[w_index(i, j)] = params.w(i, j);
  theta[sigma2_index()] = params.sigma2;
  return theta;
}

ModelParams ParamLayout::unpack(const Vector& theta) const {
  if (theta.size() != size()) throw DimensionError("unpack: vector length does not match layout");
  ModelParams p = ModelParams::zeros(n_, k_, lags_);
  for (Index j = 0; j < k_; ++j) p.beta[j] = theta[beta_index(j)];
  for (int l = 0; l < lags_; ++l)
    for (Index i = 0; i < n_; ++i) p.phi(l, i) = theta[phi_index(l, i)];
  for (Index i = 0; i < n_; ++i)
    for (Index j = 0; j < n_; ++j)
      if (i != j) p.w(i, j) = theta[w_index(i, j)];
  p.sigma2 = theta[sigma2_index()];
  return p;
}

std::string ParamLayout::name(Index index) const {
  if (index < 0 || index >= size()) throw DomainError("parameter index out of range");
  if (index < k_) return "beta[" + std::to_string(index) + "]";
  index -= k_;
  if (index < lags_ * n_) {
    return "phi" + std::to_string(index / n_ + 1) + "[" + std::to_string(index % n_) + "]";
  }
  index -= lags_ * n_;
  if (index < n_ * (n_ - 1)) {
    const Index i = index / (n_ - 1);
    Index j = index % (n_ - 1);
    if (j >= i) ++j;
    return "w[" + std::to_string(i) + "," + std::to_string(j) + "]";
  }
  return "sigma2";
}

std::string ParamLayout::group(Index index) const {
  if (index < k_) return "beta";
  if (index < k_ + lags_ * n_) return "phi";
  if (index < size() - 1) return "w";
  return "sigma2";
}

Sample Sample::full(Index T, int lags) { return from_segments({{0, T}}, lags); }

Sample Sample::from_segments(const std::vector<std::pair<Index, Index>>& segments, int lags) {
  Sample s;
  for (const auto& [begin, end] : segments) {
    if (begin < 0 || end < begin) throw DomainError("sample: invalid segment");
    for (Index t = begin + lags; t < end; ++t) s.times.push_back(t);
  }
  return s;
}

Support Support::all(Index n, Index k, int lags) {
  Support s;
  s.beta = BoolVector::Constant(k, true);
  s.phi = BoolMatrix::Constant(lags, n, true);
  s.w = BoolMatrix::Constant(n, n, true);
  for (Index i = 0; i < n; ++i) s.w(i, i) = false;
  return s;
}

Support Support::of(const ModelParams& params, double tau) {
  if (tau < 0.0) throw DomainError("support: tau must be >= 0");
  Support s;
  s.beta = params.beta.array().abs() > tau;
  s.phi = params.phi.array().abs() > tau;
  s.w = params.w.array().abs() > tau;
  for (Index i = 0; i < params.n(); ++i) s.w(i, i) = false;
  return s;
}

Index Support::count() const { return beta.count() + phi.count() + w.count(); }

bool operator==(const Support& a, const Support& b) {
  return a.beta.size() == b.beta.size() && a.phi.rows() == b.phi.rows() &&
         a.phi.cols() == b.phi.cols() && a.w.rows() == b.w.rows() && (a.beta == b.beta).all() &&
         (a.phi == b.phi).all() && (a.w == b.w).all();
}

}  // namespace stlasso
