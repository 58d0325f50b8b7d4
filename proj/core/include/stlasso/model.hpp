#pragma once

// Core data types of the spatiotemporal dynamic panel model
//
//   y_t = X_t beta + sum_p Phi_p y_{t-p} + W y_t + eps_t,   eps_t ~ N(0, sigma2 I)
//
// with diagonal Phi_p and a fully unknown weight matrix W (zero diagonal).

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace stlasso {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using BoolVector = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Observed panel: responses y (n x T) and one n x k regressor matrix per time point.
struct PanelData {
  Matrix y;
  std::vector<Matrix> x;

  PanelData() = default;
  /// Validates shapes; throws DimensionError / DomainError.
  PanelData(Matrix responses, std::vector<Matrix> regressors);

  Index n() const { return y.rows(); }
  Index T() const { return y.cols(); }
  Index k() const { return x.empty() ? 0 : x.front().cols(); }

  /// Checks the invariants required for a model with `lags` temporal lags.
  void validate(int lags) const;
};

struct ModelParams {
  Vector beta;          // k
  Matrix phi;           // P x n, phi(p, i) = phi_{p+1}(s_i)
  Matrix w;             // n x n, zero diagonal
  double sigma2 = 1.0;

  Index n() const { return w.rows(); }
  Index k() const { return beta.size(); }
  int lags() const { return static_cast<int>(phi.rows()); }

  static ModelParams zeros(Index n, Index k, int lags, double sigma2 = 1.0);
};

/// Returns human-readable descriptions of every violated ModelParams invariant
/// (zero diagonal, nonnegative weights, row sums <= 1 - row_margin, phi in [0,1],
/// sigma2 > 0). Empty means valid.
std::vector<std::string> invariant_violations(const ModelParams& params, double row_margin = 1e-6,
                                              double tol = 1e-12);

/// Throws DimensionError unless params and panel agree on n and k.
void check_compatible(const ModelParams& params, const PanelData& panel);

/// Nonnegative L1 penalty weights for the weight matrix, temporal and regression blocks.
struct PenaltyConfig {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;

  void validate() const;
  friend bool operator==(const PenaltyConfig&, const PenaltyConfig&) = default;
};

/// Fixed packing of ModelParams into a flat vector:
///   [ beta (k) | phi lag-major: phi(0,0..n-1), phi(1,0..n-1), ... | W off-diagonal row-major | sigma2 ]
class ParamLayout {
 public:
  ParamLayout(Index n, Index k, int lags);
  explicit ParamLayout(const ModelParams& like);

  Index n() const { return n_; }
  Index k() const { return k_; }
  int lags() const { return lags_; }
  Index size() const { return k_ + lags_ * n_ + n_ * (n_ - 1) + 1; }
  /// Parameter count under the k + n^2 + 1 convention (diagonal weights included), P = 1.
  Index reported_count() const { return k_ + n_ * n_ + 1; }

  Index beta_index(Index j) const { return j; }
  Index phi_index(int p, Index i) const { return k_ + p * n_ + i; }
  Index w_index(Index i, Index j) const;
  Index sigma2_index() const { return size() - 1; }

  Vector pack(const ModelParams& params) const;
  ModelParams unpack(const Vector& theta) const;
  /// Name of the coordinate at `index`, e.g. "beta[2]", "phi1[3]", "w[0,4]", "sigma2".
  std::string name(Index index) const;
  std::string group(Index index) const;

 private:
  Index n_;
  Index k_;
  int lags_;
};

/// Time indices (0-based) at which a residual is formed. Each index t has
/// t-1, ..., t-P inside the same contiguous segment.
struct Sample {
  std::vector<Index> times;

  Index size() const { return static_cast<Index>(times.size()); }

  /// All t = P, ..., T-1.
  static Sample full(Index T, int lags);
  /// Segments are half-open [begin, end) ranges; each conditions on its own first P points.
  static Sample from_segments(const std::vector<std::pair<Index, Index>>& segments, int lags);
};

/// Coordinates that are free (true) or frozen at zero (false).
struct Support {
  BoolVector beta;
  BoolMatrix phi;  // P x n
  BoolMatrix w;    // n x n, diagonal always false

  static Support all(Index n, Index k, int lags);
  /// Entries with |value| > tau.
  static Support of(const ModelParams& params, double tau);

  Index count() const;
  friend bool operator==(const Support& a, const Support& b);
};

}  // namespace stlasso
