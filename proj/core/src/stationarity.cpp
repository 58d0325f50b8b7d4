#include "stlasso/likelihood.hpp"

#include <cmath>

namespace stlasso {

StationarityReport stationarity_check(const ModelParams& params) {
  StationarityReport r;
  const Index n = params.n();
  for (Index i = 0; i < n; ++i) {
    r.max_row_sum = std::max(r.max_row_sum, params.w.row(i).cwiseAbs().sum());
    r.max_phi_sum = std::max(r.max_phi_sum, params.phi.col(i).cwiseAbs().sum());
  }
  r.row_sum_ok = r.max_row_sum < 1.0;
  r.phi_sum_ok = r.max_phi_sum < 1.0;

  const Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(n, n) - params.w);
  const double abs_det = std::abs(lu.determinant());
  if (!(abs_det >= kSingularDeterminant) || !std::isfinite(abs_det)) return r;
  r.invertible = true;

  const Vector phi_total = params.phi.colwise().sum().transpose();
  const Matrix a = lu.solve(Matrix(phi_total.asDiagonal()));
  const Eigen::JacobiSVD<Matrix> svd(a);
  r.norm_value = svd.singularValues()(0);
  r.stationary = r.norm_value < 1.0;
  return r;
}

}  // namespace stlasso
