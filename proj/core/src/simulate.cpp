#include "stlasso/simulate.hpp"

#include "stlasso/errors.hpp"
#include "stlasso/likelihood.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace stlasso {

namespace {

// Independent streams for the recorded regressors, recorded errors and burn-in forcing.
enum class Stream : std::uint32_t { kRegressors = 1, kErrors = 2, kBurnIn = 3 };

std::mt19937_64 make_engine(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

std::vector<Matrix> draw_regressors(std::mt19937_64& rng, Index n, Index k, Index T) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Matrix> x(static_cast<std::size_t>(T), Matrix(n, k));
  for (auto& xt : x)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < k; ++j) xt(i, j) = normal(rng);
  return x;
}

Matrix draw_errors(std::mt19937_64& rng, Index n, Index T, double sigma2) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(sigma2);
  Matrix e(n, T);
  for (Index t = 0; t < T; ++t)
    for (Index i = 0; i < n; ++i) e(i, t) = sd * normal(rng);
  return e;
}

}  // namespace

void DgpConfig::validate() const {
  if (side < 2) throw DomainError("dgp: side must be >= 2");
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("dgp: rho must lie in [0, 1)");
  if (burn_in < 0) throw DomainError("dgp: burn_in must be >= 0");
  if (T < 1) throw DomainError("dgp: T must be >= 1");
  if (lags < 1) throw DomainError("dgp: lags must be >= 1");
  if (!(sigma2_true >= 0.0)) throw DomainError("dgp: sigma2 must be >= 0");
  if (phi.zero_fraction < 0.0 || phi.zero_fraction > 1.0) {
    throw DomainError("dgp: phi zero fraction must lie in [0, 1]");
  }
}

Matrix queen_lattice_weights(int side) {
  if (side < 2) throw DomainError("queen_lattice_weights: side must be >= 2");
  const Index n = static_cast<Index>(side) * side;
  Matrix w = Matrix::Zero(n, n);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const Index i = static_cast<Index>(r) * side + c;
      int degree = 0;
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= side || cc < 0 || cc >= side) continue;
          w(i, static_cast<Index>(rr) * side + cc) = 1.0;
          ++degree;
        }
      w.row(i) /= static_cast<double>(degree);
    }
  }
  return w;
}

ModelParams make_true_params(const DgpConfig& cfg) {
  cfg.validate();
  const Index n = cfg.n();
  ModelParams p = ModelParams::zeros(n, cfg.k(), cfg.lags, cfg.sigma2_true);
  p.beta = cfg.beta_true;
  p.w = cfg.rho * queen_lattice_weights(cfg.side);
  const auto zeros = static_cast<Index>(std::floor(cfg.phi.zero_fraction * static_cast<double>(n)));
  for (Index i = zeros; i < n; ++i) p.phi(0, i) = cfg.phi.value;

  const StationarityReport st = stationarity_check(p);
  if (!st.stationary) {
    std::ostringstream os;
    os << "dgp: true parameters are not stationary (norm " << st.norm_value << ")";
    throw ConfigError(os.str());
  }
  return p;
}

std::vector<Matrix> simulate_regressors(const DgpConfig& cfg) {
  auto rng = make_engine(cfg.seed, Stream::kRegressors);
  return draw_regressors(rng, cfg.n(), cfg.k(), cfg.T);
}

PanelData simulate_panel(const ModelParams& params, const DgpConfig& cfg) {
  cfg.validate();
  if (params.n() != cfg.n() || params.k() != cfg.k()) {
    throw DimensionError("simulate_panel: params do not match dgp dimensions");
  }
  const StationarityReport st = stationarity_check(params);
  if (!st.stationary) {
    std::ostringstream os;
    os << "simulate_panel: refusing non-stationary parameters (norm " << st.norm_value << ")";
    throw DomainError(os.str());
  }
  if (!(params.sigma2 >= 0.0)) throw DomainError("simulate_panel: sigma2 must be >= 0");
  const Index n = cfg.n();
  const int P = params.lags();

  Matrix initial = Matrix::Zero(n, P);
  if (cfg.burn_in > 0) {
    auto burn = make_engine(cfg.seed, Stream::kBurnIn);
    auto bx = draw_regressors(burn, n, cfg.k(), cfg.burn_in);
    const Matrix be = draw_errors(burn, n, cfg.burn_in, params.sigma2);
    const PanelData warm = simulate_panel(params, std::move(bx), be, initial);
    const Index keep = std::min<Index>(P, cfg.burn_in);
    initial.rightCols(keep) = warm.y.rightCols(keep);
  }

  auto err_rng = make_engine(cfg.seed, Stream::kErrors);
  const Matrix eps = draw_errors(err_rng, n, cfg.T, params.sigma2);
  return simulate_panel(params, simulate_regressors(cfg), eps, initial);
}

PanelData simulate_panel(const ModelParams& params, std::vector<Matrix> x, const Matrix& eps,
                         const Matrix& initial) {
  const Index n = params.n();
  const int P = params.lags();
  const auto T = static_cast<Index>(x.size());
  if (eps.rows() != n || eps.cols() != T) throw DimensionError("simulate_panel: eps shape");
  if (initial.rows() != n || initial.cols() != P) throw DimensionError("simulate_panel: initial shape");
  for (const auto& xt : x) {
    if (xt.rows() != n || xt.cols() != params.k()) throw DimensionError("simulate_panel: X_t shape");
  }
  const Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(n, n) - params.w);
  if (!(std::abs(lu.determinant()) >= kSingularDeterminant)) {
    throw SingularityError("simulate_panel: I - W is singular");
  }

  Matrix y(n, T);
  auto lagged = [&](Index t) -> Vector {
    return t >= 0 ? Vector(y.col(t)) : Vector(initial.col(P + t));
  };
  for (Index t = 0; t < T; ++t) {
    Vector rhs = eps.col(t);
    if (params.k() > 0) rhs.noalias() += x[static_cast<std::size_t>(t)] * params.beta;
    for (int p = 0; p < P; ++p) {
      rhs.array() += params.phi.row(p).transpose().array() * lagged(t - p - 1).array();
    }
    y.col(t) = lu.solve(rhs);
  }
  return PanelData(std::move(y), std::move(x));
}

}  // namespace stlasso
