#include "stlasso/evaluate.hpp"

#include "stlasso/parallel.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace stlasso {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Accumulator {
  double sum = 0.0;
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  Index count = 0;  // entries per replication

  void add(double err) {
    sum += err;
    abs_sum += std::abs(err);
    sq_sum += err * err;
  }
  MetricRow row(Index m) const {
    const double denom = static_cast<double>(m) * static_cast<double>(count);
    if (denom == 0.0) return {0.0, 0.0, 0.0, count};
    return {sum / denom, abs_sum / denom, std::sqrt(sq_sum / denom), count};
  }
};

}  // namespace

McSummary group_metrics(const std::vector<ModelParams>& estimates, const ModelParams& truth) {
  if (estimates.empty()) throw DomainError("group_metrics: no estimates (m = 0)");
  const Index n = truth.n();
  Accumulator beta, phi, w_all, w_zero, w_nonzero, sigma;
  beta.count = truth.k();
  phi.count = truth.phi.size();
  w_all.count = n * (n - 1);
  sigma.count = 1;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j) ++(truth.w(i, j) == 0.0 ? w_zero.count : w_nonzero.count);

  double zero_hits = 0.0;
  for (const auto& est : estimates) {
    if (est.n() != n || est.k() != truth.k() || est.lags() != truth.lags()) {
      throw DimensionError("group_metrics: estimate shape differs from truth");
    }
    for (Index j = 0; j < truth.k(); ++j) beta.add(est.beta[j] - truth.beta[j]);
    for (Index c = 0; c < truth.phi.cols(); ++c)
      for (Index r = 0; r < truth.phi.rows(); ++r) phi.add(est.phi(r, c) - truth.phi(r, c));
    Index zeros = 0;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double e = est.w(i, j) - truth.w(i, j);
        w_all.add(e);
        if (truth.w(i, j) == 0.0) {
          w_zero.add(e);
          if (est.w(i, j) == 0.0) ++zeros;
        } else {
          w_nonzero.add(e);
        }
      }
    }
    if (w_zero.count > 0) zero_hits += static_cast<double>(zeros) / static_cast<double>(w_zero.count);
    sigma.add(est.sigma2 - truth.sigma2);
  }

  const Index m = static_cast<Index>(estimates.size());
  McSummary s;
  s.beta = beta.row(m);
  s.phi = phi.row(m);
  s.w_all = w_all.row(m);
  if (w_zero.count > 0) {
    s.w_zero = w_zero.row(m);
    s.zero_recovery = zero_hits / static_cast<double>(m);
  }
  if (w_nonzero.count > 0) s.w_nonzero = w_nonzero.row(m);
  s.sigma = sigma.row(m);
  s.reps_ok = m;
  return s;
}

double full_model_rmse(const std::vector<ModelParams>& fits, const std::vector<PanelData>& panels) {
  if (fits.size() != panels.size()) throw DimensionError("full_model_rmse: list lengths differ");
  if (fits.empty()) throw DomainError("full_model_rmse: empty lists");
  const Index n = panels.front().n();
  double total = 0.0;
  for (std::size_t r = 0; r < fits.size(); ++r) {
    const auto& panel = panels[r];
    check_compatible(fits[r], panel);
    if (panel.n() != n) throw DimensionError("full_model_rmse: panels differ in n");
    std::vector<Index> times;
    for (Index t = fits[r].lags(); t < panel.T(); ++t) times.push_back(t);
    const Matrix pred = one_step_predictions(fits[r], panel, times);
    total += (pred - panel.y.rightCols(static_cast<Index>(times.size()))).squaredNorm();
  }
  return std::sqrt(total / (static_cast<double>(n) * static_cast<double>(fits.size())));
}

void McConfig::validate() const {
  if (reps < 1) throw ConfigError("mc: reps must be >= 1");
  if (threads < 1) throw ConfigError("mc: threads must be >= 1");
  dgp.validate();
  opts.validate();
  if (penalty) penalty->validate();
  else plan.validate(dgp.T, opts.lags);
  if (dgp.lags != opts.lags) throw ConfigError("mc: dgp.lags and opts.lags differ");
}

McResult monte_carlo(const McConfig& cfg) {
  cfg.validate();
  McResult out;
  out.truth = make_true_params(cfg.dgp);
  out.records.resize(static_cast<std::size_t>(cfg.reps));

  Index true_zeros = 0;
  for (Index i = 0; i < out.truth.n(); ++i)
    for (Index j = 0; j < out.truth.n(); ++j)
      if (i != j && out.truth.w(i, j) == 0.0) ++true_zeros;

  parallel_for(out.records.size(), cfg.threads, [&](std::size_t r) {
    ReplicationRecord& rec = out.records[r];
    rec.rep = static_cast<int>(r);
    rec.seed = cfg.dgp.seed + static_cast<std::uint64_t>(r);
    rec.zero_fraction = kNaN;
    const auto started = std::chrono::steady_clock::now();
    try {
      DgpConfig dgp = cfg.dgp;
      dgp.seed = rec.seed;
      const PanelData panel = simulate_panel(out.truth, dgp);
      SolverOptions opts = cfg.opts;
      if (cfg.start_at_truth) {
        opts.init = InitStrategy::kGiven;
        opts.start = out.truth;
      }
      FitResult fr;
      if (cfg.penalty) {
        rec.penalty = *cfg.penalty;
        fr = fit(panel, rec.penalty, opts);
      } else {
        CvPlan plan = cfg.plan;
        plan.refit_full = true;
        GridSearchResult gs = grid_search(panel, plan, opts, 1);
        rec.penalty = gs.best;
        rec.cv_score = gs.best_score;
        fr = std::move(*gs.full_fit);
      }
      rec.estimate = fr.params;
      rec.iterations = fr.iterations;
      rec.converged = fr.converged;
      rec.feasible = fr.feasible;
      rec.stationary = fr.stationarity.stationary;
      rec.norm_value = fr.stationarity.norm_value;
      rec.ok = fr.feasible;
      rec.status = fr.message;
      if (true_zeros > 0) {
        Index hits = 0;
        for (Index i = 0; i < out.truth.n(); ++i)
          for (Index j = 0; j < out.truth.n(); ++j)
            if (i != j && out.truth.w(i, j) == 0.0 && fr.params.w(i, j) == 0.0) ++hits;
        rec.zero_fraction = static_cast<double>(hits) / static_cast<double>(true_zeros);
      }
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.status = std::string("failed: ") + e.what();
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  });

  std::vector<ModelParams> estimates;
  double seconds = 0.0;
  Index failed = 0;
  for (const auto& rec : out.records) {
    if (!rec.ok) {
      ++failed;
      continue;
    }
    estimates.push_back(rec.estimate);
    seconds += rec.seconds;
  }
  if (10 * failed > cfg.reps || estimates.empty()) {
    std::ostringstream os;
    os << "monte_carlo: " << failed << " of " << cfg.reps << " replications failed";
    for (const auto& rec : out.records) {
      if (!rec.ok) {
        os << "; first failure (rep " << rec.rep << "): " << rec.status;
        break;
      }
    }
    throw NumericalError(os.str());
  }
  out.summary = group_metrics(estimates, out.truth);
  out.summary.reps_failed = failed;
  out.summary.mean_seconds = seconds / static_cast<double>(estimates.size());
  return out;
}

InformationCriteria information_criteria(double loglik, Index n_params, Index n_obs) {
  if (n_obs < 1) throw DomainError("information_criteria: n_obs must be >= 1");
  const double p = static_cast<double>(n_params);
  return {-2.0 * loglik + 2.0 * p, -2.0 * loglik + std::log(static_cast<double>(n_obs)) * p};
}

}  // namespace stlasso
