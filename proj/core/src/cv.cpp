#include "stlasso/cv.hpp"

#include "stlasso/parallel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace stlasso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lexicographic preference for sparser models among equal scores.
bool sparser(const PenaltyConfig& a, const PenaltyConfig& b) {
  if (a.lambda1 != b.lambda1) return a.lambda1 > b.lambda1;
  if (a.lambda2 != b.lambda2) return a.lambda2 > b.lambda2;
  return a.lambda3 > b.lambda3;
}

}  // namespace

std::vector<PenaltyConfig> CvPlan::default_grid() {
  const std::vector<double> decades{0.001, 0.01, 0.1, 1.0, 10.0};
  return product_grid(decades, decades, decades);
}

std::vector<PenaltyConfig> CvPlan::product_grid(const std::vector<double>& lambda1,
                                                const std::vector<double>& lambda2,
                                                const std::vector<double>& lambda3) {
  std::vector<PenaltyConfig> grid;
  for (double a : lambda1)
    for (double b : lambda2)
      for (double c : lambda3) grid.push_back({a, b, c});
  return grid;
}

void CvPlan::validate(Index T, int lags) const {
  if (n_blocks < 2) throw ConfigError("cv: n_blocks must be >= 2");
  if (grid.empty()) throw ConfigError("cv: empty penalty grid");
  for (const auto& p : grid) p.validate();
  (void)block_split(T, n_blocks, lags);
}

std::vector<TimeRange> block_split(Index T, int n_blocks, int lags) {
  if (n_blocks < 1) throw DomainError("block_split: n_blocks must be >= 1");
  if (T < static_cast<Index>(n_blocks) * (lags + 2)) {
    std::ostringstream os;
    os << "block_split: T = " << T << " is too short for " << n_blocks << " blocks of at least "
       << lags + 2 << " points";
    throw DomainError(os.str());
  }
  const Index base = T / n_blocks;
  const Index extra = T % n_blocks;
  std::vector<TimeRange> blocks;
  Index begin = 0;
  for (int b = 0; b < n_blocks; ++b) {
    const Index len = base + (b < extra ? 1 : 0);
    blocks.push_back({begin, begin + len});
    begin += len;
  }
  return blocks;
}

bool CvScore::ok() const {
  for (const auto& f : folds)
    if (!f.ok) return false;
  return !folds.empty();
}

CvScore cv_evaluate(const PanelData& panel, const PenaltyConfig& pen, const CvPlan& plan,
                    const SolverOptions& opts) {
  plan.validate(panel.T(), opts.lags);
  const auto blocks = block_split(panel.T(), plan.n_blocks, opts.lags);
  const Support free = Support::all(panel.n(), panel.k(), opts.lags);

  CvScore out;
  out.penalty = pen;
  double total_sse = 0.0;
  Index total_count = 0;
  bool failed = false;
  for (int b = 0; b < plan.n_blocks; ++b) {
    FoldScore fold;
    fold.fold = b;
    // Training segments: maximal runs of consecutive blocks other than b.
    std::vector<std::pair<Index, Index>> segments;
    for (int c = 0; c < plan.n_blocks; ++c) {
      if (c == b) continue;
      const auto& r = blocks[static_cast<std::size_t>(c)];
      if (!segments.empty() && segments.back().second == r.begin) segments.back().second = r.end;
      else segments.emplace_back(r.begin, r.end);
    }
    std::vector<Index> held_out;
    for (Index t = blocks[static_cast<std::size_t>(b)].begin; t < blocks[static_cast<std::size_t>(b)].end; ++t)
      if (t >= opts.lags) held_out.push_back(t);

    try {
      const FitResult fr = fit(panel, Sample::from_segments(segments, opts.lags), pen, opts, free);
      if (!fr.feasible) throw NumericalError("fold fit infeasible: " + fr.message);
      const Matrix pred = one_step_predictions(fr.params, panel, held_out);
      for (std::size_t c = 0; c < held_out.size(); ++c) {
        fold.sse += (pred.col(static_cast<Index>(c)) - panel.y.col(held_out[c])).squaredNorm();
      }
      fold.count = static_cast<Index>(held_out.size()) * panel.n();
      if (!std::isfinite(fold.sse)) throw NumericalError("non-finite prediction error");
      fold.rmse = fold.count > 0 ? std::sqrt(fold.sse / static_cast<double>(fold.count)) : 0.0;
      fold.ok = true;
      fold.status = "ok";
      total_sse += fold.sse;
      total_count += fold.count;
    } catch (const std::exception& e) {
      fold.ok = false;
      fold.rmse = kInf;
      fold.status = std::string("failed: ") + e.what();
      failed = true;
    }
    out.folds.push_back(std::move(fold));
  }
  out.score = failed ? kInf
                     : (total_count > 0 ? std::sqrt(total_sse / static_cast<double>(total_count)) : 0.0);
  return out;
}

double cv_score(const PanelData& panel, const PenaltyConfig& pen, const CvPlan& plan,
                const SolverOptions& opts) {
  return cv_evaluate(panel, pen, plan, opts).score;
}

GridSearchResult grid_search(const PanelData& panel, const CvPlan& plan, const SolverOptions& opts,
                             int threads) {
  if (plan.grid.empty()) throw SearchError("grid_search: empty penalty grid");
  plan.validate(panel.T(), opts.lags);

  GridSearchResult res;
  res.table.resize(plan.grid.size());
  parallel_for(plan.grid.size(), threads, [&](std::size_t g) {
    res.table[g] = cv_evaluate(panel, plan.grid[g], plan, opts);
  });

  const CvScore* best = nullptr;
  for (const auto& row : res.table) {
    if (!std::isfinite(row.score)) continue;
    if (!best || row.score < best->score ||
        (row.score == best->score && sparser(row.penalty, best->penalty))) {
      best = &row;
    }
  }
  if (!best) {
    std::ostringstream os;
    os << "grid_search: all " << res.table.size() << " penalty triples failed";
    for (const auto& row : res.table) {
      for (const auto& f : row.folds) {
        if (!f.ok) {
          os << "; (" << row.penalty.lambda1 << "," << row.penalty.lambda2 << ","
             << row.penalty.lambda3 << ") fold " << f.fold << ": " << f.status;
          break;
        }
      }
    }
    throw SearchError(os.str());
  }
  res.best = best->penalty;
  res.best_score = best->score;
  if (plan.refit_full) res.full_fit = fit(panel, res.best, opts);
  return res;
}

}  // namespace stlasso
