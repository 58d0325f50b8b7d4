#pragma once

#include "stlasso/optimize.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stlasso {

/// Half-open range of 0-based time indices [begin, end).
struct TimeRange {
  Index begin = 0;
  Index end = 0;
  Index size() const { return end - begin; }
  friend bool operator==(const TimeRange&, const TimeRange&) = default;
};

struct CvPlan {
  int n_blocks = 5;
  std::vector<PenaltyConfig> grid = default_grid();
  bool refit_full = true;

  /// Full Cartesian product of {0.001, 0.01, 0.1, 1, 10} for each lambda (125 triples).
  static std::vector<PenaltyConfig> default_grid();
  /// Cartesian product of the three value lists.
  static std::vector<PenaltyConfig> product_grid(const std::vector<double>& lambda1,
                                                 const std::vector<double>& lambda2,
                                                 const std::vector<double>& lambda3);
  void validate(Index T, int lags) const;
};

/// Splits 0..T-1 into n_blocks contiguous blocks whose sizes differ by at most one; the
/// first T mod n_blocks blocks get the extra point. Requires T >= n_blocks * (P + 2).
std::vector<TimeRange> block_split(Index T, int n_blocks, int lags);

struct FoldScore {
  int fold = 0;
  double rmse = 0.0;     // held-out RMSE of this fold alone
  double sse = 0.0;
  Index count = 0;       // held-out observations
  bool ok = false;
  std::string status;
};

struct CvScore {
  PenaltyConfig penalty;
  /// Pooled RMSE over all held-out observations; +infinity if any fold failed.
  double score = 0.0;
  std::vector<FoldScore> folds;
  bool ok() const;
};

/// Blocked cross-validation: each block is held out in turn, the model is fit on the
/// remaining blocks (each contiguous run of blocks is its own conditional-likelihood
/// segment) and the held-out block is predicted one step ahead from observed lags.
CvScore cv_evaluate(const PanelData& panel, const PenaltyConfig& pen, const CvPlan& plan,
                    const SolverOptions& opts);
double cv_score(const PanelData& panel, const PenaltyConfig& pen, const CvPlan& plan,
                const SolverOptions& opts);

struct GridSearchResult {
  PenaltyConfig best;
  double best_score = 0.0;
  std::vector<CvScore> table;  // grid order
  std::optional<FitResult> full_fit;
};

/// Minimizes cv_score over plan.grid. Ties go to the larger lambda1, then lambda2, then
/// lambda3. Throws SearchError on an empty grid or when every triple fails.
GridSearchResult grid_search(const PanelData& panel, const CvPlan& plan, const SolverOptions& opts,
                             int threads = 1);

}  // namespace stlasso
