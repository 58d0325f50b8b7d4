#pragma once

// Seasonal regressors: sin/cos pairs at fixed periods on the hourly grid.

#include "stlasso/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace stlasso {

/// Periods in hours.
inline constexpr double kDailyPeriod = 24.0;
inline constexpr double kMonthlyPeriod = 730.5;  // yearly / 12
inline constexpr double kBiannualPeriod = 4383.0;
inline constexpr double kYearlyPeriod = 8766.0;

/// "daily", "monthly", "biannual" or "yearly" -> period in hours; ConfigError otherwise.
double named_period(const std::string& name);
/// The four named periods, shortest first.
std::vector<double> default_periods();

/// T regressor matrices (n x 2|periods|). Periods are sorted by decreasing frequency and each
/// contributes the columns sin(2 pi t / L), cos(2 pi t / L) with t = start_hour + index
/// (hours since the epoch). Every station gets the same row. Empty periods give k = 0.
std::vector<Matrix> fourier_design(Index T, std::int64_t start_hour, Index n, std::vector<double> periods);

/// Column names "sin_<L>", "cos_<L>" in design order.
std::vector<std::string> fourier_names(std::vector<double> periods);

}  // namespace stlasso
