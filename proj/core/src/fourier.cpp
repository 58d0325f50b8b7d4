#include "stlasso/fourier.hpp"

#include "stlasso/errors.hpp"
#include "stlasso/io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace stlasso {

namespace {

void check_periods(std::vector<double>& periods) {
  for (double p : periods)
    if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("fourier: periods must be positive");
  std::sort(periods.begin(), periods.end());
  if (std::adjacent_find(periods.begin(), periods.end()) != periods.end()) {
    throw ConfigError("fourier: duplicate period");
  }
}

}  // namespace

double named_period(const std::string& name) {
  if (name == "daily") return kDailyPeriod;
  if (name == "monthly") return kMonthlyPeriod;
  if (name == "biannual") return kBiannualPeriod;
  if (name == "yearly") return kYearlyPeriod;
  throw ConfigError("fourier: unknown frequency '" + name + "'");
}

std::vector<double> default_periods() { return {kDailyPeriod, kMonthlyPeriod, kBiannualPeriod, kYearlyPeriod}; }

std::vector<Matrix> fourier_design(Index T, std::int64_t start_hour, Index n, std::vector<double> periods) {
  if (T < 0 || n < 1) throw DomainError("fourier_design: need T >= 0 and n >= 1");
  check_periods(periods);
  const auto k = static_cast<Index>(2 * periods.size());
  std::vector<Matrix> x(static_cast<std::size_t>(T), Matrix(n, k));
  for (Index t = 0; t < T; ++t) {
    const double hour = static_cast<double>(start_hour + t);
    for (std::size_t c = 0; c < periods.size(); ++c) {
      // fmod is exact, so the phase stays accurate far from the epoch.
      const double angle = 2.0 * std::numbers::pi * std::fmod(hour, periods[c]) / periods[c];
      x[static_cast<std::size_t>(t)].col(static_cast<Index>(2 * c)).setConstant(std::sin(angle));
      x[static_cast<std::size_t>(t)].col(static_cast<Index>(2 * c + 1)).setConstant(std::cos(angle));
    }
  }
  return x;
}

std::vector<std::string> fourier_names(std::vector<double> periods) {
  check_periods(periods);
  std::vector<std::string> names;
  for (double p : periods) {
    names.push_back("sin_" + format_double(p));
    names.push_back("cos_" + format_double(p));
  }
  return names;
}

}  // namespace stlasso
