// Writes the synthetic 26-station hourly fixture: panel.csv, stations.csv and config.json.
//
//   make_fixture <output-dir>
//
// 27 stations are generated; the last one has too many gaps and is dropped by ingestion.
// The process follows the model with a sparse nearest-neighbour W, common phi, an
// intercept and daily and monthly harmonics, and values are rounded to one decimal like
// sensor data. Eight weeks cannot identify the biannual and yearly terms (they are nearly
// constant over the window and collinear with the intercept), so they are left out.

#include <stlasso/fourier.hpp>
#include <stlasso/io.hpp>
#include <stlasso/likelihood.hpp>
#include <stlasso/simulate.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

using namespace stlasso;

namespace {

constexpr int kStations = 27;
constexpr Index kHours = 24 * 56;
constexpr Index kBurnIn = 500;
constexpr double kSigma2 = 4.0;
constexpr double kGapRate = 0.02;
constexpr double kSparseGapRate = 0.25;

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixture <output-dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  const char* types[] = {"urban background", "urban traffic", "suburban background", "rural background"};
  std::vector<StationInfo> stations;
  for (int i = 0; i < kStations; ++i) {
    char id[16], name[32];
    std::snprintf(id, sizeof id, "ST%02d", i + 1);
    std::snprintf(name, sizeof name, "Station %02d", i + 1);
    const double lat = std::round((47.0 + 3.0 * unit(rng)) * 1e4) / 1e4;
    const double lon = std::round((9.0 + 4.5 * unit(rng)) * 1e4) / 1e4;
    stations.push_back({id, name, lat, lon, types[i % 4]});
  }

  // Each station is driven by its two nearest neighbours.
  const Index n = kStations;
  ModelParams p = ModelParams::zeros(n, 5, 1, kSigma2);
  for (Index i = 0; i < n; ++i) {
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    auto dist = [&](Index j) {
      const double dy = stations[static_cast<std::size_t>(i)].latitude - stations[static_cast<std::size_t>(j)].latitude;
      const double dx = stations[static_cast<std::size_t>(i)].longitude - stations[static_cast<std::size_t>(j)].longitude;
      return dx * dx + dy * dy;
    };
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return dist(a) < dist(b); });
    p.w(i, order[1]) = 0.15;
    p.w(i, order[2]) = 0.15;
    p.phi(0, i) = 0.4 + 0.1 * unit(rng);
  }
  // intercept, then (sin, cos) for daily and monthly
  p.beta << 3.0, 1.5, -1.0, 0.8, -0.5;

  const std::int64_t start = parse_timestamp("2019-03-01T00:00:00");
  const Index total = kBurnIn + kHours;
  auto design = fourier_design(total, start - kBurnIn, n, {named_period("daily"), named_period("monthly")});
  std::vector<Matrix> x(static_cast<std::size_t>(total), Matrix(n, 5));
  for (Index t = 0; t < total; ++t) {
    x[static_cast<std::size_t>(t)].col(0).setOnes();
    x[static_cast<std::size_t>(t)].rightCols(4) = design[static_cast<std::size_t>(t)];
  }
  Matrix eps(n, total);
  for (Index t = 0; t < total; ++t)
    for (Index i = 0; i < n; ++i) eps(i, t) = std::sqrt(kSigma2) * normal(rng);
  if (!stationarity_check(p).stationary) {
    std::cerr << "make_fixture: parameters are not stationary\n";
    return 1;
  }
  const PanelData sim = simulate_panel(p, std::move(x), eps, Matrix::Zero(n, 1));

  std::ostringstream csv;
  csv << "station_id,timestamp,value\n";
  for (Index i = 0; i < n; ++i) {
    const double gap_rate = i == n - 1 ? kSparseGapRate : kGapRate;
    for (Index t = 0; t < kHours; ++t) {
      csv << stations[static_cast<std::size_t>(i)].id << ',' << format_timestamp(start + t) << ',';
      // station 5 also loses a six-hour stretch
      const bool outage = i == 4 && t >= 100 && t < 106;
      if (!outage && unit(rng) >= gap_rate) {
        csv << format_double(std::round(sim.y(i, kBurnIn + t) * 10.0) / 10.0);
      }
      csv << '\n';
    }
  }
  std::ofstream(dir / "panel.csv") << csv.str();
  std::ofstream st(dir / "stations.csv");
  write_stations(st, stations);
  std::ofstream(dir / "config.json") << R"({
  "data": {"panel": "panel.csv", "stations": "stations.csv", "completeness": 0.9},
  "fourier": {"frequencies": ["daily", "monthly"], "intercept": true},
  "penalty": {"lambda1": 10.0, "lambda2": 0.1, "lambda3": 0.1},
  "inference": {"tau": 0.0001}
}
)";
  std::cout << "wrote " << dir << '\n';
  return 0;
}
