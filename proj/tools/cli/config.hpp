#pragma once

// Run configuration shared by all subcommands. Loaded from a JSON file (--config) and then
// overridden by command-line flags. Unknown keys are rejected.

#include <stlasso/cv.hpp>
#include <stlasso/simulate.hpp>

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stlasso::cli {

using Json = nlohmann::ordered_json;

struct DataConfig {
  std::string panel;     // long-format CSV
  std::string stations;  // optional metadata CSV
  double completeness = 0.90;
  std::optional<std::string> start;
  std::optional<std::string> end;
};

struct FourierConfig {
  bool enabled = false;
  std::vector<std::string> frequencies{"daily", "monthly", "biannual", "yearly"};
  std::vector<double> extra_periods;
  bool intercept = false;
};

struct McSection {
  int reps = 20;
  std::vector<int> sides{2};
  std::vector<Index> Ts{50, 200};
  bool use_cv = true;
  bool timing = false;
};

struct RunConfig {
  std::uint64_t seed = 1;
  int threads = 1;
  int lags = 1;
  std::optional<PenaltyConfig> penalty;
  std::vector<double> grid1{0.001, 0.01, 0.1, 1.0, 10.0};
  std::vector<double> grid2{0.001, 0.01, 0.1, 1.0, 10.0};
  std::vector<double> grid3{0.001, 0.01, 0.1, 1.0, 10.0};
  int n_blocks = 5;
  SolverOptions solver;
  DgpConfig dgp;
  McSection mc;
  DataConfig data;
  FourierConfig fourier;
  std::string fit;   // FitResult / params JSON input
  double tau = 1e-4; // support threshold for inference
  std::string out = "out";

  CvPlan plan() const;
  /// Fully resolved configuration (echoed into the manifest).
  Json to_json() const;
};

/// Throws ConfigError on malformed or unknown entries.
RunConfig load_config(const std::string& path);
void apply_json(RunConfig& cfg, const Json& doc);

}  // namespace stlasso::cli
