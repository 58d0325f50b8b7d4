#pragma once

#include "config.hpp"

#include <string>

namespace stlasso::cli {

// Each command writes its outputs plus manifest.json into cfg.out.
void run_simulate(const RunConfig& cfg);
void run_fit(const RunConfig& cfg);
void run_cv(const RunConfig& cfg);
void run_mc(const RunConfig& cfg);
void run_infer(const RunConfig& cfg);
void run_compare(const RunConfig& cfg);
void run_check(const RunConfig& cfg);

}  // namespace stlasso::cli
