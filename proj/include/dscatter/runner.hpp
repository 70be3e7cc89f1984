#pragma once

#include <optional>
#include <string>

#include <dscatter/config.hpp>

// Task driver behind the command line tool. Returns the process exit code:
// 0 when the task ran and any verdict passed, 2 when it ran but the verdict
// failed. Errors are thrown and mapped to exit code 1 by the caller.

namespace dscatter::run {

struct CliOverrides {
  std::optional<double> tol_lev;
  std::optional<double> e_min;  // absolute |E| bounds for sweeps
  std::optional<double> e_max;
  std::optional<int> points;
};

int run_task(const std::string& task, const cfg::RunConfig& config,
             const std::string& out_dir, const CliOverrides& overrides);

}  // namespace dscatter::run
