#pragma once

// The validate / run / sweep commands behind the kirchdelay executable.

#include <iosfwd>
#include <string>
#include <vector>

#include "kirchdelay/config.hpp"
#include "kirchdelay/output.hpp"

namespace kirchdelay {

struct CliOptions {
  std::string config;
  std::string out;  // overrides [output] dir when set
  bool force = false;
  int jobs = 0;     // 0: take [sweep] jobs
  bool seed_free = false;
};

enum ExitCode : int {
  exit_ok = 0,
  exit_error = 1,       // unreadable or invalid config, usage errors
  exit_invalid = 2,     // assumptions fail or the xi window is empty
  exit_aborted = 3,     // solver abort (partial outputs written)
};

struct RunOutcome {
  Trajectory trajectory;
  ValidationReport report;
  XiChoice xi;
  std::vector<double> residual;
  std::vector<double> margin;
  RunSummary summary;
};

ValidationReport validate_config(const RunConfig& config);

/// Solve and summarize one configuration (no files written).
RunOutcome execute(const RunConfig& config);

RunSummary summarize(const Trajectory& trajectory, const RunConfig& config, const XiChoice& xi,
                     const ValidationReport& report, const std::vector<double>& residual,
                     const std::vector<double>& margin);

int cmd_validate(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_run(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_sweep(const CliOptions& options, std::ostream& out, std::ostream& err);

}  // namespace kirchdelay
