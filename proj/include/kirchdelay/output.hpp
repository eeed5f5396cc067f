#pragma once

// Plain-text outputs: '#' metadata lines, a header row, tab-separated values
// printed with 17 significant digits.

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kirchdelay/diagnostics.hpp"
#include "kirchdelay/model.hpp"
#include "kirchdelay/solver.hpp"

namespace kirchdelay {

/// "%.17g"
std::string format_number(double x);

struct RunSummary {
  std::uint64_t spec_hash = 0;
  std::size_t samples = 0;
  double t_end = 0.0;
  bool aborted = false;
  std::string abort_reason;
  bool validation_passed = false;
  std::vector<std::string> failed_assumptions;
  double xi = 0.0;
  XiWindow window;
  bool xi_in_window = false;
  ThetaConstants theta;
  bool monotonicity_guaranteed = false;
  double E0 = 0.0;
  double E_end = 0.0;
  std::optional<DecayFit> fit;
  std::string fit_note;
  std::optional<Equivalence> equivalence;
  std::optional<double> decay_modulus;
  std::optional<double> max_identity_residual;
  std::optional<double> max_dissipation_violation;
  double max_energy_increase = 0.0;
  double max_F_increase = 0.0;
  bool seed_free = false;
};

/// One row per sample (every `stride`-th), columns t, a_i, v_i, the energy
/// parts, E_total and the diagnostics. Residual and margin series may be empty.
void write_trajectory(std::ostream& os, const Trajectory& trajectory,
                      const LyapunovWeights& weights, const std::vector<double>& residual,
                      const std::vector<double>& margin, int stride);

/// key = value lines.
void write_summary(std::ostream& os, const RunSummary& summary);

/// Human-readable margin table.
void write_validation(std::ostream& os, const ValidationReport& report, const XiWindow& window);

/// Header names of the trajectory table for n modes.
std::vector<std::string> trajectory_columns(int n_modes);

}  // namespace kirchdelay
