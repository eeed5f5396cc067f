#pragma once

// INI-style run and sweep configuration. Every recognised key has a default;
// the defaults are the shipped scenario. Function-valued fields are chosen by
// catalog name ([kernel] shape = exponential, [feedback] g = linear, ...).

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "kirchdelay/diagnostics.hpp"
#include "kirchdelay/model.hpp"
#include "kirchdelay/solver.hpp"

namespace kirchdelay {

/// Flat "section.key" -> value map, with the source line of each key (0 if
/// the value came from a default or an override).
struct KeyValues {
  std::map<std::string, std::string> values;
  std::map<std::string, int> lines;
  std::string source;

  void set(const std::string& path, const std::string& value) {
    values[path] = value;
    lines.erase(path);
  }
};

struct RunConfig {
  ProblemSpec spec;
  SolverOptions numerics;
  Theta2Form theta2 = Theta2Form::printed;
  bool xi_auto = true;
  double xi = 0.0;
  LyapunovWeights weights;
  double t0 = 1.0;
  SampleGrid grid;
  double validation_tolerance = 1e-10;
  std::string output_dir = "out";
  int output_stride = 20;
  KeyValues raw;
};

struct SweepAxis {
  std::string path;  // "section.key"
  std::vector<std::string> values;
};

struct SweepConfig {
  KeyValues base;
  std::vector<SweepAxis> axes;
  int jobs = 1;
};

/// Reads an INI file into a flat map. Throws ConfigError with the line number
/// on syntax errors or unknown keys.
KeyValues read_key_values(std::istream& in, const std::string& source);
KeyValues read_key_values_file(const std::string& path);

/// Builds a RunConfig from the flat map (defaults for absent keys). Throws
/// ConfigError naming the section and key of a bad value.
RunConfig build_run_config(const KeyValues& kv);
RunConfig load_run_config(const std::string& path);

/// [sweep] holds axes as "section.key = v1, v2, ..." plus "jobs".
SweepConfig build_sweep_config(const KeyValues& kv);
SweepConfig load_sweep_config(const std::string& path);

/// Every recognised "section.key" path.
const std::vector<std::string>& known_keys();

struct XiChoice {
  double xi = 0.0;
  XiWindow window;
  bool in_window = false;
};

/// The configured xi, or the window midpoint for "auto".
XiChoice resolve_xi(const RunConfig& config);

}  // namespace kirchdelay
