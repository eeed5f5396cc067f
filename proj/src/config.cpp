#include "kirchdelay/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "kirchdelay/catalog.hpp"
#include "kirchdelay/errors.hpp"

namespace kirchdelay {

namespace {

// path -> default value; "" marks an optional override that is absent by default
const std::vector<std::pair<std::string, std::string>>& defaults() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"problem.rho", "1"},
      {"problem.mu1", "1"},
      {"problem.mu2", "0.4"},
      {"problem.tau", "0.5"},
      {"problem.length", "1"},
      {"kirchhoff.law", "linear"},
      {"kirchhoff.m0", "1"},
      {"kirchhoff.slope", "1"},
      {"kirchhoff.delta", ""},
      {"kirchhoff.gamma", ""},
      {"kirchhoff.beta", ""},
      {"kirchhoff.alpha", ""},
      {"kernel.shape", "exponential"},
      {"kernel.h0", "0.4"},
      {"kernel.zeta", "1"},
      {"kernel.times", ""},
      {"kernel.values", ""},
      {"feedback.g", "linear"},
      {"feedback.slope", "1"},
      {"feedback.kappa", "0.5"},
      {"feedback.alpha1", ""},
      {"feedback.alpha2", ""},
      {"feedback.c1", ""},
      {"initial.u0", "mode"},
      {"initial.u0_mode", "1"},
      {"initial.u0_amplitude", "0.5"},
      {"initial.u1", "zero"},
      {"initial.u1_mode", "1"},
      {"initial.u1_amplitude", "0"},
      {"initial.history", "zero"},
      {"initial.omega", "1"},
      {"numerics.n_modes", "8"},
      {"numerics.dt", "5e-4"},
      {"numerics.T", "20"},
      {"numerics.stride", "1"},
      {"numerics.nodes_per_mode", "40"},
      {"numerics.panel_order", "8"},
      {"numerics.interpolation", "linear"},
      {"numerics.delay_quadrature", "segment"},
      {"numerics.rho_order", "16"},
      {"numerics.memory_operator", "bilaplacian"},
      {"numerics.linear_diagnostic", "false"},
      {"numerics.memory_window", "0"},
      {"numerics.kernel_cutoff", "1e-12"},
      {"numerics.compat_tolerance", "1e-8"},
      {"numerics.theta2", "printed"},
      {"lyapunov.xi", "auto"},
      {"lyapunov.N", "20"},
      {"lyapunov.eps1", "1"},
      {"lyapunov.eps2", "1"},
      {"lyapunov.t0", "1"},
      {"validation.lambda_max", "100"},
      {"validation.lambda_points", "401"},
      {"validation.kirchhoff_upper_from", "1"},
      {"validation.t_max", "20"},
      {"validation.t_points", "401"},
      {"validation.s_max", "10"},
      {"validation.s_points", "401"},
      {"validation.x_points", "101"},
      {"validation.tolerance", "1e-10"},
      {"output.dir", "out"},
      {"output.stride", "20"},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool is_known(const std::string& path) {
  const auto& keys = known_keys();
  return std::find(keys.begin(), keys.end(), path) != keys.end();
}

class Reader {
 public:
  explicit Reader(const KeyValues& kv) : kv_(kv) {}

  bool has(const std::string& path) const {
    auto it = kv_.values.find(path);
    return it != kv_.values.end() && !it->second.empty();
  }

  std::string text(const std::string& path) const {
    auto it = kv_.values.find(path);
    if (it != kv_.values.end()) return it->second;
    for (const auto& [key, value] : defaults()) {
      if (key == path) return value;
    }
    throw ConfigError("internal: no default for " + path);
  }

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    const auto dot = path.find('.');
    std::string where = kv_.source.empty() ? "config" : kv_.source;
    auto line = kv_.lines.find(path);
    if (line != kv_.lines.end()) where += ":" + std::to_string(line->second);
    throw ConfigError(where + ": [" + path.substr(0, dot) + "] " + path.substr(dot + 1) + ": " +
                      what);
  }

  double number(const std::string& path) const {
    const std::string value = trim(text(path));
    double out = 0.0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (value.empty() || ec != std::errc() || ptr != end) {
      fail(path, "expected a number, got '" + value + "'");
    }
    return out;
  }

  double positive(const std::string& path) const {
    const double x = number(path);
    if (!(x > 0.0)) fail(path, "must be > 0");
    return x;
  }

  int integer(const std::string& path, int minimum) const {
    const std::string value = trim(text(path));
    int out = 0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (value.empty() || ec != std::errc() || ptr != end) {
      fail(path, "expected an integer, got '" + value + "'");
    }
    if (out < minimum) fail(path, "must be >= " + std::to_string(minimum));
    return out;
  }

  bool flag(const std::string& path) const {
    std::string value = trim(text(path));
    std::transform(value.begin(), value.end(), value.begin(), ::tolower);
    if (value == "true" || value == "yes" || value == "1" || value == "on") return true;
    if (value == "false" || value == "no" || value == "0" || value == "off") return false;
    fail(path, "expected true or false, got '" + value + "'");
  }

  std::string choice(const std::string& path, const std::vector<std::string>& options) const {
    const std::string value = trim(text(path));
    if (std::find(options.begin(), options.end(), value) != options.end()) return value;
    std::string list;
    for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
    fail(path, "unknown value '" + value + "' (expected one of: " + list + ")");
  }

  std::vector<double> numbers(const std::string& path) const {
    std::vector<double> out;
    for (const auto& item : split_list(text(path))) {
      double x = 0.0;
      const auto* end = item.data() + item.size();
      auto [ptr, ec] = std::from_chars(item.data(), end, x);
      if (ec != std::errc() || ptr != end) fail(path, "expected a number list, got '" + item + "'");
      out.push_back(x);
    }
    return out;
  }

 private:
  const KeyValues& kv_;
};

FieldFn make_field(const Reader& r, const std::string& which, double length, std::string& text) {
  const std::string kind = r.choice("initial." + which, {"zero", "mode", "bump"});
  const double amplitude = r.number("initial." + which + "_amplitude");
  if (kind == "zero") {
    text += which + "=zero ";
    return catalog::zero_field();
  }
  if (kind == "bump") {
    text += which + "=bump(" + r.text("initial." + which + "_amplitude") + ") ";
    return catalog::bump_field(length, amplitude);
  }
  const int mode = r.integer("initial." + which + "_mode", 1);
  text += which + "=mode(" + std::to_string(mode) + "," + r.text("initial." + which + "_amplitude") +
          ") ";
  return catalog::mode_field(mode, length, amplitude);
}

ProblemSpec build_spec(const Reader& r) {
  ProblemSpec spec;
  spec.rho = r.positive("problem.rho");
  spec.mu1 = r.positive("problem.mu1");
  spec.mu2 = r.number("problem.mu2");
  if (spec.mu2 < 0.0) r.fail("problem.mu2", "must be >= 0");
  spec.tau = r.positive("problem.tau");
  spec.length = r.positive("problem.length");

  if (r.choice("kirchhoff.law", {"linear", "constant"}) == "linear") {
    spec.kirchhoff = catalog::linear_kirchhoff(r.number("kirchhoff.m0"), r.number("kirchhoff.slope"));
  } else {
    spec.kirchhoff = catalog::constant_kirchhoff(r.number("kirchhoff.m0"));
  }
  if (r.has("kirchhoff.delta")) spec.kirchhoff.delta = r.number("kirchhoff.delta");
  if (r.has("kirchhoff.gamma")) spec.kirchhoff.gamma = r.number("kirchhoff.gamma");
  if (r.has("kirchhoff.beta")) spec.kirchhoff.beta = r.number("kirchhoff.beta");
  if (r.has("kirchhoff.alpha")) spec.kirchhoff.alpha = r.number("kirchhoff.alpha");

  if (r.choice("kernel.shape", {"exponential", "tabulated"}) == "exponential") {
    spec.kernel = catalog::exponential_kernel(r.number("kernel.h0"), r.number("kernel.zeta"));
  } else {
    if (!r.has("kernel.times") || !r.has("kernel.values")) {
      r.fail("kernel.shape", "tabulated kernel needs 'times' and 'values' lists");
    }
    try {
      spec.kernel = catalog::tabulated_kernel(r.numbers("kernel.times"), r.numbers("kernel.values"),
                                              r.number("kernel.zeta"));
    } catch (const ConfigError& e) {
      r.fail("kernel.times", e.what());
    }
  }

  const std::string g = r.choice("feedback.g", {"linear", "arctan", "linear_tanh"});
  if (g == "linear") {
    spec.feedback = catalog::linear_feedback(r.positive("feedback.slope"));
  } else if (g == "arctan") {
    spec.feedback = catalog::arctan_feedback();
  } else {
    spec.feedback = catalog::linear_tanh_feedback(r.number("feedback.kappa"));
  }
  if (r.has("feedback.alpha1")) spec.feedback.alpha1 = r.number("feedback.alpha1");
  if (r.has("feedback.alpha2")) spec.feedback.alpha2 = r.number("feedback.alpha2");
  if (r.has("feedback.c1")) spec.feedback.c1 = r.number("feedback.c1");

  std::string text;
  spec.initial.u0 = make_field(r, "u0", spec.length, text);
  spec.initial.u1 = make_field(r, "u1", spec.length, text);
  const std::string history = r.choice("initial.history", {"zero", "static", "oscillating"});
  if (history == "zero") {
    spec.initial.f0 = catalog::zero_history();
    text += "history=zero";
  } else if (history == "static") {
    spec.initial.f0 = catalog::static_history(spec.initial.u1);
    text += "history=static";
  } else {
    spec.initial.f0 = catalog::oscillating_history(spec.initial.u1, r.number("initial.omega"));
    text += "history=oscillating(" + r.text("initial.omega") + ")";
  }
  spec.initial.description = text;
  return spec;
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [key, value] : defaults()) out.push_back(key);
    return out;
  }();
  return keys;
}

KeyValues read_key_values(std::istream& in, const std::string& source) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  boost::property_tree::ptree tree;
  try {
    std::istringstream stream(text);
    boost::property_tree::ini_parser::read_ini(stream, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  KeyValues kv;
  kv.source = source;
  // line numbers from a plain scan; read_ini already rejected malformed lines
  {
    std::istringstream stream(text);
    std::string line, section;
    int number = 0;
    while (std::getline(stream, line)) {
      ++number;
      line = trim(line);
      if (line.empty() || line[0] == ';' || line[0] == '#') continue;
      if (line.front() == '[' && line.back() == ']') {
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq != std::string::npos) kv.lines[section + "." + trim(line.substr(0, eq))] = number;
    }
  }

  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(source + ": key '" + section + "' outside any [section]");
    }
    for (const auto& [key, node] : body) {
      const std::string path = section + "." + key;
      auto line = kv.lines.find(path);
      const std::string where =
          source + (line != kv.lines.end() ? ":" + std::to_string(line->second) : "");
      if (section == "sweep") {
        if (key != "jobs" && !is_known(key)) {
          throw ConfigError(where + ": [sweep] axis '" + key + "' is not a config path");
        }
      } else if (!is_known(path)) {
        throw ConfigError(where + ": [" + section + "] unknown key '" + key + "'");
      }
      kv.values[path] = trim(node.data());
    }
  }
  return kv;
}

KeyValues read_key_values_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return read_key_values(in, path);
}

RunConfig build_run_config(const KeyValues& kv) {
  const Reader r(kv);
  RunConfig c;
  c.raw = kv;
  c.spec = build_spec(r);

  SolverOptions& o = c.numerics;
  o.n_modes = r.integer("numerics.n_modes", 1);
  o.dt = r.positive("numerics.dt");
  if (o.dt > c.spec.tau / 4.0) r.fail("numerics.dt", "must not exceed tau / 4");
  o.T = r.number("numerics.T");
  if (o.T < 0.0) r.fail("numerics.T", "must be >= 0");
  o.stride = r.integer("numerics.stride", 1);
  o.basis.nodes_per_mode = r.integer("numerics.nodes_per_mode", 1);
  o.basis.panel_order = r.integer("numerics.panel_order", 1);
  if (o.basis.nodes_per_mode < o.basis.panel_order) {
    r.fail("numerics.nodes_per_mode", "must be >= panel_order");
  }
  o.interpolation = r.choice("numerics.interpolation", {"linear", "cubic"}) == "linear"
                        ? Interpolation::linear
                        : Interpolation::cubic;
  o.delay_quadrature = r.choice("numerics.delay_quadrature", {"segment", "gauss"}) == "segment"
                           ? DelayQuadrature::segment
                           : DelayQuadrature::gauss;
  o.rho_order = r.integer("numerics.rho_order", 1);
  o.memory_operator =
      r.choice("numerics.memory_operator", {"bilaplacian", "laplacian"}) == "bilaplacian"
          ? MemoryOperator::bilaplacian
          : MemoryOperator::laplacian;
  o.linear_diagnostic = r.flag("numerics.linear_diagnostic");
  o.memory_window = r.number("numerics.memory_window");
  if (o.memory_window < 0.0) r.fail("numerics.memory_window", "must be >= 0 (0 = automatic)");
  o.kernel_cutoff = r.positive("numerics.kernel_cutoff");
  o.compat_tolerance = r.positive("numerics.compat_tolerance");
  c.theta2 = r.choice("numerics.theta2", {"printed", "corrected"}) == "printed"
                 ? Theta2Form::printed
                 : Theta2Form::corrected;

  const std::string xi = trim(r.text("lyapunov.xi"));
  c.xi_auto = xi == "auto";
  if (!c.xi_auto) c.xi = r.positive("lyapunov.xi");
  c.weights.N = r.positive("lyapunov.N");
  c.weights.eps1 = r.positive("lyapunov.eps1");
  c.weights.eps2 = r.positive("lyapunov.eps2");
  c.t0 = r.number("lyapunov.t0");

  c.grid.lambda_max = r.positive("validation.lambda_max");
  c.grid.lambda_points = r.integer("validation.lambda_points", 2);
  c.grid.kirchhoff_upper_from = r.number("validation.kirchhoff_upper_from");
  c.grid.t_max = r.positive("validation.t_max");
  c.grid.t_points = r.integer("validation.t_points", 2);
  c.grid.s_max = r.positive("validation.s_max");
  c.grid.s_points = r.integer("validation.s_points", 2);
  c.grid.x_points = r.integer("validation.x_points", 2);
  c.validation_tolerance = r.positive("validation.tolerance");

  c.output_dir = trim(r.text("output.dir"));
  c.output_stride = r.integer("output.stride", 1);

  if (!c.xi_auto) {
    const XiWindow w = xi_window(c.spec);
    if (w.nonempty() && !w.contains(c.xi)) {
      r.fail("lyapunov.xi", "outside the admissible window (" + std::to_string(w.lo) + ", " +
                                std::to_string(w.hi) + ")");
    }
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  return build_run_config(read_key_values_file(path));
}

SweepConfig build_sweep_config(const KeyValues& kv) {
  SweepConfig sweep;
  for (const auto& [path, value] : kv.values) {
    if (path.rfind("sweep.", 0) != 0) {
      sweep.base.values[path] = value;
      if (auto it = kv.lines.find(path); it != kv.lines.end()) sweep.base.lines[path] = it->second;
      continue;
    }
    const std::string key = path.substr(6);
    if (key == "jobs") {
      const Reader r(kv);
      sweep.jobs = r.integer(path, 1);
      continue;
    }
    SweepAxis axis{key, split_list(value)};
    if (axis.values.empty()) {
      throw ConfigError(kv.source + ": [sweep] axis '" + key + "' has no values");
    }
    sweep.axes.push_back(std::move(axis));
  }
  sweep.base.source = kv.source;
  // check the base scenario once so config mistakes surface before any run
  build_run_config(sweep.base);
  return sweep;
}

SweepConfig load_sweep_config(const std::string& path) {
  return build_sweep_config(read_key_values_file(path));
}

XiChoice resolve_xi(const RunConfig& config) {
  XiChoice choice;
  choice.window = xi_window(config.spec);
  choice.xi = config.xi_auto ? choice.window.midpoint() : config.xi;
  choice.in_window = choice.window.contains(choice.xi);
  return choice;
}

}  // namespace kirchdelay
