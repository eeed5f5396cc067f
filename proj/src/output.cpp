#include "kirchdelay/output.hpp"

#include <cstdio>
#include <ostream>

namespace kirchdelay {

std::string format_number(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

std::vector<std::string> trajectory_columns(int n_modes) {
  std::vector<std::string> columns{"t"};
  for (int i = 1; i <= n_modes; ++i) columns.push_back("a" + std::to_string(i));
  for (int i = 1; i <= n_modes; ++i) columns.push_back("v" + std::to_string(i));
  for (const char* name : {"kinetic_rho", "bending", "kinetic_grad", "kirchhoff", "memory_deficit",
                           "history", "delay", "E_total", "identity_residual",
                           "dissipation_margin", "phi", "psi", "upsilon", "F"}) {
    columns.emplace_back(name);
  }
  return columns;
}

void write_trajectory(std::ostream& os, const Trajectory& trajectory,
                      const LyapunovWeights& weights, const std::vector<double>& residual,
                      const std::vector<double>& margin, int stride) {
  const auto& m = trajectory.metadata;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(m.spec_hash));
  os << "# spec_hash = " << hash << '\n'
     << "# dt = " << format_number(m.dt) << '\n'
     << "# n_modes = " << m.n_modes << '\n'
     << "# xi = " << format_number(m.xi) << '\n'
     << "# tau = " << format_number(m.tau) << '\n'
     << "# rho = " << format_number(m.rho) << '\n'
     << "# length = " << format_number(m.length) << '\n'
     << "# laws = " << m.description << '\n'
     << "# sample_stride = " << m.stride << '\n'
     << "# output_stride = " << stride << '\n'
     << "# lyapunov = N " << format_number(weights.N) << ", eps1 " << format_number(weights.eps1)
     << ", eps2 " << format_number(weights.eps2) << '\n';
  if (trajectory.aborted) os << "# aborted = " << trajectory.abort_reason << '\n';
  const auto columns = trajectory_columns(m.n_modes);
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "\t" : "") << columns[c];
  os << '\n';
  const std::size_t n = trajectory.samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i % static_cast<std::size_t>(stride) != 0 && i + 1 != n) continue;
    const Sample& s = trajectory.samples[i];
    std::string line = format_number(s.t);
    for (Eigen::Index k = 0; k < s.a.size(); ++k) line += '\t' + format_number(s.a[k]);
    for (Eigen::Index k = 0; k < s.v.size(); ++k) line += '\t' + format_number(s.v[k]);
    const EnergyBreakdown& e = s.energy;
    for (double x : {e.kinetic_rho, e.bending, e.kinetic_grad, e.kirchhoff, e.memory_deficit,
                     e.history, e.delay, e.total}) {
      line += '\t' + format_number(x);
    }
    line += '\t' + (i < residual.size() ? format_number(residual[i]) : std::string("nan"));
    line += '\t' + (i < margin.size() ? format_number(margin[i]) : std::string("nan"));
    for (double x : {s.phi, s.psi, s.upsilon, lyapunov_F(s, weights)}) {
      line += '\t' + format_number(x);
    }
    os << line << '\n';
  }
}

void write_summary(std::ostream& os, const RunSummary& s) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(s.spec_hash));
  auto kv = [&os](const char* key, const std::string& value) {
    os << key << " = " << value << '\n';
  };
  auto num = [&kv](const char* key, double x) { kv(key, format_number(x)); };
  kv("spec_hash", hash);
  kv("samples", std::to_string(s.samples));
  num("t_end", s.t_end);
  kv("status", s.aborted ? "aborted: " + s.abort_reason : "completed");
  kv("validation", s.validation_passed ? "pass" : "fail");
  if (!s.failed_assumptions.empty()) {
    std::string list;
    for (const auto& f : s.failed_assumptions) list += (list.empty() ? "" : ", ") + f;
    kv("failed_assumptions", list);
  }
  num("xi", s.xi);
  num("xi_window_lo", s.window.lo);
  num("xi_window_hi", s.window.hi);
  kv("xi_in_window", s.xi_in_window ? "yes" : "no");
  num("theta1", s.theta.theta1);
  num("theta2", s.theta.theta2);
  kv("theta2_form", s.theta.form == Theta2Form::printed ? "printed" : "corrected");
  kv("monotonicity", s.monotonicity_guaranteed ? "guaranteed" : "monotonicity not guaranteed");
  for (const auto& w : s.theta.warnings) kv("warning", w);
  num("E0", s.E0);
  num("E_end", s.E_end);
  if (s.fit) {
    kv("decay_fit", "applicable");
    num("K", s.fit->K);
    num("k", s.fit->k);
    num("r2", s.fit->r2);
    num("fit_t0", s.fit->t0);
    num("fit_t_end", s.fit->t_end);
  } else {
    kv("decay_fit", "not applicable" + (s.fit_note.empty() ? "" : " (" + s.fit_note + ")"));
  }
  if (s.equivalence) {
    num("k0", s.equivalence->k0);
    num("k1", s.equivalence->k1);
    kv("equivalence", s.equivalence->passed() ? "pass" : "fail");
  }
  if (s.decay_modulus) num("decay_modulus", *s.decay_modulus);
  if (s.max_identity_residual) {
    num("max_identity_residual", *s.max_identity_residual);
  } else {
    kv("max_identity_residual", "not available (needs sample stride 1)");
  }
  if (s.max_dissipation_violation) num("max_dissipation_violation", *s.max_dissipation_violation);
  num("max_energy_increase", s.max_energy_increase);
  num("max_F_increase_after_t0", s.max_F_increase);
  if (s.seed_free) kv("seed_free", "yes (no random number generation is used)");
}

void write_validation(std::ostream& os, const ValidationReport& report, const XiWindow& window) {
  char line[512];
  std::snprintf(line, sizeof line, "%-18s %-6s %-24s %-14s  %s\n", "check", "result", "margin",
                "worst_at", "condition");
  os << line;
  for (const auto& e : report.entries) {
    std::snprintf(line, sizeof line, "%-18s %-6s %-24s %-14.6g  %s\n", e.name.c_str(),
                  e.passed ? "pass" : "FAIL", format_number(e.margin + 0.0).c_str(), e.worst_at + 0.0,
                  e.condition.c_str());
    os << line;
    if (!e.note.empty()) os << "    note: " << e.note << '\n';
  }
  os << "xi window: (" << format_number(window.lo) << ", " << format_number(window.hi) << ") "
     << (window.nonempty() ? "nonempty" : "EMPTY: no admissible xi") << '\n';
}

}  // namespace kirchdelay
