#include "kirchdelay/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "kirchdelay/errors.hpp"

namespace kirchdelay {

namespace fs = std::filesystem;

ValidationReport validate_config(const RunConfig& config) {
  return validate_assumptions(config.spec, config.grid, config.validation_tolerance);
}

RunSummary summarize(const Trajectory& trajectory, const RunConfig& config, const XiChoice& xi,
                     const ValidationReport& report, const std::vector<double>& residual,
                     const std::vector<double>& margin) {
  RunSummary s;
  const auto& samples = trajectory.samples;
  s.spec_hash = trajectory.metadata.spec_hash;
  s.samples = samples.size();
  s.t_end = samples.empty() ? 0.0 : samples.back().t;
  s.aborted = trajectory.aborted;
  s.abort_reason = trajectory.abort_reason;
  s.validation_passed = report.passed() && xi.window.nonempty();
  for (const auto* e : report.failures()) s.failed_assumptions.push_back(e->name);
  if (!xi.window.nonempty()) s.failed_assumptions.push_back("xi.window");
  s.xi = xi.xi;
  s.window = xi.window;
  s.xi_in_window = xi.in_window;
  s.theta = theta_constants(config.spec, xi.xi, config.theta2);
  s.monotonicity_guaranteed = s.theta.positive() && s.validation_passed && xi.in_window;
  if (samples.empty()) return s;
  s.E0 = samples.front().energy.total;
  s.E_end = samples.back().energy.total;

  std::vector<double> t, E, F;
  for (const auto& sample : samples) {
    t.push_back(sample.t);
    E.push_back(sample.energy.total);
    F.push_back(lyapunov_F(sample, config.weights));
  }
  if (!residual.empty()) {
    double worst = 0.0;
    for (double r : residual) worst = std::max(worst, std::abs(r));
    s.max_identity_residual = worst;
  }
  if (!margin.empty()) {
    double worst = 0.0;
    for (double m : margin) worst = std::max(worst, -m);
    s.max_dissipation_violation = worst;
  }
  for (std::size_t i = 1; i < E.size(); ++i) {
    s.max_energy_increase = std::max(s.max_energy_increase, E[i] - E[i - 1]);
    if (t[i - 1] >= config.t0) s.max_F_increase = std::max(s.max_F_increase, F[i] - F[i - 1]);
  }

  if (s.t_end <= config.t0) {
    s.fit_note = "trajectory ends before t0";
  } else {
    try {
      s.fit = fit_decay(t, E, config.t0);
    } catch (const FitError& e) {
      s.fit_note = e.what();
    }
  }
  try {
    s.equivalence = equivalence_bounds(F, E);
    std::vector<double> tw, Fw, Ew;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] < config.t0) continue;
      tw.push_back(t[i]);
      Fw.push_back(F[i]);
      Ew.push_back(E[i]);
    }
    if (tw.size() >= 3) s.decay_modulus = decay_modulus(tw, Fw, Ew, config.spec.tau);
  } catch (const FitError&) {
    s.equivalence.reset();
  }
  return s;
}

RunOutcome execute(const RunConfig& config) {
  RunOutcome outcome;
  outcome.report = validate_config(config);
  outcome.xi = resolve_xi(config);
  outcome.trajectory = run(config.spec, outcome.xi.xi, config.numerics);
  const auto& tr = outcome.trajectory;
  if (tr.metadata.stride == 1 && tr.samples.size() >= 3) {
    outcome.residual = energy_identity_residual(tr, config.spec, outcome.xi.xi);
    outcome.margin = dissipation_bound_check(tr, config.spec, outcome.xi.xi, config.theta2).margin;
  }
  outcome.summary = summarize(tr, config, outcome.xi, outcome.report, outcome.residual,
                              outcome.margin);
  return outcome;
}

int cmd_validate(const CliOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig config = load_run_config(options.config);
    const ValidationReport report = validate_config(config);
    const XiWindow window = xi_window(config.spec);
    write_validation(out, report, window);
    bool ok = report.passed() && window.nonempty();
    for (const auto* e : report.failures()) err << "assumption failed: " << e->name << " ("
                                                << e->condition << ")\n";
    if (!window.nonempty()) err << "no admissible xi: window is empty\n";
    out << (ok ? "valid" : "invalid") << '\n';
    return ok ? exit_ok : exit_invalid;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  }
}

namespace {

void open_for_write(std::ofstream& file, const fs::path& path) {
  file.open(path);
  if (!file) throw UsageError("cannot write '" + path.string() + "'");
}

}  // namespace

int cmd_run(const CliOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig config = load_run_config(options.config);
    const ValidationReport report = validate_config(config);
    const XiChoice xi = resolve_xi(config);
    if (!(report.passed() && xi.window.nonempty()) && !options.force) {
      write_validation(err, report, xi.window);
      err << "error: assumptions not satisfied; rerun with --force to integrate anyway\n";
      return exit_invalid;
    }
    const RunOutcome outcome = execute(config);
    RunSummary summary = outcome.summary;
    summary.seed_free = options.seed_free;

    const fs::path dir = options.out.empty() ? fs::path(config.output_dir) : fs::path(options.out);
    fs::create_directories(dir);
    std::ofstream trajectory, summary_file;
    open_for_write(trajectory, dir / "trajectory.tsv");
    write_trajectory(trajectory, outcome.trajectory, config.weights, outcome.residual,
                     outcome.margin, config.output_stride);
    open_for_write(summary_file, dir / "summary.txt");
    write_summary(summary_file, summary);
    write_summary(out, summary);
    if (outcome.trajectory.aborted) {
      err << "error: integration aborted: " << outcome.trajectory.abort_reason << '\n';
      return exit_aborted;
    }
    return exit_ok;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  }
}

namespace {

struct SweepRow {
  std::vector<std::string> values;
  std::string validation = "-";
  std::string gain = "-";
  bool violating = false;
  std::string status;
  RunSummary summary;
  bool has_summary = false;
};

// numeric where both parse, text otherwise
bool value_less(const std::string& a, const std::string& b) {
  double x = 0.0, y = 0.0;
  auto rx = std::from_chars(a.data(), a.data() + a.size(), x);
  auto ry = std::from_chars(b.data(), b.data() + b.size(), y);
  const bool nx = rx.ec == std::errc() && rx.ptr == a.data() + a.size();
  const bool ny = ry.ec == std::errc() && ry.ptr == b.data() + b.size();
  if (nx && ny && x != y) return x < y;
  if (nx && ny) return false;
  return a < b;
}

SweepRow run_point(const SweepConfig& sweep, const std::vector<std::string>& values, bool force) {
  SweepRow row;
  row.values = values;
  try {
    KeyValues kv = sweep.base;
    for (std::size_t a = 0; a < sweep.axes.size(); ++a) kv.set(sweep.axes[a].path, values[a]);
    const RunConfig config = build_run_config(kv);
    const ValidationReport report = validate_config(config);
    const XiChoice xi = resolve_xi(config);
    const bool valid = report.passed() && xi.window.nonempty();
    row.validation = valid ? "pass" : "fail";
    const ValidationEntry* gain = report.find("A4.gain");
    row.gain = gain != nullptr && gain->passed ? "pass" : "fail";
    row.violating = !valid;
    if (!valid && !force) {
      row.status = "skipped";
      return row;
    }
    const RunOutcome outcome = execute(config);
    row.summary = outcome.summary;
    row.has_summary = true;
    row.status = outcome.trajectory.aborted ? "aborted" : "ok";
  } catch (const Error& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

}  // namespace

int cmd_sweep(const CliOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const SweepConfig sweep = load_sweep_config(options.config);
    const RunConfig base = build_run_config(sweep.base);

    std::vector<std::vector<std::string>> points{{}};
    for (const auto& axis : sweep.axes) {
      std::vector<std::vector<std::string>> next;
      for (const auto& p : points) {
        for (const auto& v : axis.values) {
          auto q = p;
          q.push_back(v);
          next.push_back(std::move(q));
        }
      }
      points = std::move(next);
    }

    std::vector<SweepRow> rows(points.size());
    const int jobs = std::max(1, options.jobs > 0 ? options.jobs : sweep.jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < points.size(); i = next++) {
        rows[i] = run_point(sweep, points[i], options.force);
      }
    };
    std::vector<std::thread> pool;
    for (int j = 1; j < std::min<int>(jobs, static_cast<int>(points.size())); ++j) {
      pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) th.join();

    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
      return std::lexicographical_compare(a.values.begin(), a.values.end(), b.values.begin(),
                                          b.values.end(), value_less);
    });

    const fs::path dir = options.out.empty() ? fs::path(base.output_dir) : fs::path(options.out);
    fs::create_directories(dir / "points");
    std::ofstream map;
    open_for_write(map, dir / "sweep.tsv");
    map << "# points = " << rows.size() << '\n' << "# force = " << (options.force ? "yes" : "no")
        << '\n';
    for (const auto& axis : sweep.axes) map << axis.path << '\t';
    map << "validation\tgain_condition\tassumption_violating\tstatus\txi\tK\tk\tr2\tk0\tk1\t"
           "max_identity_residual\n";
    bool all_ok = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const SweepRow& r = rows[i];
      for (const auto& v : r.values) map << v << '\t';
      map << r.validation << '\t' << r.gain << '\t' << (r.violating ? "yes" : "no") << '\t'
          << r.status;
      auto field = [&map](bool present, double x) {
        map << '\t' << (present ? format_number(x) : std::string("nan"));
      };
      const RunSummary& s = r.summary;
      field(r.has_summary, s.xi);
      field(r.has_summary && s.fit.has_value(), s.fit ? s.fit->K : 0.0);
      field(r.has_summary && s.fit.has_value(), s.fit ? s.fit->k : 0.0);
      field(r.has_summary && s.fit.has_value(), s.fit ? s.fit->r2 : 0.0);
      field(r.has_summary && s.equivalence.has_value(), s.equivalence ? s.equivalence->k0 : 0.0);
      field(r.has_summary && s.equivalence.has_value(), s.equivalence ? s.equivalence->k1 : 0.0);
      field(r.has_summary && s.max_identity_residual.has_value(),
            s.max_identity_residual.value_or(0.0));
      map << '\n';
      if (r.has_summary) {
        std::ofstream point;
        open_for_write(point, dir / "points" / ("point_" + std::to_string(i) + ".txt"));
        for (std::size_t a = 0; a < sweep.axes.size(); ++a) {
          point << sweep.axes[a].path << " = " << r.values[a] << '\n';
        }
        write_summary(point, s);
      }
      if (r.status != "ok" && r.status != "skipped") all_ok = false;
      out << "point " << i << ": " << r.status << '\n';
    }
    return all_ok ? exit_ok : exit_aborted;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  }
}

}  // namespace kirchdelay
