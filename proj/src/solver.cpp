#include "kirchdelay/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "kirchdelay/diagnostics.hpp"
#include "kirchdelay/errors.hpp"
#include "kirchdelay/quadrature.hpp"

namespace kirchdelay {

namespace {

double apply_power(double x, double rho) { return x == 0.0 ? 0.0 : std::pow(std::abs(x), rho); }

// W^T (w o g(W v))
Eigen::VectorXd feedback_projection(const ModeSet& modes, const FeedbackSpec& feedback,
                                    const Eigen::VectorXd& v) {
  Eigen::VectorXd nodal = modes.values() * v;
  if (feedback.linear) {
    nodal *= feedback.c1;
  } else {
    for (Eigen::Index q = 0; q < nodal.size(); ++q) nodal[q] = feedback.g(nodal[q]);
  }
  return modes.values().transpose() * modes.weights().cwiseProduct(nodal);
}

}  // namespace

Discretization::Discretization(const ProblemSpec& spec, const SolverOptions& options)
    : Discretization(spec, options, build_modes(options.n_modes, spec.length, options.basis)) {}

Discretization::Discretization(const ProblemSpec& spec, const SolverOptions& options,
                               ModeSet modes)
    : spec_(spec), options_(options), modes_(std::move(modes)) {
  check();
  if (!modes_.assembled()) assemble_matrices(modes_);
  if (options_.memory_operator == MemoryOperator::bilaplacian) {
    metric_ = modes_.lambdas().asDiagonal();
  } else {
    metric_ = modes_.grad_matrix();
  }
}

void Discretization::check() const {
  const auto& o = options_;
  if (!(o.dt > 0.0)) throw UsageError("dt must be > 0");
  if (o.dt > spec_.tau / 4.0) throw UsageError("dt must not exceed tau / 4");
  if (!(o.T >= 0.0)) throw UsageError("T must be >= 0");
  if (o.stride < 1) throw UsageError("sample stride must be >= 1");
  if (o.rho_order < 1) throw UsageError("rho quadrature order must be >= 1");
  if (!(spec_.rho > 0.0)) throw UsageError("rho must be > 0");
  if (modes_.size() != o.n_modes || modes_.length() != spec_.length) {
    throw UsageError("mode set does not match n_modes / length");
  }
}

Eigen::MatrixXd effective_mass(const Eigen::VectorXd& v, const ModeSet& modes, double rho,
                               bool include_rho) {
  Eigen::MatrixXd mass = modes.grad_matrix();
  if (!include_rho) return mass;
  const Eigen::VectorXd nodal = modes.values() * v;
  Eigen::VectorXd weight(nodal.size());
  for (Eigen::Index q = 0; q < nodal.size(); ++q) {
    weight[q] = modes.weights()[q] * apply_power(nodal[q], rho);
  }
  const Eigen::MatrixXd weighted = modes.values().array().colwise() * weight.array();
  mass.noalias() += modes.values().transpose() * weighted;
  return 0.5 * (mass + mass.transpose());
}

Eigen::VectorXd memory_term(const SolverState& state, const Discretization& disc) {
  return disc.memory_metric() * state.memory.values().y1;
}

Eigen::VectorXd rhs(const Discretization& disc, const Eigen::VectorXd& a, const Eigen::VectorXd& v,
                    const Eigen::VectorXd& y1, const Eigen::VectorXd& z1) {
  const ProblemSpec& spec = disc.spec();
  const ModeSet& modes = disc.modes();
  const Eigen::MatrixXd& G = modes.grad_matrix();
  const Eigen::VectorXd Ga = G * a;
  Eigen::VectorXd f = -modes.lambdas().cwiseProduct(a);
  if (disc.options().memory_operator == MemoryOperator::bilaplacian) {
    f.noalias() += modes.lambdas().cwiseProduct(y1);
  } else {
    f.noalias() += G * y1;
  }
  const double stretch = a.dot(Ga);
  f.noalias() -= spec.kirchhoff.evaluate(stretch) * Ga;
  f.noalias() -= spec.mu1 * feedback_projection(modes, spec.feedback, v);
  f.noalias() -= spec.mu2 * feedback_projection(modes, spec.feedback, z1);
  return f;
}

Eigen::VectorXd rhs(const SolverState& state, const Discretization& disc) {
  const Eigen::VectorXd z1 = state.history.sample_at(state.t - disc.spec().tau);
  return rhs(disc, state.a, state.v, state.memory.values().y1, z1);
}

double potential_integral(const ModeSet& modes, const FeedbackSpec& feedback,
                          const Eigen::VectorXd& v) {
  const Eigen::VectorXd nodal = modes.values() * v;
  double sum = 0.0;
  if (feedback.linear) {
    for (Eigen::Index q = 0; q < nodal.size(); ++q) {
      sum += modes.weights()[q] * nodal[q] * nodal[q];
    }
    return 0.5 * feedback.c1 * sum;
  }
  for (Eigen::Index q = 0; q < nodal.size(); ++q) {
    sum += modes.weights()[q] * feedback.G(nodal[q]);
  }
  return sum;
}

double integrate_history(const HistoryBuffer& buffer, const ModeSet& modes,
                         const FeedbackSpec& feedback, double s0, double s1,
                         const std::function<double(double)>& weight) {
  if (!(s1 > s0)) return 0.0;
  static const QuadratureRule unit = gauss_legendre(4, 0.0, 1.0);
  std::vector<double> cuts{s0};
  const auto& records = buffer.records();
  auto it = std::upper_bound(records.begin(), records.end(), s0,
                             [](double s, const HistoryBuffer::Record& r) { return s < r.t; });
  for (; it != records.end() && it->t < s1; ++it) cuts.push_back(it->t);
  cuts.push_back(s1);
  double total = 0.0;
  Eigen::VectorXd v;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double width = cuts[p + 1] - cuts[p];
    if (!(width > 0.0)) continue;
    double piece = 0.0;
    for (std::size_t j = 0; j < unit.size(); ++j) {
      const double s = cuts[p] + width * unit.nodes[j];
      buffer.sample_at(s, v);
      double value = potential_integral(modes, feedback, v);
      if (weight) value *= weight(s);
      piece += unit.weights[j] * value;
    }
    total += width * piece;
  }
  return total;
}

SolverState initial_state(const Discretization& disc) {
  const ProblemSpec& spec = disc.spec();
  const SolverOptions& o = disc.options();
  const ModeSet& modes = disc.modes();
  const double tau = spec.tau;

  Eigen::VectorXd a0 = project(spec.initial.u0, modes);
  Eigen::VectorXd v0 = project(spec.initial.u1, modes);

  const long count = static_cast<long>(std::ceil(tau / o.dt - 1e-9));
  std::vector<double> times;
  std::vector<Eigen::VectorXd> samples;
  times.reserve(static_cast<std::size_t>(count + 1));
  samples.reserve(static_cast<std::size_t>(count + 1));
  for (long k = count; k >= 0; --k) {
    const double s = k == count ? -tau : -static_cast<double>(k) * o.dt;
    times.push_back(s);
    const HistoryFn& f0 = spec.initial.f0;
    samples.push_back(project([&f0, s](double x) { return f0(x, s); }, modes));
  }
  HistoryBuffer history =
      HistoryBuffer::initialize(times, samples, v0, tau, o.interpolation, o.compat_tolerance);

  const double horizon = std::max(o.T, o.dt) + o.dt;
  const double support = spec.kernel.effective_support(o.kernel_cutoff);
  const double needed = std::min(support, horizon);
  double window = o.memory_window > 0.0 ? o.memory_window : needed;
  if (window < needed) {
    throw ConfigError("memory window " + std::to_string(window) +
                      " shorter than the kernel's effective support " + std::to_string(needed));
  }
  window = std::max(std::min(window, horizon), o.dt);
  MemoryState memory(spec.kernel, disc.memory_metric(), a0, o.dt, window);

  SolverState state{0.0, 0, std::move(a0), std::move(v0), std::move(memory), std::move(history),
                    0.0, 0.0};
  state.delay_integral =
      integrate_history(state.history, modes, spec.feedback, -tau, 0.0) / tau;
  state.upsilon = integrate_history(state.history, modes, spec.feedback, -tau, 0.0,
                                    [](double s) { return std::exp(2.0 * s); }) /
                  tau;
  return state;
}

void step(SolverState& state, const Discretization& disc) {
  const ProblemSpec& spec = disc.spec();
  const SolverOptions& o = disc.options();
  const ModeSet& modes = disc.modes();
  const double dt = o.dt;
  const double t = static_cast<double>(state.step) * dt;
  const bool with_rho = !o.linear_diagnostic;

  Eigen::VectorXd y1;
  Eigen::VectorXd z1;
  auto acceleration = [&](double c, const Eigen::VectorXd& a, const Eigen::VectorXd& v) {
    state.memory.stage_y1(c, a, y1);
    state.history.sample_at(t + c - spec.tau, z1);
    const Eigen::VectorXd f = rhs(disc, a, v, y1, z1);
    Eigen::LLT<Eigen::MatrixXd> llt(effective_mass(v, modes, spec.rho, with_rho));
    if (llt.info() != Eigen::Success) {
      throw IntegrationError("effective mass factorization failed at t = " + std::to_string(t));
    }
    return Eigen::VectorXd(llt.solve(f));
  };

  const Eigen::VectorXd& a = state.a;
  const Eigen::VectorXd& v = state.v;
  const double half = 0.5 * dt;
  const Eigen::VectorXd k1 = acceleration(0.0, a, v);
  const Eigen::VectorXd a2 = a + half * v;
  const Eigen::VectorXd v2 = v + half * k1;
  const Eigen::VectorXd k2 = acceleration(half, a2, v2);
  const Eigen::VectorXd a3 = a + half * v2;
  const Eigen::VectorXd v3 = v + half * k2;
  const Eigen::VectorXd k3 = acceleration(half, a3, v3);
  const Eigen::VectorXd a4 = a + dt * v3;
  const Eigen::VectorXd v4 = v + dt * k3;
  const Eigen::VectorXd k4 = acceleration(dt, a4, v4);

  Eigen::VectorXd a_next = a + (dt / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4);
  Eigen::VectorXd v_next = v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!a_next.allFinite() || !v_next.allFinite()) {
    throw IntegrationError("non-finite state at t = " + std::to_string(t + dt));
  }

  const double t_next = static_cast<double>(state.step + 1) * dt;
  const double tau = spec.tau;
  state.history.push(t_next, v_next);
  state.memory.advance(a_next);
  state.a = std::move(a_next);
  state.v = std::move(v_next);
  state.t = t_next;
  state.step += 1;

  // slide the window [t - tau, t] of both delay integrals forward by one step
  const double fresh = integrate_history(state.history, modes, spec.feedback, t, t_next);
  const double stale =
      integrate_history(state.history, modes, spec.feedback, t - tau, t_next - tau);
  state.delay_integral += (fresh - stale) / tau;
  auto fade = [t_next](double s) { return std::exp(-2.0 * (t_next - s)); };
  const double fresh_w = integrate_history(state.history, modes, spec.feedback, t, t_next, fade);
  const double stale_w =
      integrate_history(state.history, modes, spec.feedback, t - tau, t_next - tau, fade);
  state.upsilon = std::exp(-2.0 * dt) * state.upsilon + (fresh_w - stale_w) / tau;
}

std::uint64_t spec_hash(const ProblemSpec& spec, const SolverOptions& o) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer,
                "rho=%.17g mu1=%.17g mu2=%.17g tau=%.17g L=%.17g n=%d dt=%.17g T=%.17g "
                "stride=%d nodes=%d order=%d interp=%d delayq=%d rhoq=%d memop=%d lin=%d "
                "window=%.17g cut=%.17g",
                spec.rho, spec.mu1, spec.mu2, spec.tau, spec.length, o.n_modes, o.dt, o.T,
                o.stride, o.basis.nodes_per_mode, o.basis.panel_order,
                static_cast<int>(o.interpolation), static_cast<int>(o.delay_quadrature),
                o.rho_order, static_cast<int>(o.memory_operator), o.linear_diagnostic ? 1 : 0,
                o.memory_window, o.kernel_cutoff);
  const std::string text = std::string(buffer) + "|" + spec.kirchhoff.description + "|" +
                           spec.kernel.description + "|" + spec.feedback.description + "|" +
                           spec.initial.description;
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

Trajectory run(const ProblemSpec& spec, double xi, const SolverOptions& options) {
  const Discretization disc(spec, options);
  return run(disc, xi);
}

Trajectory run(const Discretization& disc, double xi) {
  const SolverOptions& o = disc.options();
  Trajectory trajectory;
  auto& meta = trajectory.metadata;
  meta.spec_hash = spec_hash(disc.spec(), o);
  meta.dt = o.dt;
  meta.n_modes = o.n_modes;
  meta.stride = o.stride;
  meta.xi = xi;
  meta.tau = disc.spec().tau;
  meta.rho = disc.spec().rho;
  meta.length = disc.spec().length;
  meta.description = disc.spec().kirchhoff.description + "; " + disc.spec().kernel.description +
                     "; " + disc.spec().feedback.description;

  SolverState state = initial_state(disc);
  const long steps = static_cast<long>(std::ceil(o.T / o.dt - 1e-9));
  trajectory.samples.reserve(static_cast<std::size_t>(steps / o.stride + 2));
  trajectory.samples.push_back(make_sample(state, disc, xi));
  for (long k = 1; k <= steps; ++k) {
    try {
      step(state, disc);
    } catch (const IntegrationError& e) {
      trajectory.aborted = true;
      trajectory.abort_reason = e.what();
      break;
    }
    if (k % o.stride == 0 || k == steps) {
      trajectory.samples.push_back(make_sample(state, disc, xi));
    }
  }
  return trajectory;
}

}  // namespace kirchdelay
