#include "kirchdelay/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kirchdelay/errors.hpp"
#include "kirchdelay/quadrature.hpp"

namespace kirchdelay {

namespace {

double signed_power(double x, double rho) {
  return x == 0.0 ? 0.0 : std::pow(std::abs(x), rho) * x;
}

double kinetic_rho(const ModeSet& modes, const Eigen::VectorXd& v, double rho) {
  const Eigen::VectorXd nodal = modes.values() * v;
  double sum = 0.0;
  for (Eigen::Index q = 0; q < nodal.size(); ++q) {
    const double s = std::abs(nodal[q]);
    if (s != 0.0) sum += modes.weights()[q] * std::pow(s, rho + 2.0);
  }
  return sum / (rho + 2.0);
}

// int |u'|^rho u' f dx with f = W c
double rho_pairing(const ModeSet& modes, const Eigen::VectorXd& v, const Eigen::VectorXd& c,
                   double rho) {
  const Eigen::VectorXd velocity = modes.values() * v;
  const Eigen::VectorXd field = modes.values() * c;
  double sum = 0.0;
  for (Eigen::Index q = 0; q < velocity.size(); ++q) {
    sum += modes.weights()[q] * signed_power(velocity[q], rho) * field[q];
  }
  return sum;
}

// int G(z(x, rho, t)) dx at the Gauss nodes in rho; weight(rho) multiplies.
double delay_by_gauss(const SolverState& state, const Discretization& disc, bool faded) {
  const QuadratureRule& rule = gauss_legendre(disc.options().rho_order, 0.0, 1.0);
  const double tau = disc.spec().tau;
  double sum = 0.0;
  Eigen::VectorXd z;
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const double r = rule.nodes[j];
    state.history.sample_at(state.t - tau * r, z);
    double value = potential_integral(disc.modes(), disc.spec().feedback, z);
    if (faded) value *= std::exp(-2.0 * tau * r);
    sum += rule.weights[j] * value;
  }
  return sum;
}

void require_positive(std::span<const double> values, const char* what) {
  for (double e : values) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw FitError(std::string(what) + ": nonpositive or non-finite energy sample");
    }
  }
}

}  // namespace

EnergyBreakdown energy(const SolverState& state, const Discretization& disc, double xi) {
  const ProblemSpec& spec = disc.spec();
  const ModeSet& modes = disc.modes();
  const Eigen::MatrixXd& G = modes.grad_matrix();
  const Eigen::VectorXd& a = state.a;
  const Eigen::VectorXd& v = state.v;
  EnergyBreakdown e;
  if (!disc.options().linear_diagnostic) e.kinetic_rho = kinetic_rho(modes, v, spec.rho);
  e.bending = 0.5 * a.dot(modes.lambdas().cwiseProduct(a));
  e.kinetic_grad = 0.5 * v.dot(G * v);
  e.kirchhoff = 0.5 * spec.kirchhoff.antiderivative(a.dot(G * a));
  const double stiffness = a.dot(disc.memory_metric() * a);
  e.memory_deficit = -0.5 * state.memory.values().H * stiffness;
  e.history = 0.5 * state.memory.box();
  const double delay = disc.options().delay_quadrature == DelayQuadrature::segment
                           ? state.delay_integral
                           : delay_by_gauss(state, disc, false);
  e.delay = xi * delay;
  e.sum();
  return e;
}

EnergyBreakdown energy_direct(const SolverState& state, const Discretization& disc, double xi) {
  const ProblemSpec& spec = disc.spec();
  ModeSetOptions fine = disc.options().basis;
  fine.nodes_per_mode *= 2;
  const ModeSet modes = build_modes(disc.size(), spec.length, fine);
  const Eigen::MatrixXd& G = modes.grad_matrix();
  const Eigen::VectorXd& a = state.a;
  const Eigen::VectorXd& v = state.v;

  EnergyBreakdown e;
  if (!disc.options().linear_diagnostic) e.kinetic_rho = kinetic_rho(modes, v, spec.rho);
  const Eigen::VectorXd curvature = modes.curvatures() * a;
  e.bending = 0.5 * modes.weights().dot(curvature.cwiseAbs2());
  e.kinetic_grad = 0.5 * v.dot(G * v);
  e.kirchhoff = 0.5 * spec.kirchhoff.antiderivative(a.dot(G * a));

  const Eigen::MatrixXd metric = disc.options().memory_operator == MemoryOperator::bilaplacian
                                     ? Eigen::MatrixXd(modes.lambdas().asDiagonal())
                                     : G;
  const MemoryValues m = state.memory.from_history();
  const double stiffness = a.dot(metric * a);
  e.memory_deficit = -0.5 * m.H * stiffness;
  e.history = 0.5 * std::max(0.0, m.yq - 2.0 * (metric * a).dot(m.y1) + m.H * stiffness);
  const double tau = spec.tau;
  e.delay = xi * integrate_history(state.history, modes, spec.feedback, state.t - tau, state.t) /
            tau;
  e.sum();
  return e;
}

PowerTerms power_terms(const SolverState& state, const Discretization& disc) {
  const ProblemSpec& spec = disc.spec();
  const ModeSet& modes = disc.modes();
  const FeedbackSpec& fb = spec.feedback;
  const Eigen::VectorXd z1 = state.history.sample_at(state.t - spec.tau);
  const Eigen::VectorXd u = modes.values() * state.v;
  const Eigen::VectorXd z = modes.values() * z1;
  PowerTerms p;
  for (Eigen::Index q = 0; q < u.size(); ++q) {
    const double w = modes.weights()[q];
    const double gu = fb.g(u[q]);
    const double gz = fb.g(z[q]);
    p.damping += w * u[q] * gu;
    p.cross += w * u[q] * gz;
    p.delayed_damping += w * z[q] * gz;
  }
  p.G_now = potential_integral(modes, fb, state.v);
  p.G_delayed = potential_integral(modes, fb, z1);
  p.h_t = spec.kernel.evaluate(state.t);
  p.stiffness = state.a.dot(disc.memory_metric() * state.a);
  p.box_derivative = state.memory.box_derivative();
  return p;
}

double lyapunov_phi(const SolverState& state, const Discretization& disc) {
  const ModeSet& modes = disc.modes();
  double phi = state.v.dot(modes.grad_matrix() * state.a);
  if (!disc.options().linear_diagnostic) {
    const double rho = disc.spec().rho;
    phi += rho_pairing(modes, state.v, state.a, rho) / (rho + 1.0);
  }
  return phi;
}

double lyapunov_psi(const SolverState& state, const Discretization& disc) {
  const ModeSet& modes = disc.modes();
  const MemoryValues& m = state.memory.values();
  const Eigen::VectorXd lag = m.H * state.a - m.y1;
  double psi = -state.v.dot(modes.grad_matrix() * lag);
  if (!disc.options().linear_diagnostic) {
    const double rho = disc.spec().rho;
    psi -= rho_pairing(modes, state.v, lag, rho) / (rho + 1.0);
  }
  return psi;
}

double lyapunov_upsilon(const SolverState& state, const Discretization& disc) {
  if (disc.options().delay_quadrature == DelayQuadrature::segment) return state.upsilon;
  return delay_by_gauss(state, disc, true);
}

double lyapunov_F(const Sample& s, const LyapunovWeights& w) {
  return w.N * s.energy.total + w.eps1 * s.phi + s.psi + w.eps2 * s.upsilon;
}

double lyapunov_F(const SolverState& state, const Discretization& disc, double xi,
                  const LyapunovWeights& w) {
  return w.N * energy(state, disc, xi).total + w.eps1 * lyapunov_phi(state, disc) +
         lyapunov_psi(state, disc) + w.eps2 * lyapunov_upsilon(state, disc);
}

Sample make_sample(const SolverState& state, const Discretization& disc, double xi) {
  Sample s;
  s.t = state.t;
  s.a = state.a;
  s.v = state.v;
  s.energy = energy(state, disc, xi);
  s.power = power_terms(state, disc);
  s.phi = lyapunov_phi(state, disc);
  s.psi = lyapunov_psi(state, disc);
  s.upsilon = lyapunov_upsilon(state, disc);
  return s;
}

MemoryIdentity memory_identity_check(std::span<const Eigen::VectorXd> history, double dt,
                                     const Eigen::VectorXd& metric, const KernelSpec& kernel,
                                     std::size_t index) {
  if (index < 1 || index + 1 >= history.size()) {
    throw UsageError("memory_identity_check: index needs a neighbour on each side");
  }
  if (!(dt > 0.0)) throw UsageError("memory_identity_check: dt must be > 0");
  auto inner = [&metric](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return x.dot(metric.cwiseProduct(y));
  };
  auto weight = [dt](std::size_t k, std::size_t j) {
    return (k == 0 || k == j) ? 0.5 * dt : dt;
  };
  auto lag = [dt](std::size_t j, std::size_t k) {
    return static_cast<double>(j - k) * dt;
  };
  auto box = [&](std::size_t j, const ScalarFn& fn) {
    double sum = 0.0;
    for (std::size_t k = 0; k < j; ++k) {
      const Eigen::VectorXd d = history[k] - history[j];
      sum += weight(k, j) * fn(lag(j, k)) * inner(d, d);
    }
    return j == 0 ? 0.0 : sum;
  };

  const std::size_t i = index;
  Eigen::VectorXd conv = Eigen::VectorXd::Zero(history[i].size());
  double H = 0.0;
  for (std::size_t k = 0; k <= i; ++k) {
    const double w = weight(k, i) * kernel.evaluate(lag(i, k));
    conv.noalias() += w * history[k];
    H += w;
  }
  const Eigen::VectorXd rate = (history[i + 1] - history[i - 1]) / (2.0 * dt);
  const double dq =
      (inner(history[i + 1], history[i + 1]) - inner(history[i - 1], history[i - 1])) /
      (2.0 * dt);
  const double dbox = (box(i + 1, kernel.evaluate) - box(i - 1, kernel.evaluate)) / (2.0 * dt);

  MemoryIdentity r;
  r.lhs = inner(rate, conv);
  r.rhs = -0.5 * dbox + 0.5 * H * dq + 0.5 * box(i, kernel.derivative);
  r.residual = r.lhs - r.rhs;
  return r;
}

std::vector<double> time_derivative(std::span<const double> times, std::span<const double> values,
                                    double period) {
  const std::size_t n = times.size();
  if (n < 3 || values.size() != n) {
    throw UsageError("time_derivative: need at least three samples of matching size");
  }
  const double h = (times[n - 1] - times[0]) / static_cast<double>(n - 1);
  const double snap = 1e-9 * h;
  auto backward = [&](std::size_t i) {
    return (3.0 * values[i] - 4.0 * values[i - 1] + values[i - 2]) / (2.0 * h);
  };
  auto forward = [&](std::size_t i) {
    return (-3.0 * values[i] + 4.0 * values[i + 1] - values[i + 2]) / (2.0 * h);
  };
  std::vector<double> d(n);
  d[0] = forward(0);
  d[n - 1] = backward(n - 1);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double kink = std::numeric_limits<double>::quiet_NaN();
    if (period > 0.0) {
      const double k = std::max(1.0, std::round(times[i] / period));
      kink = k * period;
    }
    const bool straddles =
        kink > times[i - 1] + snap && kink < times[i + 1] - snap;
    if (!straddles) {
      d[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
    } else if (kink >= times[i] - snap && i >= 2) {
      d[i] = backward(i);
    } else if (i + 2 < n) {
      d[i] = forward(i);
    } else {
      d[i] = backward(i);
    }
  }
  return d;
}

namespace {

void require_dense(const Trajectory& trajectory) {
  if (trajectory.metadata.stride != 1 || trajectory.samples.size() < 3) {
    throw UsageError("energy balance needs a trajectory sampled at every step (stride 1)");
  }
}

std::vector<double> energy_rate(const Trajectory& trajectory, double tau) {
  std::vector<double> t, e;
  t.reserve(trajectory.samples.size());
  e.reserve(trajectory.samples.size());
  for (const auto& s : trajectory.samples) {
    t.push_back(s.t);
    e.push_back(s.energy.total);
  }
  return time_derivative(t, e, tau);
}

}  // namespace

std::vector<double> energy_identity_residual(const Trajectory& trajectory, const ProblemSpec& spec,
                                             double xi) {
  require_dense(trajectory);
  const std::vector<double> rate = energy_rate(trajectory, spec.tau);
  std::vector<double> residual(rate.size());
  for (std::size_t i = 0; i < rate.size(); ++i) {
    const PowerTerms& p = trajectory.samples[i].power;
    const double balance = -spec.mu1 * p.damping - spec.mu2 * p.cross + p.memory_rate() -
                           (xi / spec.tau) * p.G_delayed + (xi / spec.tau) * p.G_now;
    residual[i] = rate[i] - balance;
  }
  return residual;
}

DissipationCheck dissipation_bound_check(const Trajectory& trajectory, const ProblemSpec& spec,
                                         double xi, Theta2Form form) {
  require_dense(trajectory);
  DissipationCheck check;
  check.theta = theta_constants(spec, xi, form);
  check.observational = !check.theta.positive();
  const std::vector<double> rate = energy_rate(trajectory, spec.tau);
  check.margin.resize(rate.size());
  for (std::size_t i = 0; i < rate.size(); ++i) {
    const PowerTerms& p = trajectory.samples[i].power;
    const double bound = p.memory_rate() - check.theta.theta1 * p.damping -
                         check.theta.theta2 * p.delayed_damping;
    check.margin[i] = bound - rate[i];
  }
  return check;
}

DecayFit fit_decay(std::span<const double> times, std::span<const double> energy, double t0,
                   double t_end) {
  if (times.size() != energy.size()) throw UsageError("fit_decay: size mismatch");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t0 || times[i] > t_end) continue;
    if (!(energy[i] > 0.0) || !std::isfinite(energy[i])) {
      throw FitError("fit_decay: nonpositive energy at t = " + std::to_string(times[i]));
    }
    x.push_back(times[i]);
    y.push_back(std::log(energy[i]));
  }
  if (x.size() < 2) throw FitError("fit_decay: fewer than two samples in the fit window");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("fit_decay: degenerate time window");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss_res += r * r;
  }
  DecayFit fit;
  fit.K = std::exp(intercept);
  fit.k = -slope;
  fit.t0 = x.front();
  fit.t_end = x.back();
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.points = x.size();
  return fit;
}

Equivalence equivalence_bounds(std::span<const double> F, std::span<const double> E) {
  if (F.size() != E.size() || E.empty()) throw UsageError("equivalence_bounds: size mismatch");
  require_positive(E, "equivalence_bounds");
  Equivalence eq;
  eq.k0 = std::numeric_limits<double>::infinity();
  eq.k1 = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < E.size(); ++i) {
    const double r = F[i] / E[i];
    eq.k0 = std::min(eq.k0, r);
    eq.k1 = std::max(eq.k1, r);
  }
  return eq;
}

double decay_modulus(std::span<const double> times, std::span<const double> F,
                     std::span<const double> E, double period) {
  require_positive(E, "decay_modulus");
  const std::vector<double> rate = time_derivative(times, F, period);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rate.size(); ++i) worst = std::min(worst, -rate[i] / E[i]);
  return worst;
}

}  // namespace kirchdelay
