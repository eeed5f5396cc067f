#pragma once

// Energy, energy-balance residuals, Lyapunov functionals and decay fits.

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "kirchdelay/model.hpp"
#include "kirchdelay/solver.hpp"

namespace kirchdelay {

/// All seven energy parts at the state's time.
EnergyBreakdown energy(const SolverState& state, const Discretization& disc, double xi);

/// The same energy recomputed from raw data: a 2x finer x-quadrature, memory
/// terms summed over the retained displacement history, the delay term
/// integrated afresh along the buffer.
EnergyBreakdown energy_direct(const SolverState& state, const Discretization& disc, double xi);

/// Damping, feedback and memory-rate terms of the energy balance.
PowerTerms power_terms(const SolverState& state, const Discretization& disc);

/// Sample record: state, energy, power terms and Phi, Psi, Upsilon.
Sample make_sample(const SolverState& state, const Discretization& disc, double xi);

struct MemoryIdentity {
  double lhs = 0.0;  // (phi'(t), int_0^t h(t - s) phi(s) ds)
  double rhs = 0.0;
  double residual = 0.0;
};

/// Discrete check of the memory identity
///   (phi', h * phi) = -h |phi|^2 / 2 + (h' box phi) / 2 - d/dt[(h box phi) - (int h)|phi|^2] / 2
/// with phi(s_j) = history[j] on s_j = j dt, |x|^2 = sum metric_i x_i^2, integrals
/// by trapezoid and d/dt by central differences. d/dt of (int h)|phi|^2 is taken
/// by the product rule with (int_0^t h)' = h(t), so the h(t)|phi|^2 terms cancel.
/// index must have a neighbour on each side.
MemoryIdentity memory_identity_check(std::span<const Eigen::VectorXd> history, double dt,
                                     const Eigen::VectorXd& metric, const KernelSpec& kernel,
                                     std::size_t index);

/// dE/dt-style derivative of a uniformly sampled series: central differences,
/// second-order one-sided stencils at both ends and wherever a stencil would
/// straddle a breakpoint k * period (k >= 1), where higher derivatives jump.
std::vector<double> time_derivative(std::span<const double> times, std::span<const double> values,
                                    double period);

/// dE/dt minus the exact balance
///   -mu1 int u'g(u') - mu2 int u'g(z1) - h|Delta u|^2/2 + (h' box Delta u)/2
///   - (xi/tau) int G(z1) + (xi/tau) int G(u').
/// Throws UsageError unless the trajectory was sampled every step (>= 3 samples).
std::vector<double> energy_identity_residual(const Trajectory& trajectory, const ProblemSpec& spec,
                                             double xi);

struct DissipationCheck {
  ThetaConstants theta;
  std::vector<double> margin;  // bound - dE/dt
  bool observational = false;  // theta1 or theta2 <= 0
};

/// margin(t) = [memory rate - theta1 int u'g(u') - theta2 int z1 g(z1)] - dE/dt.
DissipationCheck dissipation_bound_check(const Trajectory& trajectory, const ProblemSpec& spec,
                                         double xi, Theta2Form form = Theta2Form::printed);

/// (1/(rho+1)) int |u'|^rho u' u + v^T G a.
double lyapunov_phi(const SolverState& state, const Discretization& disc);
/// -v^T G (H a - y1) - (1/(rho+1)) int |u'|^rho u' sum_i w_i (H a_i - y1_i).
double lyapunov_psi(const SolverState& state, const Discretization& disc);
/// int_0^1 e^{-2 tau rho} int G(z) dx drho.
double lyapunov_upsilon(const SolverState& state, const Discretization& disc);

struct LyapunovWeights {
  double N = 20.0;
  double eps1 = 1.0;
  double eps2 = 1.0;
};

double lyapunov_F(const Sample& sample, const LyapunovWeights& weights);
double lyapunov_F(const SolverState& state, const Discretization& disc, double xi,
                  const LyapunovWeights& weights);

struct DecayFit {
  double K = 0.0;
  double k = 0.0;
  double t0 = 0.0;
  double t_end = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Least-squares line through (t, log E) on [t0, t_end]. Throws FitError on a
/// nonpositive sample or fewer than two points in the window.
DecayFit fit_decay(std::span<const double> times, std::span<const double> energy, double t0,
                   double t_end = 1e300);

struct Equivalence {
  double k0 = 0.0;
  double k1 = 0.0;
  bool passed() const { return k0 > 0.0; }
};

/// k0 = min F/E, k1 = max F/E. Throws FitError on nonpositive E.
Equivalence equivalence_bounds(std::span<const double> F, std::span<const double> E);

/// min over the series of -F'(t)/E(t), F' from time_derivative.
double decay_modulus(std::span<const double> times, std::span<const double> F,
                     std::span<const double> E, double period);

}  // namespace kirchdelay
