#pragma once

// Modal Galerkin system on span{w_1..w_n}. With u = sum a_i w_i:
//
//   (W^T diag(w_q |u'_q|^rho) W + G) a'' = -Lambda a + C y1 - M(a^T G a) G a
//                                          - mu1 W^T w g(W a') - mu2 W^T w g(W z1)
//
// where W holds mode values at the quadrature nodes, C = Lambda (or G for the
// Laplacian memory variant), y1 = int_0^t h(t - s) a(s) ds and z1 = a'(t - tau).

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kirchdelay/basis.hpp"
#include "kirchdelay/delayline.hpp"
#include "kirchdelay/memory.hpp"
#include "kirchdelay/model.hpp"

namespace kirchdelay {

/// How int_0^1 int G(z) dx drho is evaluated.
enum class DelayQuadrature {
  segment,  // exact along the history buffer, 4-point Gauss per record segment
  gauss,    // Gauss-Legendre in rho of order rho_order
};

struct SolverOptions {
  int n_modes = 8;
  double dt = 5e-4;
  double T = 20.0;
  int stride = 1;  // keep every stride-th step as a sample
  ModeSetOptions basis;
  Interpolation interpolation = Interpolation::linear;
  DelayQuadrature delay_quadrature = DelayQuadrature::segment;
  int rho_order = 16;
  MemoryOperator memory_operator = MemoryOperator::bilaplacian;
  /// Drop the |u'|^rho u'' inertia (and its energy share) for linear-oracle runs.
  bool linear_diagnostic = false;
  /// Retained displacement history; 0 picks the kernel's effective support.
  double memory_window = 0.0;
  double kernel_cutoff = 1e-12;
  double compat_tolerance = 1e-8;
};

/// The seven additive parts of the energy.
struct EnergyBreakdown {
  double kinetic_rho = 0.0;     // |u'|_{rho+2}^{rho+2} / (rho + 2)
  double bending = 0.0;         // |Delta u|^2 / 2
  double kinetic_grad = 0.0;    // |grad u'|^2 / 2
  double kirchhoff = 0.0;       // M^(|grad u|^2) / 2
  double memory_deficit = 0.0;  // -(int_0^t h) |Delta u|^2 / 2
  double history = 0.0;         // (h box Delta u) / 2
  double delay = 0.0;           // xi int int G(z)
  double total = 0.0;

  void sum() {
    total = kinetic_rho + bending + kinetic_grad + kirchhoff + memory_deficit + history + delay;
  }
};

/// Terms of the energy balance at one instant.
struct PowerTerms {
  double damping = 0.0;          // int u' g(u')
  double cross = 0.0;            // int u' g(z1)
  double delayed_damping = 0.0;  // int z1 g(z1)
  double G_now = 0.0;            // int G(u')
  double G_delayed = 0.0;        // int G(z1)
  double h_t = 0.0;              // h(t)
  double stiffness = 0.0;        // |Delta u|^2 (or |grad u|^2 for the Laplacian variant)
  double box_derivative = 0.0;   // (h' box Delta u)(t)

  /// -h(t)|Delta u|^2 / 2 + (h' box Delta u) / 2
  double memory_rate() const { return -0.5 * h_t * stiffness + 0.5 * box_derivative; }
};

struct SolverState {
  double t = 0.0;
  long step = 0;
  Eigen::VectorXd a;
  Eigen::VectorXd v;
  MemoryState memory;
  HistoryBuffer history;
  double delay_integral = 0.0;  // int_0^1 int G(z) dx drho, segment mode
  double upsilon = 0.0;         // int_0^1 e^{-2 tau rho} int G(z) dx drho, segment mode
};

struct Sample {
  double t = 0.0;
  Eigen::VectorXd a;
  Eigen::VectorXd v;
  EnergyBreakdown energy;
  PowerTerms power;
  double phi = 0.0;
  double psi = 0.0;
  double upsilon = 0.0;
};

struct TrajectoryMetadata {
  std::uint64_t spec_hash = 0;
  double dt = 0.0;
  int n_modes = 0;
  int stride = 1;
  double xi = 0.0;
  double tau = 0.0;
  double rho = 0.0;
  double length = 0.0;
  std::string description;
};

struct Trajectory {
  std::vector<Sample> samples;
  TrajectoryMetadata metadata;
  bool aborted = false;
  std::string abort_reason;
};

/// Problem-specific data shared by every evaluation: modes, metric, options.
class Discretization {
 public:
  Discretization(const ProblemSpec& spec, const SolverOptions& options);
  Discretization(const ProblemSpec& spec, const SolverOptions& options, ModeSet modes);

  const ProblemSpec& spec() const noexcept { return spec_; }
  const SolverOptions& options() const noexcept { return options_; }
  const ModeSet& modes() const noexcept { return modes_; }
  /// Lambda (diagonal) or G, per options().memory_operator.
  const Eigen::MatrixXd& memory_metric() const noexcept { return metric_; }
  int size() const noexcept { return modes_.size(); }

 private:
  void check() const;

  ProblemSpec spec_;
  SolverOptions options_;
  ModeSet modes_;
  Eigen::MatrixXd metric_;
};

/// W^T diag(w_q |u'_q|^rho) W + G, with u' = W v. Without the rho term when
/// include_rho is false.
Eigen::MatrixXd effective_mass(const Eigen::VectorXd& v, const ModeSet& modes, double rho,
                               bool include_rho = true);

/// C y1: lambda_i int_0^t h(t - s) a_i(s) ds for the bilaplacian memory.
Eigen::VectorXd memory_term(const SolverState& state, const Discretization& disc);

/// Modal force at (t, a, v) with given memory value y1 and delayed velocity z1.
Eigen::VectorXd rhs(const Discretization& disc, const Eigen::VectorXd& a, const Eigen::VectorXd& v,
                    const Eigen::VectorXd& y1, const Eigen::VectorXd& z1);
/// Modal force at the state's own time.
Eigen::VectorXd rhs(const SolverState& state, const Discretization& disc);

/// State at t = 0: projected u0, u1, history buffer from f0 sampled every dt,
/// zero memory, delay integrals over the initial history.
SolverState initial_state(const Discretization& disc);

/// One classical four-stage step of size options().dt. Throws IntegrationError
/// (state untouched) on a failed mass solve or non-finite result.
void step(SolverState& state, const Discretization& disc);

/// Integrate to T (rounded up to a whole number of steps), sampling every
/// stride steps. Stops early on IntegrationError and marks the trajectory.
Trajectory run(const ProblemSpec& spec, double xi, const SolverOptions& options);
Trajectory run(const Discretization& disc, double xi);

/// FNV-1a hash of the parameter descriptions and numerics that define a run.
std::uint64_t spec_hash(const ProblemSpec& spec, const SolverOptions& options);

/// int_{s0}^{s1} weight(s) int G(v(x, s)) dx ds along the buffer, split at record
/// times, 4-point Gauss per piece. An empty weight means 1.
double integrate_history(const HistoryBuffer& buffer, const ModeSet& modes,
                         const FeedbackSpec& feedback, double s0, double s1,
                         const std::function<double(double)>& weight = {});

/// int G(W v) dx by the mode-set quadrature.
double potential_integral(const ModeSet& modes, const FeedbackSpec& feedback,
                          const Eigen::VectorXd& v);

}  // namespace kirchdelay
