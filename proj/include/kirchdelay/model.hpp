#pragma once

// Problem parameterization for the viscoelastic Kirchhoff beam with fading
// memory and delayed internal feedback on the clamped interval (0, L):
//
//   |u'|^rho u'' + u'''' - u''_xx'' - M(|u_x|^2) u_xx - int_0^t h(t-s) u''''(s) ds
//       + mu1 g(u'(t)) + mu2 g(u'(t - tau)) = 0,
//
// plus assumption checks and the admissible window for the delay-energy weight xi.

#include <functional>
#include <string>
#include <vector>

namespace kirchdelay {

using ScalarFn = std::function<double(double)>;
/// Field on (0, L).
using FieldFn = std::function<double(double)>;
/// History f0(x, s) for s in [-tau, 0].
using HistoryFn = std::function<double(double, double)>;

/// Kirchhoff stiffness law M(lambda) and the constants of its growth bounds.
struct KirchhoffSpec {
  ScalarFn evaluate;
  ScalarFn antiderivative;  // M^(lambda) = int_0^lambda M
  ScalarFn derivative;
  double m0 = 1.0;
  double delta = 1.0;
  double gamma = 0.0;
  double beta = 0.0;
  double alpha = 0.0;
  std::string description;
};

enum class KernelShape { exponential, tabulated };

/// Relaxation kernel h(t) of the memory term.
struct KernelSpec {
  KernelShape shape = KernelShape::exponential;
  ScalarFn evaluate;
  ScalarFn derivative;
  double total_mass = 0.0;  // int_0^inf h
  double zeta = 1.0;        // h' <= -zeta h
  // exponential(h0, rate): h = h0 exp(-rate t)
  double h0 = 0.0;
  double rate = 0.0;
  // tabulated: piecewise linear through the samples, zero after the last one
  std::vector<double> sample_times;
  std::vector<double> sample_values;
  std::string description;

  double beta1() const { return 1.0 - total_mass; }
  /// Smallest time beyond which h stays below eps_cut * h(0).
  double effective_support(double eps_cut) const;
};

/// Odd nondecreasing feedback law g with antiderivative G.
struct FeedbackSpec {
  ScalarFn g;
  ScalarFn gprime;
  ScalarFn G;
  double c1 = 1.0;
  double alpha1 = 0.5;
  double alpha2 = 0.5;
  bool linear = false;  // g(s) = c s exactly
  std::string description;
};

struct InitialData {
  FieldFn u0;
  FieldFn u1;
  HistoryFn f0;
  std::string description;
};

struct ProblemSpec {
  double rho = 1.0;
  double mu1 = 1.0;
  double mu2 = 0.0;
  double tau = 1.0;
  double length = 1.0;
  KirchhoffSpec kirchhoff;
  KernelSpec kernel;
  FeedbackSpec feedback;
  InitialData initial;
};

/// Where the sampled assumption checks are evaluated.
struct SampleGrid {
  double lambda_max = 100.0;
  int lambda_points = 401;
  /// Growth bounds M <= delta lambda^gamma and |M'| <= beta lambda^alpha are
  /// checked from this lambda upward; with m0 > 0 and gamma > 0 they cannot
  /// hold as lambda -> 0.
  double kirchhoff_upper_from = 1.0;
  double t_max = 20.0;
  int t_points = 401;
  double s_max = 10.0;
  int s_points = 401;
  int x_points = 101;

  std::vector<double> lambdas() const;
  std::vector<double> times() const;
  std::vector<double> velocities() const;  // symmetric about zero
  std::vector<double> positions(double length) const;
};

struct ValidationEntry {
  std::string name;       // e.g. "A4.gain"
  std::string condition;  // human-readable inequality
  bool passed = false;
  double margin = 0.0;    // worst relative margin; >= -tolerance iff passed
  double worst_at = 0.0;  // grid point of the worst margin
  std::string grid;
  std::string note;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  double tolerance = 1e-10;

  bool passed() const;
  const ValidationEntry* find(const std::string& name) const;
  std::vector<const ValidationEntry*> failures() const;
};

/// Sampled check of (A1)-(A4), the gain condition and history compatibility.
/// Throws EvaluationError when M, h, g or the initial data are non-finite on the grid.
ValidationReport validate_assumptions(const ProblemSpec& spec, const SampleGrid& grid = {},
                                      double tolerance = 1e-10);

struct XiWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool nonempty() const { return lo < hi; }
  bool contains(double xi) const { return lo < xi && xi < hi; }
  double midpoint() const { return 0.5 * (lo + hi); }
};

/// (tau mu2 (1 - a1) / a1, tau (mu1 - a2 mu2) / a2); may be empty.
XiWindow xi_window(const ProblemSpec& spec);

enum class Theta2Form {
  printed,    // theta2 = theta1 = mu1 - xi a2 / tau - mu2 a2
  corrected,  // theta2 = xi a1 / tau - mu2 (1 - a1)
};

struct ThetaConstants {
  double theta1 = 0.0;
  double theta2 = 0.0;
  Theta2Form form = Theta2Form::printed;
  std::vector<std::string> warnings;

  bool positive() const { return theta1 > 0.0 && theta2 > 0.0; }
};

ThetaConstants theta_constants(const ProblemSpec& spec, double xi,
                               Theta2Form form = Theta2Form::printed);

struct LegendreCheck {
  double worst_margin = 0.0;
  double worst_s = 0.0;
  double worst_t = 0.0;
};

/// min over the grids of G*(g(s)) + G(t) - g(s) t, with G* evaluated through a
/// numerical inverse of g. Throws DomainError when g is not strictly increasing
/// on s_grid.
LegendreCheck legendre_inequality_check(const FeedbackSpec& feedback,
                                        const std::vector<double>& s_grid,
                                        const std::vector<double>& t_grid);

/// Convex conjugate of G at sigma, through the inverse of g.
double legendre_conjugate(const FeedbackSpec& feedback, double sigma);

}  // namespace kirchdelay
