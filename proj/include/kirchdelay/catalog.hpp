#pragma once

// Named constructors for the function-valued parts of a ProblemSpec. The
// config reader maps catalog names ("exponential", "linear", ...) onto these.

#include <vector>

#include "kirchdelay/model.hpp"

namespace kirchdelay::catalog {

/// M(lambda) = m0 + slope * lambda. Growth constants default to the tight
/// choice for lambda >= 1: delta = m0 + slope, gamma = 1, beta = slope, alpha = 0.
KirchhoffSpec linear_kirchhoff(double m0, double slope);
KirchhoffSpec constant_kirchhoff(double m0);

/// h(t) = h0 exp(-zeta t).
KernelSpec exponential_kernel(double h0, double zeta);
/// Piecewise-linear kernel through (times, values); zero after the last sample.
KernelSpec tabulated_kernel(std::vector<double> times, std::vector<double> values, double zeta);

/// g(s) = slope * s, alpha1 = alpha2 = 1/2.
FeedbackSpec linear_feedback(double slope = 1.0);
/// g(s) = atan(s); saturating, used for Legendre-inequality checks.
FeedbackSpec arctan_feedback();
/// g(s) = s + kappa tanh(s); alpha1 = 1/2, alpha2 = 1.
FeedbackSpec linear_tanh_feedback(double kappa);

FieldFn zero_field();
/// amplitude * w_mode(x), mode is 1-based and independent of the Galerkin size.
FieldFn mode_field(int mode, double length, double amplitude);
/// amplitude * 16 x^2 (L - x)^2 / L^4, clamped at both ends.
FieldFn bump_field(double length, double amplitude);

HistoryFn zero_history();
/// f0(x, s) = u1(x) for all s.
HistoryFn static_history(FieldFn u1);
/// f0(x, s) = u1(x) cos(omega s).
HistoryFn oscillating_history(FieldFn u1, double omega);

}  // namespace kirchdelay::catalog
