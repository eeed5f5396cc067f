#include "kirchdelay/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kirchdelay/basis.hpp"
#include "kirchdelay/errors.hpp"

namespace kirchdelay {

double KernelSpec::effective_support(double eps_cut) const {
  const double h_start = evaluate ? evaluate(0.0) : 0.0;
  if (!(h_start > 0.0)) return 0.0;
  if (shape == KernelShape::exponential) {
    if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
    return std::log(1.0 / eps_cut) / rate;
  }
  double support = 0.0;
  for (std::size_t k = 0; k < sample_times.size(); ++k) {
    if (sample_values[k] > eps_cut * h_start) support = sample_times[k];
  }
  // the linear piece after the last large sample still carries mass
  auto it = std::upper_bound(sample_times.begin(), sample_times.end(), support);
  return it == sample_times.end() ? support : *it;
}

namespace catalog {

KirchhoffSpec linear_kirchhoff(double m0, double slope) {
  KirchhoffSpec spec;
  spec.evaluate = [m0, slope](double l) { return m0 + slope * l; };
  spec.antiderivative = [m0, slope](double l) { return m0 * l + 0.5 * slope * l * l; };
  spec.derivative = [slope](double) { return slope; };
  spec.m0 = m0;
  spec.delta = m0 + slope;
  spec.gamma = 1.0;
  spec.beta = slope;
  spec.alpha = 0.0;
  std::ostringstream os;
  os.precision(17);
  os << "linear(m0=" << m0 << ",slope=" << slope << ")";
  spec.description = os.str();
  return spec;
}

KirchhoffSpec constant_kirchhoff(double m0) {
  KirchhoffSpec spec = linear_kirchhoff(m0, 0.0);
  spec.gamma = 0.0;
  spec.delta = m0;
  std::ostringstream os;
  os.precision(17);
  os << "constant(m0=" << m0 << ")";
  spec.description = os.str();
  return spec;
}

KernelSpec exponential_kernel(double h0, double zeta) {
  KernelSpec spec;
  spec.shape = KernelShape::exponential;
  spec.evaluate = [h0, zeta](double t) { return h0 * std::exp(-zeta * t); };
  spec.derivative = [h0, zeta](double t) { return -zeta * h0 * std::exp(-zeta * t); };
  spec.total_mass = zeta > 0.0 ? h0 / zeta : (h0 == 0.0 ? 0.0 : INFINITY);
  spec.zeta = zeta;
  spec.h0 = h0;
  spec.rate = zeta;
  std::ostringstream os;
  os.precision(17);
  os << "exponential(h0=" << h0 << ",zeta=" << zeta << ")";
  spec.description = os.str();
  return spec;
}

KernelSpec tabulated_kernel(std::vector<double> times, std::vector<double> values, double zeta) {
  if (times.size() != values.size() || times.size() < 2) {
    throw ConfigError("tabulated kernel needs at least two (time, value) samples of equal count");
  }
  if (times.front() != 0.0) throw ConfigError("tabulated kernel must start at t = 0");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw ConfigError("tabulated kernel times must be strictly increasing");
    }
  }
  KernelSpec spec;
  spec.shape = KernelShape::tabulated;
  spec.sample_times = times;
  spec.sample_values = values;
  spec.zeta = zeta;
  spec.evaluate = [times, values](double t) {
    if (t < 0.0 || t > times.back()) return 0.0;
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.end()) return values.back();
    const auto k = static_cast<std::size_t>(it - times.begin());
    const double theta = (t - times[k - 1]) / (times[k] - times[k - 1]);
    return (1.0 - theta) * values[k - 1] + theta * values[k];
  };
  spec.derivative = [times, values](double t) {
    if (t < 0.0 || t >= times.back()) return 0.0;
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto k = static_cast<std::size_t>(it - times.begin());
    return (values[k] - values[k - 1]) / (times[k] - times[k - 1]);
  };
  double mass = 0.0;
  for (std::size_t k = 1; k < times.size(); ++k) {
    mass += 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]);
  }
  spec.total_mass = mass;
  std::ostringstream os;
  os.precision(17);
  os << "tabulated(samples=" << times.size() << ",t_end=" << times.back() << ",zeta=" << zeta
     << ")";
  spec.description = os.str();
  return spec;
}

FeedbackSpec linear_feedback(double slope) {
  FeedbackSpec spec;
  spec.g = [slope](double s) { return slope * s; };
  spec.gprime = [slope](double) { return slope; };
  spec.G = [slope](double s) { return 0.5 * slope * s * s; };
  spec.c1 = slope;
  spec.alpha1 = 0.5;
  spec.alpha2 = 0.5;
  spec.linear = true;
  std::ostringstream os;
  os.precision(17);
  os << "linear(slope=" << slope << ")";
  spec.description = os.str();
  return spec;
}

FeedbackSpec arctan_feedback() {
  FeedbackSpec spec;
  spec.g = [](double s) { return std::atan(s); };
  spec.gprime = [](double s) { return 1.0 / (1.0 + s * s); };
  spec.G = [](double s) { return s * std::atan(s) - 0.5 * std::log1p(s * s); };
  spec.c1 = 1.0;
  spec.alpha1 = 0.5;
  spec.alpha2 = 1.0;
  spec.description = "arctan";
  return spec;
}

FeedbackSpec linear_tanh_feedback(double kappa) {
  FeedbackSpec spec;
  spec.g = [kappa](double s) { return s + kappa * std::tanh(s); };
  spec.gprime = [kappa](double s) {
    const double c = std::cosh(s);
    return 1.0 + kappa / (c * c);
  };
  // log cosh(s) = |s| + log1p(exp(-2|s|)) - log 2, stable for large |s|
  spec.G = [kappa](double s) {
    const double a = std::abs(s);
    return 0.5 * s * s + kappa * (a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0));
  };
  spec.c1 = 1.0 + kappa;
  spec.alpha1 = 0.5;
  spec.alpha2 = 1.0;
  std::ostringstream os;
  os.precision(17);
  os << "linear_tanh(kappa=" << kappa << ")";
  spec.description = os.str();
  return spec;
}

FieldFn zero_field() {
  return [](double) { return 0.0; };
}

FieldFn mode_field(int mode, double length, double amplitude) {
  if (mode < 1) throw ConfigError("mode_field: mode index is 1-based");
  const double beta = solve_characteristic_roots(mode, length).back();
  ClampedMode shape(beta, length);
  return [shape, amplitude](double x) { return amplitude * shape.value(x); };
}

FieldFn bump_field(double length, double amplitude) {
  return [length, amplitude](double x) {
    const double y = x * (length - x) / (length * length);
    return 16.0 * amplitude * y * y;
  };
}

HistoryFn zero_history() {
  return [](double, double) { return 0.0; };
}

HistoryFn static_history(FieldFn u1) {
  return [u1 = std::move(u1)](double x, double) { return u1(x); };
}

HistoryFn oscillating_history(FieldFn u1, double omega) {
  return [u1 = std::move(u1), omega](double x, double s) { return u1(x) * std::cos(omega * s); };
}

}  // namespace catalog
}  // namespace kirchdelay
