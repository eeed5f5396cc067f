#include "kirchdelay/model.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kirchdelay/errors.hpp"

namespace kirchdelay {
namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(std::max(n, 1)));
  if (n <= 1) {
    out[0] = lo;
    return out;
  }
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (n - 1);
  return out;
}

double checked(const ScalarFn& f, const char* name, double x) {
  const double value = f(x);
  if (!std::isfinite(value)) throw EvaluationError(name, x);
  return value;
}

// Relative slack of lhs <= rhs.
double slack(double lhs, double rhs) {
  return (rhs - lhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

std::string describe_grid(const char* var, double lo, double hi, std::size_t n) {
  std::ostringstream os;
  os << var << " in [" << lo << ", " << hi << "], " << n << " points";
  return os.str();
}

// Accumulates the worst slack of one sampled condition.
struct Worst {
  double margin = std::numeric_limits<double>::infinity();
  double at = 0.0;
  void update(double m, double x) {
    if (m < margin) {
      margin = m;
      at = x;
    }
  }
};

void add(ValidationReport& report, std::string name, std::string condition, const Worst& worst,
         std::string grid, std::string note = {}) {
  ValidationEntry entry;
  entry.name = std::move(name);
  entry.condition = std::move(condition);
  entry.margin = std::isfinite(worst.margin) ? worst.margin : 0.0;
  entry.worst_at = worst.at;
  entry.passed = entry.margin >= -report.tolerance;
  entry.grid = std::move(grid);
  entry.note = std::move(note);
  report.entries.push_back(std::move(entry));
}

Worst scalar(double margin) {
  Worst w;
  w.update(margin, 0.0);
  return w;
}

}  // namespace

std::vector<double> SampleGrid::lambdas() const { return linspace(0.0, lambda_max, lambda_points); }
std::vector<double> SampleGrid::times() const { return linspace(0.0, t_max, t_points); }
std::vector<double> SampleGrid::velocities() const {
  return linspace(-s_max, s_max, s_points);
}
std::vector<double> SampleGrid::positions(double length) const {
  return linspace(0.0, length, x_points);
}

bool ValidationReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.passed; });
}

const ValidationEntry* ValidationReport::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::vector<const ValidationEntry*> ValidationReport::failures() const {
  std::vector<const ValidationEntry*> out;
  for (const auto& e : entries) {
    if (!e.passed) out.push_back(&e);
  }
  return out;
}

ValidationReport validate_assumptions(const ProblemSpec& spec, const SampleGrid& grid,
                                      double tolerance) {
  if (grid.lambda_points < 1 || grid.t_points < 2 || grid.s_points < 2 || grid.x_points < 1) {
    throw UsageError("validate_assumptions: empty sample grid");
  }
  ValidationReport report;
  report.tolerance = tolerance;

  {
    Worst w;
    w.update(std::isfinite(spec.mu1) ? spec.mu1 : -1.0, 0.0);
    w.update(std::isfinite(spec.mu2) ? spec.mu2 : -1.0, 1.0);
    w.update(std::isfinite(spec.tau) ? spec.tau : -1.0, 2.0);
    w.update(std::isfinite(spec.length) ? spec.length : -1.0, 3.0);
    add(report, "params", "mu1 > 0, mu2 >= 0, tau > 0, L > 0", w, "scalar");
    auto& e = report.entries.back();
    e.passed = spec.mu1 > 0.0 && spec.mu2 >= 0.0 && spec.tau > 0.0 && spec.length > 0.0;
  }
  {
    Worst w = scalar(std::isfinite(spec.rho) ? spec.rho : -1.0);
    add(report, "A1.rho", "0 < rho < inf (n = 1)", w, "scalar");
    report.entries.back().passed = spec.rho > 0.0 && std::isfinite(spec.rho);
  }

  // (A2)
  const auto& M = spec.kirchhoff;
  const auto lambdas = grid.lambdas();
  const std::string lambda_grid =
      describe_grid("lambda", lambdas.front(), lambdas.back(), lambdas.size());
  {
    Worst w;
    for (double l : lambdas) w.update(slack(M.m0, checked(M.evaluate, "M", l)), l);
    add(report, "A2.lower", "M(lambda) >= m0", w, lambda_grid);
    if (!(M.m0 > 0.0)) {
      report.entries.back().passed = false;
      report.entries.back().note = "m0 must be > 0";
    }
  }
  {
    Worst upper;
    Worst deriv;
    std::size_t used = 0;
    for (double l : lambdas) {
      if (l < grid.kirchhoff_upper_from) continue;
      ++used;
      const double bound = l > 0.0 ? M.delta * std::pow(l, M.gamma) : (M.gamma > 0 ? 0.0 : M.delta);
      upper.update(slack(checked(M.evaluate, "M", l), bound), l);
      const double dbound = l > 0.0 ? M.beta * std::pow(l, M.alpha) : (M.alpha > 0 ? 0.0 : M.beta);
      const double dm = M.derivative ? checked(M.derivative, "M'", l) : 0.0;
      deriv.update(slack(std::abs(dm), dbound), l);
    }
    std::string note;
    if (M.m0 > 0.0 && M.gamma > 0.0) {
      std::ostringstream os;
      os << "M >= m0 > 0 and M <= delta lambda^gamma (gamma > 0) cannot both hold as lambda -> 0; "
         << "upper bound checked for lambda >= " << grid.kirchhoff_upper_from;
      note = os.str();
    }
    const std::string g = describe_grid("lambda", std::max(grid.kirchhoff_upper_from, 0.0),
                                        lambdas.back(), used);
    add(report, "A2.upper", "M(lambda) <= delta lambda^gamma", upper, g, note);
    add(report, "A2.derivative", "|M'(lambda)| <= beta lambda^alpha", deriv, g);
  }
  {
    Worst w;
    w.update(-std::abs(checked(M.antiderivative, "M^", 0.0)), 0.0);
    double prev = checked(M.antiderivative, "M^", lambdas.front());
    for (std::size_t k = 1; k < lambdas.size(); ++k) {
      const double cur = checked(M.antiderivative, "M^", lambdas[k]);
      w.update(slack(prev, cur), lambdas[k]);
      prev = cur;
    }
    add(report, "A2.antiderivative", "M^(0) = 0, M^ nondecreasing", w, lambda_grid);
  }

  // (A3)
  const auto& h = spec.kernel;
  auto times = grid.times();
  std::string kernel_note;
  if (h.shape == KernelShape::tabulated && times.back() > h.sample_times.back()) {
    const double t_end = h.sample_times.back();
    std::erase_if(times, [t_end](double t) { return t > t_end; });
    kernel_note = "tabulated kernel vanishes after its last sample; checked on its table range";
  }
  const std::string t_grid = describe_grid("t", times.front(), times.back(), times.size());
  {
    Worst positive;
    Worst monotone;
    Worst decay;
    double prev = checked(h.evaluate, "h", times.front());
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double t = times[k];
      const double ht = checked(h.evaluate, "h", t);
      positive.update(ht, t);
      if (k > 0) monotone.update(slack(ht, prev), t);
      prev = ht;
      decay.update(slack(checked(h.derivative, "h'", t), -h.zeta * ht), t);
    }
    add(report, "A3.positive", "h(t) > 0", positive, t_grid, kernel_note);
    report.entries.back().passed = positive.margin > 0.0;
    add(report, "A3.nonincreasing", "h nonincreasing", monotone, t_grid);
    add(report, "A3.beta1", "beta1 = 1 - int h > 0", scalar(h.beta1()), "closed form");
    report.entries.back().passed = h.beta1() > 0.0;
    add(report, "A3.decay", "h'(t) <= -zeta h(t)", decay, t_grid);
    if (!(h.zeta > 0.0)) {
      report.entries.back().passed = false;
      report.entries.back().note = "zeta must be > 0";
    }
  }

  // (A4)
  const auto& fb = spec.feedback;
  const auto s = grid.velocities();
  const std::string s_grid = describe_grid("s", s.front(), s.back(), s.size());
  {
    Worst odd;
    Worst monotone;
    Worst slope;
    Worst lower;
    Worst upper;
    double prev = checked(fb.g, "g", s.front());
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double x = s[k];
      const double gx = checked(fb.g, "g", x);
      const double gm = checked(fb.g, "g", -x);
      odd.update(-std::abs(gx + gm) / std::max({1.0, std::abs(gx)}), x);
      if (k > 0) monotone.update(slack(prev, gx), x);
      prev = gx;
      slope.update(slack(std::abs(checked(fb.gprime, "g'", x)), fb.c1), x);
      const double Gx = checked(fb.G, "G", x);
      lower.update(slack(fb.alpha1 * x * gx, Gx), x);
      upper.update(slack(Gx, fb.alpha2 * x * gx), x);
    }
    add(report, "A4.odd", "g(-s) = -g(s)", odd, s_grid);
    add(report, "A4.nondecreasing", "g nondecreasing", monotone, s_grid);
    add(report, "A4.slope", "|g'(s)| <= c1", slope, s_grid);
    add(report, "A4.lower", "alpha1 s g(s) <= G(s)", lower, s_grid);
    add(report, "A4.upper", "G(s) <= alpha2 s g(s)", upper, s_grid);
    Worst alphas;
    alphas.update(fb.alpha1, 0.0);
    alphas.update(1.0 - fb.alpha1, 1.0);
    alphas.update(fb.alpha2 - fb.alpha1, 2.0);
    add(report, "A4.alphas", "0 < alpha1 <= 1, alpha2 >= alpha1, c1 > 0", alphas, "scalar");
    report.entries.back().passed =
        fb.alpha1 > 0.0 && fb.alpha1 <= 1.0 && fb.alpha2 >= fb.alpha1 && fb.c1 > 0.0;
    add(report, "A4.gain", "alpha2 mu2 <= alpha1 mu1",
        scalar(slack(fb.alpha2 * spec.mu2, fb.alpha1 * spec.mu1)), "scalar");
  }

  // f0(., 0) = u1
  {
    const auto xs = grid.positions(spec.length);
    Worst w;
    double scale = 1.0;
    for (double x : xs) scale = std::max(scale, std::abs(checked(spec.initial.u1, "u1", x)));
    for (double x : xs) {
      checked(spec.initial.u0, "u0", x);
      const double f = spec.initial.f0(x, 0.0);
      if (!std::isfinite(f)) throw EvaluationError("f0", x);
      w.update(-std::abs(f - spec.initial.u1(x)) / scale, x);
    }
    add(report, "compat", "f0(x, 0) = u1(x)", w,
        describe_grid("x", xs.front(), xs.back(), xs.size()));
  }
  return report;
}

XiWindow xi_window(const ProblemSpec& spec) {
  const double a1 = spec.feedback.alpha1;
  const double a2 = spec.feedback.alpha2;
  XiWindow w;
  w.lo = spec.tau * spec.mu2 * (1.0 - a1) / a1;
  w.hi = spec.tau * (spec.mu1 - a2 * spec.mu2) / a2;
  return w;
}

ThetaConstants theta_constants(const ProblemSpec& spec, double xi, Theta2Form form) {
  const double a1 = spec.feedback.alpha1;
  const double a2 = spec.feedback.alpha2;
  ThetaConstants out;
  out.form = form;
  out.theta1 = spec.mu1 - xi * a2 / spec.tau - spec.mu2 * a2;
  out.theta2 = form == Theta2Form::printed ? out.theta1
                                           : xi * a1 / spec.tau - spec.mu2 * (1.0 - a1);
  if (!(out.theta1 > 0.0)) {
    out.warnings.push_back("theta1 <= 0: monotonicity not guaranteed");
  }
  if (!(out.theta2 > 0.0)) {
    out.warnings.push_back("theta2 <= 0: monotonicity not guaranteed");
  }
  return out;
}

double legendre_conjugate(const FeedbackSpec& feedback, double sigma) {
  if (sigma == 0.0) return 0.0;
  // bracket g^{-1}(sigma) by doubling
  double lo = 0.0;
  double hi = sigma > 0.0 ? 1.0 : -1.0;
  for (int k = 0; k < 200; ++k) {
    const double gh = feedback.g(hi);
    if (!std::isfinite(gh)) throw EvaluationError("g", hi);
    if ((sigma > 0.0 && gh >= sigma) || (sigma < 0.0 && gh <= sigma)) break;
    lo = hi;
    hi *= 2.0;
    if (k == 199) throw DomainError("legendre_conjugate: g does not reach the requested value");
  }
  auto f = [&](double x) { return feedback.g(x) - sigma; };
  double a = std::min(lo, hi);
  double b = std::max(lo, hi);
  double x;
  if (f(a) == 0.0) {
    x = a;
  } else if (f(b) == 0.0) {
    x = b;
  } else {
    boost::uintmax_t iterations = 200;
    auto r = boost::math::tools::toms748_solve(f, a, b, boost::math::tools::eps_tolerance<double>(),
                                               iterations);
    x = 0.5 * (r.first + r.second);
  }
  return sigma * x - feedback.G(x);
}

LegendreCheck legendre_inequality_check(const FeedbackSpec& feedback,
                                        const std::vector<double>& s_grid,
                                        const std::vector<double>& t_grid) {
  if (s_grid.empty() || t_grid.empty()) throw UsageError("legendre check: empty grid");
  std::vector<double> s_sorted = s_grid;
  std::sort(s_sorted.begin(), s_sorted.end());
  for (std::size_t k = 1; k < s_sorted.size(); ++k) {
    if (s_sorted[k] == s_sorted[k - 1]) continue;
    if (!(feedback.g(s_sorted[k]) > feedback.g(s_sorted[k - 1]))) {
      throw DomainError("legendre check: g not strictly increasing near s = " +
                        std::to_string(s_sorted[k]));
    }
  }
  LegendreCheck out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  for (double s : s_grid) {
    const double sigma = feedback.g(s);
    const double conj = legendre_conjugate(feedback, sigma);
    for (double t : t_grid) {
      const double margin = conj + feedback.G(t) - sigma * t;
      if (margin < out.worst_margin) {
        out.worst_margin = margin;
        out.worst_s = s;
        out.worst_t = t;
      }
    }
  }
  return out;
}

}  // namespace kirchdelay
