#include "oracles.hpp"

#include <cmath>
#include <numbers>

namespace oracle {

namespace {

long double char_fn(long double b) { return std::cos(b) * std::cosh(b) - 1.0L; }

template <class F>
long double simpson(F f, long double a, long double b, int intervals) {
  if (intervals % 2 != 0) ++intervals;
  const long double h = (b - a) / intervals;
  long double s = f(a) + f(b);
  for (int k = 1; k < intervals; ++k) s += (k % 2 == 1 ? 4.0L : 2.0L) * f(a + k * h);
  return s * h / 3.0L;
}

template <class F>
Eigen::MatrixXd simpson_matrix(const RawModes& m, F f, int intervals) {
  const int n = static_cast<int>(m.beta.size());
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const long double v =
          simpson([&](long double x) { return f(i, x) * f(j, x); }, 0.0L, m.length, intervals);
      out(i, j) = out(j, i) = static_cast<double>(v);
    }
  }
  return out;
}

}  // namespace

long double bisect_root(long double lo, long double hi) {
  long double flo = char_fn(lo);
  for (int it = 0; it < 200; ++it) {
    const long double mid = 0.5L * (lo + hi);
    const long double fm = char_fn(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-18L * hi) break;
  }
  return 0.5L * (lo + hi);
}

std::vector<double> clamped_roots(int n, double length) {
  const long double pi = std::numbers::pi_v<long double>;
  std::vector<double> out;
  for (int i = 1; i <= n; ++i) {
    const long double b = bisect_root((i + 0.25L) * pi, (i + 0.75L) * pi);
    out.push_back(static_cast<double>(b / length));
  }
  return out;
}

long double RawModes::value(int i, long double x) const {
  const long double b = beta[i], s = sigma[i];
  return scale[i] * (std::cosh(b * x) - std::cos(b * x) - s * (std::sinh(b * x) - std::sin(b * x)));
}

long double RawModes::slope(int i, long double x) const {
  const long double b = beta[i], s = sigma[i];
  return scale[i] * b *
         (std::sinh(b * x) + std::sin(b * x) - s * (std::cosh(b * x) - std::cos(b * x)));
}

long double RawModes::curvature(int i, long double x) const {
  const long double b = beta[i], s = sigma[i];
  return scale[i] * b * b *
         (std::cosh(b * x) + std::cos(b * x) - s * (std::sinh(b * x) + std::sin(b * x)));
}

RawModes raw_modes(int n, double length, int simpson_intervals) {
  RawModes m;
  m.length = length;
  const long double pi = std::numbers::pi_v<long double>;
  for (int i = 1; i <= n; ++i) {
    const long double bl = bisect_root((i + 0.25L) * pi, (i + 0.75L) * pi);
    const long double b = bl / length;
    m.beta.push_back(b);
    m.sigma.push_back((std::cosh(bl) - std::cos(bl)) / (std::sinh(bl) - std::sin(bl)));
    m.scale.push_back(1.0L);
  }
  for (int i = 0; i < n; ++i) {
    const long double norm2 = simpson([&](long double x) { return m.value(i, x) * m.value(i, x); },
                                      0.0L, length, simpson_intervals);
    m.scale[i] = 1.0L / std::sqrt(norm2);
  }
  return m;
}

Eigen::MatrixXd simpson_mass(const RawModes& m, int intervals) {
  return simpson_matrix(m, [&](int i, long double x) { return m.value(i, x); }, intervals);
}

Eigen::MatrixXd simpson_grad(const RawModes& m, int intervals) {
  return simpson_matrix(m, [&](int i, long double x) { return m.slope(i, x); }, intervals);
}

Eigen::MatrixXd simpson_stiffness(const RawModes& m, int intervals) {
  return simpson_matrix(m, [&](int i, long double x) { return m.curvature(i, x); }, intervals);
}

LinearSolution solve_linear(const LinearProblem& p, double dt, double T, int every) {
  const Eigen::Index n = p.a0.size();
  const Eigen::Index dim = 3 * n;  // (a, v, y)
  const Eigen::MatrixXd& stiffness = p.stiffness;
  const Eigen::LLT<Eigen::MatrixXd> mass(p.grad);
  const long steps = std::lround(T / dt);
  const long lag = std::lround(p.tau / dt);

  // stored v and v' at every node k >= 0 for the Hermite delay lookup
  std::vector<Eigen::VectorXd> vs, acc;

  auto accel = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& v, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& z) {
    Eigen::VectorXd f = -stiffness * a + stiffness * y - p.m0 * p.grad * a - p.mu1 * p.mass * v -
                        p.mu2 * p.mass * z;
    return Eigen::VectorXd(mass.solve(f));
  };

  auto delayed = [&](long k, double frac) -> Eigen::VectorXd {
    // velocity at (k + frac) dt - tau; zero history before t = 0
    const long j = k - lag;
    if (j < 0) return Eigen::VectorXd::Zero(n);
    if (frac == 0.0) return vs[static_cast<std::size_t>(j)];
    const auto& v0 = vs[static_cast<std::size_t>(j)];
    const auto& v1 = vs[static_cast<std::size_t>(j + 1)];
    const auto& d0 = acc[static_cast<std::size_t>(j)];
    const auto& d1 = acc[static_cast<std::size_t>(j + 1)];
    const double s = frac, s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * v0 + (s3 - 2 * s2 + s) * dt * d0 + (-2 * s3 + 3 * s2) * v1 +
           (s3 - s2) * dt * d1;
  };

  auto field = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
    Eigen::VectorXd d(dim);
    const auto a = x.segment(0, n), v = x.segment(n, n), y = x.segment(2 * n, n);
    d.segment(0, n) = v;
    d.segment(n, n) = accel(a, v, y, z);
    d.segment(2 * n, n) = p.h0 * a - p.zeta * y;
    return d;
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  x.segment(0, n) = p.a0;

  LinearSolution out;
  auto record = [&](long k) {
    out.t.push_back(static_cast<double>(k) * dt);
    out.a.push_back(x.segment(0, n));
    out.v.push_back(x.segment(n, n));
  };

  // the derivative at node k needs the delayed velocity at node k - lag < k
  auto store = [&](long k) {
    vs.push_back(x.segment(n, n));
    const Eigen::VectorXd z = delayed(k, 0.0);
    acc.push_back(accel(x.segment(0, n), x.segment(n, n), x.segment(2 * n, n), z));
  };

  store(0);
  record(0);
  for (long k = 0; k < steps; ++k) {
    const Eigen::VectorXd z0 = delayed(k, 0.0);
    const Eigen::VectorXd zh = delayed(k, 0.5);
    const Eigen::VectorXd z1 = delayed(k + 1, 0.0);
    const Eigen::VectorXd k1 = field(x, z0);
    const Eigen::VectorXd k2 = field(x + 0.5 * dt * k1, zh);
    const Eigen::VectorXd k3 = field(x + 0.5 * dt * k2, zh);
    const Eigen::VectorXd k4 = field(x + dt * k3, z1);
    x += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    store(k + 1);
    if ((k + 1) % every == 0) record(k + 1);
  }
  return out;
}

}  // namespace oracle
