#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "kirchdelay/catalog.hpp"
#include "kirchdelay/diagnostics.hpp"
#include "kirchdelay/errors.hpp"

using namespace kirchdelay;

namespace {

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return t;
}

double identity_residual(double dt, double t) {
  const auto n = static_cast<std::size_t>(std::lround(t / dt)) + 2;
  std::vector<Eigen::VectorXd> hist;
  for (std::size_t j = 0; j < n; ++j) {
    hist.push_back(Eigen::VectorXd::Constant(1, std::sin(static_cast<double>(j) * dt)));
  }
  const Eigen::VectorXd metric = Eigen::VectorXd::Constant(1, 1.0);
  return memory_identity_check(hist, dt, metric, catalog::exponential_kernel(1.0, 1.0), n - 2)
      .residual;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("fit of exact exponential data") {
  const auto t = grid(0.0, 5.0, 101);
  std::vector<double> E;
  for (double x : t) E.push_back(2.0 * std::exp(-3.0 * x));
  const DecayFit f = fit_decay(t, E, 0.0);
  CHECK(f.K == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.k == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fit tolerates a small oscillation") {
  const auto t = grid(0.0, 5.0, 501);
  std::vector<double> E;
  for (double x : t) E.push_back(2.0 * std::exp(-3.0 * x) * (1.0 + 0.01 * std::sin(10.0 * x)));
  CHECK(std::abs(fit_decay(t, E, 0.0).k - 3.0) <= 0.05);
}

TEST_CASE("constant energy fits a zero rate") {
  const auto t = grid(0.0, 1.0, 11);
  const std::vector<double> E(11, 4.2);
  const DecayFit f = fit_decay(t, E, 0.0);
  CHECK(std::abs(f.k) < 1e-14);
  CHECK(f.K == doctest::Approx(4.2));
}

TEST_CASE("fit window and failure modes") {
  const auto t = grid(0.0, 2.0, 21);
  std::vector<double> E(21, 1.0);
  E[3] = 0.0;
  CHECK_THROWS_AS(fit_decay(t, E, 0.0), FitError);
  CHECK_NOTHROW(fit_decay(t, E, 0.5));
  CHECK(fit_decay(t, E, 0.5).points == 16);
  CHECK_THROWS_AS(fit_decay(t, E, 1.95), FitError);
}

TEST_CASE("equivalence bounds of a proportional pair") {
  const std::vector<double> E{1.0, 0.5, 0.25}, F{2.0, 1.0, 0.5};
  const Equivalence eq = equivalence_bounds(F, E);
  CHECK(eq.k0 == 2.0);
  CHECK(eq.k1 == 2.0);
  CHECK(eq.passed());
  const std::vector<double> bad{1.0, -1.0, 1.0};
  CHECK_THROWS_AS(equivalence_bounds(F, bad), FitError);
}

TEST_CASE("time derivative is exact for quadratics, breakpoints included") {
  const auto t = grid(0.0, 2.0, 41);
  std::vector<double> v;
  for (double x : t) v.push_back(3.0 * x * x - x + 1.0);
  for (double period : {0.0, 0.5, 0.37}) {
    const auto d = time_derivative(t, v, period);
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(d[i] == doctest::Approx(6.0 * t[i] - 1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("time derivative avoids stencils across a kink") {
  // continuous, with a slope jump at t = 1
  const auto t = grid(0.0, 2.0, 21);
  std::vector<double> v;
  for (double x : t) v.push_back(x < 1.0 ? x : 1.0 + 3.0 * (x - 1.0));
  const auto d = time_derivative(t, v, 1.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double expect = t[i] < 1.0 - 1e-12 ? 1.0 : (t[i] > 1.0 + 1e-12 ? 3.0 : d[i]);
    CHECK(d[i] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("memory identity is exact for a constant history") {
  std::vector<Eigen::VectorXd> hist(200, Eigen::Vector2d(0.7, -1.3));
  const Eigen::VectorXd metric = Eigen::Vector2d(4.0, 9.0);
  for (std::size_t i : {1u, 50u, 198u}) {
    const MemoryIdentity m =
        memory_identity_check(hist, 1e-2, metric, catalog::exponential_kernel(0.4, 1.0), i);
    CHECK(m.residual == 0.0);
  }
}

TEST_CASE("memory identity residual converges at second order") {
  const double r1 = identity_residual(0.02, 1.0);
  const double r2 = identity_residual(0.01, 1.0);
  const double r3 = identity_residual(0.005, 1.0);
  CHECK(r1 / r2 >= 3.5);
  CHECK(r1 / r2 <= 4.5);
  CHECK(r2 / r3 >= 3.5);
  CHECK(r2 / r3 <= 4.5);
}

TEST_CASE("memory identity needs neighbours") {
  std::vector<Eigen::VectorXd> hist(5, Eigen::VectorXd::Zero(1));
  const Eigen::VectorXd metric = Eigen::VectorXd::Ones(1);
  const KernelSpec h = catalog::exponential_kernel(0.4, 1.0);
  CHECK_THROWS_AS(memory_identity_check(hist, 0.1, metric, h, 0), UsageError);
  CHECK_THROWS_AS(memory_identity_check(hist, 0.1, metric, h, 4), UsageError);
}

TEST_CASE("memory part of Psi for a ramp history") {
  // a1(s) = s, h = e^{-t}: H a - y1 = int_0^t e^{-(t-s)} (t - s) ds = 1 - (1 + t) e^{-t}
  RunConfig c = testing::scenario({{"numerics.n_modes", "2"},
                                   {"numerics.linear_diagnostic", "true"},
                                   {"kernel.h0", "1"}});
  const Discretization disc(c.spec, c.numerics);
  const double dt = 1e-3;
  MemoryState memory(c.spec.kernel, disc.memory_metric(), Eigen::Vector2d::Zero(), dt, 10.0);
  const int steps = 2000;
  for (int k = 1; k <= steps; ++k) memory.advance(Eigen::Vector2d(k * dt, 0.0));
  const double t = steps * dt;
  HistoryBuffer history(c.spec.tau);
  history.push(t - 1.0, Eigen::Vector2d::Zero());
  history.push(t, Eigen::Vector2d(1.0, 0.0));
  SolverState state{t, steps, Eigen::Vector2d(t, 0.0), Eigen::Vector2d(1.0, 0.0),
                    std::move(memory), std::move(history), 0.0, 0.0};
  const double G11 = disc.modes().grad_matrix()(0, 0);
  const double expected = -G11 * (1.0 - (1.0 + t) * std::exp(-t));
  CHECK(lyapunov_psi(state, disc) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("Lyapunov functional vanishes at rest and is dominated by N E") {
  RunConfig c = testing::scenario({{"numerics.T", "0.5"}, {"numerics.stride", "100"}});
  const Trajectory tr = run(c.spec, 0.5, c.numerics);
  for (const auto& s : tr.samples) {
    LyapunovWeights w{1e8, 1.0, 1.0};
    CHECK(lyapunov_F(s, w) / (w.N * s.energy.total) == doctest::Approx(1.0).epsilon(1e-6));
  }
  RunConfig rest = testing::scenario({{"initial.u0", "zero"}, {"numerics.T", "0.01"}});
  const Trajectory z = run(rest.spec, 0.5, rest.numerics);
  for (const auto& s : z.samples) CHECK(lyapunov_F(s, LyapunovWeights{}) == 0.0);
}

TEST_CASE("energy balance needs a dense trajectory") {
  RunConfig c = testing::scenario({{"numerics.T", "0.01"}, {"numerics.stride", "2"}});
  const Trajectory tr = run(c.spec, 0.5, c.numerics);
  CHECK_THROWS_AS(energy_identity_residual(tr, c.spec, 0.5), UsageError);
  CHECK_THROWS_AS(dissipation_bound_check(tr, c.spec, 0.5), UsageError);
}

TEST_CASE("energy balance holds on a short run") {
  RunConfig c = testing::scenario({{"numerics.T", "1"}});
  const Trajectory tr = run(c.spec, 0.5, c.numerics);
  const auto r = energy_identity_residual(tr, c.spec, 0.5);
  double worst = 0.0;
  for (double x : r) worst = std::max(worst, std::abs(x));
  CHECK(worst <= 1e-4 * tr.samples.front().energy.total);
}

}
