#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "kirchdelay/catalog.hpp"
#include "kirchdelay/diagnostics.hpp"
#include "kirchdelay/errors.hpp"
#include "kirchdelay/solver.hpp"

using namespace kirchdelay;

TEST_SUITE("solver") {

TEST_CASE("zero data stay exactly at rest") {
  RunConfig c = testing::scenario({{"initial.u0", "zero"}, {"numerics.T", "1"}});
  const Trajectory tr = run(c.spec, 0.5, c.numerics);
  REQUIRE_FALSE(tr.aborted);
  REQUIRE(tr.samples.size() == 2001);
  for (const auto& s : tr.samples) {
    CHECK(s.a.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.v.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.energy.total == 0.0);
  }
}

TEST_CASE("T = 0 gives the initial sample only") {
  RunConfig c = testing::scenario({{"numerics.T", "0"}});
  const Trajectory tr = run(c.spec, 0.5, c.numerics);
  REQUIRE(tr.samples.size() == 1);
  CHECK(tr.samples[0].t == 0.0);
  CHECK(tr.samples[0].energy.total > 0.0);
}

TEST_CASE("final time is rounded up to a whole step and the last step is sampled") {
  RunConfig c = testing::scenario({{"numerics.T", "0.00123"}, {"numerics.stride", "2"}});
  const Trajectory tr = run(c.spec, 0.5, c.numerics);
  REQUIRE(tr.samples.size() == 3);
  CHECK(tr.samples[1].t == doctest::Approx(0.001));
  CHECK(tr.samples.back().t == doctest::Approx(0.0015));
}

TEST_CASE("identical inputs give bit-identical trajectories") {
  RunConfig c = testing::scenario({{"numerics.T", "0.3"}, {"numerics.n_modes", "4"}});
  const Trajectory a = run(c.spec, 0.5, c.numerics);
  const Trajectory b = run(c.spec, 0.5, c.numerics);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK((a.samples[i].a.array() == b.samples[i].a.array()).all());
    CHECK(a.samples[i].energy.total == b.samples[i].energy.total);
  }
  CHECK(a.metadata.spec_hash == b.metadata.spec_hash);
}

TEST_CASE("spec hash depends on the numerics") {
  RunConfig c = testing::scenario();
  const auto h0 = spec_hash(c.spec, c.numerics);
  c.numerics.dt = 2.5e-4;
  CHECK(spec_hash(c.spec, c.numerics) != h0);
}

TEST_CASE("step size above tau / 4 is rejected") {
  RunConfig c = testing::scenario();
  c.numerics.dt = 0.2;
  CHECK_THROWS_AS(Discretization(c.spec, c.numerics), UsageError);
}

TEST_CASE("effective mass reduces to G at rest and stays positive definite") {
  const ModeSet modes = build_modes(6, 1.0);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(6);
  CHECK((effective_mass(zero, modes, 1.0) - modes.grad_matrix()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::VectorXd v(6);
  v << 3.0, -1.0, 0.5, 2.0, 0.0, -4.0;
  const Eigen::MatrixXd M = effective_mass(v, modes, 1.0);
  CHECK((M - M.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M - modes.grad_matrix());
  CHECK(eig.eigenvalues().minCoeff() >= -1e-12);
}

TEST_CASE("energy matches an independent re-evaluation") {
  RunConfig c = testing::scenario({{"numerics.T", "1"}});
  const Discretization disc(c.spec, c.numerics);
  SolverState state = initial_state(disc);
  for (int k = 0; k <= 2000; ++k) {
    if (k % 500 == 0) {
      const double e = energy(state, disc, 0.5).total;
      const double d = energy_direct(state, disc, 0.5).total;
      CHECK(std::abs(e - d) < 1e-6 * std::abs(d));
    }
    if (k < 2000) step(state, disc);
  }
}

TEST_CASE("delay integrals of a constant history have closed forms") {
  const double c = 0.3, tau = 0.5;
  RunConfig cfg = testing::scenario({{"initial.u1", "mode"},
                                     {"initial.u1_amplitude", "0.3"},
                                     {"initial.history", "static"}});
  const Discretization disc(cfg.spec, cfg.numerics);
  const SolverState state = initial_state(disc);
  CHECK(state.delay_integral == doctest::Approx(0.5 * c * c).epsilon(1e-10));
  const double ups = 0.5 * c * c * (1.0 - std::exp(-2.0 * tau)) / (2.0 * tau);
  CHECK(lyapunov_upsilon(state, disc) == doctest::Approx(ups).epsilon(1e-10));

  SolverOptions gauss = cfg.numerics;
  gauss.delay_quadrature = DelayQuadrature::gauss;
  const Discretization disc_g(cfg.spec, gauss);
  const SolverState state_g = initial_state(disc_g);
  CHECK(lyapunov_upsilon(state_g, disc_g) == doctest::Approx(ups).epsilon(1e-10));
  CHECK(energy(state_g, disc_g, 0.5).delay == doctest::Approx(0.5 * 0.5 * c * c).epsilon(1e-10));
}

TEST_CASE("segment and Gauss delay quadratures agree along a run") {
  RunConfig c = testing::scenario({{"numerics.T", "1"}, {"numerics.n_modes", "4"}});
  SolverOptions gauss = c.numerics;
  gauss.delay_quadrature = DelayQuadrature::gauss;
  gauss.rho_order = 32;
  const Trajectory a = run(c.spec, 0.5, c.numerics);
  const Trajectory b = run(c.spec, 0.5, gauss);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    worst = std::max(worst, std::abs(a.samples[i].energy.delay - b.samples[i].energy.delay));
  }
  CHECK(worst < 1e-5 * a.samples.front().energy.total);
}

TEST_CASE("weighted delay integral is bounded by the delay energy") {
  RunConfig c = testing::scenario({{"numerics.T", "2"}, {"numerics.stride", "50"}});
  const double xi = 0.5;
  const Trajectory tr = run(c.spec, xi, c.numerics);
  for (const auto& s : tr.samples) {
    CHECK(s.upsilon >= 0.0);
    CHECK(xi * s.upsilon <= s.energy.delay * (1.0 + 1e-12) + 1e-300);
  }
}

TEST_CASE("non-finite Kirchhoff law aborts the run with partial output") {
  RunConfig c = testing::scenario({{"numerics.T", "2"}, {"numerics.n_modes", "3"}});
  c.spec.kirchhoff.evaluate = [](double l) { return l < 2.9 ? std::nan("") : 1.0 + l; };
  const Trajectory tr = run(c.spec, 0.5, c.numerics);
  CHECK(tr.aborted);
  CHECK_FALSE(tr.abort_reason.empty());
  CHECK_FALSE(tr.samples.empty());
  CHECK(tr.samples.back().t < 2.0);
}

TEST_CASE("a user memory window shorter than needed is a config error") {
  RunConfig c = testing::scenario({{"numerics.memory_window", "1"}});
  const Discretization disc(c.spec, c.numerics);
  CHECK_THROWS_AS(initial_state(disc), ConfigError);
}

TEST_CASE("laplacian memory variant runs and decays") {
  RunConfig c = testing::scenario(
      {{"numerics.memory_operator", "laplacian"}, {"numerics.T", "3"}, {"numerics.n_modes", "4"}});
  const Trajectory tr = run(c.spec, 0.5, c.numerics);
  REQUIRE_FALSE(tr.aborted);
  CHECK(tr.samples.back().energy.total < tr.samples.front().energy.total);
}

}
