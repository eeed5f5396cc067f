#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "helpers.hpp"
#include "kirchdelay/catalog.hpp"
#include "kirchdelay/errors.hpp"
#include "kirchdelay/model.hpp"

using namespace kirchdelay;

TEST_SUITE("model") {

TEST_CASE("shipped scenario passes every assumption") {
  const RunConfig c = testing::scenario();
  const ValidationReport report = validate_assumptions(c.spec, c.grid);
  for (const auto& e : report.entries) {
    INFO(e.name);
    CHECK(e.passed);
  }
  CHECK(report.passed());
}

TEST_CASE("delayed gain above the instantaneous one fails the gain condition") {
  const RunConfig c = testing::scenario({{"problem.mu2", "2"}});
  const ValidationReport report = validate_assumptions(c.spec, c.grid);
  CHECK_FALSE(report.passed());
  const ValidationEntry* gain = report.find("A4.gain");
  REQUIRE(gain != nullptr);
  CHECK_FALSE(gain->passed);
  CHECK(xi_window(c.spec).nonempty() == false);
}

TEST_CASE("xi window for linear feedback matches the closed form") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int draw = 0; draw < 100; ++draw) {
    ProblemSpec spec;
    spec.feedback = catalog::linear_feedback(0.5 + 2.0 * U(rng));
    spec.mu1 = 0.1 + 5.0 * U(rng);
    spec.mu2 = spec.mu1 * U(rng);
    spec.tau = 0.05 + 2.0 * U(rng);
    const XiWindow w = xi_window(spec);
    const double lo = spec.tau * spec.mu2;
    const double hi = spec.tau * (2.0 * spec.mu1 - spec.mu2);
    const double eps = std::numeric_limits<double>::epsilon();
    CHECK(std::abs(w.lo - lo) <= 4 * eps * std::max(1.0, lo));
    CHECK(std::abs(w.hi - hi) <= 4 * eps * hi);
    CHECK(w.nonempty() == (spec.mu2 < spec.mu1));
  }
}

TEST_CASE("theta constants in both forms at the default midpoint") {
  const RunConfig c = testing::scenario();
  const double xi = xi_window(c.spec).midpoint();
  CHECK(xi == doctest::Approx(0.5));
  const ThetaConstants printed = theta_constants(c.spec, xi, Theta2Form::printed);
  const ThetaConstants corrected = theta_constants(c.spec, xi, Theta2Form::corrected);
  CHECK(printed.theta1 == doctest::Approx(0.3));
  CHECK(printed.theta2 == doctest::Approx(0.3));
  CHECK(corrected.theta2 == doctest::Approx(0.3));
  CHECK(printed.positive());
}

TEST_CASE("theta1 turns negative outside the window") {
  const RunConfig c = testing::scenario();
  const ThetaConstants th = theta_constants(c.spec, 1.5);
  CHECK(th.theta1 < 0.0);
  CHECK_FALSE(th.positive());
}

TEST_CASE("arctan conjugate has the closed form -log cos") {
  const FeedbackSpec g = catalog::arctan_feedback();
  for (double sigma : {-1.2, -0.5, 0.0, 0.3, 0.9, 1.4}) {
    CHECK(legendre_conjugate(g, sigma) == doctest::Approx(-std::log(std::cos(sigma))).epsilon(1e-9));
  }
}

TEST_CASE("Legendre inequality is nonnegative for arctan and linear feedback") {
  std::vector<double> s, t;
  for (int i = -40; i <= 40; ++i) {
    s.push_back(0.25 * i);
    t.push_back(0.2 * i);
  }
  CHECK(legendre_inequality_check(catalog::arctan_feedback(), s, t).worst_margin >= -1e-10);
  CHECK(legendre_inequality_check(catalog::linear_feedback(2.0), s, t).worst_margin >= -1e-10);
}

TEST_CASE("non-invertible feedback is rejected") {
  FeedbackSpec flat = catalog::linear_feedback();
  flat.g = [](double) { return 0.0; };
  CHECK_THROWS_AS(legendre_inequality_check(flat, {-1.0, 0.0, 1.0}, {0.0}), DomainError);
}

TEST_CASE("exponential kernel support and constants") {
  const KernelSpec h = catalog::exponential_kernel(0.4, 1.0);
  CHECK(h.beta1() == doctest::Approx(0.6));
  CHECK(h.effective_support(1e-12) == doctest::Approx(std::log(1e12)).epsilon(1e-9));
  CHECK(h.evaluate(2.0) == doctest::Approx(0.4 * std::exp(-2.0)));
}

TEST_CASE("kernel with too much mass fails beta1") {
  const RunConfig c = testing::scenario({{"kernel.h0", "1.5"}});
  const ValidationReport report = validate_assumptions(c.spec, c.grid);
  REQUIRE(report.find("A3.beta1") != nullptr);
  CHECK_FALSE(report.find("A3.beta1")->passed);
}

TEST_CASE("nonfinite Kirchhoff law raises an evaluation error") {
  RunConfig c = testing::scenario();
  c.spec.kirchhoff.evaluate = [](double l) { return l > 50.0 ? std::nan("") : 1.0 + l; };
  CHECK_THROWS_AS(validate_assumptions(c.spec, c.grid), EvaluationError);
}

TEST_CASE("incompatible history is flagged") {
  const RunConfig c = testing::scenario({{"initial.u1", "mode"},
                                         {"initial.u1_amplitude", "0.2"},
                                         {"initial.history", "zero"}});
  const ValidationReport report = validate_assumptions(c.spec, c.grid);
  REQUIRE(report.find("compat") != nullptr);
  CHECK_FALSE(report.find("compat")->passed);
}

TEST_CASE("linear-tanh feedback uses distinct alphas") {
  const FeedbackSpec g = catalog::linear_tanh_feedback(0.5);
  CHECK(g.alpha1 == doctest::Approx(0.5));
  CHECK(g.alpha2 == doctest::Approx(1.0));
  CHECK(g.g(-0.7) == doctest::Approx(-g.g(0.7)));
}

}
