#include "mramq/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mramq/errors.hpp"
#include "mramq/quadrature.hpp"
#include "oracles.hpp"

using mramq::binary_entropy;
using mramq::inv_q_function;
using mramq::Probability;
using mramq::q_function;
using mramq::xlog2x;

TEST_CASE("Probability accepts the closed unit interval and nothing else") {
  CHECK(Probability(0.0).value() == 0.0);
  CHECK(Probability(1.0).value() == 1.0);
  CHECK(Probability(0.5).value() == 0.5);
  double as_double = Probability(0.25);
  CHECK(as_double == 0.25);

  CHECK_THROWS_AS(Probability(-0.1), std::domain_error);
  CHECK_THROWS_AS(Probability(1.0 + 1e-12), std::domain_error);
  CHECK_THROWS_AS(Probability(std::numeric_limits<double>::quiet_NaN()),
                  std::domain_error);
  CHECK_THROWS_AS(Probability(std::numeric_limits<double>::infinity()),
                  std::domain_error);
}

TEST_CASE("q_function matches the extended-precision tail") {
  CHECK(q_function(0.0).value() == 0.5);
  for (double t = -10.0; t <= 10.0; t += 0.125) {
    double expected = static_cast<double>(oracles::q_tail(t));
    CHECK(q_function(t).value() ==
          doctest::Approx(expected).epsilon(1e-14));
  }
  // Values the rest of the suite leans on.
  CHECK(q_function(0.5 / 0.12).value() ==
        doctest::Approx(1.5454296882296015e-05).epsilon(1e-14));
  CHECK(q_function(2.5).value() ==
        doctest::Approx(0.0062096653257761352).epsilon(1e-14));
  CHECK(q_function(0.4 / 0.12).value() ==
        doctest::Approx(0.00042906033319683748).epsilon(1e-14));
}

TEST_CASE("q_function tails underflow gracefully and stay monotone") {
  CHECK(q_function(40.0).value() >= 0.0);
  CHECK(q_function(40.0).value() < 1e-300);
  CHECK(q_function(-40.0).value() == doctest::Approx(1.0));
  double prev = 1.0;
  for (double t = -12.0; t <= 12.0; t += 0.25) {
    double q = q_function(t);
    CHECK(q <= prev);
    prev = q;
  }
  CHECK_THROWS_AS(q_function(std::numeric_limits<double>::quiet_NaN()),
                  std::domain_error);
  CHECK_THROWS_AS(q_function(std::numeric_limits<double>::infinity()),
                  std::domain_error);
}

TEST_CASE("inv_q_function inverts q_function over twelve decades") {
  CHECK(inv_q_function(0.5) == 0.0);
  CHECK(inv_q_function(1e-3) ==
        doctest::Approx(3.0902323061678135).epsilon(1e-14));
  CHECK(inv_q_function(1e-4) ==
        doctest::Approx(3.7190164854556806).epsilon(1e-14));

  std::vector<double> ps;
  for (double p = 1e-12; p < 0.5; p *= 10.0) ps.push_back(p);
  for (double p = 0.05; p < 1.0; p += 0.05) ps.push_back(p);
  ps.push_back(1.0 - 1e-12);
  for (double p : ps) {
    double t = inv_q_function(p);
    CHECK(q_function(t).value() == doctest::Approx(p).epsilon(1e-12));
  }

  CHECK_THROWS_AS(inv_q_function(0.0), std::domain_error);
  CHECK_THROWS_AS(inv_q_function(1.0), std::domain_error);
  CHECK_THROWS_AS(inv_q_function(-0.5), std::domain_error);
}

TEST_CASE("inv_q_function is strictly decreasing in p") {
  double prev = std::numeric_limits<double>::infinity();
  for (double p = 1e-9; p < 1.0; p += 0.01) {
    double t = inv_q_function(p);
    CHECK(t < prev);
    prev = t;
  }
}

TEST_CASE("xlog2x handles the endpoint limits exactly") {
  CHECK(xlog2x(0.0) == 0.0);
  CHECK(xlog2x(1.0) == 0.0);
  CHECK(xlog2x(0.5) == -0.5);
  CHECK(xlog2x(0.25) == -0.5);
  CHECK(xlog2x(1e-300) == doctest::Approx(0.0).epsilon(1e-290));
  CHECK_THROWS_AS(xlog2x(-0.01), std::domain_error);
}

TEST_CASE("binary_entropy endpoints, maximum, and symmetry") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == 1.0);
  CHECK(binary_entropy(0.11) ==
        doctest::Approx(0.499915958164528).epsilon(1e-14));
  // Dyadic arguments make p and 1 - p exact, so symmetry is bit-exact.
  for (double p : {0.25, 0.125, 0.0625, 0.03125}) {
    CHECK(binary_entropy(p) == binary_entropy(1.0 - p));
  }
  // Integer stepping keeps p strictly inside (0, 0.5).
  for (int i = 1; i <= 9; ++i) {
    double p = 0.05 * i;
    CHECK(binary_entropy(p) < binary_entropy(0.5));
    CHECK(binary_entropy(p) < binary_entropy(p + 0.04));
  }
}

TEST_CASE("adaptive quadrature reproduces closed-form integrals") {
  double cubic = mramq::integrate([](double x) { return x * x; }, 0.0, 3.0);
  CHECK(cubic == doctest::Approx(9.0).epsilon(1e-12));

  double gauss = mramq::integrate(
      [](double x) {
        return std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979324);
      },
      -8.0, 8.0);
  CHECK(gauss == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("breakpoint quadrature survives kinks that defeat one panel") {
  auto vee = [](double x) { return std::fabs(x); };
  double with_knot = mramq::integrate(vee, -1.0, 2.0, std::vector<double>{0.0}, 1e-12);
  CHECK(with_knot == doctest::Approx(2.5).epsilon(1e-12));
  // Knots outside the range or duplicated are ignored.
  double messy = mramq::integrate(vee, -1.0, 2.0, std::vector<double>{0.0, 0.0, -5.0, 7.0}, 1e-12);
  CHECK(messy == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("quadrature reports failure instead of returning garbage") {
  auto runge = [](double x) { return 1.0 / (1.0 + 25.0 * x * x); };
  CHECK_THROWS_AS(mramq::integrate(runge, -1.0, 1.0, 1e-14, 2),
                  mramq::quadrature_error);
}
