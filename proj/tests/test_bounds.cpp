#include "mramq/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mramq/channel.hpp"
#include "oracles.hpp"

using mramq::capacity;
using mramq::capacity_derivative;
using mramq::CapacityDerivativeTerms;
using mramq::ChannelParams;
using mramq::cutoff_rate;
using mramq::cutoff_rate_derivative;
using mramq::CutoffDerivativeTerms;
using mramq::dispersion;
using mramq::FiniteBlocklengthQuery;
using mramq::ppv_blep;
using mramq::ppv_max_rate;
using mramq::Quantizer;
using mramq::transition_matrix;
using mramq::TransitionMatrix;

namespace {

TransitionMatrix bsc(double eps) {
  return TransitionMatrix{{1.0 - eps, eps}, {eps, 1.0 - eps}};
}

TransitionMatrix nominal_matrix(double a1) {
  return transition_matrix(ChannelParams::nominal_cell(0.12),
                           Quantizer::one_bit(a1));
}

}  // namespace

TEST_CASE("capacity hits the exact landmarks") {
  CHECK(capacity(TransitionMatrix{{1.0, 0.0}, {0.0, 1.0}}) == 1.0);
  CHECK(capacity(TransitionMatrix{{0.3, 0.7}, {0.3, 0.7}}) == 0.0);
  CHECK(capacity(bsc(0.11)) == 1.0 - mramq::binary_entropy(0.11));
  CHECK(capacity(bsc(0.5)) == 0.0);
}

TEST_CASE("capacity agrees with a direct mutual-information oracle") {
  for (double a1 : {1.2, 1.4, 1.5, 1.7}) {
    TransitionMatrix m = nominal_matrix(a1);
    double expected = oracles::mutual_information(m.given0, m.given1);
    CHECK(capacity(m) == doctest::Approx(expected).epsilon(1e-13));
  }
  TransitionMatrix m4 = transition_matrix(ChannelParams::nominal_cell(0.12),
                                          Quantizer({1.25, 1.5, 1.75}));
  double expected4 = oracles::mutual_information(m4.given0, m4.given1);
  CHECK(capacity(m4) == doctest::Approx(expected4).epsilon(1e-13));
}

TEST_CASE("capacity reproduces the frozen reference point") {
  CHECK(capacity(nominal_matrix(1.4)) ==
        doctest::Approx(0.96967491358359663).epsilon(1e-13));
}

TEST_CASE("cutoff rate hits the exact landmarks and the frozen point") {
  CHECK(cutoff_rate(TransitionMatrix{{1.0, 0.0}, {0.0, 1.0}}) == 1.0);
  CHECK(cutoff_rate(TransitionMatrix{{0.3, 0.7}, {0.3, 0.7}}) == 0.0);

  // Direct Bhattacharyya form for the BSC.
  double root = 2.0 * std::sqrt(0.11 * 0.89);
  CHECK(cutoff_rate(bsc(0.11)) ==
        doctest::Approx(1.0 - std::log2(1.0 + root)).epsilon(1e-14));
  CHECK(cutoff_rate(nominal_matrix(1.4)) ==
        doctest::Approx(0.8624171200886813).epsilon(1e-13));
}

TEST_CASE("cutoff rate never exceeds capacity") {
  for (double a1 = 1.05; a1 < 2.0; a1 += 0.1) {
    TransitionMatrix m = nominal_matrix(a1);
    CHECK(cutoff_rate(m) <= capacity(m) + 1e-12);
  }
}

TEST_CASE("dispersion hits the exact landmarks and the frozen points") {
  CHECK(dispersion(TransitionMatrix{{1.0, 0.0}, {0.0, 1.0}}) == 0.0);
  CHECK(dispersion(bsc(0.11)) ==
        doctest::Approx(0.89070170139755601).epsilon(1e-13));
  CHECK(dispersion(nominal_matrix(1.4)) ==
        doctest::Approx(0.19480631243731252).epsilon(1e-13));

  oracles::ChannelSampler sampler(77);
  for (int trial = 0; trial < 20; ++trial) {
    ChannelParams p = sampler.params();
    double a1 = 0.5 * (p.mu0 + p.mu1);
    TransitionMatrix m = transition_matrix(p, Quantizer::one_bit(a1));
    CHECK(dispersion(m) >= 0.0);
  }
}

TEST_CASE("capacity derivative matches central differences") {
  std::vector<ChannelParams> cases;
  cases.push_back(ChannelParams::nominal_cell(0.12));
  ChannelParams asym = ChannelParams::nominal_cell(0.1);
  asym.write_error_0 = 0.05;
  asym.read_disturb = 0.02;
  cases.push_back(asym);

  for (const ChannelParams& p : cases) {
    auto f = [&](double a) {
      return capacity(transition_matrix(p, Quantizer::one_bit(a)));
    };
    for (double a1 = 1.05; a1 < 2.0; a1 += 0.05) {
      double closed = capacity_derivative(p, a1);
      double fd = oracles::central_fd(f, a1, 1e-6);
      CHECK(closed == doctest::Approx(fd).epsilon(2e-7));
    }
  }
}

TEST_CASE("capacity derivative terms satisfy their own identities") {
  ChannelParams p = ChannelParams::nominal_cell(0.12);
  CapacityDerivativeTerms terms;
  double d = capacity_derivative(p, 1.4, &terms);
  CHECK(d == terms.h_prime_y - terms.h_prime_y_given_x);
  CHECK(terms.psi >= 0.0);
  CHECK(terms.psi <= 1.0);
  // Moving the threshold only moves mass between the two cells.
  CHECK(terms.w_prime[0][1] == -terms.w_prime[0][0]);
  CHECK(terms.w_prime[1][1] == -terms.w_prime[1][0]);
  CHECK(terms.w_prime[0][0] > 0.0);
  CHECK(terms.w_prime[1][0] > 0.0);
}

TEST_CASE("cutoff derivative matches central differences") {
  ChannelParams p = ChannelParams::nominal_cell(0.12);
  auto f = [&](double a) {
    return cutoff_rate(transition_matrix(p, Quantizer::one_bit(a)));
  };
  for (double a1 = 1.05; a1 < 2.0; a1 += 0.05) {
    double closed = cutoff_rate_derivative(p, a1);
    double fd = oracles::central_fd(f, a1, 1e-6);
    CHECK(closed == doctest::Approx(fd).epsilon(2e-7));
  }

  CutoffDerivativeTerms terms;
  cutoff_rate_derivative(p, 1.4, &terms);
  CHECK(terms.alpha > 0.0);
  CHECK(terms.beta > 0.0);
  CHECK(terms.omega < 0.0);
  CHECK(terms.phi < 0.0);
}

TEST_CASE("symmetric channels put the stationary point at the midpoint") {
  ChannelParams p;
  p.write_error_0 = 2e-4;
  p.write_error_1 = 2e-4;
  p.read_disturb = 0.0;
  p.mu0 = 1.0;
  p.mu1 = 2.0;
  p.sigma0 = 0.15;
  p.sigma1 = 0.15;

  CHECK(std::fabs(capacity_derivative(p, 1.5)) < 1e-10);
  CHECK(std::fabs(cutoff_rate_derivative(p, 1.5)) < 1e-10);
  CHECK(capacity_derivative(p, 1.4) > 0.0);
  CHECK(capacity_derivative(p, 1.6) < 0.0);
  CHECK(cutoff_rate_derivative(p, 1.4) > 0.0);
  CHECK(cutoff_rate_derivative(p, 1.6) < 0.0);
  // Mirror antisymmetry of the derivative about the midpoint.
  for (double d : {0.1, 0.2, 0.3}) {
    CHECK(capacity_derivative(p, 1.5 - d) ==
          doctest::Approx(-capacity_derivative(p, 1.5 + d)).epsilon(1e-10));
  }
}

TEST_CASE("ppv_max_rate is exact at epsilon one half and at the frozen point") {
  TransitionMatrix m = nominal_matrix(1.4);
  double cq = capacity(m);
  CHECK(ppv_max_rate(m, 128, 0.5) == cq);
  CHECK(ppv_max_rate(m, 1, 0.5) == cq);

  CHECK(ppv_max_rate(0.95, 0.1, 128, 1e-4) ==
        doctest::Approx(0.84605032911348425).epsilon(1e-14));

  // Rate approaches capacity from below as N grows.
  double prev = 0.0;
  for (std::uint64_t n : {64u, 128u, 256u, 512u, 1024u}) {
    double r = ppv_max_rate(m, n, 1e-4);
    CHECK(r > prev);
    CHECK(r < cq);
    prev = r;
  }
}

TEST_CASE("ppv_blep branches and inverts ppv_max_rate") {
  CHECK(ppv_blep(0.9, 0.0, 128, 0.5).value() == 0.0);
  CHECK(ppv_blep(0.9, 0.0, 128, 0.95).value() == 1.0);
  CHECK(ppv_blep(0.9, 0.0, 128, 0.9).value() == 0.5);

  TransitionMatrix m = nominal_matrix(1.4);
  for (double eps : {1e-4, 1e-3, 0.05}) {
    double r = ppv_max_rate(m, 128, eps);
    CHECK(ppv_blep(m, 128, r).value() == doctest::Approx(eps).epsilon(1e-9));
  }

  // Monotonicity in both arguments.
  CHECK(ppv_blep(m, 128, 0.9).value() > ppv_blep(m, 128, 0.85).value());
  CHECK(ppv_blep(m, 256, 0.859375).value() < ppv_blep(m, 128, 0.859375).value());
}

TEST_CASE("FiniteBlocklengthQuery validates its ranges") {
  FiniteBlocklengthQuery q;
  CHECK_NOTHROW(q.validate());
  q.blocklength = 0;
  CHECK_THROWS_AS(q.validate(), std::domain_error);
  q = FiniteBlocklengthQuery{};
  q.rate = 0.0;
  CHECK_THROWS_AS(q.validate(), std::domain_error);
  q = FiniteBlocklengthQuery{};
  q.rate = 1.0;
  CHECK_THROWS_AS(q.validate(), std::domain_error);
  q = FiniteBlocklengthQuery{};
  q.epsilon = 0.0;
  CHECK_THROWS_AS(q.validate(), std::domain_error);
}

TEST_CASE("unquantized mutual information: frozen value and degenerate cell") {
  ChannelParams p = ChannelParams::nominal_cell(0.12);
  CHECK(mramq::unquantized_mutual_information(p) ==
        doctest::Approx(0.987672398041).epsilon(1e-9));

  ChannelParams flat;
  flat.write_error_0 = 0.0;
  flat.write_error_1 = 0.0;
  flat.read_disturb = 0.0;
  flat.mu0 = 1.5;
  flat.mu1 = 1.5;
  flat.sigma0 = 0.2;
  flat.sigma1 = 0.2;
  CHECK(mramq::unquantized_mutual_information(flat) ==
        doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("quantization cannot beat the continuous channel") {
  ChannelParams p = ChannelParams::nominal_cell(0.12);
  double unquantized = mramq::unquantized_mutual_information(p);
  CHECK(capacity(nominal_matrix(1.4)) <= unquantized + 1e-9);
  TransitionMatrix m8 = transition_matrix(
      p, Quantizer({1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8}));
  CHECK(capacity(m8) <= unquantized + 1e-9);
}

TEST_CASE("bounds_report aggregates the individual figures") {
  TransitionMatrix m = nominal_matrix(1.4);
  FiniteBlocklengthQuery q;
  mramq::BoundsReport report = mramq::bounds_report(m, q);
  CHECK(report.capacity == capacity(m));
  CHECK(report.cutoff_rate == cutoff_rate(m));
  CHECK(report.dispersion == dispersion(m));
  CHECK(report.ppv_max_rate ==
        ppv_max_rate(m, q.blocklength, q.epsilon));
  CHECK(report.ppv_blep == ppv_blep(m, q.blocklength, q.rate).value());
}

TEST_CASE("doubling the resistance scale leaves every figure unchanged") {
  ChannelParams p = ChannelParams::nominal_cell(0.12);
  ChannelParams scaled = p;
  scaled.mu0 *= 2.0;
  scaled.mu1 *= 2.0;
  scaled.sigma0 *= 2.0;
  scaled.sigma1 *= 2.0;

  TransitionMatrix m = nominal_matrix(1.4);
  TransitionMatrix ms = transition_matrix(scaled, Quantizer::one_bit(2.8));
  CHECK(capacity(ms) == capacity(m));
  CHECK(cutoff_rate(ms) == cutoff_rate(m));
  CHECK(dispersion(ms) == dispersion(m));
}
