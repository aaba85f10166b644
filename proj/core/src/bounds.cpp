#include "mramq/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mramq/quadrature.hpp"

namespace mramq {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kLn2 = 0.69314718055994530942;

double clamp(double v, double lo, double hi) {
  return std::min(hi, std::max(lo, v));
}

double gauss_pdf(double y, double mu, double sigma) {
  double t = (y - mu) / sigma;
  return kInvSqrt2Pi / sigma * std::exp(-0.5 * t * t);
}

// Shared 1-bit geometry: tails and density values of both components at the
// threshold, plus the BAC crossovers.
struct OneBitTerms {
  CrossoverProbs c;
  double q_hi0, q_hi1;  // Pr(y > a1 | stored i) = Q(t_i)
  double q_lo0, q_lo1;  // Pr(y < a1 | stored i) = Q(-t_i)
  double d0, d1;        // component densities at a1: phi(t_i) / sigma_i
  double w0_hi, w0_lo;  // W(y1 | x=0), W(y0 | x=0)
  double w1_hi, w1_lo;  // W(y1 | x=1), W(y0 | x=1)
  double wp0, wp1;      // W'(y0 | x=0), W'(y0 | x=1)
};

OneBitTerms one_bit_terms(const ChannelParams& params, double a1) {
  params.validate();
  if (!std::isfinite(a1)) {
    throw std::domain_error("threshold a1 must be finite");
  }
  OneBitTerms t;
  t.c = crossover_probs(params);
  double t0 = (a1 - params.mu0) / params.sigma0;
  double t1 = (a1 - params.mu1) / params.sigma1;
  t.q_hi0 = q_function(t0);
  t.q_hi1 = q_function(t1);
  t.q_lo0 = q_function(-t0);
  t.q_lo1 = q_function(-t1);
  t.d0 = kInvSqrt2Pi * std::exp(-0.5 * t0 * t0) / params.sigma0;
  t.d1 = kInvSqrt2Pi * std::exp(-0.5 * t1 * t1) / params.sigma1;
  t.w0_hi = t.c.q0 * t.q_hi0 + t.c.p0 * t.q_hi1;
  t.w0_lo = t.c.q0 * t.q_lo0 + t.c.p0 * t.q_lo1;
  t.w1_hi = t.c.p1 * t.q_hi0 + t.c.q1 * t.q_hi1;
  t.w1_lo = t.c.p1 * t.q_lo0 + t.c.q1 * t.q_lo1;
  t.wp0 = t.c.q0 * t.d0 + t.c.p0 * t.d1;
  t.wp1 = t.c.p1 * t.d0 + t.c.q1 * t.d1;
  return t;
}

// Contribution of one entry to d H(Y|X) / d a1; zero when the entry has no
// mass (both the entry and its derivative underflow together there).
double entropy_rate_term(double w, double w_prime) {
  if (w <= 0.0 || w_prime == 0.0) return 0.0;
  return w_prime * (std::log2(w) + 1.0 / kLn2);
}

}  // namespace

void FiniteBlocklengthQuery::validate() const {
  if (blocklength < 1) {
    throw std::domain_error("blocklength must be >= 1");
  }
  if (!(rate > 0.0 && rate < 1.0)) {
    throw std::domain_error("rate must be in (0, 1), got " +
                            std::to_string(rate));
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::domain_error("epsilon must be in (0, 1), got " +
                            std::to_string(epsilon));
  }
}

double capacity(const TransitionMatrix& matrix) {
  std::vector<double> p = output_distribution(matrix);
  double h_y = 0.0;
  for (double pj : p) h_y -= xlog2x(pj);
  double h_y_given_x = 0.0;
  for (std::size_t j = 0; j < matrix.levels(); ++j) {
    h_y_given_x -= 0.5 * (xlog2x(matrix.given0[j]) + xlog2x(matrix.given1[j]));
  }
  return clamp(h_y - h_y_given_x, 0.0, 1.0);
}

double capacity_derivative(const ChannelParams& params, double a1,
                           CapacityDerivativeTerms* terms) {
  OneBitTerms t = one_bit_terms(params, a1);

  // Output-1 probability and its threshold derivative under equiprobable
  // input; the complementary mass is computed from the lower tails rather
  // than as 1 - psi to keep precision when psi is near 0 or 1.
  double mix_hi = 0.5 * (t.c.q0 + t.c.p1);
  double mix_lo = 0.5 * (t.c.p0 + t.c.q1);
  double psi = mix_hi * t.q_hi0 + mix_lo * t.q_hi1;
  double psi_comp = mix_hi * t.q_lo0 + mix_lo * t.q_lo1;
  double psi_prime = -(mix_hi * t.d0 + mix_lo * t.d1);

  double h_prime_y = 0.0;
  if (psi > 0.0 && psi_comp > 0.0) {
    h_prime_y = psi_prime * (std::log2(psi_comp) - std::log2(psi));
  }

  double h_prime_y_given_x =
      -0.5 * (entropy_rate_term(t.w0_lo, t.wp0) +
              entropy_rate_term(t.w0_hi, -t.wp0) +
              entropy_rate_term(t.w1_lo, t.wp1) +
              entropy_rate_term(t.w1_hi, -t.wp1));

  if (terms != nullptr) {
    terms->psi = psi;
    terms->psi_prime = psi_prime;
    terms->h_prime_y = h_prime_y;
    terms->h_prime_y_given_x = h_prime_y_given_x;
    terms->w_prime[0][0] = t.wp0;
    terms->w_prime[0][1] = -t.wp0;
    terms->w_prime[1][0] = t.wp1;
    terms->w_prime[1][1] = -t.wp1;
  }
  return h_prime_y - h_prime_y_given_x;
}

double cutoff_rate(const TransitionMatrix& matrix) {
  double bhatta = 0.0;
  for (std::size_t j = 0; j < matrix.levels(); ++j) {
    bhatta += std::sqrt(matrix.given0[j] * matrix.given1[j]);
  }
  return clamp(1.0 - std::log2(1.0 + bhatta), 0.0, 1.0);
}

double cutoff_rate_derivative(const ChannelParams& params, double a1,
                              CutoffDerivativeTerms* terms) {
  OneBitTerms t = one_bit_terms(params, a1);
  double s_lo = std::sqrt(t.w0_lo * t.w1_lo);
  double s_hi = std::sqrt(t.w0_hi * t.w1_hi);

  // d sqrt(uv) = (u'v + uv') / (2 sqrt(uv)); the y1 cell derivative carries
  // the opposite sign of (alpha, beta). A 0/0 cell (threshold outside all
  // support) contributes nothing.
  double num_lo = t.wp0 * t.w1_lo + t.wp1 * t.w0_lo;
  double num_hi = t.wp0 * t.w1_hi + t.wp1 * t.w0_hi;
  double bhatta_prime = 0.0;
  if (num_lo != 0.0) bhatta_prime += num_lo / (2.0 * s_lo);
  if (num_hi != 0.0) bhatta_prime -= num_hi / (2.0 * s_hi);

  if (terms != nullptr) {
    terms->alpha = t.wp0;
    terms->beta = t.wp1;
    terms->omega = -t.w0_hi;
    terms->phi = -t.w1_hi;
  }
  return -bhatta_prime / (kLn2 * (1.0 + s_lo + s_hi));
}

double dispersion(const TransitionMatrix& matrix) {
  std::vector<double> p = output_distribution(matrix);
  double cq = capacity(matrix);
  double second_moment = 0.0;
  for (std::size_t j = 0; j < matrix.levels(); ++j) {
    // Information density via a log-domain difference; entries near
    // underflow would lose everything in a direct W/p quotient path.
    double lp = p[j] > 0.0 ? std::log2(p[j]) : 0.0;
    if (matrix.given0[j] > 0.0) {
      double info = std::log2(matrix.given0[j]) - lp;
      second_moment += 0.5 * matrix.given0[j] * info * info;
    }
    if (matrix.given1[j] > 0.0) {
      double info = std::log2(matrix.given1[j]) - lp;
      second_moment += 0.5 * matrix.given1[j] * info * info;
    }
  }
  return std::max(0.0, second_moment - cq * cq);
}

double ppv_max_rate(double capacity, double dispersion,
                    std::uint64_t blocklength, Probability epsilon) {
  if (blocklength < 1) {
    throw std::domain_error("blocklength must be >= 1");
  }
  if (dispersion < 0.0) {
    throw std::domain_error("dispersion must be nonnegative");
  }
  return capacity - std::sqrt(dispersion / static_cast<double>(blocklength)) *
                        inv_q_function(epsilon);
}

double ppv_max_rate(const TransitionMatrix& matrix, std::uint64_t blocklength,
                    Probability epsilon) {
  return ppv_max_rate(capacity(matrix), dispersion(matrix), blocklength,
                      epsilon);
}

Probability ppv_blep(double capacity, double dispersion,
                     std::uint64_t blocklength, double rate) {
  if (blocklength < 1) {
    throw std::domain_error("blocklength must be >= 1");
  }
  if (dispersion < 0.0) {
    throw std::domain_error("dispersion must be nonnegative");
  }
  if (dispersion == 0.0) {
    if (rate < capacity) return Probability(0.0);
    if (rate > capacity) return Probability(1.0);
    return Probability(0.5);
  }
  double arg = std::sqrt(static_cast<double>(blocklength) / dispersion) *
               (capacity - rate);
  return q_function(arg);
}

Probability ppv_blep(const TransitionMatrix& matrix, std::uint64_t blocklength,
                     double rate) {
  return ppv_blep(capacity(matrix), dispersion(matrix), blocklength, rate);
}

double unquantized_mutual_information(const ChannelParams& params) {
  // Same validation as ChannelParams::validate except that mu0 == mu1 is
  // allowed: identical components carry zero information but are a
  // legitimate reference query.
  if (!(params.write_error_0 >= 0.0 && params.write_error_0 <= 1.0 &&
        params.write_error_1 >= 0.0 && params.write_error_1 <= 1.0 &&
        params.read_disturb >= 0.0 && params.read_disturb <= 1.0)) {
    throw std::domain_error("error rates outside [0, 1]");
  }
  if (!(params.sigma0 > 0.0 && params.sigma1 > 0.0 &&
        std::isfinite(params.mu0) && std::isfinite(params.mu1) &&
        params.mu0 <= params.mu1)) {
    throw std::domain_error("need mu0 <= mu1 and positive sigmas");
  }

  double P0 = params.write_error_0;
  double P1 = params.write_error_1;
  double Pr = params.read_disturb;
  CrossoverProbs c;
  c.p0 = (P0 / 2.0) * (1.0 - Pr);
  c.q0 = (1.0 - P0 / 2.0) + (P0 / 2.0) * Pr;
  c.p1 = P1 / 2.0 + (1.0 - P1 / 2.0) * Pr;
  c.q1 = (1.0 - P1 / 2.0) * (1.0 - Pr);

  auto integrand = [&](double y) {
    double g0 = gauss_pdf(y, params.mu0, params.sigma0);
    double g1 = gauss_pdf(y, params.mu1, params.sigma1);
    double f0 = c.q0 * g0 + c.p0 * g1;
    double f1 = c.p1 * g0 + c.q1 * g1;
    double f = 0.5 * (f0 + f1);
    double s = 0.0;
    if (f0 > 0.0) s += 0.5 * f0 * (std::log2(f0) - std::log2(f));
    if (f1 > 0.0) s += 0.5 * f1 * (std::log2(f1) - std::log2(f));
    return s;
  };

  double lo = params.mu0 - 10.0 * params.sigma0;
  double hi = params.mu1 + 10.0 * params.sigma1;
  std::vector<double> breakpoints = {
      params.mu0 - 3.0 * params.sigma0,  params.mu0,
      params.mu0 + 3.0 * params.sigma0,  params.mu0 + 10.0 * params.sigma0,
      0.5 * (params.mu0 + params.mu1),   params.mu1 - 10.0 * params.sigma1,
      params.mu1 - 3.0 * params.sigma1,  params.mu1,
      params.mu1 + 3.0 * params.sigma1};
  double mi = integrate(integrand, lo, hi, breakpoints, 1e-10);
  return clamp(mi, 0.0, 1.0);
}

BoundsReport bounds_report(const TransitionMatrix& matrix,
                           const FiniteBlocklengthQuery& query) {
  query.validate();
  BoundsReport report;
  report.capacity = capacity(matrix);
  report.cutoff_rate = cutoff_rate(matrix);
  report.dispersion = dispersion(matrix);
  report.ppv_max_rate = ppv_max_rate(report.capacity, report.dispersion,
                                     query.blocklength, query.epsilon);
  report.ppv_blep = ppv_blep(report.capacity, report.dispersion,
                             query.blocklength, query.rate);
  return report;
}

}  // namespace mramq
