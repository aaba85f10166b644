#ifndef MRAMQ_BOUNDS_HPP
#define MRAMQ_BOUNDS_HPP

#include <cstdint>

#include "mramq/channel.hpp"
#include "mramq/numerics.hpp"

namespace mramq {

// Finite-blocklength query: blocklength N in channel uses, code rate R in
// bits/use, target block error probability epsilon.
struct FiniteBlocklengthQuery {
  std::uint64_t blocklength = 128;
  double rate = 110.0 / 128.0;
  double epsilon = 1e-4;

  // Throws std::domain_error unless N >= 1, 0 < R < 1, 0 < epsilon < 1.
  void validate() const;
};

// All figures of merit for one channel + quantizer.
struct BoundsReport {
  double capacity;      // Cq, bits/use
  double cutoff_rate;   // R0, bits/use
  double dispersion;    // Vq, bits^2/use
  double ppv_max_rate;  // max rate at (N, epsilon)
  double ppv_blep;      // block error probability at (N, R)
};

// Pieces of the closed-form capacity derivative (1-bit quantizer).
// psi is the equiprobable-input probability of output symbol 1 and
// psi_prime its derivative in the threshold a1. w_prime[i][j] is
// d W(j | x = i) / d a1; the j = 1 column is the exact negation of j = 0.
struct CapacityDerivativeTerms {
  double psi;
  double psi_prime;
  double h_prime_y;
  double h_prime_y_given_x;
  double w_prime[2][2];
};

// Pieces of the closed-form cutoff-rate derivative (1-bit quantizer).
// alpha = W'(y0 | x = 0), beta = W'(y0 | x = 1),
// omega = -W(y1 | x = 0), phi = -W(y1 | x = 1).
struct CutoffDerivativeTerms {
  double alpha;
  double beta;
  double omega;
  double phi;
};

// Mutual information of the quantized channel under equiprobable input,
// H(Y) - H(Y|X), in bits/use, clamped to [0, 1].
double capacity(const TransitionMatrix& matrix);

// d capacity / d a1 for the 1-bit quantizer with threshold a1, in closed
// form. Optionally fills the intermediate terms.
double capacity_derivative(const ChannelParams& params, double a1,
                           CapacityDerivativeTerms* terms = nullptr);

// R0 = 1 - log2(1 + sum_j sqrt(W(j|0) W(j|1))) under equiprobable input,
// clamped to [0, 1].
double cutoff_rate(const TransitionMatrix& matrix);

// d cutoff_rate / d a1 for the 1-bit quantizer, in closed form.
double cutoff_rate_derivative(const ChannelParams& params, double a1,
                              CutoffDerivativeTerms* terms = nullptr);

// Variance of the information density under equiprobable input, clamped to
// [0, inf). Zero-probability outputs contribute nothing.
double dispersion(const TransitionMatrix& matrix);

// Normal-approximation maximal rate R = Cq - sqrt(Vq/N) Qinv(epsilon).
double ppv_max_rate(double capacity, double dispersion,
                    std::uint64_t blocklength, Probability epsilon);
double ppv_max_rate(const TransitionMatrix& matrix, std::uint64_t blocklength,
                    Probability epsilon);

// Normal-approximation block error probability P_B = Q(sqrt(N/Vq) (Cq - R)).
// The Vq = 0 limit is defined as 0 for R < Cq, 1 for R > Cq, 0.5 at R = Cq.
Probability ppv_blep(double capacity, double dispersion,
                     std::uint64_t blocklength, double rate);
Probability ppv_blep(const TransitionMatrix& matrix, std::uint64_t blocklength,
                     double rate);

// Mutual information of the continuous-output cascade under equiprobable
// input, by adaptive quadrature over [mu0 - 10 sigma0, mu1 + 10 sigma1].
// Upper-bounds the capacity of every quantized version of the channel.
// Accepts the degenerate mu0 == mu1 case (zero-information channel).
double unquantized_mutual_information(const ChannelParams& params);

BoundsReport bounds_report(const TransitionMatrix& matrix,
                           const FiniteBlocklengthQuery& query);

}  // namespace mramq

#endif  // MRAMQ_BOUNDS_HPP
