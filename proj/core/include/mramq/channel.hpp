#ifndef MRAMQ_CHANNEL_HPP
#define MRAMQ_CHANNEL_HPP

#include <cstddef>
#include <vector>

#include "mramq/numerics.hpp"

namespace mramq {

// Physical and statistical parameters of one memory cell.
//
// A written bit x can flip during the write (write_error_0 for x = 0,
// write_error_1 for x = 1) and the stored bit can flip again when disturbed
// by the read current (read_disturb). The surviving stored bit selects one
// of two Gaussian resistance populations: N(mu0, sigma0^2) for 0 (parallel,
// low resistance) and N(mu1, sigma1^2) for 1 (anti-parallel, high
// resistance). Resistances are in kilo-ohms.
struct ChannelParams {
  double write_error_0 = 0.0;  // P0
  double write_error_1 = 2e-4; // P1
  double read_disturb = 0.0;   // Pr
  double mu0 = 1.0;
  double mu1 = 2.0;
  double sigma0 = 0.12;
  double sigma1 = 0.24;

  // Throws std::domain_error unless the error rates are probabilities,
  // sigma0 and sigma1 are positive, and mu0 < mu1.
  void validate() const;

  // Nominal cell: mu0 = 1 kOhm, mu1 = 2 kOhm, common relative spread
  // sigma_i = sigma_ratio * mu_i, write_error_1 = 2e-4, no 0-write errors
  // and no read disturb.
  static ChannelParams nominal_cell(double sigma_ratio);
};

// Effective bit-flip probabilities of the write/read-disturb cascade.
// p0 = Pr(stored 1 | wrote 0), q0 = Pr(stored 0 | wrote 0),
// p1 = Pr(stored 0 | wrote 1), q1 = Pr(stored 1 | wrote 1).
// Each pair sums to 1.
struct CrossoverProbs {
  double p0, q0, p1, q1;
};

CrossoverProbs crossover_probs(const ChannelParams& params);

// Output quantizer: n = levels() output symbols separated by n - 1 strictly
// increasing thresholds (kilo-ohms). A resistance y maps to symbol j when
// boundary(j-1) <= y < boundary(j), with the outer intervals unbounded.
class Quantizer {
 public:
  // levels must be a power of two >= 2 and boundaries.size() == levels - 1,
  // strictly increasing; throws std::invalid_argument otherwise.
  explicit Quantizer(std::vector<double> boundaries);

  static Quantizer one_bit(double threshold);

  std::size_t levels() const { return boundaries_.size() + 1; }
  const std::vector<double>& boundaries() const { return boundaries_; }

  std::size_t symbol_of(double resistance) const;

 private:
  std::vector<double> boundaries_;
};

// W(j | x) for the cascade of the bit-flip stage and the quantized
// resistance read. given0[j] = W(j | x = 0), given1[j] = W(j | x = 1);
// each row sums to 1 up to rounding.
struct TransitionMatrix {
  std::vector<double> given0;
  std::vector<double> given1;

  std::size_t levels() const { return given0.size(); }
};

// Pr(symbol j | stored bit = component): mass of the Gaussian
// N(mu_c, sigma_c^2) in each quantizer cell. End cells are evaluated as
// single tails (never as differences against an infinite boundary) and
// interior cells as differences of upper tails, clamped at 0.
std::vector<double> interval_probs(const ChannelParams& params,
                                   const Quantizer& quantizer, int component);

TransitionMatrix transition_matrix(const ChannelParams& params,
                                   const Quantizer& quantizer);

// Output marginal Pr(j) under equiprobable inputs.
std::vector<double> output_distribution(const TransitionMatrix& matrix);

}  // namespace mramq

#endif  // MRAMQ_CHANNEL_HPP
