#ifndef MRAMQ_NUMERICS_HPP
#define MRAMQ_NUMERICS_HPP

#include <stdexcept>
#include <string>

namespace mramq {

// Validating wrapper for a probability value. Construction from a double
// outside [0, 1] (or NaN) throws std::domain_error; converts back implicitly
// so arithmetic reads like plain doubles.
class Probability {
 public:
  Probability(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw std::domain_error("probability outside [0, 1]: " +
                              std::to_string(value));
    }
  }

  operator double() const { return value_; }
  double value() const { return value_; }

 private:
  double value_;
};

// Gaussian tail probability Q(t) = Pr(Z > t) for standard normal Z.
// Accurate to better than 1e-12 relative over |t| <= 8 and underflows
// gracefully for large t.
Probability q_function(double t);

// Inverse of q_function on (0, 1). inv_q_function(0.5) == 0 exactly.
// Throws std::domain_error for p outside (0, 1).
double inv_q_function(Probability p);

// x * log2(x) with the continuous extension xlog2x(0) == 0.
double xlog2x(Probability x);

// Binary entropy h(p) = -p log2 p - (1-p) log2 (1-p) in bits.
double binary_entropy(Probability p);

}  // namespace mramq

#endif  // MRAMQ_NUMERICS_HPP
