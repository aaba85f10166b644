#ifndef MRAMQ_ERRORS_HPP
#define MRAMQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mramq {

// Root-finding bracket does not contain a sign change.
class bracket_error : public std::runtime_error {
 public:
  bracket_error(double lo, double hi, double f_lo, double f_hi)
      : std::runtime_error("no sign change on bracket [" + std::to_string(lo) +
                           ", " + std::to_string(hi) + "], f = (" +
                           std::to_string(f_lo) + ", " + std::to_string(f_hi) +
                           ")"),
        lo(lo),
        hi(hi),
        f_lo(f_lo),
        f_hi(f_hi) {}

  double lo, hi, f_lo, f_hi;
};

// Iteration budget exhausted before meeting the requested tolerance.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double lo, double hi,
                    int iterations)
      : std::runtime_error(what + " (bracket [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "] after " +
                           std::to_string(iterations) + " iterations)"),
        lo(lo),
        hi(hi),
        iterations(iterations) {}

  double lo, hi;
  int iterations;
};

// Adaptive quadrature failed to reach the requested tolerance.
class quadrature_error : public std::runtime_error {
 public:
  quadrature_error(const std::string& what, double lo, double hi,
                   double estimate)
      : std::runtime_error(what + " on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) +
                           "], last estimate " + std::to_string(estimate)),
        lo(lo),
        hi(hi),
        estimate(estimate) {}

  double lo, hi, estimate;
};

// Quantizer optimization collapsed two boundaries onto each other.
class degenerate_quantizer_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, written, or renamed.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration file is malformed or holds an unusable value.
class config_error : public std::runtime_error {
 public:
  config_error(const std::string& key, const std::string& reason)
      : std::runtime_error(key + ": " + reason), key(key), reason(reason) {}

  std::string key, reason;
};

}  // namespace mramq

#endif  // MRAMQ_ERRORS_HPP
