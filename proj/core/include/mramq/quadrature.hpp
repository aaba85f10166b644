#ifndef MRAMQ_QUADRATURE_HPP
#define MRAMQ_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace mramq {

// Adaptive Simpson integration of f over [lo, hi] to absolute tolerance
// abs_tol. Throws quadrature_error if the recursion depth cap is hit before
// the tolerance is met.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol = 1e-10, int max_depth = 60);

// Same, but the interval is pre-split at the given breakpoints (values
// outside (lo, hi) are ignored). Needed when f has narrow features the
// initial Simpson stencil would step over.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const std::vector<double>& breakpoints,
                 double abs_tol = 1e-10, int max_depth = 60);

}  // namespace mramq

#endif  // MRAMQ_QUADRATURE_HPP
