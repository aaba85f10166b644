#include "mramq/numerics.hpp"

#include <cmath>

namespace mramq {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double phi(double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }

// Acklam's rational approximation for the standard normal quantile,
// |relative error| < 1.15e-9 before refinement.
double norm_quantile_approx(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
            a[5]) *
           q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r +
            1.0);
  }
  double q = std::sqrt(-2.0 * std::log1p(-p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
           c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

Probability q_function(double t) {
  if (!std::isfinite(t)) {
    throw std::domain_error("q_function requires finite t");
  }
  // erfc underflows to 0 near t ~ 38, which is the honest answer there.
  return Probability(0.5 * std::erfc(t / kSqrt2));
}

double inv_q_function(Probability p) {
  double pv = p.value();
  if (pv <= 0.0 || pv >= 1.0) {
    throw std::domain_error("inv_q_function requires p in (0, 1), got " +
                            std::to_string(pv));
  }
  // Q(t) = 1 - Phi(t), so t = Phi^{-1}(1 - p) = -Phi^{-1}(p).
  double t = -norm_quantile_approx(pv);

  // One or two Newton corrections t <- t + (Q(t) - p) / phi(t) push the
  // relative error to machine precision wherever phi(t) has headroom.
  for (int i = 0; i < 2; ++i) {
    double density = phi(t);
    if (!(density > 0.0)) break;
    double step = (0.5 * std::erfc(t / kSqrt2) - pv) / density;
    if (!std::isfinite(step)) break;
    // Guard against a wild step when p sits deep in a tail.
    if (std::fabs(step) > 1.0) step = step > 0 ? 1.0 : -1.0;
    t += step;
  }
  return t;
}

double xlog2x(Probability x) {
  double xv = x.value();
  if (xv == 0.0) return 0.0;
  return xv * std::log2(xv);
}

double binary_entropy(Probability p) {
  double pv = p.value();
  return -xlog2x(pv) - xlog2x(1.0 - pv);
}

}  // namespace mramq
