#include "mramq/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "mramq/errors.hpp"

namespace mramq {

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return (h / 6.0) * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double fa, double fm, double fb, double whole, double tol,
             int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = simpson(fa, flm, fm, m - a);
  double right = simpson(fm, frm, fb, b - m);
  double err = left + right - whole;
  if (std::fabs(err) <= 15.0 * tol || (b - a) < 1e-300) {
    return left + right + err / 15.0;
  }
  if (depth <= 0) {
    throw quadrature_error("adaptive Simpson depth cap reached", a, b,
                           left + right);
  }
  return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_panel(const std::function<double(double)>& f, double lo,
                       double hi, double abs_tol, int max_depth) {
  if (lo == hi) return 0.0;
  double m = 0.5 * (lo + hi);
  double fa = f(lo);
  double fm = f(m);
  double fb = f(hi);
  double whole = simpson(fa, fm, fb, hi - lo);
  return adapt(f, lo, hi, fa, fm, fb, whole, abs_tol, max_depth);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol, int max_depth) {
  return integrate_panel(f, lo, hi, abs_tol, max_depth);
}

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const std::vector<double>& breakpoints, double abs_tol,
                 int max_depth) {
  std::vector<double> knots;
  knots.push_back(lo);
  for (double b : breakpoints) {
    if (b > lo && b < hi) knots.push_back(b);
  }
  knots.push_back(hi);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  double panel_tol = abs_tol / static_cast<double>(knots.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    total += integrate_panel(f, knots[i], knots[i + 1], panel_tol, max_depth);
  }
  return total;
}

}  // namespace mramq
