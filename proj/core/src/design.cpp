#include "mramq/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mramq/errors.hpp"

namespace mramq {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kInvPhi = 0.61803398874989484820;

double phi_std(double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }

// Upper-truncated moments of one Gaussian component: mass, mean and second
// moment of Y restricted to (a, inf).
struct UpperMoments {
  double m0, m1, m2;
};

UpperMoments upper_moments(double mu, double sigma, double a) {
  UpperMoments m;
  if (a == -std::numeric_limits<double>::infinity()) {
    m.m0 = 1.0;
    m.m1 = mu;
    m.m2 = mu * mu + sigma * sigma;
    return m;
  }
  if (a == std::numeric_limits<double>::infinity()) {
    m.m0 = m.m1 = m.m2 = 0.0;
    return m;
  }
  double t = (a - mu) / sigma;
  double q = q_function(t);
  double d = phi_std(t);
  m.m0 = q;
  m.m1 = mu * q + sigma * d;
  m.m2 = (mu * mu + sigma * sigma) * q + sigma * (mu + a) * d;
  return m;
}

struct MixtureWeights {
  double w0, w1;
};

MixtureWeights mixture_weights(const ChannelParams& params,
                               LloydWeighting weighting) {
  if (weighting == LloydWeighting::equiprobable) return {0.5, 0.5};
  CrossoverProbs c = crossover_probs(params);
  return {0.5 * (c.q0 + c.p1), 0.5 * (c.p0 + c.q1)};
}

struct RootScan {
  std::vector<double> roots;
  int iterations = 0;
};

// Evaluates f on an even grid and bisects every sign change. Exact zeros at
// grid nodes count as roots directly.
RootScan scan_roots(const std::function<double(double)>& f, double lo,
                    double hi, const OptimizerConfig& cfg) {
  RootScan scan;
  double prev_x = lo;
  double prev_f = f(lo);
  for (int k = 1; k <= cfg.grid_points; ++k) {
    double x = lo + (hi - lo) * static_cast<double>(k) /
                        static_cast<double>(cfg.grid_points);
    double fx = f(x);
    if (prev_f == 0.0) {
      scan.roots.push_back(prev_x);
    } else if (std::isfinite(prev_f) && std::isfinite(fx) &&
               ((prev_f < 0.0) != (fx < 0.0)) && fx != 0.0) {
      int iters = 0;
      scan.roots.push_back(
          bisect_root(f, prev_x, x, cfg.tol_a, cfg.max_iter, &iters));
      scan.iterations += iters;
    }
    prev_x = x;
    prev_f = fx;
  }
  if (prev_f == 0.0) scan.roots.push_back(prev_x);
  return scan;
}

// Shared 1-bit pipeline: root-find on the objective derivative, evaluate the
// objective at every root plus the bracket endpoints, keep the best. Falls
// back to a pure grid argmax when no sign change exists anywhere.
DesignResult design_one_bit(const ChannelParams& params,
                            const OptimizerConfig& cfg,
                            const std::function<double(double)>& derivative,
                            const std::function<double(double)>& objective,
                            Criterion criterion) {
  params.validate();
  cfg.validate();

  double lo = cfg.bracket_lo;
  double hi = cfg.bracket_hi;
  RootScan scan = scan_roots(derivative, lo, hi, cfg);
  if (scan.roots.empty()) {
    double wide_lo = std::min(lo, params.mu0 - 3.0 * params.sigma0);
    double wide_hi = std::max(hi, params.mu1 + 3.0 * params.sigma1);
    if (wide_lo < lo || wide_hi > hi) {
      lo = wide_lo;
      hi = wide_hi;
      scan = scan_roots(derivative, lo, hi, cfg);
    }
  }

  DesignResult result{Quantizer::one_bit(0.5 * (lo + hi)), 0.0, criterion, 0,
                      {}};
  result.diagnostics.bracket_lo = lo;
  result.diagnostics.bracket_hi = hi;
  result.iterations = scan.iterations;

  std::vector<double> candidates = scan.roots;
  if (scan.roots.empty()) {
    result.diagnostics.grid_fallback = true;
    for (int k = 0; k <= cfg.grid_points; ++k) {
      candidates.push_back(lo + (hi - lo) * static_cast<double>(k) /
                                    static_cast<double>(cfg.grid_points));
    }
  } else {
    candidates.push_back(lo);
    candidates.push_back(hi);
  }

  double best_x = 0.0;
  double best_v = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (double x : candidates) {
    double v = objective(x);
    if (std::isfinite(v) && (!found || v > best_v)) {
      best_x = x;
      best_v = v;
      found = true;
    }
  }
  if (!found) {
    throw convergence_error("objective not finite anywhere on the bracket",
                            lo, hi, scan.iterations);
  }

  result.quantizer = Quantizer::one_bit(best_x);
  result.objective_value = best_v;
  result.diagnostics.residual = derivative(best_x);
  return result;
}

double multibit_objective(const ChannelParams& params,
                          const std::vector<double>& boundaries,
                          Criterion criterion,
                          const std::optional<FiniteBlocklengthQuery>& query) {
  Quantizer quantizer(boundaries);
  switch (criterion) {
    case Criterion::capacity:
      return capacity(transition_matrix(params, quantizer));
    case Criterion::cutoff_rate:
      return cutoff_rate(transition_matrix(params, quantizer));
    case Criterion::ppv_blep: {
      TransitionMatrix m = transition_matrix(params, quantizer);
      double cq = capacity(m);
      double vq = dispersion(m);
      return (cq - query->rate) / std::sqrt(std::max(vq, 1e-300));
    }
    case Criterion::lloyd_max:
      return -lloyd_mse(params, quantizer);
  }
  throw std::invalid_argument("unknown criterion");
}

}  // namespace

const char* criterion_name(Criterion criterion) {
  switch (criterion) {
    case Criterion::capacity:
      return "capacity";
    case Criterion::cutoff_rate:
      return "cutoff_rate";
    case Criterion::ppv_blep:
      return "ppv_blep";
    case Criterion::lloyd_max:
      return "lloyd_max";
  }
  return "unknown";
}

OptimizerConfig OptimizerConfig::defaults(const ChannelParams& params) {
  params.validate();
  double span = params.mu1 - params.mu0;
  OptimizerConfig cfg;
  cfg.bracket_lo = params.mu0;
  cfg.bracket_hi = params.mu1;
  cfg.tol_a = 1e-9 * span;
  cfg.max_iter = 200;
  cfg.fd_step = 1e-5 * span;
  cfg.grid_points = 512;
  return cfg;
}

void OptimizerConfig::validate() const {
  if (!(bracket_lo < bracket_hi)) {
    throw std::domain_error("optimizer bracket_lo must be < bracket_hi");
  }
  if (!(tol_a > 0.0)) throw std::domain_error("tol_a must be positive");
  if (max_iter < 1) throw std::domain_error("max_iter must be >= 1");
  if (!(fd_step > 0.0)) throw std::domain_error("fd_step must be positive");
  if (grid_points < 2) throw std::domain_error("grid_points must be >= 2");
}

double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double tol, int max_iter, int* iterations) {
  if (!(lo < hi)) throw std::domain_error("bisect_root needs lo < hi");
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (iterations != nullptr) *iterations = 0;
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (!std::isfinite(f_lo) || !std::isfinite(f_hi) ||
      (f_lo < 0.0) == (f_hi < 0.0)) {
    throw bracket_error(lo, hi, f_lo, f_hi);
  }

  int it = 0;
  while (it < max_iter) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point limit
    ++it;
    double f_mid = f(mid);
    if (f_mid == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  if (iterations != nullptr) *iterations = it;
  if (hi - lo > tol) {
    throw convergence_error("bisection ran out of iterations", lo, hi, it);
  }
  return 0.5 * (lo + hi);
}

double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double tol, int max_iter) {
  if (!(lo < hi)) throw std::domain_error("golden_max needs lo < hi");
  double a = lo;
  double b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  int it = 0;
  while (b - a > tol && it < max_iter) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
    ++it;
  }
  return f1 > f2 ? x1 : x2;
}

DesignResult design_capacity_max(const ChannelParams& params,
                                 const OptimizerConfig& cfg) {
  auto derivative = [&params](double a1) {
    return capacity_derivative(params, a1);
  };
  auto objective = [&params](double a1) {
    return capacity(transition_matrix(params, Quantizer::one_bit(a1)));
  };
  return design_one_bit(params, cfg, derivative, objective,
                        Criterion::capacity);
}

DesignResult design_cutoff_max(const ChannelParams& params,
                               const OptimizerConfig& cfg) {
  auto derivative = [&params](double a1) {
    return cutoff_rate_derivative(params, a1);
  };
  auto objective = [&params](double a1) {
    return cutoff_rate(transition_matrix(params, Quantizer::one_bit(a1)));
  };
  return design_one_bit(params, cfg, derivative, objective,
                        Criterion::cutoff_rate);
}

DesignResult design_ppv_min(const ChannelParams& params,
                            std::uint64_t blocklength, double rate,
                            const OptimizerConfig& cfg) {
  if (blocklength < 1) throw std::domain_error("blocklength must be >= 1");
  if (!(rate > 0.0 && rate < 1.0)) {
    throw std::domain_error("rate must be in (0, 1)");
  }

  auto surrogate = [&params, rate](double a1) {
    TransitionMatrix m = transition_matrix(params, Quantizer::one_bit(a1));
    double cq = capacity(m);
    double vq = dispersion(m);
    return (cq - rate) / std::sqrt(std::max(vq, 1e-300));
  };
  double h = cfg.fd_step;
  auto surrogate_derivative = [&surrogate, h](double a1) {
    return (surrogate(a1 + h) - surrogate(a1 - h)) / (2.0 * h);
  };

  DesignResult result = design_one_bit(params, cfg, surrogate_derivative,
                                       surrogate, Criterion::ppv_blep);
  TransitionMatrix m = transition_matrix(params, result.quantizer);
  if (capacity(m) <= rate) {
    // Either the rate is infeasible everywhere (P_B ~ 1 regime) or the
    // derivative search missed the feasible pocket. The capacity maximum
    // decides which; it also serves as the least-bad fallback threshold.
    DesignResult cap = design_capacity_max(params, cfg);
    result.quantizer = cap.quantizer;
    result.iterations += cap.iterations;
    result.diagnostics = cap.diagnostics;
    result.diagnostics.rate_infeasible = cap.objective_value <= rate;
    m = transition_matrix(params, result.quantizer);
  }
  result.criterion = Criterion::ppv_blep;
  result.objective_value = ppv_blep(m, blocklength, rate).value();
  if (!result.diagnostics.rate_infeasible) {
    result.diagnostics.residual =
        surrogate_derivative(result.quantizer.boundaries()[0]);
  }
  return result;
}

DesignResult design_lloyd_max(const ChannelParams& params,
                              const OptimizerConfig& cfg,
                              LloydWeighting weighting) {
  params.validate();
  cfg.validate();
  MixtureWeights w = mixture_weights(params, weighting);

  double a1 = 0.5 * (params.mu0 + params.mu1);
  double delta = std::numeric_limits<double>::infinity();
  int it = 0;
  bool converged = false;
  for (; it < cfg.max_iter; ++it) {
    // Cell masses and means from single tails on their own side of the
    // threshold, never as 1 - Q, so nothing cancels when a cell gets light.
    double t0 = (a1 - params.mu0) / params.sigma0;
    double t1 = (a1 - params.mu1) / params.sigma1;
    double d0 = params.sigma0 * phi_std(t0);
    double d1 = params.sigma1 * phi_std(t1);
    double mass_hi = w.w0 * q_function(t0) + w.w1 * q_function(t1);
    double mean_hi = w.w0 * (params.mu0 * q_function(t0) + d0) +
                     w.w1 * (params.mu1 * q_function(t1) + d1);
    double mass_lo = w.w0 * q_function(-t0) + w.w1 * q_function(-t1);
    double mean_lo = w.w0 * (params.mu0 * q_function(-t0) - d0) +
                     w.w1 * (params.mu1 * q_function(-t1) - d1);
    if (mass_lo <= 0.0 || mass_hi <= 0.0) {
      throw convergence_error("Lloyd-Max cell lost all mass", a1, a1, it);
    }
    double c_lo = mean_lo / mass_lo;
    double c_hi = mean_hi / mass_hi;
    double next = 0.5 * (c_lo + c_hi);
    delta = std::fabs(next - a1);
    a1 = next;
    if (delta < cfg.tol_a) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) {
    throw convergence_error("Lloyd-Max did not converge", a1 - delta, a1,
                            it);
  }

  DesignResult result{Quantizer::one_bit(a1),
                      lloyd_mse(params, Quantizer::one_bit(a1), weighting),
                      Criterion::lloyd_max, it, {}};
  result.diagnostics.bracket_lo = cfg.bracket_lo;
  result.diagnostics.bracket_hi = cfg.bracket_hi;
  result.diagnostics.residual = delta;
  return result;
}

double lloyd_mse(const ChannelParams& params, const Quantizer& quantizer,
                 LloydWeighting weighting) {
  params.validate();
  MixtureWeights w = mixture_weights(params, weighting);
  const auto& b = quantizer.boundaries();
  double inf = std::numeric_limits<double>::infinity();

  double mse = 0.0;
  for (std::size_t j = 0; j <= b.size(); ++j) {
    double lo = j == 0 ? -inf : b[j - 1];
    double hi = j == b.size() ? inf : b[j];
    UpperMoments a0 = upper_moments(params.mu0, params.sigma0, lo);
    UpperMoments b0 = upper_moments(params.mu0, params.sigma0, hi);
    UpperMoments a1 = upper_moments(params.mu1, params.sigma1, lo);
    UpperMoments b1 = upper_moments(params.mu1, params.sigma1, hi);
    double m0 = w.w0 * (a0.m0 - b0.m0) + w.w1 * (a1.m0 - b1.m0);
    double m1 = w.w0 * (a0.m1 - b0.m1) + w.w1 * (a1.m1 - b1.m1);
    double m2 = w.w0 * (a0.m2 - b0.m2) + w.w1 * (a1.m2 - b1.m2);
    if (m0 <= 0.0) continue;  // empty cell carries no error mass
    mse += m2 - m1 * m1 / m0;
  }
  return std::max(0.0, mse);
}

DesignResult design_multibit(const ChannelParams& params,
                             std::size_t n_levels, Criterion criterion,
                             const OptimizerConfig& cfg,
                             std::optional<FiniteBlocklengthQuery> query) {
  params.validate();
  cfg.validate();
  if (n_levels < 4 || (n_levels & (n_levels - 1)) != 0) {
    throw std::invalid_argument(
        "n_levels must be a power of two >= 4 (use the 1-bit designers for "
        "n = 2)");
  }
  if (criterion == Criterion::ppv_blep) {
    if (!query.has_value()) {
      throw std::invalid_argument(
          "ppv_blep criterion needs a FiniteBlocklengthQuery");
    }
    query->validate();
  }

  // Seed from the half-resolution design and split every gap at its
  // midpoint. The seed boundaries are kept, so refinement-monotone
  // objectives start no worse than the coarser optimum.
  std::vector<double> boundaries;
  if (n_levels == 4) {
    DesignResult one_bit = [&] {
      switch (criterion) {
        case Criterion::capacity:
          return design_capacity_max(params, cfg);
        case Criterion::cutoff_rate:
          return design_cutoff_max(params, cfg);
        case Criterion::ppv_blep:
          return design_ppv_min(params, query->blocklength, query->rate, cfg);
        case Criterion::lloyd_max:
          return design_lloyd_max(params, cfg);
      }
      throw std::invalid_argument("unknown criterion");
    }();
    boundaries = one_bit.quantizer.boundaries();
  } else {
    boundaries =
        design_multibit(params, n_levels / 2, criterion, cfg, query)
            .quantizer.boundaries();
  }

  double anchor_lo =
      std::min(cfg.bracket_lo, params.mu0 - 3.0 * params.sigma0);
  double anchor_hi =
      std::max(cfg.bracket_hi, params.mu1 + 3.0 * params.sigma1);
  anchor_lo = std::min(anchor_lo, boundaries.front() - params.sigma0);
  anchor_hi = std::max(anchor_hi, boundaries.back() + params.sigma1);

  std::vector<double> knots;
  knots.push_back(anchor_lo);
  knots.insert(knots.end(), boundaries.begin(), boundaries.end());
  knots.push_back(anchor_hi);
  std::vector<double> refined;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    refined.push_back(0.5 * (knots[i] + knots[i + 1]));
    if (i + 1 < knots.size() - 1) refined.push_back(knots[i + 1]);
  }
  boundaries = refined;

  auto objective = [&](const std::vector<double>& b) {
    return multibit_objective(params, b, criterion, query);
  };

  DesignResult result{Quantizer(boundaries), 0.0, criterion, 0, {}};
  result.diagnostics.bracket_lo = anchor_lo;
  result.diagnostics.bracket_hi = anchor_hi;

  double current = objective(boundaries);
  int sweeps = 0;
  while (true) {
    if (sweeps >= cfg.max_iter) {
      throw convergence_error("coordinate ascent did not converge", anchor_lo,
                              anchor_hi, sweeps);
    }
    ++sweeps;
    double before = current;
    for (std::size_t m = 0; m < boundaries.size(); ++m) {
      double window_lo =
          (m == 0 ? anchor_lo : boundaries[m - 1]) + cfg.tol_a;
      double window_hi =
          (m + 1 == boundaries.size() ? anchor_hi : boundaries[m + 1]) -
          cfg.tol_a;
      if (!(window_hi - window_lo > cfg.tol_a)) {
        throw degenerate_quantizer_error(
            "boundary " + std::to_string(m + 1) +
            " has no room between its neighbors");
      }
      auto slice = [&](double x) {
        std::vector<double> probe = boundaries;
        probe[m] = x;
        return objective(probe);
      };
      double best_x = golden_max(slice, window_lo, window_hi, cfg.tol_a,
                                 cfg.max_iter);
      double best_v = slice(best_x);
      if (best_v > current) {  // keep the sweep objective non-decreasing
        boundaries[m] = best_x;
        current = best_v;
      }
    }
    result.diagnostics.sweep_objectives.push_back(current);
    if (current - before < 1e-12) break;
  }

  result.quantizer = Quantizer(boundaries);
  result.iterations = sweeps;
  switch (criterion) {
    case Criterion::capacity:
      result.objective_value =
          capacity(transition_matrix(params, result.quantizer));
      break;
    case Criterion::cutoff_rate:
      result.objective_value =
          cutoff_rate(transition_matrix(params, result.quantizer));
      break;
    case Criterion::ppv_blep:
      result.objective_value =
          ppv_blep(transition_matrix(params, result.quantizer),
                   query->blocklength, query->rate)
              .value();
      break;
    case Criterion::lloyd_max:
      result.objective_value = lloyd_mse(params, result.quantizer);
      break;
  }
  return result;
}

}  // namespace mramq
