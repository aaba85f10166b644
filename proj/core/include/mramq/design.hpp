#ifndef MRAMQ_DESIGN_HPP
#define MRAMQ_DESIGN_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mramq/bounds.hpp"
#include "mramq/channel.hpp"

namespace mramq {

enum class Criterion { capacity, cutoff_rate, ppv_blep, lloyd_max };

const char* criterion_name(Criterion criterion);

// Density the Lloyd-Max quantizer is matched to: the stored-bit mixture with
// BAC-induced weights (q0 + p1)/2, (p0 + q1)/2, or the plain 50/50 mixture.
enum class LloydWeighting { post_bac, equiprobable };

struct OptimizerConfig {
  double bracket_lo = 0.0;  // kOhm
  double bracket_hi = 0.0;  // kOhm
  double tol_a = 1e-9;      // boundary tolerance, kOhm
  int max_iter = 200;
  double fd_step = 1e-5;  // numerical-derivative step, kOhm
  int grid_points = 512;  // sign-change scan / fallback grid

  // Bracket [mu0, mu1]; tol_a, fd_step scaled by mu1 - mu0 so designs are
  // scale equivariant.
  static OptimizerConfig defaults(const ChannelParams& params);

  void validate() const;
};

struct DesignDiagnostics {
  double bracket_lo = 0.0;  // search interval actually used
  double bracket_hi = 0.0;
  double residual = 0.0;  // derivative of the objective at the result
  bool grid_fallback = false;
  bool rate_infeasible = false;
  std::vector<double> sweep_objectives;  // multibit: objective per sweep
};

struct DesignResult {
  Quantizer quantizer;
  double objective_value;
  Criterion criterion;
  int iterations;
  DesignDiagnostics diagnostics;
};

// Bisection on [lo, hi]. Requires a sign change; keeps halving past tol
// while the budget allows, so the returned root is as tight as the function
// permits. Throws bracket_error on same-sign endpoints and convergence_error
// if max_iter ends before |hi - lo| <= tol.
double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double tol, int max_iter,
                   int* iterations = nullptr);

// Golden-section maximizer on [lo, hi]; assumes a unimodal slice and returns
// the best probe. Caller decides whether to accept the result.
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double tol, int max_iter);

// 1-bit designers. Each scans the bracket for derivative sign changes,
// bisects every root, and returns the candidate (roots plus endpoints) with
// the best objective; if no root is found the bracket is widened to
// [mu0 - 3 sigma0, mu1 + 3 sigma1] and finally a grid argmax is used
// (diagnostics.grid_fallback).
DesignResult design_capacity_max(const ChannelParams& params,
                                 const OptimizerConfig& cfg);
DesignResult design_cutoff_max(const ChannelParams& params,
                               const OptimizerConfig& cfg);

// Minimizes the block error probability at (N, R) through the monotone
// surrogate (Cq - R)/sqrt(Vq), with a numerical surrogate derivative. If the
// rate is infeasible everywhere the capacity-max threshold is returned with
// diagnostics.rate_infeasible set.
DesignResult design_ppv_min(const ChannelParams& params,
                            std::uint64_t blocklength, double rate,
                            const OptimizerConfig& cfg);

// 1-bit Lloyd-Max on the channel-output mixture: alternates the centroid
// condition and the midpoint condition until the threshold moves less than
// tol_a. objective_value is the quantizer MSE.
DesignResult design_lloyd_max(const ChannelParams& params,
                              const OptimizerConfig& cfg,
                              LloydWeighting weighting =
                                  LloydWeighting::post_bac);

// MSE of quantizing the output mixture with per-cell centroid
// reconstruction, in closed form.
double lloyd_mse(const ChannelParams& params, const Quantizer& quantizer,
                 LloydWeighting weighting = LloydWeighting::post_bac);

// General n-level design by cyclic coordinate ascent: golden-section on each
// boundary inside its neighbor-bounded window, sweeping until the objective
// improves by less than 1e-12. Initialized from the n/2-level design with
// midpoint splits, which makes the objective dominate the coarser design for
// the refinement-monotone criteria. criterion == ppv_blep requires a query.
DesignResult design_multibit(
    const ChannelParams& params, std::size_t n_levels, Criterion criterion,
    const OptimizerConfig& cfg,
    std::optional<FiniteBlocklengthQuery> query = std::nullopt);

}  // namespace mramq

#endif  // MRAMQ_DESIGN_HPP
