#include "mramq/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mramq {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::domain_error(message);
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

void ChannelParams::validate() const {
  require(write_error_0 >= 0.0 && write_error_0 <= 1.0,
          "write_error_0 outside [0, 1]");
  require(write_error_1 >= 0.0 && write_error_1 <= 1.0,
          "write_error_1 outside [0, 1]");
  require(read_disturb >= 0.0 && read_disturb <= 1.0,
          "read_disturb outside [0, 1]");
  require(std::isfinite(mu0) && std::isfinite(mu1) && mu0 < mu1,
          "need mu0 < mu1");
  require(sigma0 > 0.0 && std::isfinite(sigma0), "sigma0 must be positive");
  require(sigma1 > 0.0 && std::isfinite(sigma1), "sigma1 must be positive");
}

ChannelParams ChannelParams::nominal_cell(double sigma_ratio) {
  require(sigma_ratio > 0.0 && std::isfinite(sigma_ratio),
          "sigma_ratio must be positive");
  ChannelParams params;
  params.write_error_0 = 0.0;
  params.write_error_1 = 2e-4;
  params.read_disturb = 0.0;
  params.mu0 = 1.0;
  params.mu1 = 2.0;
  params.sigma0 = sigma_ratio * params.mu0;
  params.sigma1 = sigma_ratio * params.mu1;
  return params;
}

CrossoverProbs crossover_probs(const ChannelParams& params) {
  params.validate();
  double P0 = params.write_error_0;
  double P1 = params.write_error_1;
  double Pr = params.read_disturb;

  // A 0-write fails with probability P0/2 (the two written bits of the
  // failed pair are equally likely), and a stored 1 is knocked back to 0 by
  // a read disturb event; disturbs only lower the resistance state.
  CrossoverProbs c;
  c.p0 = (P0 / 2.0) * (1.0 - Pr);
  c.q0 = (1.0 - P0 / 2.0) + (P0 / 2.0) * Pr;
  c.p1 = P1 / 2.0 + (1.0 - P1 / 2.0) * Pr;
  c.q1 = (1.0 - P1 / 2.0) * (1.0 - Pr);
  return c;
}

Quantizer::Quantizer(std::vector<double> boundaries)
    : boundaries_(std::move(boundaries)) {
  if (boundaries_.empty()) {
    throw std::invalid_argument("quantizer needs at least one boundary");
  }
  if (!is_power_of_two(boundaries_.size() + 1)) {
    throw std::invalid_argument(
        "quantizer level count must be a power of two, got " +
        std::to_string(boundaries_.size() + 1));
  }
  for (std::size_t i = 0; i < boundaries_.size(); ++i) {
    if (!std::isfinite(boundaries_[i])) {
      throw std::invalid_argument("quantizer boundary must be finite");
    }
    if (i > 0 && !(boundaries_[i - 1] < boundaries_[i])) {
      throw std::invalid_argument(
          "quantizer boundaries must be strictly increasing");
    }
  }
}

Quantizer Quantizer::one_bit(double threshold) {
  return Quantizer(std::vector<double>{threshold});
}

std::size_t Quantizer::symbol_of(double resistance) const {
  return static_cast<std::size_t>(
      std::upper_bound(boundaries_.begin(), boundaries_.end(), resistance) -
      boundaries_.begin());
}

std::vector<double> interval_probs(const ChannelParams& params,
                                   const Quantizer& quantizer, int component) {
  params.validate();
  if (component != 0 && component != 1) {
    throw std::invalid_argument("component must be 0 or 1");
  }
  const auto& a = quantizer.boundaries();
  std::size_t n = quantizer.levels();
  double mu = component == 0 ? params.mu0 : params.mu1;
  double sigma = component == 0 ? params.sigma0 : params.sigma1;

  // First cell as a lower tail, last cell as an upper tail; interior cells
  // as a difference of upper tails. Q is monotone decreasing so each
  // difference is nonnegative up to rounding.
  std::vector<double> probs(n, 0.0);
  probs[0] = q_function((mu - a[0]) / sigma);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    double hi_tail = q_function((a[j - 1] - mu) / sigma);
    double lo_tail = q_function((a[j] - mu) / sigma);
    probs[j] = clamp01(hi_tail - lo_tail);
  }
  probs[n - 1] = q_function((a[n - 2] - mu) / sigma);
  return probs;
}

TransitionMatrix transition_matrix(const ChannelParams& params,
                                   const Quantizer& quantizer) {
  CrossoverProbs c = crossover_probs(params);
  std::vector<double> from0 = interval_probs(params, quantizer, 0);
  std::vector<double> from1 = interval_probs(params, quantizer, 1);
  std::size_t n = quantizer.levels();

  TransitionMatrix matrix;
  matrix.given0.resize(n);
  matrix.given1.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    matrix.given0[j] = clamp01(c.q0 * from0[j] + c.p0 * from1[j]);
    matrix.given1[j] = clamp01(c.p1 * from0[j] + c.q1 * from1[j]);
  }
  return matrix;
}

std::vector<double> output_distribution(const TransitionMatrix& matrix) {
  std::size_t n = matrix.levels();
  std::vector<double> p(n);
  for (std::size_t j = 0; j < n; ++j) {
    p[j] = clamp01(0.5 * (matrix.given0[j] + matrix.given1[j]));
  }
  return p;
}

}  // namespace mramq
