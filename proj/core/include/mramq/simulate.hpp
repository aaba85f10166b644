#ifndef MRAMQ_SIMULATE_HPP
#define MRAMQ_SIMULATE_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mramq/channel.hpp"

namespace mramq {

struct McConfig {
  std::uint64_t seed = 1;
  std::uint64_t num_samples = 1000000;
  unsigned shards = 1;

  void validate() const;
};

// Counter-based randomness: every (seed, sample index, stream) triple maps
// to one value through a stateless mix, so shard and thread layout cannot
// change what any sample sees.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t word(std::uint64_t index, std::uint64_t stream) const;

  // Uniform on the open interval (0, 1).
  double uniform(std::uint64_t index, std::uint64_t stream) const;

  // Standard normal via the inverse CDF of uniform(); reproducible across
  // platforms to the accuracy of inv_q_function.
  double normal(std::uint64_t index, std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
};

struct ChannelDraw {
  int written_bit;
  int stored_bit;
  double resistance;  // kOhm
  std::size_t symbol;
};

// One pass through the cascade: BAC flip of x, then a Gaussian resistance
// from the stored bit's component, then quantization. Stream 0 of the
// sample's counter feeds the flip, stream 1 the resistance.
ChannelDraw sample_channel(const ChannelParams& params,
                           const Quantizer& quantizer, int x,
                           const CounterRng& rng, std::uint64_t sample_index);

struct McReport {
  std::array<std::vector<std::uint64_t>, 2> counts;
  std::array<std::vector<double>, 2> frequencies;
  std::array<std::uint64_t, 2> row_samples;
  double raw_ber;
  double raw_ber_half_width;  // 95% binomial confidence half-width
  std::uint64_t samples_drawn;
};

// Draws num_samples with alternating inputs x = index mod 2 and tallies the
// empirical transition matrix. raw_ber counts errors of the MAP hard
// decision induced by the analytic matrix. Bit-identical for a fixed
// (seed, num_samples) no matter how many shards run it.
McReport estimate_matrix(const ChannelParams& params,
                         const Quantizer& quantizer, const McConfig& cfg);

// Streams the same draws to a CSV file with header
// sample_index,x,symbol,resistance_kohm (LF endings, 9 significant digits
// on the resistance). Writes through a temp file; nothing is left behind on
// failure. Throws io_error.
void export_samples(const ChannelParams& params, const Quantizer& quantizer,
                    const McConfig& cfg, const std::string& path);

struct EntryCheck {
  double analytic;
  double empirical;
  double z_score;
  bool pass;
};

struct ComparisonReport {
  std::array<std::vector<EntryCheck>, 2> entries;
  double chi_square;
  double chi_square_critical;
  int chi_square_dof;
  bool chi_square_pass;
  bool all_pass;
};

// Per-entry binomial z-test of the empirical frequencies against the
// analytic matrix, plus a chi-square goodness-of-fit over cells with at
// least 5 expected counts (significance 1e-3).
ComparisonReport compare_with_analytic(const TransitionMatrix& analytic,
                                       const McReport& mc,
                                       double z_threshold = 4.0);

// Upper critical value of the chi-square distribution at significance 1e-3.
// Exact for the dof values the comparisons produce, Wilson-Hilferty
// otherwise.
double chi_square_critical(int dof);

}  // namespace mramq

#endif  // MRAMQ_SIMULATE_HPP
