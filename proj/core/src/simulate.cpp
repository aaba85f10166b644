#include "mramq/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mramq/errors.hpp"
#include "mramq/numerics.hpp"

namespace mramq {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct DrawContext {
  const ChannelParams* params;
  const Quantizer* quantizer;
  CrossoverProbs crossovers;
};

ChannelDraw draw_one(const DrawContext& ctx, const CounterRng& rng, int x,
                     std::uint64_t index) {
  double u = rng.uniform(index, 0);
  int stored;
  if (x == 0) {
    stored = u < ctx.crossovers.p0 ? 1 : 0;
  } else {
    stored = u < ctx.crossovers.p1 ? 0 : 1;
  }
  double mu = stored == 0 ? ctx.params->mu0 : ctx.params->mu1;
  double sigma = stored == 0 ? ctx.params->sigma0 : ctx.params->sigma1;
  double y = mu + sigma * rng.normal(index, 1);
  return ChannelDraw{x, stored, y, ctx.quantizer->symbol_of(y)};
}

struct ShardTally {
  std::array<std::vector<std::uint64_t>, 2> counts;
  std::uint64_t map_errors = 0;
};

ShardTally tally_range(const DrawContext& ctx, const CounterRng& rng,
                       const std::vector<int>& map_decision,
                       std::uint64_t begin, std::uint64_t end) {
  std::size_t n = ctx.quantizer->levels();
  ShardTally tally;
  tally.counts[0].assign(n, 0);
  tally.counts[1].assign(n, 0);
  for (std::uint64_t i = begin; i < end; ++i) {
    int x = static_cast<int>(i & 1);
    ChannelDraw draw = draw_one(ctx, rng, x, i);
    ++tally.counts[x][draw.symbol];
    if (map_decision[draw.symbol] != x) ++tally.map_errors;
  }
  return tally;
}

}  // namespace

void McConfig::validate() const {
  if (num_samples < 1) throw std::domain_error("num_samples must be >= 1");
  if (shards < 1) throw std::domain_error("shards must be >= 1");
}

std::uint64_t CounterRng::word(std::uint64_t index,
                               std::uint64_t stream) const {
  std::uint64_t h = mix64(seed_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
  return mix64(h ^ index);
}

double CounterRng::uniform(std::uint64_t index, std::uint64_t stream) const {
  // 53 random bits centered in their cell: values lie strictly inside (0,1).
  return (static_cast<double>(word(index, stream) >> 11) + 0.5) * 0x1p-53;
}

double CounterRng::normal(std::uint64_t index, std::uint64_t stream) const {
  return inv_q_function(uniform(index, stream));
}

ChannelDraw sample_channel(const ChannelParams& params,
                           const Quantizer& quantizer, int x,
                           const CounterRng& rng, std::uint64_t sample_index) {
  if (x != 0 && x != 1) throw std::domain_error("input bit must be 0 or 1");
  DrawContext ctx{&params, &quantizer, crossover_probs(params)};
  return draw_one(ctx, rng, x, sample_index);
}

McReport estimate_matrix(const ChannelParams& params,
                         const Quantizer& quantizer, const McConfig& cfg) {
  cfg.validate();
  DrawContext ctx{&params, &quantizer, crossover_probs(params)};
  CounterRng rng(cfg.seed);
  std::size_t n = quantizer.levels();

  TransitionMatrix analytic = transition_matrix(params, quantizer);
  std::vector<int> map_decision(n);
  for (std::size_t j = 0; j < n; ++j) {
    map_decision[j] = analytic.given1[j] > analytic.given0[j] ? 1 : 0;
  }

  std::uint64_t total = cfg.num_samples;
  unsigned shards = cfg.shards;
  if (shards > total) shards = static_cast<unsigned>(total);
  std::vector<std::future<ShardTally>> futures;
  for (unsigned s = 0; s < shards; ++s) {
    std::uint64_t begin = total * s / shards;
    std::uint64_t end = total * (s + 1) / shards;
    futures.push_back(std::async(std::launch::async, [&, begin, end] {
      return tally_range(ctx, rng, map_decision, begin, end);
    }));
  }

  McReport report;
  report.counts[0].assign(n, 0);
  report.counts[1].assign(n, 0);
  std::uint64_t errors = 0;
  for (auto& f : futures) {
    ShardTally tally = f.get();
    for (int x = 0; x < 2; ++x) {
      for (std::size_t j = 0; j < n; ++j) {
        report.counts[x][j] += tally.counts[x][j];
      }
    }
    errors += tally.map_errors;
  }

  report.samples_drawn = total;
  report.row_samples[0] = (total + 1) / 2;
  report.row_samples[1] = total / 2;
  for (int x = 0; x < 2; ++x) {
    report.frequencies[x].assign(n, 0.0);
    if (report.row_samples[x] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      report.frequencies[x][j] =
          static_cast<double>(report.counts[x][j]) /
          static_cast<double>(report.row_samples[x]);
    }
  }
  report.raw_ber =
      static_cast<double>(errors) / static_cast<double>(total);
  report.raw_ber_half_width =
      1.96 * std::sqrt(report.raw_ber * (1.0 - report.raw_ber) /
                       static_cast<double>(total));
  return report;
}

void export_samples(const ChannelParams& params, const Quantizer& quantizer,
                    const McConfig& cfg, const std::string& path) {
  cfg.validate();
  DrawContext ctx{&params, &quantizer, crossover_probs(params)};
  CounterRng rng(cfg.seed);

  std::string tmp = path + ".tmp";
  std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
  if (!file) throw io_error("cannot open " + tmp + " for writing");

  file << "sample_index,x,symbol,resistance_kohm\n";
  char line[96];
  for (std::uint64_t i = 0; i < cfg.num_samples; ++i) {
    int x = static_cast<int>(i & 1);
    ChannelDraw draw = draw_one(ctx, rng, x, i);
    std::snprintf(line, sizeof(line), "%llu,%d,%zu,%.9g\n",
                  static_cast<unsigned long long>(i), x, draw.symbol,
                  draw.resistance);
    file << line;
  }
  file.flush();
  bool ok = static_cast<bool>(file);
  file.close();
  if (!ok) {
    std::remove(tmp.c_str());
    throw io_error("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw io_error("cannot rename " + tmp + " to " + path);
  }
}

ComparisonReport compare_with_analytic(const TransitionMatrix& analytic,
                                       const McReport& mc,
                                       double z_threshold) {
  std::size_t n = analytic.levels();
  ComparisonReport report;
  report.chi_square = 0.0;
  report.chi_square_dof = 0;
  report.all_pass = true;

  for (int x = 0; x < 2; ++x) {
    const std::vector<double>& row =
        x == 0 ? analytic.given0 : analytic.given1;
    double samples = static_cast<double>(mc.row_samples[x]);
    int cells_in_fit = 0;
    for (std::size_t j = 0; j < n; ++j) {
      EntryCheck check;
      check.analytic = row[j];
      check.empirical = mc.frequencies[x][j];
      if (samples <= 0.0) {
        check.z_score = 0.0;
        check.pass = true;
      } else {
        double stddev = std::sqrt(row[j] * (1.0 - row[j]) / samples);
        if (stddev == 0.0) {
          check.pass = check.empirical == check.analytic;
          check.z_score = check.pass ? 0.0
                                     : std::numeric_limits<double>::infinity();
        } else {
          check.z_score = (check.empirical - check.analytic) / stddev;
          check.pass = std::fabs(check.z_score) <= z_threshold;
        }
        double expected = row[j] * samples;
        if (expected >= 5.0) {
          double observed = static_cast<double>(mc.counts[x][j]);
          report.chi_square +=
              (observed - expected) * (observed - expected) / expected;
          ++cells_in_fit;
        }
      }
      report.all_pass = report.all_pass && check.pass;
      report.entries[x].push_back(check);
    }
    if (cells_in_fit >= 2) report.chi_square_dof += cells_in_fit - 1;
  }

  report.chi_square_critical = report.chi_square_dof > 0
                                   ? chi_square_critical(report.chi_square_dof)
                                   : 0.0;
  report.chi_square_pass = report.chi_square_dof == 0 ||
                           report.chi_square <= report.chi_square_critical;
  report.all_pass = report.all_pass && report.chi_square_pass;
  return report;
}

double chi_square_critical(int dof) {
  if (dof < 1) throw std::domain_error("dof must be >= 1");
  switch (dof) {
    case 1:
      return 10.8275661706627;
    case 2:
      return 13.8155105579643;
    case 3:
      return 16.2662361962381;
    case 6:
      return 22.4577444848253;
    case 7:
      return 24.3218863478569;
    case 14:
      return 36.1232736803981;
    default: {
      // Wilson-Hilferty cube approximation at significance 1e-3.
      double z = 3.0902323061678135;  // inverse Q at 1e-3
      double c = 2.0 / (9.0 * static_cast<double>(dof));
      double base = 1.0 - c + z * std::sqrt(c);
      return static_cast<double>(dof) * base * base * base;
    }
  }
}

}  // namespace mramq
