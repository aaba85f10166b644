#include "mramq/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <sys/stat.h>

#include "doctest.h"
#include "mramq/errors.hpp"

using mramq::ChannelParams;
using mramq::chi_square_critical;
using mramq::compare_with_analytic;
using mramq::ComparisonReport;
using mramq::CounterRng;
using mramq::estimate_matrix;
using mramq::McConfig;
using mramq::McReport;
using mramq::Quantizer;
using mramq::sample_channel;
using mramq::transition_matrix;
using mramq::TransitionMatrix;

namespace {

ChannelParams nominal() { return ChannelParams::nominal_cell(0.12); }

bool file_exists(const std::string& path) {
  struct stat buffer;
  return stat(path.c_str(), &buffer) == 0;
}

std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  std::ostringstream buf;
  buf << file.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("McConfig validation") {
  McConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.num_samples = 0;
  CHECK_THROWS_AS(cfg.validate(), std::domain_error);
  cfg = McConfig{};
  cfg.shards = 0;
  CHECK_THROWS_AS(cfg.validate(), std::domain_error);
}

TEST_CASE("CounterRng is a pure function of seed, index, and stream") {
  CounterRng a(42);
  CounterRng b(42);
  CounterRng c(43);
  CHECK(a.word(7, 0) == b.word(7, 0));
  CHECK(a.word(7, 0) != a.word(8, 0));
  CHECK(a.word(7, 0) != a.word(7, 1));
  CHECK(a.word(7, 0) != c.word(7, 0));
}

TEST_CASE("uniform draws stay strictly inside the unit interval") {
  CounterRng rng(1);
  double lo = 1.0;
  double hi = 0.0;
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform(i, 0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal draws have standard moments") {
  CounterRng rng(2);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal(i, 1);
    sum += z;
    sq += z * z;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(std::fabs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("sample_channel respects the degenerate flip probabilities") {
  ChannelParams p = nominal();  // p0 = 0: a written 0 never flips
  Quantizer q = Quantizer::one_bit(1.5);
  CounterRng rng(9);
  double sum0 = 0.0;
  for (int i = 0; i < 2000; ++i) {
    mramq::ChannelDraw draw = sample_channel(p, q, 0, rng, i);
    CHECK(draw.written_bit == 0);
    CHECK(draw.stored_bit == 0);
    CHECK(draw.symbol == q.symbol_of(draw.resistance));
    sum0 += draw.resistance;
  }
  // Resistances come from the stored-0 population.
  CHECK(sum0 / 2000 == doctest::Approx(p.mu0).epsilon(0.01));

  CHECK_THROWS_AS(sample_channel(p, q, 2, rng, 0), std::domain_error);
}

TEST_CASE("a forced flip draws from the other population") {
  ChannelParams p = nominal();
  p.write_error_1 = 1.0;  // every written 1 flips with probability 1/2
  p.read_disturb = 0.0;
  Quantizer q = Quantizer::one_bit(1.5);
  CounterRng rng(11);
  int flipped = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    mramq::ChannelDraw draw = sample_channel(p, q, 1, rng, i);
    if (draw.stored_bit == 0) ++flipped;
  }
  CHECK(static_cast<double>(flipped) / n == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("estimate_matrix is shard-invariant and deterministic") {
  ChannelParams p = nominal();
  Quantizer q = Quantizer::one_bit(1.5);
  McConfig cfg;
  cfg.seed = 7;
  cfg.num_samples = 10001;

  cfg.shards = 1;
  McReport one = estimate_matrix(p, q, cfg);
  cfg.shards = 4;
  McReport four = estimate_matrix(p, q, cfg);
  cfg.shards = 13;
  McReport many = estimate_matrix(p, q, cfg);

  CHECK(one.row_samples[0] == 5001);
  CHECK(one.row_samples[1] == 5000);
  CHECK(one.counts[0] == four.counts[0]);
  CHECK(one.counts[1] == four.counts[1]);
  CHECK(one.counts[0] == many.counts[0]);
  CHECK(one.counts[1] == many.counts[1]);
  CHECK(one.raw_ber == four.raw_ber);

  McReport again = estimate_matrix(p, q, cfg);
  CHECK(many.counts[0] == again.counts[0]);
  CHECK(many.counts[1] == again.counts[1]);
}

TEST_CASE("empirical frequencies agree with the analytic matrix") {
  ChannelParams p = nominal();
  Quantizer q({1.25, 1.5, 1.75});
  McConfig cfg;
  cfg.seed = 1;
  cfg.num_samples = 400000;
  cfg.shards = 4;

  TransitionMatrix analytic = transition_matrix(p, q);
  McReport mc = estimate_matrix(p, q, cfg);
  ComparisonReport report = compare_with_analytic(analytic, mc);
  CHECK(report.all_pass);
  CHECK(report.chi_square_pass);
  CHECK(report.chi_square_dof > 0);
  for (int x = 0; x < 2; ++x) {
    for (const mramq::EntryCheck& entry : report.entries[x]) {
      CHECK(std::fabs(entry.z_score) <= 4.0);
    }
  }

  CHECK(mc.raw_ber > 0.0);
  CHECK(mc.raw_ber_half_width > 0.0);
}

TEST_CASE("a corrupted analytic entry is flagged") {
  ChannelParams p = nominal();
  Quantizer q = Quantizer::one_bit(1.5);
  McConfig cfg;
  cfg.seed = 1;
  cfg.num_samples = 200000;

  TransitionMatrix analytic = transition_matrix(p, q);
  McReport mc = estimate_matrix(p, q, cfg);
  double sigma = std::sqrt(analytic.given1[0] * (1.0 - analytic.given1[0]) /
                           static_cast<double>(mc.row_samples[1]));
  TransitionMatrix corrupted = analytic;
  corrupted.given1[0] += 10.0 * sigma;
  corrupted.given1[1] -= 10.0 * sigma;

  ComparisonReport clean = compare_with_analytic(analytic, mc);
  ComparisonReport flagged = compare_with_analytic(corrupted, mc);
  CHECK(clean.all_pass);
  CHECK_FALSE(flagged.all_pass);
  CHECK_FALSE(flagged.entries[1][0].pass);
}

TEST_CASE("export_samples writes the documented CSV") {
  ChannelParams p = nominal();
  Quantizer q = Quantizer::one_bit(1.5);
  McConfig cfg;
  cfg.seed = 5;
  cfg.num_samples = 100;
  std::string path = "mramq_test_export.csv";

  mramq::export_samples(p, q, cfg, path);
  std::string text = read_file(path);
  std::istringstream lines(text);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "sample_index,x,symbol,resistance_kohm");
  int rows = 0;
  CounterRng rng(5);
  while (std::getline(lines, line)) {
    unsigned long long index;
    int x;
    unsigned long long symbol;
    double resistance;
    REQUIRE(std::sscanf(line.c_str(), "%llu,%d,%llu,%lf", &index, &x, &symbol,
                        &resistance) == 4);
    CHECK(index == static_cast<unsigned long long>(rows));
    CHECK(x == rows % 2);
    mramq::ChannelDraw draw = sample_channel(p, q, x, rng, index);
    CHECK(symbol == draw.symbol);
    CHECK(resistance == doctest::Approx(draw.resistance).epsilon(1e-8));
    ++rows;
  }
  CHECK(rows == 100);
  CHECK_FALSE(file_exists(path + ".tmp"));

  // Re-export is byte-identical.
  mramq::export_samples(p, q, cfg, path);
  CHECK(read_file(path) == text);
  std::remove(path.c_str());
}

TEST_CASE("export_samples fails loudly and leaves nothing behind") {
  ChannelParams p = nominal();
  Quantizer q = Quantizer::one_bit(1.5);
  McConfig cfg;
  cfg.num_samples = 10;
  std::string path = "definitely/not/a/writable/dir/out.csv";
  CHECK_THROWS_AS(mramq::export_samples(p, q, cfg, path), mramq::io_error);
  CHECK_FALSE(file_exists(path));
  CHECK_FALSE(file_exists(path + ".tmp"));
}

TEST_CASE("chi_square_critical table and tail approximation") {
  CHECK(chi_square_critical(1) == doctest::Approx(10.8275661706627));
  CHECK(chi_square_critical(2) == doctest::Approx(13.8155105579643));
  CHECK(chi_square_critical(3) == doctest::Approx(16.2662361962381));
  CHECK(chi_square_critical(6) == doctest::Approx(22.4577444848253));
  CHECK(chi_square_critical(7) == doctest::Approx(24.3218863478569));
  CHECK(chi_square_critical(14) == doctest::Approx(36.1232736803981));
  // Wilson-Hilferty approximation for the off-table values. It carries about
  // one percent relative error at small dof and tightens as dof grows.
  CHECK(chi_square_critical(5) ==
        doctest::Approx(20.5150056524329).epsilon(2e-2));
  CHECK(chi_square_critical(30) ==
        doctest::Approx(59.7030644913869).epsilon(5e-3));
  double prev = 0.0;
  for (int dof = 1; dof <= 20; ++dof) {
    double crit = chi_square_critical(dof);
    CHECK(crit > prev);
    prev = crit;
  }
  CHECK_THROWS_AS(chi_square_critical(0), std::domain_error);
}
