#include <benchmark/benchmark.h>

#include <vector>

#include "mramq/bounds.hpp"
#include "mramq/channel.hpp"
#include "mramq/design.hpp"
#include "mramq/numerics.hpp"
#include "mramq/simulate.hpp"

namespace {

mramq::Quantizer uniform_quantizer(std::size_t levels) {
  std::vector<double> boundaries;
  for (std::size_t j = 1; j < levels; ++j) {
    boundaries.push_back(1.0 + static_cast<double>(j) /
                                   static_cast<double>(levels));
  }
  return mramq::Quantizer(boundaries);
}

void bm_q_function(benchmark::State& state) {
  double t = -6.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mramq::q_function(t));
    t = t < 6.0 ? t + 1e-6 : -6.0;
  }
}
BENCHMARK(bm_q_function);

void bm_inv_q_function(benchmark::State& state) {
  double p = 1e-12;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mramq::inv_q_function(p));
    p = p < 0.999 ? p + 1e-6 : 1e-12;
  }
}
BENCHMARK(bm_inv_q_function);

void bm_transition_matrix(benchmark::State& state) {
  mramq::ChannelParams params = mramq::ChannelParams::nominal_cell(0.12);
  mramq::Quantizer quantizer =
      uniform_quantizer(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mramq::transition_matrix(params, quantizer));
  }
}
BENCHMARK(bm_transition_matrix)->Arg(2)->Arg(4)->Arg(8);

void bm_capacity_and_derivative(benchmark::State& state) {
  mramq::ChannelParams params = mramq::ChannelParams::nominal_cell(0.12);
  for (auto _ : state) {
    mramq::TransitionMatrix m =
        mramq::transition_matrix(params, mramq::Quantizer::one_bit(1.4));
    benchmark::DoNotOptimize(mramq::capacity(m));
    benchmark::DoNotOptimize(mramq::capacity_derivative(params, 1.4));
  }
}
BENCHMARK(bm_capacity_and_derivative);

void bm_design_capacity_max(benchmark::State& state) {
  mramq::ChannelParams params = mramq::ChannelParams::nominal_cell(0.12);
  mramq::OptimizerConfig cfg = mramq::OptimizerConfig::defaults(params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mramq::design_capacity_max(params, cfg));
  }
}
BENCHMARK(bm_design_capacity_max);

void bm_design_multibit(benchmark::State& state) {
  mramq::ChannelParams params = mramq::ChannelParams::nominal_cell(0.12);
  mramq::OptimizerConfig cfg = mramq::OptimizerConfig::defaults(params);
  std::size_t levels = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mramq::design_multibit(
        params, levels, mramq::Criterion::capacity, cfg));
  }
}
BENCHMARK(bm_design_multibit)->Arg(4)->Arg(8);

void bm_estimate_matrix(benchmark::State& state) {
  mramq::ChannelParams params = mramq::ChannelParams::nominal_cell(0.12);
  mramq::Quantizer quantizer = mramq::Quantizer::one_bit(1.4);
  mramq::McConfig cfg;
  cfg.num_samples = static_cast<std::uint64_t>(state.range(0));
  cfg.shards = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mramq::estimate_matrix(params, quantizer, cfg));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          state.range(0));
}
BENCHMARK(bm_estimate_matrix)->Args({100000, 1})->Args({100000, 4});

}  // namespace

BENCHMARK_MAIN();
