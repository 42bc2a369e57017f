#include <benchmark/benchmark.h>

#include <vector>

#include "mvtraffic/estimation.hpp"
#include "mvtraffic/netsim.hpp"
#include "mvtraffic/synthesis.hpp"
#include "mvtraffic/trellis.hpp"
#include "mvtraffic/viewswitch.hpp"

namespace {

using namespace mvtraffic;

GopStructure bench_structure() {
  GopStructure st;
  st.num_views = 1;
  st.gop_len = 8;
  st.fps = 25.0;
  st.frame_labels.assign(8, FrameType::P);
  st.frame_labels[0] = FrameType::I;
  st.bin_counts.assign(8, 10);
  return st;
}

// Three well-separated activity states over an 8-frame GOP, the shape the
// estimation benchmarks care about: real fits run on models of this size.
PhmmParams bench_model() {
  PhmmParams p;
  p.num_states = 3;
  p.pi = {0.4, 0.3, 0.3};
  p.trans = {{0.0, 0.6, 0.4}, {0.5, 0.0, 0.5}, {0.3, 0.7, 0.0}};
  p.lambda = {2.0, 5.0, 9.0};
  const GopStructure st = bench_structure();
  p.grid.positions.assign(8, BinRange{0.0, 10000.0, 10});
  p.emissions.assign(3, std::vector<std::vector<double>>(8, std::vector<double>(10)));
  for (int s = 0; s < 3; ++s) {
    for (int f = 0; f < 8; ++f) {
      double total = 0.0;
      for (int b = 0; b < 10; ++b) {
        const double d = b - (2.0 + 2.5 * s);
        p.emissions[s][f][b] = 1.0 / (1.0 + d * d);
        total += p.emissions[s][f][b];
      }
      for (int b = 0; b < 10; ++b) p.emissions[s][f][b] /= total;
    }
  }
  return p;
}

void BM_Forward(benchmark::State& state) {
  const PhmmParams model = bench_model();
  const Trace trace = generate_trace(model, bench_structure(), state.range(0), 11);
  TrellisOptions options;
  options.max_duration = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(trace, model, options).log_likelihood);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Forward)
    ->ArgsProduct({{200, 1000, 4000}, {0, 64}})
    ->ArgNames({"gops", "cap"})
    ->Unit(benchmark::kMillisecond)
    ->Complexity();

void BM_Smooth(benchmark::State& state) {
  const PhmmParams model = bench_model();
  const Trace trace = generate_trace(model, bench_structure(), state.range(0), 11);
  TrellisOptions options;
  options.max_duration = 64;
  for (auto _ : state) {
    benchmark::DoNotOptimize(smooth(trace, model, options).log_likelihood);
  }
}
BENCHMARK(BM_Smooth)->Arg(200)->Arg(1000)->ArgName("gops")->Unit(benchmark::kMillisecond);

void BM_EmStep(benchmark::State& state) {
  const PhmmParams model = bench_model();
  const Trace trace = generate_trace(model, bench_structure(), state.range(0), 11);
  EmOptions options;
  options.trellis.max_duration = 64;
  for (auto _ : state) {
    benchmark::DoNotOptimize(em_step(trace, model, options).second);
  }
}
BENCHMARK(BM_EmStep)->Arg(200)->Arg(1000)->ArgName("gops")->Unit(benchmark::kMillisecond);

void BM_GenerateTrace(benchmark::State& state) {
  const PhmmParams model = bench_model();
  const GopStructure st = bench_structure();
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_trace(model, st, state.range(0), 11).size());
  }
}
BENCHMARK(BM_GenerateTrace)
    ->Arg(1000)
    ->Arg(10000)
    ->ArgName("gops")
    ->Unit(benchmark::kMillisecond);

void BM_RunExperiment(benchmark::State& state) {
  const PhmmParams model = bench_model();
  const Trace trace = generate_trace(model, bench_structure(), 1000, 11);
  const std::vector<TransmittedFrame> offered = full_stream(trace);
  SimConfig config;
  config.sender_buffer_bits = 300'000.0;
  config.receiver_buffer_bits = 400'000.0;
  config.channel_rate_ratio = 1.5;
  config.monte_carlo_runs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_experiment(offered, 25.0, config).overall_loss_mean);
  }
}
BENCHMARK(BM_RunExperiment)->Arg(1)->Arg(10)->ArgName("runs")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
