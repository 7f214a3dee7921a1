#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "rabical/calibration.hpp"
#include "rabical/experiment.hpp"
#include "rabical/fitting.hpp"

using namespace rabical;

namespace {

ChannelModel paper_like() {
  return ChannelModel{qubit_preset("qubit1"), preset_profile("paper_like"), 1.0};
}

RabiTrace noisy_trace(std::size_t n, double omega) {
  RabiTrace tr;
  tr.shots = 1000;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    tr.durations_us.push_back(t);
    tr.p_values.push_back(sample_shots(
        decayed_excited_probability(omega, t, qubit_preset("qubit1")), 1000, i));
  }
  return tr;
}

}  // namespace

static void FitTrace(benchmark::State& state) {
  const RabiTrace tr = noisy_trace(static_cast<std::size_t>(state.range(0)), 40.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_rabi_frequency(tr));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(FitTrace)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

static void SimulateMap(benchmark::State& state) {
  const SweepGrid g{arithmetic_axis(0.0, 500.0, 500.0 / static_cast<double>(state.range(0) - 1)),
                    arithmetic_axis(0.0, 2.0, 0.01), 1000, 1};
  const ChannelModel ch = paper_like();
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_rabi_map(ch, g));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 201);
}
BENCHMARK(SimulateMap)->Arg(64)->Arg(251)->Unit(benchmark::kMillisecond);

static void ExtractCurve(benchmark::State& state) {
  const SweepGrid g{arithmetic_axis(0.0, 500.0, 2.0), arithmetic_axis(0.0, 2.0, 0.01), 1000, 1};
  const RabiMap map = run_rabi_map(paper_like(), g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_curve(map));
  }
}
BENCHMARK(ExtractCurve)->Unit(benchmark::kMillisecond);

static void InvertAmplitude(benchmark::State& state) {
  RabiFrequencyCurve c;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double w = 0.0;
  for (int i = 0; i < state.range(0); ++i) {
    c.amplitudes_mv.push_back(2.0 * i);
    c.omegas.push_back(w);
    c.stderrs.push_back(0.0);
    w += u(rng);
  }
  const double hi = c.omegas.back();
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(invert_amplitude(c, hi * static_cast<double>(k++ % 997) / 997.0));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(InvertAmplitude)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

static void BuildCorrection(benchmark::State& state) {
  const SweepGrid g{arithmetic_axis(0.0, 500.0, 2.0), arithmetic_axis(0.0, 2.0, 0.01), 1000, 1};
  const auto curve = extract_curve(run_rabi_map(paper_like(), g)).curve;
  const LinearModel model = fit_linear_model(curve);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_correction(curve, model, g.amplitudes_mv));
  }
}
BENCHMARK(BuildCorrection)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
