#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "cyclephase/analytic.hpp"
#include "cyclephase/circstats.hpp"
#include "cyclephase/filtering.hpp"
#include "cyclephase/report.hpp"
#include "cyclephase/spectral.hpp"
#include "cyclephase/synth.hpp"

using namespace cyclephase;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> hourly_signal(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::cos(2.0 * kPi * i / 24.0) + 0.3 * std::sin(2.0 * kPi * i / 480.0);
  }
  return x;
}

SynthConfig bench_config() {
  SynthConfig config;
  config.duration_days = 176;
  config.step = 3600;
  config.components = {{1.0, 1.0, 0.0}};
  config.noise_sd = 0.5;
  config.event_count = 29;
  config.lock_component = 0;
  config.vonmises_kappa = 2.0;
  config.seed = 1;
  return config;
}

void BM_DesignBandpass(benchmark::State& state) {
  const auto band = state.range(0) == 0 ? BandSpec::make(0.8, 1.2) : BandSpec::make(14, 28);
  for (auto _ : state) {
    benchmark::DoNotOptimize(design_bandpass(band, 3600.0, 2));
  }
}
BENCHMARK(BM_DesignBandpass)->Arg(0)->Arg(1);

void BM_Filtfilt(benchmark::State& state) {
  const auto coeffs = design_bandpass(BandSpec::make(0.8, 1.2), 3600.0, 2);
  const auto x = hourly_signal(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(filtfilt(coeffs, x));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Filtfilt)->Arg(1024)->Arg(4224);

void BM_WelchPsd(benchmark::State& state) {
  const auto x = hourly_signal(4224);
  const WelchParams params{1440, 0.5, Window::kHann, Detrend::kConstant};
  for (auto _ : state) {
    benchmark::DoNotOptimize(welch_psd(x, 3600.0, params));
  }
}
BENCHMARK(BM_WelchPsd);

void BM_HilbertAnalytic(benchmark::State& state) {
  const auto x = hourly_signal(static_cast<std::size_t>(state.range(0)));
  const auto band = BandSpec::make(0.8, 1.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hilbert_analytic(x, 0.0, 3600.0, band));
  }
}
BENCHMARK(BM_HilbertAnalytic)->Arg(1024)->Arg(4224)->Arg(4231);  // prime-ish length included

void BM_RayleighMonteCarlo(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        rayleigh_test_montecarlo(29, 0.35, static_cast<std::uint64_t>(state.range(0)), 7));
  }
}
BENCHMARK(BM_RayleighMonteCarlo)->Arg(10000)->Arg(100000);

void BM_BandScan(benchmark::State& state) {
  const auto config = bench_config();
  const auto series = gen_series(config);
  const auto truth = component_phase(config, 0, series);
  const auto events = gen_locked_events(config, truth, series);
  const auto bands = default_bands();
  for (auto _ : state) {
    benchmark::DoNotOptimize(band_scan(series, events, bands));
  }
}
BENCHMARK(BM_BandScan);

}  // namespace

int main(int argc, char** argv) {
  ::benchmark::Initialize(&argc, argv);
  if (::benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  ::benchmark::RunSpecifiedBenchmarks();
  ::benchmark::Shutdown();
  return 0;
}
