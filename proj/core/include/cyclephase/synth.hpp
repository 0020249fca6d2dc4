#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cyclephase/analytic.hpp"
#include "cyclephase/events.hpp"
#include "cyclephase/timeseries.hpp"

namespace cyclephase {

struct SynthComponent {
  double period_days = 1.0;
  double amplitude = 1.0;
  double initial_phase = 0.0;  // radians
};

struct MissingSpan {
  double start_day = 0;
  double length_hours = 0;
};

// Ground-truth generator configuration. Everything downstream of `seed` is
// deterministic, so runs are reproducible bit for bit.
struct SynthConfig {
  double duration_days = 176.0;
  Duration step = 3600.0;
  std::vector<SynthComponent> components;
  double noise_sd = 0.0;
  std::vector<MissingSpan> missing;
  std::size_t event_count = 0;
  std::optional<std::size_t> lock_component;  // index into components
  double vonmises_mu = 0.0;
  double vonmises_kappa = 0.0;
  double sleep_noise_sd = 0.0;  // > 0 adds a daily pure-noise sleep channel
  std::uint64_t seed = 1;
};

// Sum of sinusoids plus Gaussian noise on the grid, with the configured spans
// marked missing. Grid starts at epoch 0.
RegularSeries gen_series(const SynthConfig& config);

// Exact instantaneous phase of one configured component on the given grid;
// the oracle phase that event locking is generated against.
AnalyticSeries component_phase(const SynthConfig& config,
                               std::size_t component_index,
                               const RegularSeries& grid);

// Event times drawn by rejection sampling on the covered grid samples so the
// event phases follow von Mises(mu, kappa) against `truth_phase`. kappa = 0
// degenerates to uniform-in-time over covered samples.
EventSet gen_locked_events(const SynthConfig& config,
                           const AnalyticSeries& truth_phase,
                           const RegularSeries& coverage);

// Daily pure-noise sleep scores spanning the configured duration.
RegularSeries gen_sleep_series(const SynthConfig& config);

SynthConfig synth_config_from_json(const std::string& json_text);
std::string synth_config_to_json(const SynthConfig& config);

}  // namespace cyclephase
