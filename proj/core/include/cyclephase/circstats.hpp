#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cyclephase/events.hpp"
#include "cyclephase/filtering.hpp"
#include "cyclephase/timeseries.hpp"

namespace cyclephase {

// R = |sum exp(i phi_k)| / n, in [0, 1].
double resultant_length(std::span<const double> phases);

// arg(sum exp(i phi_k)) in [-pi, pi]; undefined (throws) when R ~ 0.
double circular_mean(std::span<const double> phases);

// Rayleigh test of circular uniformity. Fourth-order corrected tail
// approximation of exp(-Z), Z = n R^2; result clamped to (0, 1]. n >= 3.
double rayleigh_test(std::size_t n, double resultant);

// Independent check of the analytic tail: fraction of `draws` uniform-phase
// samples of size n whose R reaches the observed one, smoothed as
// (count + 1) / (draws + 1). draws >= 10^4.
double rayleigh_test_montecarlo(std::size_t n, double resultant,
                                std::uint64_t draws, std::uint64_t seed);

// Benjamini-Hochberg step-up adjusted p-values, returned in input order.
std::vector<double> bh_fdr(const std::vector<double>& p_values);

// Phase-locking statistics for one band. Statistical fields are absent when
// they are undefined: no p with fewer than 3 mapped events, no mean when
// R ~ 0, no R with zero events.
struct BandResult {
  BandSpec band;
  std::size_t n = 0;
  std::optional<double> resultant;      // R
  std::optional<double> mean_phase;     // radians
  std::optional<double> rayleigh_p;
  std::optional<double> fdr_adjusted_p;
  std::size_t n_edge_flagged = 0;
};

// Per-band artifacts kept alongside the statistics for reporting.
struct BandOutcome {
  BandResult stats;
  std::vector<PhaseSample> phases;
  std::vector<TimePoint> excluded;
  std::vector<AnalyticSeries> analytic;
};

struct BandScanConfig {
  int filter_order = 2;
  // Maximum event-to-sample distance; <= 0 means step / 2.
  Duration mapping_tolerance = 0;
};

// Full per-band pipeline: eligible segments -> mean removal -> zero-phase
// bandpass -> analytic signal -> event phase mapping -> R / mean / Rayleigh p,
// then BH-FDR across the bands that produced a p. Results follow input band
// order. A band with no mapped events is a result with n = 0, not a failure.
std::vector<BandOutcome> band_scan(const RegularSeries& series,
                                   const EventSet& events,
                                   const std::vector<BandSpec>& bands,
                                   const BandScanConfig& config = {});

}  // namespace cyclephase
