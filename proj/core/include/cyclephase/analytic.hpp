#pragma once

#include <span>
#include <vector>

#include "cyclephase/filtering.hpp"
#include "cyclephase/timeseries.hpp"

namespace cyclephase {

// Instantaneous phase and amplitude of one band-limited segment, on the same
// grid as the source values. phase in [-pi, pi], amplitude >= 0.
struct AnalyticSeries {
  TimePoint start = 0;
  Duration step = 0;
  std::vector<double> phase;
  std::vector<double> amplitude;
  // Within half of the slowest band period of either segment end.
  std::vector<bool> edge;
  // Amplitude at or below 1e-9 of the segment's peak amplitude; the phase of
  // an exactly zero sample is 0 by convention.
  std::vector<bool> low_confidence;
  BandSpec band;

  std::size_t size() const { return phase.size(); }
  TimePoint time_at(std::size_t i) const { return start + static_cast<double>(i) * step; }
};

// Analytic signal via the frequency-domain construction: zero the negative
// frequencies, double the positive ones, keep DC and Nyquist. The input must
// already be band-limited and gap-free.
AnalyticSeries hilbert_analytic(std::span<const double> values, TimePoint start,
                                Duration step, const BandSpec& band);

}  // namespace cyclephase
