#pragma once

#include <span>
#include <vector>

#include "cyclephase/timeseries.hpp"

namespace cyclephase {

enum class Window { kHann };
enum class Detrend { kConstant, kLinear, kNone };

struct WelchParams {
  std::size_t segment_length = 1440;  // samples per averaged segment, >= 8
  double overlap_fraction = 0.5;      // in [0, 1)
  Window window = Window::kHann;
  Detrend detrend = Detrend::kConstant;
};

// One-sided spectral density. Frequencies in cycles/day, power in
// signal-units^2 per cycle/day, so the integral over frequency recovers
// the signal variance.
struct PsdEstimate {
  std::vector<double> frequencies;
  std::vector<double> power;
  WelchParams params;
};

// Averaged modified periodograms over windowed, overlapping, detrended
// sub-segments of a gap-free input.
PsdEstimate welch_psd(std::span<const double> values, Duration step,
                      const WelchParams& params);

// Same estimator, pooling sub-segment periodograms across several gap-free
// segments of one grid. Segments shorter than one Welch segment are skipped.
PsdEstimate welch_psd_segments(const RegularSeries& series,
                               const std::vector<Segment>& segments,
                               const WelchParams& params);

struct SpectralPeak {
  double period_days = 0;
  double power = 0;
};

// Maximum-power bin whose period (1/frequency) lies in
// [low_days, high_days]; ties break toward the shorter period.
SpectralPeak dominant_period(const PsdEstimate& psd, double low_days, double high_days);

}  // namespace cyclephase
