#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "cyclephase/timeseries.hpp"

namespace cyclephase {

// Oscillation period band in days; low_period < high_period. The low edge is
// the fastest component of the band, the high edge the slowest.
struct BandSpec {
  double low_period_days = 0;
  double high_period_days = 0;
  std::string label;

  static BandSpec make(double low_period_days, double high_period_days,
                       std::string label = {});
};

struct Biquad {
  double b0, b1, b2;  // numerator
  double a1, a2;      // denominator (a0 == 1)
};

// Digital Butterworth bandpass. Filtering runs on the second-order sections;
// the expanded numerator/denominator polynomials are kept for inspection and
// tests only (they are ill-conditioned for narrow bands).
struct IirCoefficients {
  std::vector<double> numerator;              // b, expanded
  std::vector<double> denominator;            // a, expanded, a[0] == 1
  std::vector<Biquad> sections;               // cascade order
  std::vector<std::complex<double>> poles;    // digital poles
  int order = 0;                              // analog prototype order per pass
  BandSpec band;
  Duration sample_step = 0;
};

// Analog lowpass prototype -> bandpass transform -> bilinear transform with
// frequency pre-warping. -3 dB corners land at 1/high_period and 1/low_period.
IirCoefficients design_bandpass(const BandSpec& band, Duration sample_step,
                                int order = 2);

// Zero-phase forward-backward filtering with odd-reflection padding of
// 3 * (2 * order) samples at each end. Output length equals input length.
std::vector<double> filtfilt(const IirCoefficients& coeffs,
                             std::span<const double> values);

// |H(e^{i w})| of a single pass at the given frequency in cycles/day.
double magnitude_response(const IirCoefficients& coeffs, double freq_cpd);

// Keeps segments whose coverage duration is at least three periods of the
// slowest band component.
std::vector<Segment> eligible_segments(const std::vector<Segment>& segments,
                                       const BandSpec& band, Duration step);

}  // namespace cyclephase
