#include "cyclephase/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "cyclephase/errors.hpp"
#include "cyclephase/fft.hpp"

namespace cyclephase {

AnalyticSeries hilbert_analytic(std::span<const double> values, TimePoint start,
                                Duration step, const BandSpec& band) {
  if (values.empty()) throw DataError("hilbert: empty input");
  if (!(step > 0)) throw std::invalid_argument("hilbert: step must be positive");

  const std::size_t n = values.size();
  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = values[i];

  auto spectrum = fft(buf);
  // Analytic-signal spectrum: keep DC (and Nyquist for even n), double the
  // positive frequencies, zero the negative ones.
  const std::size_t half = (n + 1) / 2;
  for (std::size_t k = 1; k < half; ++k) spectrum[k] *= 2.0;
  for (std::size_t k = (n % 2 == 0) ? half + 1 : half; k < n; ++k) spectrum[k] = 0.0;
  const auto z = ifft(spectrum);

  AnalyticSeries out;
  out.start = start;
  out.step = step;
  out.band = band;
  out.phase.resize(n);
  out.amplitude.resize(n);
  double max_amp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double amp = std::abs(z[i]);
    out.amplitude[i] = amp;
    out.phase[i] = amp == 0.0 ? 0.0 : std::atan2(z[i].imag(), z[i].real());
    max_amp = std::max(max_amp, amp);
  }

  out.low_confidence.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.low_confidence[i] = out.amplitude[i] <= 1e-9 * max_amp;
  }

  // Samples within half of the slowest band period of either end carry the
  // worst transform edge distortion; they are flagged but retained.
  const auto edge_span = static_cast<std::size_t>(
      std::ceil(band.high_period_days * kSecondsPerDay / 2.0 / step));
  out.edge.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < edge_span || n - 1 - i < edge_span) out.edge[i] = true;
  }
  return out;
}

}  // namespace cyclephase
