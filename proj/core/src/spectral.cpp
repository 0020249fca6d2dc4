#include "cyclephase/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "cyclephase/errors.hpp"
#include "cyclephase/fft.hpp"

namespace cyclephase {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate(const WelchParams& params) {
  if (params.segment_length < 8) {
    throw std::invalid_argument("welch: segment_length must be >= 8");
  }
  if (!(params.overlap_fraction >= 0.0 && params.overlap_fraction < 1.0)) {
    throw std::invalid_argument("welch: overlap_fraction must be in [0, 1)");
  }
}

// Periodic Hann window.
std::vector<double> hann_window(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t k = 0; k < length; ++k) {
    w[k] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(k) / static_cast<double>(length));
  }
  return w;
}

void detrend_in_place(std::vector<double>& x, Detrend mode) {
  const auto n = static_cast<double>(x.size());
  if (mode == Detrend::kNone || x.empty()) return;
  if (mode == Detrend::kConstant) {
    double mean = 0;
    for (double v : x) mean += v;
    mean /= n;
    for (double& v : x) v -= mean;
    return;
  }
  // Least-squares line over sample index.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto xi = static_cast<double>(i);
    sx += xi;
    sy += x[i];
    sxx += xi * xi;
    sxy += xi * x[i];
  }
  const double denom = n * sxx - sx * sx;
  const double slope = denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;
  const double intercept = (sy - slope * sx) / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] -= intercept + slope * static_cast<double>(i);
  }
}

struct Accumulator {
  std::vector<double> power;
  std::size_t count = 0;
};

// Adds the modified periodograms of every full sub-segment of `values`.
void accumulate_segment(std::span<const double> values, const WelchParams& params,
                        const std::vector<double>& window, double window_ss,
                        double fs_cpd, Accumulator& acc) {
  const std::size_t seg_len = params.segment_length;
  if (values.size() < seg_len) return;
  auto hop = static_cast<std::size_t>(
      std::floor(static_cast<double>(seg_len) * (1.0 - params.overlap_fraction)));
  hop = std::max<std::size_t>(hop, 1);

  const std::size_t n_bins = seg_len / 2 + 1;
  if (acc.power.empty()) acc.power.assign(n_bins, 0.0);

  std::vector<double> buf(seg_len);
  for (std::size_t offset = 0; offset + seg_len <= values.size(); offset += hop) {
    std::copy(values.begin() + static_cast<std::ptrdiff_t>(offset),
              values.begin() + static_cast<std::ptrdiff_t>(offset + seg_len), buf.begin());
    detrend_in_place(buf, params.detrend);
    for (std::size_t k = 0; k < seg_len; ++k) buf[k] *= window[k];

    const auto spectrum = rfft(buf);
    // Density scaling: |X|^2 / (fs * sum w^2), one-sided (interior doubled).
    const double scale = 1.0 / (fs_cpd * window_ss);
    for (std::size_t k = 0; k < n_bins; ++k) {
      double p = std::norm(spectrum[k]) * scale;
      const bool interior = k != 0 && !(seg_len % 2 == 0 && k == n_bins - 1);
      if (interior) p *= 2.0;
      acc.power[k] += p;
    }
    ++acc.count;
  }
}

PsdEstimate finalize(Accumulator& acc, const WelchParams& params, double fs_cpd) {
  if (acc.count == 0) {
    throw DataError("welch: no segment long enough for the requested segment_length");
  }
  const std::size_t seg_len = params.segment_length;
  PsdEstimate psd;
  psd.params = params;
  psd.frequencies.resize(acc.power.size());
  psd.power.resize(acc.power.size());
  for (std::size_t k = 0; k < acc.power.size(); ++k) {
    psd.frequencies[k] = static_cast<double>(k) * fs_cpd / static_cast<double>(seg_len);
    psd.power[k] = acc.power[k] / static_cast<double>(acc.count);
  }
  return psd;
}

}  // namespace

PsdEstimate welch_psd(std::span<const double> values, Duration step,
                      const WelchParams& params) {
  validate(params);
  if (!(step > 0)) throw std::invalid_argument("welch: step must be positive");
  if (values.size() < params.segment_length) {
    throw DataError("welch: input shorter than one segment");
  }
  const double fs_cpd = kSecondsPerDay / step;
  const auto window = hann_window(params.segment_length);
  double window_ss = 0;
  for (double w : window) window_ss += w * w;

  Accumulator acc;
  accumulate_segment(values, params, window, window_ss, fs_cpd, acc);
  return finalize(acc, params, fs_cpd);
}

PsdEstimate welch_psd_segments(const RegularSeries& series,
                               const std::vector<Segment>& segments,
                               const WelchParams& params) {
  validate(params);
  const double fs_cpd = kSecondsPerDay / series.step();
  const auto window = hann_window(params.segment_length);
  double window_ss = 0;
  for (double w : window) window_ss += w * w;

  Accumulator acc;
  for (const auto& seg : segments) {
    const auto vals = segment_values(series, seg);
    accumulate_segment(vals, params, window, window_ss, fs_cpd, acc);
  }
  return finalize(acc, params, fs_cpd);
}

SpectralPeak dominant_period(const PsdEstimate& psd, double low_days, double high_days) {
  if (!(low_days > 0) || !(high_days > low_days)) {
    throw std::invalid_argument("dominant_period: invalid period range");
  }
  bool found = false;
  SpectralPeak best;
  for (std::size_t k = 0; k < psd.frequencies.size(); ++k) {
    const double f = psd.frequencies[k];
    if (f <= 0) continue;
    const double period = 1.0 / f;
    if (period < low_days || period > high_days) continue;
    // Ties break toward the shorter period (higher frequency).
    if (!found || psd.power[k] > best.power ||
        (psd.power[k] == best.power && period < best.period_days)) {
      best = SpectralPeak{period, psd.power[k]};
      found = true;
    }
  }
  if (!found) throw DataError("dominant_period: no frequency bin inside the period range");
  return best;
}

}  // namespace cyclephase
