#include "cyclephase/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "cyclephase/errors.hpp"

namespace cyclephase {

IrregularSeries::IrregularSeries(std::vector<Sample> samples, std::string unit)
    : samples_(std::move(samples)), unit_(std::move(unit)) {
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i].value) || !std::isfinite(samples_[i].time)) {
      throw DataError("irregular series: non-finite sample at index " + std::to_string(i));
    }
    if (i > 0 && samples_[i].time <= samples_[i - 1].time) {
      throw DataError("irregular series: timestamps not strictly increasing at index " +
                      std::to_string(i));
    }
  }
}

RegularSeries::RegularSeries(TimePoint start, Duration step,
                             std::vector<std::optional<double>> values, std::string unit)
    : start_(start), step_(step), values_(std::move(values)), unit_(std::move(unit)) {
  if (!(step_ > 0)) throw DataError("regular series: step must be positive");
  if (values_.empty()) throw DataError("regular series: length must be >= 1");
  for (const auto& v : values_) {
    if (v && !std::isfinite(*v)) throw DataError("regular series: non-finite value");
  }
}

std::size_t RegularSeries::present_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](const auto& v) { return v.has_value(); }));
}

RegularSeries resample_to_grid(const IrregularSeries& input, Duration step,
                               Aggregator aggregator) {
  if (input.empty()) throw DataError("resample: no samples");
  if (!(step > 0)) throw std::invalid_argument("resample: step must be positive");

  const TimePoint first = input.samples().front().time;
  const TimePoint last = input.samples().back().time;
  const TimePoint start = std::floor(first / step) * step;
  const auto bins = static_cast<std::size_t>(std::floor((last - start) / step)) + 1;

  std::vector<std::vector<double>> bucket(bins);
  for (const auto& s : input.samples()) {
    auto idx = static_cast<std::size_t>(std::floor((s.time - start) / step));
    if (idx >= bins) idx = bins - 1;  // guards the rounding edge on the last sample
    bucket[idx].push_back(s.value);
  }

  std::vector<std::optional<double>> values(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    auto& b = bucket[i];
    if (b.empty()) continue;
    if (aggregator == Aggregator::kMean) {
      double sum = 0;
      for (double v : b) sum += v;
      values[i] = sum / static_cast<double>(b.size());
    } else {
      std::sort(b.begin(), b.end());
      const std::size_t m = b.size() / 2;
      values[i] = (b.size() % 2 == 1) ? b[m] : 0.5 * (b[m - 1] + b[m]);
    }
  }
  return RegularSeries(start, step, std::move(values), input.unit());
}

RegularSeries interpolate_gaps(const RegularSeries& series, std::size_t max_gap) {
  auto values = series.values();
  const std::size_t n = values.size();
  std::size_t i = 0;
  while (i < n) {
    if (values[i].has_value()) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && !values[j].has_value()) ++j;
    const std::size_t run = j - i;
    // Interior runs only: no extrapolation across the series boundary.
    if (i > 0 && j < n && run <= max_gap) {
      const double left = *values[i - 1];
      const double right = *values[j];
      const double span = static_cast<double>(j - (i - 1));
      for (std::size_t k = i; k < j; ++k) {
        values[k] = left + (right - left) * static_cast<double>(k - (i - 1)) / span;
      }
    }
    i = j;
  }
  return RegularSeries(series.start(), series.step(), std::move(values), series.unit());
}

RegularSeries zscore(const RegularSeries& series) {
  double sum = 0;
  std::size_t m = 0;
  for (const auto& v : series.values()) {
    if (v) {
      sum += *v;
      ++m;
    }
  }
  if (m < 2) throw DataError("zscore: fewer than 2 present values");
  const double mean = sum / static_cast<double>(m);
  double ss = 0;
  for (const auto& v : series.values()) {
    if (v) ss += (*v - mean) * (*v - mean);
  }
  const double sd = std::sqrt(ss / static_cast<double>(m));  // population sd
  if (sd == 0.0) throw NumericError("zscore: constant signal");

  auto values = series.values();
  for (auto& v : values) {
    if (v) v = (*v - mean) / sd;
  }
  return RegularSeries(series.start(), series.step(), std::move(values), "z-score");
}

RegularSeries shift_daily(const RegularSeries& series, int shift_days) {
  if (std::abs(series.step() - kSecondsPerDay) > 1e-6) {
    throw std::invalid_argument("shift_daily: series must be on a daily grid");
  }
  const auto n = static_cast<std::ptrdiff_t>(series.size());
  std::vector<std::optional<double>> values(series.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t src = i - shift_days;
    if (src >= 0 && src < n) values[static_cast<std::size_t>(i)] = series.values()[static_cast<std::size_t>(src)];
  }
  return RegularSeries(series.start(), series.step(), std::move(values), series.unit());
}

std::vector<Segment> contiguous_segments(const RegularSeries& series) {
  std::vector<Segment> segments;
  const auto& values = series.values();
  std::size_t i = 0;
  while (i < values.size()) {
    if (!values[i].has_value()) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < values.size() && values[j].has_value()) ++j;
    segments.push_back(Segment{i, j - i});
    i = j;
  }
  return segments;
}

std::vector<double> segment_values(const RegularSeries& series, const Segment& segment) {
  std::vector<double> out;
  out.reserve(segment.length);
  for (std::size_t i = 0; i < segment.length; ++i) {
    const auto& v = series.values().at(segment.start_index + i);
    if (!v) throw std::invalid_argument("segment_values: segment covers a missing sample");
    out.push_back(*v);
  }
  return out;
}

TimePoint segment_start_time(const RegularSeries& series, const Segment& segment) {
  return series.time_at(segment.start_index);
}

Duration segment_duration(const RegularSeries& series, const Segment& segment) {
  return static_cast<double>(segment.length) * series.step();
}

}  // namespace cyclephase
