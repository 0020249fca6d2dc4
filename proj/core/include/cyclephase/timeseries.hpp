#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace cyclephase {

// Timestamps are seconds since the Unix epoch, UTC. Durations are seconds.
using TimePoint = double;
using Duration = double;

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kSecondsPerHour = 3600.0;

struct Sample {
  TimePoint time = 0;
  double value = 0;
};

// Irregularly sampled signal as it comes off a device: strictly increasing
// timestamps, finite values.
class IrregularSeries {
 public:
  IrregularSeries() = default;
  IrregularSeries(std::vector<Sample> samples, std::string unit);

  const std::vector<Sample>& samples() const { return samples_; }
  const std::string& unit() const { return unit_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

 private:
  std::vector<Sample> samples_;
  std::string unit_;
};

// Uniform grid with explicit missingness. Index i lies exactly at
// start + i * step.
class RegularSeries {
 public:
  RegularSeries(TimePoint start, Duration step,
                std::vector<std::optional<double>> values, std::string unit);

  TimePoint start() const { return start_; }
  Duration step() const { return step_; }
  TimePoint time_at(std::size_t i) const { return start_ + static_cast<double>(i) * step_; }
  const std::vector<std::optional<double>>& values() const { return values_; }
  const std::string& unit() const { return unit_; }
  std::size_t size() const { return values_.size(); }
  std::size_t present_count() const;

 private:
  TimePoint start_;
  Duration step_;
  std::vector<std::optional<double>> values_;
  std::string unit_;
};

// Maximal run of consecutive present samples, by index into the parent grid.
struct Segment {
  std::size_t start_index = 0;
  std::size_t length = 0;
};

enum class Aggregator { kMean, kMedian };

// Bins samples into [t, t + step) intervals on a grid whose origin is the
// first timestamp truncated down to a whole step boundary. Empty bins are
// missing.
RegularSeries resample_to_grid(const IrregularSeries& input, Duration step,
                               Aggregator aggregator = Aggregator::kMean);

// Linear interpolation across interior gaps of at most max_gap samples.
// Gaps touching either boundary are left missing (no extrapolation).
RegularSeries interpolate_gaps(const RegularSeries& series, std::size_t max_gap);

// (v - mean) / sd with one mean and one population sd computed over all
// present values of the full series. Missing samples stay missing.
RegularSeries zscore(const RegularSeries& series);

// Moves the value for day d to day d + shift_days on a daily grid. Vacated
// slots become missing; values shifted past the end are dropped.
RegularSeries shift_daily(const RegularSeries& series, int shift_days);

// Maximal contiguous runs of present values, in temporal order.
std::vector<Segment> contiguous_segments(const RegularSeries& series);

std::vector<double> segment_values(const RegularSeries& series, const Segment& segment);
TimePoint segment_start_time(const RegularSeries& series, const Segment& segment);
// Coverage duration: length * step.
Duration segment_duration(const RegularSeries& series, const Segment& segment);

}  // namespace cyclephase
