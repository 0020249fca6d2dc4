#include "cyclephase/events.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "cyclephase/errors.hpp"

namespace cyclephase {

EventSet::EventSet(std::vector<TimePoint> onsets, std::string label)
    : onsets_(std::move(onsets)), label_(std::move(label)) {
  for (std::size_t i = 0; i < onsets_.size(); ++i) {
    if (!std::isfinite(onsets_[i])) throw DataError("event set: non-finite onset");
    if (i > 0 && onsets_[i] <= onsets_[i - 1]) {
      throw DataError("event set: onsets not strictly increasing at index " + std::to_string(i));
    }
  }
}

PhaseMapping map_events_to_phase(const EventSet& events,
                                 const std::vector<AnalyticSeries>& analytic,
                                 Duration tolerance) {
  if (tolerance < 0) throw std::invalid_argument("map_events_to_phase: negative tolerance");

  PhaseMapping result;
  for (const TimePoint event : events.onsets()) {
    bool found = false;
    double best_dist = 0;
    TimePoint best_time = 0;
    const AnalyticSeries* best_series = nullptr;
    std::size_t best_index = 0;

    for (const auto& series : analytic) {
      if (series.size() == 0) continue;
      const double raw = (event - series.start) / series.step;
      const auto last = static_cast<double>(series.size() - 1);
      // Both neighbours of the fractional index, clamped into range, so an
      // exact midpoint can resolve toward the earlier sample.
      const double lo = std::clamp(std::floor(raw), 0.0, last);
      const double hi = std::clamp(std::ceil(raw), 0.0, last);
      for (const double cand : {lo, hi}) {
        const auto idx = static_cast<std::size_t>(cand);
        const TimePoint t = series.time_at(idx);
        const double dist = std::abs(event - t);
        const bool better =
            !found || dist < best_dist || (dist == best_dist && t < best_time);
        if (better) {
          found = true;
          best_dist = dist;
          best_time = t;
          best_series = &series;
          best_index = idx;
        }
      }
    }

    if (found && best_dist <= tolerance) {
      result.mapped.push_back(PhaseSample{
          event,
          best_series->phase[best_index],
          best_series->amplitude[best_index],
          best_series->band,
          event - best_time,
          best_series->edge[best_index],
      });
    } else {
      result.excluded.push_back(event);
    }
  }
  return result;
}

}  // namespace cyclephase
