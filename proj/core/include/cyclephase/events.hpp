#pragma once

#include <string>
#include <vector>

#include "cyclephase/analytic.hpp"
#include "cyclephase/timeseries.hpp"

namespace cyclephase {

// Discrete event onsets with strictly increasing timestamps.
class EventSet {
 public:
  EventSet() = default;
  EventSet(std::vector<TimePoint> onsets, std::string label);

  const std::vector<TimePoint>& onsets() const { return onsets_; }
  const std::string& label() const { return label_; }
  std::size_t size() const { return onsets_.size(); }
  bool empty() const { return onsets_.empty(); }

 private:
  std::vector<TimePoint> onsets_;
  std::string label_;
};

// One event mapped onto a band-limited phase estimate.
struct PhaseSample {
  TimePoint event_time = 0;
  double phase = 0;
  double amplitude = 0;
  BandSpec band;
  Duration sample_offset = 0;  // event time minus matched sample time
  bool edge_flagged = false;
};

struct PhaseMapping {
  std::vector<PhaseSample> mapped;
  std::vector<TimePoint> excluded;
};

// Matches each event to the nearest sample across all analytic segments.
// Events farther than `tolerance` from every sample are excluded (a result,
// not an error); mapped + excluded partitions the event set. Equidistant
// candidates resolve to the earlier sample.
PhaseMapping map_events_to_phase(const EventSet& events,
                                 const std::vector<AnalyticSeries>& analytic,
                                 Duration tolerance);

}  // namespace cyclephase
