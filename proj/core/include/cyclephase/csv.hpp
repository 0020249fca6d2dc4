#pragma once

#include <string>
#include <string_view>

#include "cyclephase/events.hpp"
#include "cyclephase/timeseries.hpp"

namespace cyclephase {

// ISO-8601 ("2024-03-01T14:30:00Z", offsets and fractional seconds allowed,
// date-only means midnight) or plain epoch seconds.
TimePoint parse_timestamp(std::string_view text);

// True when the text is a bare number rather than a calendar timestamp.
bool looks_like_epoch_seconds(std::string_view text);

// Two-column `timestamp,value` file with a mandatory header row. The
// timestamp format is auto-detected from the first data row and must be
// uniform within the file. Rows must be strictly increasing in time and the
// value field must be a finite number (missing data is simply absent rows).
IrregularSeries read_signal_csv(const std::string& path, const std::string& unit);

// Single-column `onset_timestamp` file with a mandatory header row.
EventSet read_events_csv(const std::string& path);

}  // namespace cyclephase
