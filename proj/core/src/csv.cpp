#include "cyclephase/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "cyclephase/errors.hpp"

namespace cyclephase {

namespace {

[[noreturn]] void fail_at(const std::string& path, std::size_t line, const std::string& msg) {
  throw DataError(path + ":" + std::to_string(line) + ": " + msg);
}

// Days from 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool parse_uint(std::string_view text, std::size_t& pos, int digits, int& out) {
  if (pos + static_cast<std::size_t>(digits) > text.size()) return false;
  int value = 0;
  for (int i = 0; i < digits; ++i) {
    const char c = text[pos + static_cast<std::size_t>(i)];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  pos += static_cast<std::size_t>(digits);
  out = value;
  return true;
}

std::string_view trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

bool looks_like_epoch_seconds(std::string_view text) {
  text = trimmed(text);
  if (text.empty()) return false;
  double value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc() && ptr == end;
}

TimePoint parse_timestamp(std::string_view text) {
  text = trimmed(text);
  if (text.empty()) throw DataError("empty timestamp");

  if (looks_like_epoch_seconds(text)) {
    double value = 0;
    std::from_chars(text.data(), text.data() + text.size(), value);
    if (!std::isfinite(value)) throw DataError("non-finite epoch timestamp");
    return value;
  }

  // ISO-8601: YYYY-MM-DD[T hh:mm[:ss[.frac]]][Z|+hh:mm|-hh:mm]
  std::size_t pos = 0;
  int year = 0, month = 0, day = 0;
  if (!parse_uint(text, pos, 4, year) || pos >= text.size() || text[pos] != '-') {
    throw DataError("unparseable timestamp: " + std::string(text));
  }
  ++pos;
  if (!parse_uint(text, pos, 2, month) || pos >= text.size() || text[pos] != '-') {
    throw DataError("unparseable timestamp: " + std::string(text));
  }
  ++pos;
  if (!parse_uint(text, pos, 2, day)) {
    throw DataError("unparseable timestamp: " + std::string(text));
  }
  if (month < 1 || month > 12 || day < 1 || day > 31) {
    throw DataError("timestamp field out of range: " + std::string(text));
  }

  int hour = 0, minute = 0, second = 0;
  double fraction = 0;
  if (pos < text.size() && (text[pos] == 'T' || text[pos] == 't' || text[pos] == ' ')) {
    ++pos;
    if (!parse_uint(text, pos, 2, hour) || pos >= text.size() || text[pos] != ':') {
      throw DataError("unparseable timestamp: " + std::string(text));
    }
    ++pos;
    if (!parse_uint(text, pos, 2, minute)) {
      throw DataError("unparseable timestamp: " + std::string(text));
    }
    if (pos < text.size() && text[pos] == ':') {
      ++pos;
      if (!parse_uint(text, pos, 2, second)) {
        throw DataError("unparseable timestamp: " + std::string(text));
      }
      if (pos < text.size() && text[pos] == '.') {
        ++pos;
        double scale = 0.1;
        bool any = false;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
          fraction += (text[pos] - '0') * scale;
          scale *= 0.1;
          ++pos;
          any = true;
        }
        if (!any) throw DataError("unparseable timestamp: " + std::string(text));
      }
    }
    if (hour > 23 || minute > 59 || second > 60) {
      throw DataError("timestamp field out of range: " + std::string(text));
    }
  }

  double offset_seconds = 0;
  if (pos < text.size()) {
    const char c = text[pos];
    if (c == 'Z' || c == 'z') {
      ++pos;
    } else if (c == '+' || c == '-') {
      const double sign = (c == '+') ? 1.0 : -1.0;
      ++pos;
      int oh = 0, om = 0;
      if (!parse_uint(text, pos, 2, oh)) {
        throw DataError("unparseable timezone offset: " + std::string(text));
      }
      if (pos < text.size() && text[pos] == ':') ++pos;
      if (pos < text.size()) {
        if (!parse_uint(text, pos, 2, om)) {
          throw DataError("unparseable timezone offset: " + std::string(text));
        }
      }
      offset_seconds = sign * (oh * 3600.0 + om * 60.0);
    }
  }
  if (pos != text.size()) {
    throw DataError("trailing characters in timestamp: " + std::string(text));
  }

  const double civil = static_cast<double>(days_from_civil(year, static_cast<unsigned>(month),
                                                           static_cast<unsigned>(day)));
  return civil * kSecondsPerDay + hour * 3600.0 + minute * 60.0 + second + fraction -
         offset_seconds;
}

namespace {

struct CsvReader {
  std::string path;
  std::ifstream stream;
  std::size_t line_no = 0;
  bool epoch_mode = false;
  bool mode_known = false;

  explicit CsvReader(const std::string& p, const char* role) : path(p), stream(p) {
    if (!stream.is_open()) {
      throw DataError(std::string(role) + " file not found: " + p);
    }
  }

  bool next_line(std::string& line) {
    while (std::getline(stream, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trimmed(line).empty()) continue;
      return true;
    }
    return false;
  }

  TimePoint parse_time_field(std::string_view field) {
    if (!mode_known) {
      epoch_mode = looks_like_epoch_seconds(field);
      mode_known = true;
    }
    if (epoch_mode != looks_like_epoch_seconds(field)) {
      fail_at(path, line_no, "mixed timestamp formats within one file");
    }
    try {
      return parse_timestamp(field);
    } catch (const DataError& e) {
      fail_at(path, line_no, e.what());
    }
  }
};

}  // namespace

IrregularSeries read_signal_csv(const std::string& path, const std::string& unit) {
  CsvReader reader(path, "signal");
  std::string line;
  if (!reader.next_line(line)) throw DataError(path + ": empty file");
  // Header is mandatory; a parseable data row in its place is a missing header.
  {
    const auto comma = line.find(',');
    if (comma != std::string::npos) {
      const auto first = trimmed(std::string_view(line).substr(0, comma));
      if (looks_like_epoch_seconds(first) || (first.size() >= 10 && first[4] == '-')) {
        fail_at(path, reader.line_no, "missing header row");
      }
    }
  }

  std::vector<Sample> samples;
  while (reader.next_line(line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail_at(path, reader.line_no, "expected `timestamp,value`");
    if (line.find(',', comma + 1) != std::string::npos) {
      fail_at(path, reader.line_no, "expected exactly two fields");
    }
    const auto time_field = trimmed(std::string_view(line).substr(0, comma));
    const auto value_field = trimmed(std::string_view(line).substr(comma + 1));
    if (value_field.empty()) fail_at(path, reader.line_no, "empty value field");

    const TimePoint t = reader.parse_time_field(time_field);
    double value = 0;
    const auto* end = value_field.data() + value_field.size();
    auto [ptr, ec] = std::from_chars(value_field.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
      fail_at(path, reader.line_no, "unparseable value: " + std::string(value_field));
    }
    if (!samples.empty() && t <= samples.back().time) {
      fail_at(path, reader.line_no, "timestamps not strictly increasing");
    }
    samples.push_back(Sample{t, value});
  }
  if (samples.empty()) throw DataError(path + ": no data rows");
  return IrregularSeries(std::move(samples), unit);
}

EventSet read_events_csv(const std::string& path) {
  CsvReader reader(path, "events");
  std::string line;
  if (!reader.next_line(line)) throw DataError(path + ": empty file");
  {
    const auto field = trimmed(line);
    if (looks_like_epoch_seconds(field) || (field.size() >= 10 && field[4] == '-')) {
      fail_at(path, reader.line_no, "missing header row");
    }
  }

  std::vector<TimePoint> onsets;
  while (reader.next_line(line)) {
    if (line.find(',') != std::string::npos) {
      fail_at(path, reader.line_no, "expected a single `onset_timestamp` field");
    }
    const TimePoint t = reader.parse_time_field(trimmed(line));
    if (!onsets.empty() && t <= onsets.back()) {
      fail_at(path, reader.line_no, "timestamps not strictly increasing");
    }
    onsets.push_back(t);
  }
  return EventSet(std::move(onsets), "events");
}

}  // namespace cyclephase
