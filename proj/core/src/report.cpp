#include "cyclephase/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cyclephase/csv.hpp"
#include "cyclephase/errors.hpp"
#include "cyclephase/version.hpp"

namespace cyclephase {

namespace {

constexpr double kPi = 3.14159265358979323846;

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

std::string fmt_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return std::string(buf);
}

std::string sanitize_label(const std::string& label) {
  std::string out;
  out.reserve(label.size());
  for (char c : label) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
    out.push_back(ok ? c : '_');
  }
  return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out.is_open()) throw DataError("cannot write output file: " + path.string());
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
}

const char* detrend_name(Detrend d) {
  switch (d) {
    case Detrend::kConstant: return "constant";
    case Detrend::kLinear: return "linear";
    case Detrend::kNone: return "none";
  }
  return "constant";
}

Detrend detrend_from_name(const std::string& name) {
  if (name == "constant") return Detrend::kConstant;
  if (name == "linear") return Detrend::kLinear;
  if (name == "none") return Detrend::kNone;
  throw DataError("unknown detrend mode: " + name);
}

json band_to_json(const BandSpec& band) {
  return json{{"low_period_days", band.low_period_days},
              {"high_period_days", band.high_period_days},
              {"label", band.label}};
}

BandSpec band_from_json(const json& j) {
  return BandSpec::make(j.at("low_period_days").get<double>(),
                        j.at("high_period_days").get<double>(),
                        j.value("label", std::string{}));
}

json optional_to_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

}  // namespace

std::vector<BandSpec> default_bands() {
  return {
      BandSpec::make(0.8, 1.2, "0.8-1.2"), BandSpec::make(2, 5, "2-5"),
      BandSpec::make(3, 7, "3-7"),         BandSpec::make(5, 9, "5-9"),
      BandSpec::make(7, 14, "7-14"),       BandSpec::make(10, 20, "10-20"),
      BandSpec::make(14, 28, "14-28"),
  };
}

std::vector<BandSpec> parse_bands(const std::string& text) {
  std::vector<BandSpec> bands;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw DataError("band must be `low:high` in days, got: " + item);
    }
    try {
      const double lo = std::stod(item.substr(0, colon));
      const double hi = std::stod(item.substr(colon + 1));
      bands.push_back(BandSpec::make(lo, hi));
    } catch (const std::invalid_argument&) {
      throw DataError("unparseable band: " + item);
    }
  }
  if (bands.empty()) throw DataError("no bands given");
  return bands;
}

std::string run_config_to_json(const RunConfig& config) {
  json j;
  j["ibi_path"] = config.ibi_path;
  j["events_path"] = config.events_path;
  j["sleep_path"] = config.sleep_path;
  j["timezone_offset_minutes"] = config.timezone_offset_minutes;
  j["step_minutes"] = config.step_minutes;
  j["ibi_max_gap_hours"] = config.ibi_max_gap_hours;
  j["sleep_max_gap_days"] = config.sleep_max_gap_days;
  j["bands"] = json::array();
  for (const auto& b : config.bands) j["bands"].push_back(band_to_json(b));
  j["welch"] = json{{"segment_length", config.welch_segment_length},
                    {"overlap_fraction", config.welch_overlap},
                    {"window", "hann"},
                    {"detrend", detrend_name(config.welch_detrend)}};
  j["filter_order"] = config.filter_order;
  j["mapping_tolerance_minutes"] = config.mapping_tolerance_minutes;
  j["rose_bins"] = config.rose_bins;
  j["seed"] = config.seed;
  j["output_dir"] = config.output_dir;
  return j.dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("config: invalid JSON: ") + e.what());
  }
  // A run manifest embeds the configuration under "config".
  if (j.contains("config")) j = j.at("config");

  RunConfig config;
  try {
    config.ibi_path = j.value("ibi_path", config.ibi_path);
    config.events_path = j.value("events_path", config.events_path);
    config.sleep_path = j.value("sleep_path", config.sleep_path);
    config.timezone_offset_minutes = j.value("timezone_offset_minutes", config.timezone_offset_minutes);
    config.step_minutes = j.value("step_minutes", config.step_minutes);
    config.ibi_max_gap_hours = j.value("ibi_max_gap_hours", config.ibi_max_gap_hours);
    config.sleep_max_gap_days = j.value("sleep_max_gap_days", config.sleep_max_gap_days);
    if (j.contains("bands")) {
      config.bands.clear();
      for (const auto& b : j.at("bands")) config.bands.push_back(band_from_json(b));
    }
    if (j.contains("welch")) {
      const auto& w = j.at("welch");
      config.welch_segment_length = w.value("segment_length", config.welch_segment_length);
      config.welch_overlap = w.value("overlap_fraction", config.welch_overlap);
      config.welch_detrend = detrend_from_name(w.value("detrend", std::string(detrend_name(config.welch_detrend))));
    }
    config.filter_order = j.value("filter_order", config.filter_order);
    config.mapping_tolerance_minutes = j.value("mapping_tolerance_minutes", config.mapping_tolerance_minutes);
    config.rose_bins = j.value("rose_bins", config.rose_bins);
    config.seed = j.value("seed", config.seed);
    config.output_dir = j.value("output_dir", config.output_dir);
  } catch (const json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  return config;
}

PreparedData prepare_inputs(const RunConfig& config) {
  if (config.ibi_path.empty()) throw DataError("ibi file not specified");
  if (config.step_minutes <= 0) throw DataError("step_minutes must be positive");

  const Duration step = config.step_minutes * 60.0;
  const auto ibi_raw = read_signal_csv(config.ibi_path, "ibi");
  const auto gridded = resample_to_grid(ibi_raw, step, Aggregator::kMean);
  const auto max_gap = static_cast<std::size_t>(
      std::llround(config.ibi_max_gap_hours * kSecondsPerHour / step));
  auto ibi = zscore(interpolate_gaps(gridded, max_gap));

  EventSet events;
  if (!config.events_path.empty()) events = read_events_csv(config.events_path);

  std::optional<RegularSeries> sleep;
  if (!config.sleep_path.empty()) {
    const auto sleep_raw = read_signal_csv(config.sleep_path, "sleep");
    // Bin nights into local calendar days: shift into local time, bin on day
    // boundaries, then move the grid origin back to UTC.
    const double tz = config.timezone_offset_minutes * 60.0;
    std::vector<Sample> local;
    local.reserve(sleep_raw.size());
    for (const auto& s : sleep_raw.samples()) local.push_back(Sample{s.time + tz, s.value});
    const auto daily_local =
        resample_to_grid(IrregularSeries(std::move(local), sleep_raw.unit()), kSecondsPerDay);
    RegularSeries daily(daily_local.start() - tz, daily_local.step(), daily_local.values(),
                        daily_local.unit());
    const auto filled = interpolate_gaps(daily, static_cast<std::size_t>(config.sleep_max_gap_days));
    // Night N predicts day N+1.
    sleep = zscore(shift_daily(filled, 1));
  }

  return PreparedData{std::move(ibi), std::move(events), std::move(sleep)};
}

std::vector<std::size_t> rose_histogram(std::span<const double> phases, int bins) {
  if (bins < 1) throw std::invalid_argument("rose_histogram: bins must be >= 1");
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  const double width = 2.0 * kPi / bins;
  for (double phi : phases) {
    double w = std::fmod(phi + kPi, 2.0 * kPi);
    if (w < 0) w += 2.0 * kPi;
    auto idx = static_cast<std::size_t>(w / width);
    if (idx >= counts.size()) idx = counts.size() - 1;  // phi == +pi wraps to the last edge
    ++counts[idx];
  }
  return counts;
}

std::string emit_rose_svg(const std::vector<std::size_t>& counts, double mean_phase,
                          double resultant) {
  if (counts.size() < 4) throw std::invalid_argument("emit_rose_svg: need at least 4 bins");
  const double size = 420.0;
  const double cx = size / 2.0;
  const double cy = size / 2.0;
  const double rmax = 170.0;
  const std::size_t max_count = *std::max_element(counts.begin(), counts.end());

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
  svg << "  <g fill=\"none\" stroke=\"#cccccc\">\n";
  for (int ring = 1; ring <= 4; ++ring) {
    svg << "    <circle cx=\"" << fmt_coord(cx) << "\" cy=\"" << fmt_coord(cy) << "\" r=\""
        << fmt_coord(rmax * ring / 4.0) << "\"/>\n";
  }
  svg << "  </g>\n";

  auto point_x = [&](double angle, double r) { return cx + r * std::cos(angle); };
  auto point_y = [&](double angle, double r) { return cy - r * std::sin(angle); };

  const double bin_width = 2.0 * kPi / static_cast<double>(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0 || max_count == 0) continue;
    const double a0 = -kPi + static_cast<double>(i) * bin_width;
    const double a1 = a0 + bin_width;
    const double r = rmax * static_cast<double>(counts[i]) / static_cast<double>(max_count);
    svg << "  <path class=\"wedge\" fill=\"#4878a8\" fill-opacity=\"0.75\" stroke=\"#2c4a68\" d=\"M "
        << fmt_coord(cx) << " " << fmt_coord(cy) << " L " << fmt_coord(point_x(a0, r)) << " "
        << fmt_coord(point_y(a0, r)) << " A " << fmt_coord(r) << " " << fmt_coord(r)
        << " 0 0 0 " << fmt_coord(point_x(a1, r)) << " " << fmt_coord(point_y(a1, r))
        << " Z\"/>\n";
  }

  const double ar = std::clamp(resultant, 0.0, 1.0) * rmax;
  const double tip_x = point_x(mean_phase, ar);
  const double tip_y = point_y(mean_phase, ar);
  svg << "  <line class=\"mean-arrow\" stroke=\"#c03030\" stroke-width=\"3\" x1=\""
      << fmt_coord(cx) << "\" y1=\"" << fmt_coord(cy) << "\" x2=\"" << fmt_coord(tip_x)
      << "\" y2=\"" << fmt_coord(tip_y) << "\"/>\n";
  for (double side : {0.35, -0.35}) {
    svg << "  <line class=\"mean-arrow-head\" stroke=\"#c03030\" stroke-width=\"3\" x1=\""
        << fmt_coord(tip_x) << "\" y1=\"" << fmt_coord(tip_y) << "\" x2=\""
        << fmt_coord(point_x(mean_phase + kPi + side, 0.08 * rmax) + tip_x - cx) << "\" y2=\""
        << fmt_coord(point_y(mean_phase + kPi + side, 0.08 * rmax) + tip_y - cy) << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

double phase_to_clock_hours(double phase, const std::vector<AnalyticSeries>& analytic,
                            int tz_offset_minutes) {
  const double tz = tz_offset_minutes * 60.0;
  double c = 0, s = 0;
  std::size_t count = 0;
  for (const auto& series : analytic) {
    for (std::size_t i = 0; i < series.size(); ++i) {
      double local = std::fmod(series.time_at(i) + tz, kSecondsPerDay);
      if (local < 0) local += kSecondsPerDay;
      const double clock_angle = 2.0 * kPi * local / kSecondsPerDay;
      const double d = clock_angle - series.phase[i];
      c += std::cos(d);
      s += std::sin(d);
      ++count;
    }
  }
  if (count == 0) throw DataError("phase_to_clock_hours: no phase samples");
  const double offset = std::atan2(s, c);
  double angle = std::fmod(phase + offset, 2.0 * kPi);
  if (angle < 0) angle += 2.0 * kPi;
  return angle / (2.0 * kPi) * 24.0;
}

namespace {

WelchParams resolve_welch(const RunConfig& config, const RegularSeries& series,
                          const std::vector<Segment>& segments) {
  WelchParams params;
  params.overlap_fraction = config.welch_overlap;
  params.detrend = config.welch_detrend;
  params.segment_length = config.welch_segment_length;
  if (params.segment_length == 0) {
    std::size_t longest = 0;
    for (const auto& seg : segments) longest = std::max(longest, seg.length);
    const auto sixty_days =
        static_cast<std::size_t>(std::llround(60.0 * kSecondsPerDay / series.step()));
    params.segment_length = std::min(sixty_days, longest);
  }
  if (params.segment_length < 8) {
    throw DataError("welch: not enough contiguous data (resolved segment_length < 8)");
  }
  return params;
}

}  // namespace

PsdEstimate run_psd(const RunConfig& config, const PreparedData& data) {
  const auto segments = contiguous_segments(data.ibi);
  const auto params = resolve_welch(config, data.ibi, segments);
  const auto psd = welch_psd_segments(data.ibi, segments, params);

  const std::filesystem::path dir(config.output_dir);
  auto csv = open_output(dir / "psd.csv");
  csv << "period_days,frequency_cpd,power\n";
  for (std::size_t k = 0; k < psd.frequencies.size(); ++k) {
    const double f = psd.frequencies[k];
    if (f <= 0) continue;  // DC carries no period
    csv << fmt_double(1.0 / f) << "," << fmt_double(f) << "," << fmt_double(psd.power[k]) << "\n";
  }

  json sidecar;
  sidecar["segment_length"] = psd.params.segment_length;
  sidecar["overlap_fraction"] = psd.params.overlap_fraction;
  sidecar["window"] = "hann";
  sidecar["detrend"] = detrend_name(psd.params.detrend);
  sidecar["step_seconds"] = data.ibi.step();
  write_text(dir / "psd_params.json", sidecar.dump(2) + "\n");
  return psd;
}

std::vector<BandOutcome> run_bandscan(const RunConfig& config, const PreparedData& data) {
  if (config.rose_bins < 4) throw DataError("rose_bins must be >= 4");
  BandScanConfig scan;
  scan.filter_order = config.filter_order;
  scan.mapping_tolerance = config.mapping_tolerance_minutes * 60.0;
  auto outcomes = band_scan(data.ibi, data.events, config.bands, scan);

  const std::filesystem::path dir(config.output_dir);
  json report;
  report["n_events"] = data.events.size();
  report["mapping_tolerance_minutes"] =
      scan.mapping_tolerance > 0 ? scan.mapping_tolerance / 60.0 : data.ibi.step() / 120.0;
  report["filter_order"] = config.filter_order;
  report["rose_bins"] = config.rose_bins;
  report["bands"] = json::array();

  for (const auto& outcome : outcomes) {
    const auto& stats = outcome.stats;
    json entry;
    entry["band"] = band_to_json(stats.band);
    entry["n"] = stats.n;
    entry["n_excluded"] = outcome.excluded.size();
    entry["n_edge_flagged"] = stats.n_edge_flagged;
    entry["R"] = optional_to_json(stats.resultant);
    entry["circular_mean_rad"] = optional_to_json(stats.mean_phase);
    if (stats.mean_phase && !outcome.analytic.empty()) {
      entry["circular_mean_clock_hours"] =
          phase_to_clock_hours(*stats.mean_phase, outcome.analytic, config.timezone_offset_minutes);
    } else {
      entry["circular_mean_clock_hours"] = nullptr;
    }
    entry["p"] = optional_to_json(stats.rayleigh_p);
    entry["p_fdr"] = optional_to_json(stats.fdr_adjusted_p);
    report["bands"].push_back(entry);

    const std::string tag = sanitize_label(stats.band.label);
    auto phases_csv = open_output(dir / ("phases_" + tag + ".csv"));
    phases_csv << "event_time,phase_rad,amplitude,sample_offset_s,edge_flag\n";
    for (const auto& ps : outcome.phases) {
      phases_csv << fmt_double(ps.event_time) << "," << fmt_double(ps.phase) << ","
                 << fmt_double(ps.amplitude) << "," << fmt_double(ps.sample_offset) << ","
                 << (ps.edge_flagged ? 1 : 0) << "\n";
    }

    std::vector<double> phases;
    phases.reserve(outcome.phases.size());
    for (const auto& ps : outcome.phases) phases.push_back(ps.phase);
    const auto counts = rose_histogram(phases, config.rose_bins);
    auto rose_csv = open_output(dir / ("rose_" + tag + ".csv"));
    rose_csv << "bin_index,bin_start_rad,bin_end_rad,count\n";
    const double width = 2.0 * kPi / config.rose_bins;
    for (std::size_t b = 0; b < counts.size(); ++b) {
      rose_csv << b << "," << fmt_double(-kPi + b * width) << ","
               << fmt_double(-kPi + (b + 1) * width) << "," << counts[b] << "\n";
    }

    if (stats.mean_phase && stats.resultant) {
      write_text(dir / ("rose_" + tag + ".svg"),
                 emit_rose_svg(counts, *stats.mean_phase, *stats.resultant));
    }
  }

  write_text(dir / "bandscan.json", report.dump(2) + "\n");
  return outcomes;
}

namespace {

json fit_to_json(const LogisticFit& fit, const LabelledDesign& design) {
  std::size_t positives = 0;
  for (const auto& row : design.rows) positives += static_cast<std::size_t>(row.label);
  return json{{"coefficients", fit.coefficients}, {"auc", fit.auc},
              {"n_rows", design.rows.size()},     {"n_positive", positives},
              {"converged", fit.converged},       {"iterations", fit.iterations}};
}

}  // namespace

std::string run_baselines(const RunConfig& config, const PreparedData& data,
                          const std::vector<BandOutcome>& outcomes) {
  const std::filesystem::path dir(config.output_dir);
  json out;
  if (config.step_minutes != 60) {
    out["skipped"] = "baselines require an hourly grid";
  } else {
    auto fit_one = [&](PredictorKind kind, const std::vector<AnalyticSeries>& analytic,
                       const RegularSeries* sleep) -> json {
      try {
        const auto design =
            build_design(data.ibi, analytic, sleep, data.events, kind, config.timezone_offset_minutes);
        return fit_to_json(fit_logistic(design), design);
      } catch (const std::exception& e) {
        return json{{"error", e.what()}};
      }
    };
    static const std::vector<AnalyticSeries> kNoAnalytic;
    out["clock"] = fit_one(PredictorKind::kClockTime, kNoAnalytic, nullptr);
    // The first configured band is the reference band for the phase predictor.
    out["phase"] = fit_one(PredictorKind::kCircadianPhase,
                           outcomes.empty() ? kNoAnalytic : outcomes.front().analytic, nullptr);
    if (data.sleep) {
      out["sleep"] = fit_one(PredictorKind::kSleepScore, kNoAnalytic, &*data.sleep);
    }
  }
  const std::string text = out.dump(2) + "\n";
  write_text(dir / "baselines.json", text);
  return text;
}

std::string file_hash_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) throw DataError("cannot open file for hashing: " + path);
  std::uint64_t h = 14695981039346656037ULL;  // FNV-1a 64
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const auto got = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return std::string(hex);
}

void run_report(const RunConfig& config) {
  if (config.events_path.empty()) throw DataError("events file not specified");
  std::filesystem::create_directories(config.output_dir);
  const auto data = prepare_inputs(config);

  run_psd(config, data);
  const auto outcomes = run_bandscan(config, data);
  run_baselines(config, data, outcomes);

  json manifest;
  manifest["version"] = kVersion;
  manifest["config"] = json::parse(run_config_to_json(config));
  manifest["inputs"] = json::object();
  manifest["inputs"]["ibi"] = {{"path", config.ibi_path}, {"fnv1a64", file_hash_hex(config.ibi_path)}};
  manifest["inputs"]["events"] = {{"path", config.events_path},
                                  {"fnv1a64", file_hash_hex(config.events_path)}};
  if (!config.sleep_path.empty()) {
    manifest["inputs"]["sleep"] = {{"path", config.sleep_path},
                                   {"fnv1a64", file_hash_hex(config.sleep_path)}};
  }
  write_text(std::filesystem::path(config.output_dir) / "run_manifest.json",
             manifest.dump(2) + "\n");
}

}  // namespace cyclephase
