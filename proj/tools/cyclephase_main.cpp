// cyclephase: phase-locking analysis of discrete events against oscillatory
// rhythms in wearable time series.
//
// Subcommands: psd, bandscan, phasemap, baseline, synth, report.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "cyclephase/csv.hpp"
#include "cyclephase/errors.hpp"
#include "cyclephase/report.hpp"
#include "cyclephase/synth.hpp"
#include "cyclephase/version.hpp"

namespace {

using namespace cyclephase;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw DataError("config file not found: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonFlags {
  std::string ibi_path;
  std::string events_path;
  std::string sleep_path;
  std::string out_dir = ".";
  std::string bands_text;
  std::string config_path;
  std::string detrend = "constant";
  int tz_offset_minutes = 0;
  int step_minutes = 60;
  int ibi_max_gap_hours = 6;
  int sleep_max_gap_days = 2;
  std::size_t welch_segment_length = 0;
  double welch_overlap = 0.5;
  int order = 2;
  double tolerance_minutes = 0;
  int rose_bins = 12;
  std::uint64_t seed = 1;
};

void add_common_options(CLI::App* cmd, CommonFlags& flags, bool needs_events) {
  cmd->add_option("--ibi", flags.ibi_path, "Signal CSV (`timestamp,value`, header required)");
  if (needs_events) {
    cmd->add_option("--events", flags.events_path, "Event CSV (`onset_timestamp`, header required)");
  }
  cmd->add_option("--sleep", flags.sleep_path, "Nightly sleep score CSV");
  cmd->add_option("--out-dir", flags.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--tz-offset-minutes", flags.tz_offset_minutes,
                  "Local time offset from UTC in minutes")->capture_default_str();
  cmd->add_option("--step-minutes", flags.step_minutes, "Grid step")->capture_default_str();
  cmd->add_option("--ibi-max-gap-hours", flags.ibi_max_gap_hours,
                  "Longest signal gap filled by linear interpolation")->capture_default_str();
  cmd->add_option("--sleep-max-gap-days", flags.sleep_max_gap_days,
                  "Longest sleep gap filled by linear interpolation")->capture_default_str();
  cmd->add_option("--order", flags.order, "Butterworth order per pass (1..4)")->capture_default_str();
  cmd->add_option("--tolerance-minutes", flags.tolerance_minutes,
                  "Event mapping tolerance; 0 = half a grid step")->capture_default_str();
  cmd->add_option("--rose-bins", flags.rose_bins, "Rose histogram bins")->capture_default_str();
  cmd->add_option("--seed", flags.seed, "Seed for all randomized estimates")->capture_default_str();
  cmd->add_option("--config", flags.config_path,
                  "JSON run configuration; overrides any flag it sets");
}

RunConfig build_config(const CommonFlags& flags) {
  RunConfig config;
  config.ibi_path = flags.ibi_path;
  config.events_path = flags.events_path;
  config.sleep_path = flags.sleep_path;
  config.output_dir = flags.out_dir;
  config.timezone_offset_minutes = flags.tz_offset_minutes;
  config.step_minutes = flags.step_minutes;
  config.ibi_max_gap_hours = flags.ibi_max_gap_hours;
  config.sleep_max_gap_days = flags.sleep_max_gap_days;
  if (!flags.bands_text.empty()) config.bands = parse_bands(flags.bands_text);
  config.welch_segment_length = flags.welch_segment_length;
  config.welch_overlap = flags.welch_overlap;
  if (flags.detrend == "constant") {
    config.welch_detrend = Detrend::kConstant;
  } else if (flags.detrend == "linear") {
    config.welch_detrend = Detrend::kLinear;
  } else if (flags.detrend == "none") {
    config.welch_detrend = Detrend::kNone;
  } else {
    throw CLI::ValidationError("--detrend must be constant, linear or none");
  }
  config.filter_order = flags.order;
  config.mapping_tolerance_minutes = flags.tolerance_minutes;
  config.rose_bins = flags.rose_bins;
  config.seed = flags.seed;
  // A config file wins over flags wherever it speaks.
  if (!flags.config_path.empty()) {
    RunConfig from_file = run_config_from_json(read_file(flags.config_path));
    if (from_file.output_dir == ".") from_file.output_dir = config.output_dir;
    if (from_file.ibi_path.empty()) from_file.ibi_path = config.ibi_path;
    if (from_file.events_path.empty()) from_file.events_path = config.events_path;
    if (from_file.sleep_path.empty()) from_file.sleep_path = config.sleep_path;
    return from_file;
  }
  return config;
}

int run_synth_command(const std::string& config_path, const std::string& out_dir) {
  const auto config = synth_config_from_json(read_file(config_path));
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  const auto series = gen_series(config);
  {
    std::ofstream csv(dir / "ibi.csv");
    if (!csv.is_open()) throw DataError("cannot write: " + (dir / "ibi.csv").string());
    csv << "timestamp,value\n";
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (!series.values()[i]) continue;
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g", series.time_at(i), *series.values()[i]);
      csv << buf << "\n";
    }
  }

  if (config.event_count > 0) {
    EventSet events;
    if (config.lock_component) {
      const auto truth = component_phase(config, *config.lock_component, series);
      events = gen_locked_events(config, truth, series);
    } else {
      // No lock target: uniform over covered samples. Phase values are unused
      // at kappa = 0 but the coverage mask still applies.
      SynthConfig uniform = config;
      uniform.vonmises_kappa = 0;
      AnalyticSeries flat;
      flat.start = series.start();
      flat.step = series.step();
      flat.band = BandSpec::make(0.5, 1.5, "unused");
      flat.phase.assign(series.size(), 0.0);
      flat.amplitude.assign(series.size(), 1.0);
      flat.edge.assign(series.size(), false);
      flat.low_confidence.assign(series.size(), false);
      events = gen_locked_events(uniform, flat, series);
    }
    std::ofstream csv(dir / "events.csv");
    if (!csv.is_open()) throw DataError("cannot write: " + (dir / "events.csv").string());
    csv << "onset_timestamp\n";
    char buf[48];
    for (const auto t : events.onsets()) {
      std::snprintf(buf, sizeof(buf), "%.17g", t);
      csv << buf << "\n";
    }
  }

  if (config.sleep_noise_sd > 0) {
    const auto sleep = gen_sleep_series(config);
    std::ofstream csv(dir / "sleep.csv");
    if (!csv.is_open()) throw DataError("cannot write: " + (dir / "sleep.csv").string());
    csv << "timestamp,value\n";
    char buf[64];
    for (std::size_t i = 0; i < sleep.size(); ++i) {
      if (!sleep.values()[i]) continue;
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g", sleep.time_at(i), *sleep.values()[i]);
      csv << buf << "\n";
    }
  }

  std::cout << "synth: wrote " << (dir / "ibi.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event phase-locking analysis for oscillatory wearable signals"};
  app.set_version_flag("--version", std::string("cyclephase ") + cyclephase::kVersion);
  app.require_subcommand(1);

  CommonFlags flags;
  std::string band_text;       // phasemap single band
  std::string predictor;       // baseline
  std::string synth_config;    // synth
  bool dump_phase = false;

  auto* psd = app.add_subcommand("psd", "Welch power spectral density of the gridded signal");
  add_common_options(psd, flags, /*needs_events=*/false);
  psd->add_option("--welch-segment-length", flags.welch_segment_length,
                  "Samples per Welch segment; 0 = 60 days or longest segment")
      ->capture_default_str();
  psd->add_option("--welch-overlap", flags.welch_overlap, "Welch overlap fraction")
      ->capture_default_str();
  psd->add_option("--detrend", flags.detrend, "constant|linear|none")->capture_default_str();

  auto* bandscan = app.add_subcommand("bandscan", "Phase-locking statistics across period bands");
  add_common_options(bandscan, flags, true);
  bandscan->add_option("--bands", flags.bands_text, "Comma-separated `low:high` bands in days");

  auto* phasemap = app.add_subcommand("phasemap", "Per-event phases for a single band");
  add_common_options(phasemap, flags, true);
  phasemap->add_option("--band", band_text, "Band `low:high` in days")->required();
  phasemap->add_flag("--dump-phase", dump_phase,
                     "Also write the per-sample phase/amplitude table");

  auto* baseline = app.add_subcommand("baseline", "Single-predictor logistic baseline with AUC");
  add_common_options(baseline, flags, true);
  baseline->add_option("--predictor", predictor, "clock|phase|sleep")->required();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset from a JSON config");
  synth->add_option("--config", synth_config, "Synth JSON configuration")->required();
  synth->add_option("--out-dir", flags.out_dir, "Output directory")->capture_default_str();

  auto* report = app.add_subcommand("report", "Full pipeline: psd + bandscan + baselines + manifest");
  add_common_options(report, flags, true);
  report->add_option("--bands", flags.bands_text, "Comma-separated `low:high` bands in days");
  report->add_option("--welch-segment-length", flags.welch_segment_length,
                     "Samples per Welch segment; 0 = 60 days or longest segment")
      ->capture_default_str();
  report->add_option("--welch-overlap", flags.welch_overlap, "Welch overlap fraction")
      ->capture_default_str();
  report->add_option("--detrend", flags.detrend, "constant|linear|none")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 1;
  }

  try {
    using namespace cyclephase;
    if (synth->parsed()) return run_synth_command(synth_config, flags.out_dir);

    RunConfig config = build_config(flags);
    std::filesystem::create_directories(config.output_dir);

    if (psd->parsed()) {
      const auto data = prepare_inputs(config);
      const auto estimate = run_psd(config, data);
      const auto peak = dominant_period(estimate, 0.1, 1000.0);
      std::cout << "psd: dominant period " << peak.period_days << " days; wrote psd.csv\n";
      return 0;
    }
    if (bandscan->parsed() || report->parsed()) {
      if (report->parsed()) {
        run_report(config);
        std::cout << "report: wrote psd.csv bandscan.json baselines.json run_manifest.json\n";
        return 0;
      }
      if (config.events_path.empty()) throw DataError("events file not specified");
      const auto data = prepare_inputs(config);
      const auto outcomes = run_bandscan(config, data);
      std::size_t significant = 0;
      for (const auto& o : outcomes) {
        if (o.stats.fdr_adjusted_p && *o.stats.fdr_adjusted_p < 0.05) ++significant;
      }
      std::cout << "bandscan: " << outcomes.size() << " bands, " << significant
                << " significant after FDR; wrote bandscan.json\n";
      return 0;
    }
    if (phasemap->parsed()) {
      config.bands = parse_bands(band_text);
      if (config.events_path.empty()) throw DataError("events file not specified");
      const auto data = prepare_inputs(config);
      const auto outcomes = run_bandscan(config, data);
      if (dump_phase) {
        const auto& outcome = outcomes.front();
        char buf[128];
        std::ofstream csv(std::filesystem::path(config.output_dir) /
                          ("phase_" + outcome.stats.band.label + ".csv"));
        csv << "timestamp,phase_rad,amplitude,edge_flag\n";
        for (const auto& series : outcome.analytic) {
          for (std::size_t i = 0; i < series.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d", series.time_at(i),
                          series.phase[i], series.amplitude[i], series.edge[i] ? 1 : 0);
            csv << buf << "\n";
          }
        }
      }
      std::cout << "phasemap: mapped " << outcomes.front().stats.n << " events, excluded "
                << outcomes.front().excluded.size() << "\n";
      return 0;
    }
    if (baseline->parsed()) {
      if (config.events_path.empty()) throw DataError("events file not specified");
      const auto data = prepare_inputs(config);
      std::vector<BandOutcome> outcomes;
      if (predictor == "phase") outcomes = run_bandscan(config, data);
      const auto text = run_baselines(config, data, outcomes);
      const auto parsed = nlohmann::json::parse(text);
      const char* key = predictor == "clock"   ? "clock"
                        : predictor == "phase" ? "phase"
                        : predictor == "sleep" ? "sleep"
                                               : nullptr;
      if (key == nullptr) throw DataError("--predictor must be clock, phase or sleep");
      if (!parsed.contains(key)) throw DataError(std::string("predictor unavailable: ") + key);
      std::cout << parsed.at(key).dump(2) << "\n";
      return 0;
    }
  } catch (const cyclephase::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const cyclephase::NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
