#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cyclephase/baselines.hpp"
#include "cyclephase/circstats.hpp"
#include "cyclephase/spectral.hpp"
#include "cyclephase/synth.hpp"

namespace cyclephase {

// The seven default period bands scanned when none are configured:
// 0.8-1.2 (circadian) and six multi-day bands from 2 to 28 days.
std::vector<BandSpec> default_bands();

// Full run configuration. The defaults reproduce the reference processing
// choices: hourly grid, 6 h / 2 day gap limits, order-2 Butterworth passes,
// step/2 mapping tolerance, 12 rose bins.
struct RunConfig {
  std::string ibi_path;
  std::string events_path;
  std::string sleep_path;  // empty = no sleep channel
  int timezone_offset_minutes = 0;
  int step_minutes = 60;
  int ibi_max_gap_hours = 6;
  int sleep_max_gap_days = 2;
  std::vector<BandSpec> bands = default_bands();
  std::size_t welch_segment_length = 0;  // samples; 0 = 60 days or longest segment
  double welch_overlap = 0.5;
  Detrend welch_detrend = Detrend::kConstant;
  int filter_order = 2;
  double mapping_tolerance_minutes = 0;  // 0 = step / 2
  int rose_bins = 12;
  std::uint64_t seed = 1;
  std::string output_dir = ".";
};

RunConfig run_config_from_json(const std::string& json_text);
std::string run_config_to_json(const RunConfig& config);

// Parses "0.8:1.2,2:5,..." into band specs.
std::vector<BandSpec> parse_bands(const std::string& text);

// Processed inputs shared by the report stages.
struct PreparedData {
  RegularSeries ibi;                    // gridded, gap-filled, z-scored
  EventSet events;
  std::optional<RegularSeries> sleep;   // daily, shifted to next day, z-scored
};

PreparedData prepare_inputs(const RunConfig& config);

// Histogram of phases over `bins` equal arcs of [-pi, pi).
std::vector<std::size_t> rose_histogram(std::span<const double> phases, int bins);

// Self-contained polar histogram with a mean-resultant arrow of relative
// length R. Pure text output.
std::string emit_rose_svg(const std::vector<std::size_t>& counts,
                          double mean_phase, double resultant);

// Clock time (hours, [0, 24)) corresponding to a band phase: the mean offset
// between local time-of-day angle and instantaneous phase over all covered
// samples, applied to `phase`. Meaningful for near-circadian bands.
double phase_to_clock_hours(double phase,
                            const std::vector<AnalyticSeries>& analytic,
                            int tz_offset_minutes);

// Report stages; each writes its artifacts under config.output_dir and
// returns what downstream stages or callers need.
PsdEstimate run_psd(const RunConfig& config, const PreparedData& data);
std::vector<BandOutcome> run_bandscan(const RunConfig& config, const PreparedData& data);
std::string run_baselines(const RunConfig& config, const PreparedData& data,
                          const std::vector<BandOutcome>& outcomes);

// Whole pipeline: psd.csv + psd_params.json, bandscan.json, phases_<band>.csv,
// rose_<band>.csv/.svg, baselines.json (when sleep present or derivable) and
// run_manifest.json. Reruns with identical config and inputs are byte-identical.
void run_report(const RunConfig& config);

// FNV-1a 64-bit content hash, hex-encoded; used in the run manifest.
std::string file_hash_hex(const std::string& path);

}  // namespace cyclephase
