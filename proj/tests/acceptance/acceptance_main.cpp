// Acceptance suite: every release criterion with its tolerance pinned in
// code, one pass/fail line per criterion. Exit code is the failure count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cyclephase/baselines.hpp"
#include "cyclephase/circstats.hpp"
#include "cyclephase/filtering.hpp"
#include "cyclephase/report.hpp"
#include "cyclephase/rng.hpp"
#include "cyclephase/spectral.hpp"
#include "cyclephase/synth.hpp"
#include "../testutil.hpp"

using namespace cyclephase;
using testutil::kPi;
using testutil::wrap_angle;

namespace {

struct Criterion {
  std::string name;
  std::function<bool(std::string&)> run;
};

std::vector<double> sinusoid(double period_days, double duration_days) {
  const auto n = static_cast<std::size_t>(duration_days * 24);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::cos(2.0 * kPi * (i / 24.0) / period_days);
  }
  return x;
}

SynthConfig synth_config(std::uint64_t seed, double kappa, double mu) {
  SynthConfig config;
  config.duration_days = 176;
  config.step = 3600;
  config.components = {{1.0, 1.0, 0.0}};
  config.noise_sd = 0.5;
  config.event_count = 29;
  config.lock_component = 0;
  config.vonmises_mu = mu;
  config.vonmises_kappa = kappa;
  config.seed = seed;
  return config;
}

// ---------------------------------------------------------------------------

bool rayleigh_reproduction(std::string& detail) {
  struct Row {
    double r, lo, hi;
  };
  const std::vector<Row> rows = {
      {0.553, 7.1e-5, 7.9e-5}, {0.212, 0.269, 0.281}, {0.140, 0.560, 0.584}};
  bool ok = true;
  std::ostringstream ss;
  for (const auto& row : rows) {
    const double p = rayleigh_test(29, row.r);
    const bool in_window = p >= row.lo && p <= row.hi;
    ok = ok && in_window;
    ss << "p(29, " << row.r << ") = " << p << (in_window ? " in " : " OUTSIDE ") << "["
       << row.lo << ", " << row.hi << "]; ";
  }
  detail = ss.str();
  return ok;
}

bool monte_carlo_calibration(std::string& detail) {
  bool ok = true;
  std::ostringstream ss;
  for (const double r : {0.14, 0.21, 0.35, 0.553}) {
    const double analytic = rayleigh_test(29, r);
    const double mc = rayleigh_test_montecarlo(29, r, 1'000'000, 20240801);
    const double rel = std::abs(mc - analytic) / analytic;
    ok = ok && rel < 0.30;
    ss << "R=" << r << ": analytic " << analytic << " vs mc " << mc << " (rel "
       << std::round(rel * 1000) / 1000 << "); ";
  }
  // Under uniform phases the analytic p must itself be uniform.
  const CounterRng rng(97531, 0);
  std::vector<double> pvals;
  pvals.reserve(1000);
  std::uint64_t counter = 0;
  for (int run = 0; run < 1000; ++run) {
    double c = 0, s = 0;
    for (int j = 0; j < 29; ++j) {
      const double phi = 2.0 * kPi * rng.uniform01(counter++) - kPi;
      c += std::cos(phi);
      s += std::sin(phi);
    }
    pvals.push_back(rayleigh_test(29, std::hypot(c, s) / 29.0));
  }
  const double d = testutil::ks_uniform_distance(pvals);
  ok = ok && d < 0.05;
  ss << "KS D = " << d << " (< 0.05)";
  detail = ss.str();
  return ok;
}

bool filter_spec(std::string& detail) {
  bool ok = true;
  std::ostringstream ss;
  double worst_edge = 0;
  double worst_radius = 0;
  for (const auto& band : default_bands()) {
    const auto coeffs = design_bandpass(band, 3600.0, 2);
    for (const auto& pole : coeffs.poles) {
      worst_radius = std::max(worst_radius, std::abs(pole));
    }
    for (const double edge : {1.0 / band.high_period_days, 1.0 / band.low_period_days}) {
      const double mag = magnitude_response(coeffs, edge);
      worst_edge = std::max(worst_edge, std::abs(mag - 1.0 / std::sqrt(2.0)) * std::sqrt(2.0));
      if (std::abs(mag - 1.0 / std::sqrt(2.0)) > 0.005 * (1.0 / std::sqrt(2.0))) ok = false;
    }

    // Zero lag of the forward-backward pass on an in-band sinusoid.
    const double center = std::sqrt(band.low_period_days * band.high_period_days);
    const auto x = sinusoid(center, std::max(60.0, 10.0 * center));
    const auto y = filtfilt(coeffs, x);
    int best_lag = 0;
    double best = -1e300;
    for (int lag = -5; lag <= 5; ++lag) {
      double sum = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const auto j = static_cast<std::ptrdiff_t>(i) + lag;
        if (j < 0 || j >= static_cast<std::ptrdiff_t>(y.size())) continue;
        sum += x[i] * y[static_cast<std::size_t>(j)];
      }
      if (sum > best) {
        best = sum;
        best_lag = lag;
      }
    }
    if (best_lag != 0) {
      ok = false;
      ss << band.label << ": xcorr lag " << best_lag << "; ";
    }
  }
  ok = ok && worst_radius < 1.0;
  ss << "max pole radius " << worst_radius << "; worst edge deviation "
     << std::round(worst_edge * 1e5) / 1e3 << "% (< 0.5%)";
  detail = ss.str();
  return ok;
}

bool hilbert_spec(std::string& detail) {
  const auto x = sinusoid(1.0, 30.0);
  const auto out = hilbert_analytic(x, 0.0, 3600.0, BandSpec::make(0.8, 1.2));
  const std::size_t skip = x.size() / 20;  // 5% each end
  double max_phase_err = 0, max_amp_err = 0;
  for (std::size_t i = skip; i + skip < x.size(); ++i) {
    const double truth = wrap_angle(2.0 * kPi * (i / 24.0));
    max_phase_err = std::max(max_phase_err, std::abs(wrap_angle(out.phase[i] - truth)));
    max_amp_err = std::max(max_amp_err, std::abs(out.amplitude[i] - 1.0));
  }
  std::ostringstream ss;
  ss << "interior phase error " << max_phase_err << " rad (< 1e-3); amplitude error "
     << max_amp_err << " (< 0.01)";
  detail = ss.str();
  return max_phase_err < 1e-3 && max_amp_err < 0.01;
}

bool welch_spec(std::string& detail) {
  const WelchParams params{1440, 0.5, Window::kHann, Detrend::kConstant};
  const auto x = sinusoid(1.0, 176.0);
  const auto psd = welch_psd(x, 3600.0, params);
  std::size_t argmax = 0;
  for (std::size_t k = 1; k < psd.power.size(); ++k) {
    if (psd.power[k] > psd.power[argmax]) argmax = k;
  }
  const double bin = psd.frequencies[1] - psd.frequencies[0];
  const double peak_err = std::abs(psd.frequencies[argmax] - 1.0);
  bool ok = peak_err <= bin + 1e-12;

  std::mt19937 gen(314159);
  double ratio = 0;
  const int reps = 20;
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<double> noise(4224);
    for (auto& v : noise) v = std::normal_distribution<>(0, 1)(gen);
    double mean = 0;
    for (double v : noise) mean += v;
    mean /= noise.size();
    double var = 0;
    for (double v : noise) var += (v - mean) * (v - mean);
    var /= noise.size();
    const auto npsd = welch_psd(noise, 3600.0, params);
    double integral = 0;
    for (std::size_t k = 0; k + 1 < npsd.frequencies.size(); ++k) {
      integral += 0.5 * (npsd.power[k] + npsd.power[k + 1]) *
                  (npsd.frequencies[k + 1] - npsd.frequencies[k]);
    }
    ratio += integral / var;
  }
  ratio /= reps;
  ok = ok && std::abs(ratio - 1.0) <= 0.10;

  std::ostringstream ss;
  ss << "peak at " << psd.frequencies[argmax] << " cpd (bin " << bin
     << "); white-noise integral/variance = " << ratio << " (within 10%)";
  detail = ss.str();
  return ok;
}

bool end_to_end_synthetic(std::string& detail) {
  const auto bands = default_bands();
  const double mu = 0.8;

  int locked_hits = 0;
  double pooled_c = 0, pooled_s = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto config = synth_config(10'000 + rep, 2.0, mu);
    const auto series = gen_series(config);
    const auto truth = component_phase(config, 0, series);
    const auto events = gen_locked_events(config, truth, series);
    const auto outcomes = band_scan(series, events, bands);
    const auto& circadian = outcomes.front().stats;
    if (circadian.rayleigh_p && *circadian.rayleigh_p < 0.01) ++locked_hits;
    for (const auto& ps : outcomes.front().phases) {
      pooled_c += std::cos(ps.phase);
      pooled_s += std::sin(ps.phase);
    }
  }
  const double pooled_mean = std::atan2(pooled_s, pooled_c);
  const double mean_err = std::abs(wrap_angle(pooled_mean - mu));

  int false_positive_runs = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto config = synth_config(50'000 + rep, 0.0, mu);
    const auto series = gen_series(config);
    const auto truth = component_phase(config, 0, series);
    const auto events = gen_locked_events(config, truth, series);
    const auto outcomes = band_scan(series, events, bands);
    for (std::size_t b = 1; b < outcomes.size(); ++b) {  // the six multi-day bands
      if (outcomes[b].stats.fdr_adjusted_p && *outcomes[b].stats.fdr_adjusted_p < 0.05) {
        ++false_positive_runs;
        break;
      }
    }
  }

  std::ostringstream ss;
  ss << "kappa=2: p<0.01 in " << locked_hits << "/100 (>= 90); pooled mean error " << mean_err
     << " rad (< 0.15); kappa=0: any multi-day FDR p<0.05 in " << false_positive_runs
     << "/200 (<= 14)";
  detail = ss.str();
  return locked_hits >= 90 && mean_err < 0.15 && false_positive_runs <= 14;
}

bool auc_logistic(std::string& detail) {
  std::ostringstream ss;
  // Exact agreement between the rank formulation and the ROC trapezoid.
  std::mt19937 gen(271828);
  int exact = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + gen() % 49;
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = (gen() % 2 == 0) ? static_cast<double>(gen() % 6) / 5.0
                                   : std::uniform_real_distribution<>(0, 1)(gen);
      labels[i] = static_cast<int>(gen() % 2);
    }
    labels[0] = 1;
    if (n > 1) labels[1] = 0;
    if (auc(scores, labels) == testutil::trapezoid_roc_auc(scores, labels)) ++exact;
  }
  const bool auc_ok = exact == 100;
  ss << "auc == trapezoid on " << exact << "/100 instances; ";

  // Gradient of the converged IRLS solution.
  const auto config = synth_config(777, 2.0, 0.8);
  const auto series = gen_series(config);
  const auto truth = component_phase(config, 0, series);
  const auto events = gen_locked_events(config, truth, series);
  const auto design = build_design(series, {truth}, nullptr, events,
                                   PredictorKind::kCircadianPhase, 0);
  const double ridge = 1e-4;
  const auto fit = fit_logistic(design, ridge, 100, 1e-8);
  double gmax = 0;
  {
    std::vector<double> g(fit.coefficients.size(), 0.0);
    for (const auto& row : design.rows) {
      double eta = fit.coefficients[0];
      for (std::size_t j = 0; j < row.features.size(); ++j) {
        eta += fit.coefficients[j + 1] * row.features[j];
      }
      const double p = 1.0 / (1.0 + std::exp(-eta));
      g[0] += row.label - p;
      for (std::size_t j = 0; j < row.features.size(); ++j) {
        g[j + 1] += (row.label - p) * row.features[j];
      }
    }
    for (std::size_t j = 1; j < g.size(); ++j) g[j] -= ridge * fit.coefficients[j];
    for (double v : g) gmax = std::max(gmax, std::abs(v));
  }
  const bool grad_ok = fit.converged && gmax < 1e-8;
  ss << "IRLS gradient max-norm " << gmax << " (< 1e-8); ";

  // Reference AUCs from the private dataset are not reproducible; the
  // substituted check: the phase predictor must beat a pure-noise sleep
  // predictor on locked events.
  int phase_wins = 0;
  const int runs = 50;
  for (int rep = 0; rep < runs; ++rep) {
    auto config_rep = synth_config(90'000 + rep, 2.0, 0.8);
    config_rep.sleep_noise_sd = 1.0;
    const auto s = gen_series(config_rep);
    const auto t = component_phase(config_rep, 0, s);
    const auto e = gen_locked_events(config_rep, t, s);
    const auto sleep = gen_sleep_series(config_rep);
    const auto phase_design =
        build_design(s, {t}, nullptr, e, PredictorKind::kCircadianPhase, 0);
    const auto sleep_design =
        build_design(s, {}, &sleep, e, PredictorKind::kSleepScore, 0);
    if (fit_logistic(phase_design).auc > fit_logistic(sleep_design).auc) ++phase_wins;
  }
  const bool wins_ok = phase_wins >= 45;
  ss << "phase AUC > sleep-noise AUC in " << phase_wins << "/" << runs << " (>= 45)";
  detail = ss.str();
  return auc_ok && grad_ok && wins_ok;
}

bool figure2_shape(std::string& detail) {
  namespace fs = std::filesystem;
  testutil::TempDir dir("acceptance_fig2");

  // Tuned so the realized resultant lands near the reference value of 0.55:
  // a von Mises concentration of 1.35 has mean resultant ~ 0.55.
  auto config = synth_config(31421, 1.35, 0.8);
  const auto series = gen_series(config);
  const auto truth = component_phase(config, 0, series);
  const auto events = gen_locked_events(config, truth, series);
  {
    std::ofstream csv(dir.path() / "ibi.csv");
    csv << "timestamp,value\n";
    char buf[80];
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (!series.values()[i]) continue;
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", series.time_at(i), *series.values()[i]);
      csv << buf;
    }
  }
  {
    std::ofstream csv(dir.path() / "events.csv");
    csv << "onset_timestamp\n";
    char buf[48];
    for (const auto t : events.onsets()) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", t);
      csv << buf;
    }
  }

  RunConfig run;
  run.ibi_path = (dir.path() / "ibi.csv").string();
  run.events_path = (dir.path() / "events.csv").string();
  run.output_dir = (dir.path() / "out").string();
  run.rose_bins = 12;
  run_report(run);

  const auto scan = nlohmann::json::parse(
      testutil::read_file(fs::path(run.output_dir) / "bandscan.json"));
  const auto& circadian = scan.at("bands").at(0);
  const auto n = circadian.at("n").get<std::size_t>();
  const double r_reported = circadian.at("R").get<double>();
  const double mean_phase = circadian.at("circular_mean_rad").get<double>();

  // Reparse the emitted phases and cross-check R to 1e-12.
  std::vector<double> phases;
  {
    std::ifstream in(fs::path(run.output_dir) / "phases_0.8-1.2.csv");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string field;
      std::getline(ss, field, ',');
      std::getline(ss, field, ',');
      phases.push_back(std::stod(field));
    }
  }
  const double r_recomputed = phases.empty() ? 0.0 : resultant_length(phases);

  // Modal rose bin must contain the circular mean.
  std::vector<std::size_t> counts;
  {
    std::ifstream in(fs::path(run.output_dir) / "rose_0.8-1.2.csv");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      counts.push_back(std::stoul(line.substr(line.rfind(',') + 1)));
    }
  }
  const std::size_t max_count = *std::max_element(counts.begin(), counts.end());
  double wrapped = std::fmod(mean_phase + kPi, 2.0 * kPi);
  if (wrapped < 0) wrapped += 2.0 * kPi;
  auto mean_bin = static_cast<std::size_t>(wrapped / (2.0 * kPi / 12.0));
  if (mean_bin >= 12) mean_bin = 11;

  const bool tuned = n == 29 && r_reported > 0.45 && r_reported < 0.65;
  const bool modal = counts.at(mean_bin) == max_count;
  const bool consistent = std::abs(r_reported - r_recomputed) < 1e-12;

  std::ostringstream ss;
  ss << "n=" << n << ", R=" << r_reported << " (tuned near 0.55); mean bin " << mean_bin
     << " count " << counts.at(mean_bin) << " vs modal " << max_count
     << "; |R - recomputed| = " << std::abs(r_reported - r_recomputed) << " (< 1e-12)";
  detail = ss.str();
  return tuned && modal && consistent;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"rayleigh-reproduction", rayleigh_reproduction},
      {"monte-carlo-calibration", monte_carlo_calibration},
      {"filter-spec", filter_spec},
      {"hilbert-spec", hilbert_spec},
      {"welch-spec", welch_spec},
      {"end-to-end-synthetic", end_to_end_synthetic},
      {"auc-logistic", auc_logistic},
      {"figure2-shape", figure2_shape},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const auto seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %-26s (%.1fs) %s\n", ok ? "PASS" : "FAIL", criterion.name.c_str(),
                seconds, detail.c_str());
    if (!ok) ++failures;
  }
  if (failures == 0) {
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  } else {
    std::printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures;
}
