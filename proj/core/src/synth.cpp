#include "cyclephase/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "cyclephase/errors.hpp"
#include "cyclephase/rng.hpp"

namespace cyclephase {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_to_pi(double angle) {
  double w = std::fmod(angle + kPi, 2.0 * kPi);
  if (w < 0) w += 2.0 * kPi;
  return w - kPi;
}

void validate(const SynthConfig& config) {
  if (!(config.duration_days > 0)) throw std::invalid_argument("synth: duration must be > 0");
  if (!(config.step > 0)) throw std::invalid_argument("synth: step must be > 0");
  if (config.vonmises_kappa < 0) throw std::invalid_argument("synth: kappa must be >= 0");
  for (const auto& c : config.components) {
    if (!(c.period_days > 0)) throw std::invalid_argument("synth: component period must be > 0");
  }
}

}  // namespace

RegularSeries gen_series(const SynthConfig& config) {
  validate(config);
  const auto n = static_cast<std::size_t>(
      std::llround(config.duration_days * kSecondsPerDay / config.step));
  if (n == 0) throw std::invalid_argument("synth: duration shorter than one step");

  const CounterRng rng(config.seed, /*stream=*/0);
  std::vector<std::optional<double>> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t_days = static_cast<double>(i) * config.step / kSecondsPerDay;
    double x = 0;
    for (const auto& c : config.components) {
      x += c.amplitude * std::cos(2.0 * kPi * t_days / c.period_days + c.initial_phase);
    }
    if (config.noise_sd > 0) x += config.noise_sd * rng.normal(i);
    values[i] = x;
  }

  for (const auto& gap : config.missing) {
    const auto first = static_cast<std::ptrdiff_t>(
        std::floor(gap.start_day * kSecondsPerDay / config.step));
    const auto count = static_cast<std::ptrdiff_t>(
        std::llround(gap.length_hours * kSecondsPerHour / config.step));
    for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(first, 0);
         k < first + count && k < static_cast<std::ptrdiff_t>(n); ++k) {
      values[static_cast<std::size_t>(k)].reset();
    }
  }
  return RegularSeries(0.0, config.step, std::move(values), "synthetic");
}

AnalyticSeries component_phase(const SynthConfig& config, std::size_t component_index,
                               const RegularSeries& grid) {
  validate(config);
  if (component_index >= config.components.size()) {
    throw std::invalid_argument("component_phase: no such component");
  }
  const auto& comp = config.components[component_index];

  AnalyticSeries truth;
  truth.start = grid.start();
  truth.step = grid.step();
  truth.band = BandSpec::make(0.8 * comp.period_days, 1.2 * comp.period_days, "truth");
  const std::size_t n = grid.size();
  truth.phase.resize(n);
  truth.amplitude.assign(n, comp.amplitude);
  truth.edge.assign(n, false);
  truth.low_confidence.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const double t_days = grid.time_at(i) / kSecondsPerDay;
    truth.phase[i] = wrap_to_pi(2.0 * kPi * t_days / comp.period_days + comp.initial_phase);
  }
  return truth;
}

EventSet gen_locked_events(const SynthConfig& config, const AnalyticSeries& truth_phase,
                           const RegularSeries& coverage) {
  validate(config);
  if (config.event_count < 1) throw std::invalid_argument("gen_locked_events: event_count must be >= 1");

  std::vector<std::size_t> covered;
  const std::size_t n = std::min(truth_phase.size(), coverage.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (coverage.values()[i].has_value()) covered.push_back(i);
  }
  if (covered.empty()) throw DataError("gen_locked_events: no covered samples");
  if (config.event_count > covered.size()) {
    throw DataError("gen_locked_events: more events requested than covered samples");
  }

  const CounterRng rng(config.seed, /*stream=*/1);
  const double kappa = config.vonmises_kappa;
  const double mu = config.vonmises_mu;

  // Rejection sampling on the discrete grid: accept a covered sample with
  // probability exp(kappa * (cos(phi - mu) - 1)), which peaks at 1 at phi = mu.
  std::set<std::size_t> chosen;
  std::uint64_t counter = 0;
  const std::uint64_t max_draws = 50'000'000;
  while (chosen.size() < config.event_count) {
    if (counter > max_draws) {
      throw NumericError("gen_locked_events: rejection sampling failed to converge");
    }
    const double u = rng.uniform01(counter++);
    const auto pick = std::min(static_cast<std::size_t>(u * static_cast<double>(covered.size())),
                               covered.size() - 1);
    const std::size_t idx = covered[pick];
    if (kappa > 0) {
      const double accept = std::exp(kappa * (std::cos(truth_phase.phase[idx] - mu) - 1.0));
      if (rng.uniform01(counter++) > accept) continue;
    }
    chosen.insert(idx);
  }

  std::vector<TimePoint> onsets;
  onsets.reserve(chosen.size());
  for (std::size_t idx : chosen) onsets.push_back(coverage.time_at(idx));
  return EventSet(std::move(onsets), "synthetic");
}

RegularSeries gen_sleep_series(const SynthConfig& config) {
  validate(config);
  if (!(config.sleep_noise_sd > 0)) {
    throw std::invalid_argument("gen_sleep_series: sleep_noise_sd must be > 0");
  }
  const auto days = static_cast<std::size_t>(std::ceil(config.duration_days));
  const CounterRng rng(config.seed, /*stream=*/2);
  std::vector<std::optional<double>> values(std::max<std::size_t>(days, 1));
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = config.sleep_noise_sd * rng.normal(i);
  }
  return RegularSeries(0.0, kSecondsPerDay, std::move(values), "sleep");
}

SynthConfig synth_config_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("synth config: invalid JSON: ") + e.what());
  }
  SynthConfig config;
  try {
    config.duration_days = j.value("duration_days", config.duration_days);
    config.step = j.value("step_seconds", config.step);
    if (j.contains("components")) {
      config.components.clear();
      for (const auto& c : j.at("components")) {
        SynthComponent comp;
        comp.period_days = c.value("period_days", 1.0);
        comp.amplitude = c.value("amplitude", 1.0);
        comp.initial_phase = c.value("initial_phase", 0.0);
        config.components.push_back(comp);
      }
    }
    config.noise_sd = j.value("noise_sd", config.noise_sd);
    if (j.contains("missing")) {
      for (const auto& m : j.at("missing")) {
        config.missing.push_back(MissingSpan{m.value("start_day", 0.0), m.value("length_hours", 0.0)});
      }
    }
    config.event_count = j.value("event_count", config.event_count);
    if (j.contains("lock_component") && !j.at("lock_component").is_null()) {
      config.lock_component = j.at("lock_component").get<std::size_t>();
    }
    config.vonmises_mu = j.value("vonmises_mu", config.vonmises_mu);
    config.vonmises_kappa = j.value("vonmises_kappa", config.vonmises_kappa);
    config.sleep_noise_sd = j.value("sleep_noise_sd", config.sleep_noise_sd);
    config.seed = j.value("seed", config.seed);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("synth config: ") + e.what());
  }
  return config;
}

std::string synth_config_to_json(const SynthConfig& config) {
  nlohmann::json j;
  j["duration_days"] = config.duration_days;
  j["step_seconds"] = config.step;
  j["components"] = nlohmann::json::array();
  for (const auto& c : config.components) {
    j["components"].push_back({{"period_days", c.period_days},
                               {"amplitude", c.amplitude},
                               {"initial_phase", c.initial_phase}});
  }
  j["noise_sd"] = config.noise_sd;
  j["missing"] = nlohmann::json::array();
  for (const auto& m : config.missing) {
    j["missing"].push_back({{"start_day", m.start_day}, {"length_hours", m.length_hours}});
  }
  j["event_count"] = config.event_count;
  if (config.lock_component) {
    j["lock_component"] = *config.lock_component;
  } else {
    j["lock_component"] = nullptr;
  }
  j["vonmises_mu"] = config.vonmises_mu;
  j["vonmises_kappa"] = config.vonmises_kappa;
  j["sleep_noise_sd"] = config.sleep_noise_sd;
  j["seed"] = config.seed;
  return j.dump(2) + "\n";
}

}  // namespace cyclephase
