#include <doctest.h>

#include <cmath>
#include <random>

#include "cyclephase/baselines.hpp"
#include "cyclephase/errors.hpp"
#include "cyclephase/synth.hpp"
#include "testutil.hpp"

using namespace cyclephase;
using testutil::kPi;

namespace {

LabelledDesign toy_design(const std::vector<double>& xs, const std::vector<int>& ys) {
  LabelledDesign design;
  design.kind = PredictorKind::kSleepScore;
  design.feature_names = {"x"};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    design.rows.push_back(DesignRow{{xs[i]}, ys[i], static_cast<double>(i) * 3600.0});
  }
  return design;
}

double penalized_ll(const LabelledDesign& design, const std::vector<double>& beta,
                    double ridge) {
  double ll = 0;
  for (const auto& row : design.rows) {
    double eta = beta[0];
    for (std::size_t j = 0; j < row.features.size(); ++j) eta += beta[j + 1] * row.features[j];
    ll += row.label * eta - (eta > 30 ? eta : std::log1p(std::exp(eta)));
  }
  for (std::size_t j = 1; j < beta.size(); ++j) ll -= 0.5 * ridge * beta[j] * beta[j];
  return ll;
}

}  // namespace

TEST_SUITE_BEGIN("baselines");

TEST_CASE("auc: hand-computed and degenerate cases") {
  // scores {0.1, 0.4, 0.35, 0.8}, labels {0, 0, 1, 1}: 3 of 4 pairs concordant.
  CHECK(auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<int>{0, 0, 1, 1}) ==
        doctest::Approx(0.75));
  CHECK(auc(std::vector<double>{1, 2, 3, 10, 11}, std::vector<int>{0, 0, 0, 1, 1}) == 1.0);
  CHECK(auc(std::vector<double>{5, 5, 5, 5}, std::vector<int>{0, 1, 0, 1}) == 0.5);
  CHECK_THROWS_AS(auc(std::vector<double>{1, 2}, std::vector<int>{1, 1}), DataError);
  CHECK_THROWS_AS(auc(std::vector<double>{1, 2}, std::vector<int>{0, 2}), std::invalid_argument);
}

TEST_CASE("auc equals the trapezoidal ROC area exactly, ties included") {
  std::mt19937 gen(61);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + gen() % 49;
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse grid scores make ties common.
      scores[i] = (gen() % 2 == 0) ? static_cast<double>(gen() % 8) / 7.0
                                   : std::uniform_real_distribution<>(0, 1)(gen);
      labels[i] = static_cast<int>(gen() % 2);
      has_pos |= labels[i] == 1;
      has_neg |= labels[i] == 0;
    }
    if (!has_pos) labels[0] = 1;
    if (!has_neg) labels[n - 1] = 0;

    CHECK(auc(scores, labels) == testutil::trapezoid_roc_auc(scores, labels));
  }
}

TEST_CASE("auc properties: complement under score negation, monotone invariance") {
  std::mt19937 gen(67);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 4 + gen() % 40;
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = std::uniform_real_distribution<>(-3, 3)(gen);  // ties a.s. absent
      labels[i] = static_cast<int>(gen() % 2);
    }
    labels[0] = 1;
    labels[1] = 0;

    std::vector<double> negated(n), transformed(n);
    for (std::size_t i = 0; i < n; ++i) {
      negated[i] = -scores[i];
      transformed[i] = std::exp(2.0 * scores[i]) + 5.0;  // strictly increasing
    }
    CHECK(auc(scores, labels) + auc(negated, labels) == doctest::Approx(1.0));
    CHECK(auc(transformed, labels) == doctest::Approx(auc(scores, labels)));
  }
}

TEST_CASE("logistic fit: balanced 1-D toy has positive slope, zero intercept") {
  std::vector<double> xs;
  std::vector<int> ys;
  for (int i = 0; i < 50; ++i) {
    xs.push_back(-1.0);
    ys.push_back(0);
    xs.push_back(1.0);
    ys.push_back(1);
  }
  const auto fit = fit_logistic(toy_design(xs, ys), 1e-4);
  CHECK(fit.converged);
  CHECK(std::abs(fit.coefficients[0]) < 1e-6);
  CHECK(fit.coefficients[1] > 0.5);
  CHECK(fit.auc == 1.0);  // in-sample separation on the toy
}

TEST_CASE("logistic fit: returned solution has near-zero penalized gradient") {
  std::mt19937 gen(71);
  std::vector<double> xs;
  std::vector<int> ys;
  for (int i = 0; i < 400; ++i) {
    const double x = std::normal_distribution<>(0, 1)(gen);
    const double p = 1.0 / (1.0 + std::exp(-(0.5 * x - 2.0)));
    xs.push_back(x);
    ys.push_back(std::uniform_real_distribution<>(0, 1)(gen) < p ? 1 : 0);
  }
  const double ridge = 1e-4, tol = 1e-8;
  const auto fit = fit_logistic(toy_design(xs, ys), ridge, 100, tol);
  REQUIRE(fit.converged);

  // Direct gradient at the solution.
  double g0 = 0, g1 = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double eta = fit.coefficients[0] + fit.coefficients[1] * xs[i];
    const double p = 1.0 / (1.0 + std::exp(-eta));
    g0 += ys[i] - p;
    g1 += (ys[i] - p) * xs[i];
  }
  g1 -= ridge * fit.coefficients[1];
  CHECK(std::abs(g0) < tol);
  CHECK(std::abs(g1) < tol);

  // Finite differences around the optimum agree.
  const double h = 1e-5;
  for (std::size_t j = 0; j < 2; ++j) {
    auto up = fit.coefficients, dn = fit.coefficients;
    up[j] += h;
    dn[j] -= h;
    const auto design = toy_design(xs, ys);
    const double fd = (penalized_ll(design, up, ridge) - penalized_ll(design, dn, ridge)) / (2 * h);
    CHECK(std::abs(fd) < 1e-4);
  }
}

TEST_CASE("logistic fit: separation flagged without ridge, finite with ridge") {
  std::vector<double> xs;
  std::vector<int> ys;
  for (int i = 0; i < 20; ++i) {
    xs.push_back(i < 10 ? -1.0 - 0.1 * i : 1.0 + 0.1 * i);
    ys.push_back(i < 10 ? 0 : 1);
  }
  const auto unpenalized = fit_logistic(toy_design(xs, ys), 0.0);
  CHECK_FALSE(unpenalized.converged);

  const auto penalized = fit_logistic(toy_design(xs, ys), 1e-2);
  CHECK(penalized.converged);
  for (double c : penalized.coefficients) CHECK(std::isfinite(c));
  CHECK(std::abs(penalized.coefficients[1]) < 40.0);
}

namespace {

struct SynthRun {
  RegularSeries series;
  EventSet events;
  std::vector<AnalyticSeries> truth;
};

SynthRun locked_run(std::uint64_t seed, double kappa) {
  SynthConfig config;
  config.duration_days = 176;
  config.step = 3600;
  config.components = {{1.0, 1.0, 0.3}};
  config.noise_sd = 0.4;
  config.event_count = 29;
  config.lock_component = 0;
  config.vonmises_mu = -1.2;
  config.vonmises_kappa = kappa;
  config.seed = seed;
  auto series = gen_series(config);
  auto truth = component_phase(config, 0, series);
  auto events = gen_locked_events(config, truth, series);
  return SynthRun{std::move(series), std::move(events), {std::move(truth)}};
}

}  // namespace

TEST_CASE("build_design: labels land in the right hourly bins") {
  auto run = locked_run(5, 0.0);
  // Event at 14:30 UTC on day 3 labels the 14:00 row.
  const double t = 3 * kSecondsPerDay + 14 * 3600.0 + 1800.0;
  std::vector<TimePoint> onsets = {t};
  const auto design = build_design(run.series, {}, nullptr, EventSet(onsets, "e"),
                                   PredictorKind::kClockTime, 0);
  std::size_t hits = 0;
  for (const auto& row : design.rows) {
    if (row.label == 1) {
      ++hits;
      CHECK(row.time == 3 * kSecondsPerDay + 14 * 3600.0);
    }
  }
  CHECK(hits == 1);
}

TEST_CASE("build_design: clock features at local midnight are (0, 1)") {
  auto run = locked_run(6, 0.0);
  const auto design = build_design(run.series, {}, nullptr, run.events,
                                   PredictorKind::kClockTime, 0);
  REQUIRE(design.rows.size() == run.series.size());
  // Grid starts at epoch 0 = midnight UTC.
  CHECK(design.rows[0].features[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(design.rows[0].features[1] == doctest::Approx(1.0));
  // Timezone offset rotates the clock: +360 minutes = 6 h -> sin = 1, cos = 0.
  const auto shifted = build_design(run.series, {}, nullptr, run.events,
                                    PredictorKind::kClockTime, 360);
  CHECK(shifted.rows[0].features[0] == doctest::Approx(1.0));
  CHECK(shifted.rows[0].features[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("build_design: one row per defined predictor, 29 positives") {
  auto run = locked_run(7, 2.0);
  const auto design = build_design(run.series, run.truth, nullptr, run.events,
                                   PredictorKind::kCircadianPhase, 0);
  CHECK(design.rows.size() <= 4224);
  std::size_t positives = 0;
  for (const auto& row : design.rows) positives += row.label;
  CHECK(positives == 29);  // synthetic events never share an hour
  for (const auto& row : design.rows) {
    CHECK(std::abs(std::hypot(row.features[0], row.features[1]) - 1.0) < 1e-9);
  }
}

TEST_CASE("build_design: sleep predictor picks the covering day's value") {
  auto run = locked_run(8, 0.0);
  std::vector<std::optional<double>> daily(176);
  for (std::size_t d = 0; d < daily.size(); ++d) daily[d] = static_cast<double>(d);
  const RegularSeries sleep(0.0, kSecondsPerDay, daily, "sleep");
  const auto design = build_design(run.series, {}, &sleep, run.events,
                                   PredictorKind::kSleepScore, 0);
  for (const auto& row : design.rows) {
    CHECK(row.features[0] == std::floor(row.time / kSecondsPerDay));
  }
}

TEST_CASE("build_design: errors") {
  auto run = locked_run(9, 0.0);
  CHECK_THROWS_WITH_AS(build_design(run.series, {}, nullptr, EventSet({}, "e"),
                                    PredictorKind::kClockTime, 0),
                       doctest::Contains("no events"), DataError);
  CHECK_THROWS_AS(build_design(run.series, {}, nullptr, run.events,
                               PredictorKind::kSleepScore, 0),
                  std::invalid_argument);
  const RegularSeries daily(0.0, kSecondsPerDay,
                            std::vector<std::optional<double>>(10, 1.0), "d");
  CHECK_THROWS_AS(build_design(daily, {}, nullptr, run.events, PredictorKind::kClockTime, 0),
                  std::invalid_argument);
}

TEST_CASE("phase predictor beats a pure-noise sleep predictor on locked events") {
  int phase_wins = 0;
  const int runs = 10;
  for (int rep = 0; rep < runs; ++rep) {
    auto run = locked_run(100 + rep, 2.0);
    SynthConfig sleep_config;
    sleep_config.duration_days = 176;
    sleep_config.sleep_noise_sd = 1.0;
    sleep_config.seed = 900 + rep;
    const auto sleep = gen_sleep_series(sleep_config);

    const auto phase_design = build_design(run.series, run.truth, nullptr, run.events,
                                           PredictorKind::kCircadianPhase, 0);
    const auto sleep_design = build_design(run.series, {}, &sleep, run.events,
                                           PredictorKind::kSleepScore, 0);
    const auto phase_fit = fit_logistic(phase_design);
    const auto sleep_fit = fit_logistic(sleep_design);
    if (phase_fit.auc > sleep_fit.auc) ++phase_wins;
  }
  CHECK(phase_wins >= 9);
}

TEST_SUITE_END();
