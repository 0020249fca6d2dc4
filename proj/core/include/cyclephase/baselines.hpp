#pragma once

#include <span>
#include <string>
#include <vector>

#include "cyclephase/analytic.hpp"
#include "cyclephase/events.hpp"
#include "cyclephase/timeseries.hpp"

namespace cyclephase {

enum class PredictorKind { kClockTime, kCircadianPhase, kSleepScore };

struct DesignRow {
  std::vector<double> features;
  int label = 0;  // 1 if an event onset fell in [t, t + step)
  TimePoint time = 0;
};

struct LabelledDesign {
  std::vector<DesignRow> rows;
  PredictorKind kind = PredictorKind::kClockTime;
  std::vector<std::string> feature_names;
};

// One row per hourly grid sample with a defined predictor value. Angles enter
// as (sin, cos) pairs; the sleep predictor is the covering day's value of an
// already shifted and z-scored daily series.
LabelledDesign build_design(const RegularSeries& grid,
                            const std::vector<AnalyticSeries>& analytic,
                            const RegularSeries* sleep, const EventSet& events,
                            PredictorKind kind, int tz_offset_minutes);

struct LogisticFit {
  std::vector<double> coefficients;  // intercept first
  bool converged = false;
  int iterations = 0;
  double auc = 0.5;
};

// Ridge-penalized logistic regression by iteratively reweighted least
// squares; the intercept is unpenalized. Non-convergence (including detected
// separation under ridge = 0) is flagged, never silent.
LogisticFit fit_logistic(const LabelledDesign& design, double ridge = 1e-4,
                         int max_iter = 100, double tol = 1e-8);

// Mann-Whitney AUC: (pairs with score_pos > score_neg + 0.5 * ties) /
// (n_pos * n_neg). Requires at least one positive and one negative label.
double auc(std::span<const double> scores, std::span<const int> labels);

}  // namespace cyclephase
