#include "cyclephase/baselines.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cyclephase/errors.hpp"

namespace cyclephase {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Coefficients this large mean the likelihood has no interior optimum
// (separated data); treated as non-convergence rather than a fit.
constexpr double kSeparationBound = 40.0;

double positive_fmod(double x, double m) {
  const double r = std::fmod(x, m);
  return r < 0 ? r + m : r;
}

// Gaussian elimination with partial pivoting; returns false when singular.
bool solve_linear(std::vector<std::vector<double>>& a, std::vector<double>& b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-300) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t col = n; col-- > 0;) {
    for (std::size_t c = col + 1; c < n; ++c) b[col] -= a[col][c] * b[c];
    b[col] /= a[col][col];
  }
  return true;
}

}  // namespace

LabelledDesign build_design(const RegularSeries& grid,
                            const std::vector<AnalyticSeries>& analytic,
                            const RegularSeries* sleep, const EventSet& events,
                            PredictorKind kind, int tz_offset_minutes) {
  if (std::abs(grid.step() - kSecondsPerHour) > 1e-6) {
    throw std::invalid_argument("build_design: hourly grid required");
  }
  if (kind == PredictorKind::kSleepScore && sleep == nullptr) {
    throw std::invalid_argument("build_design: sleep predictor requires a sleep series");
  }

  const double tz_seconds = tz_offset_minutes * 60.0;
  const auto& onsets = events.onsets();

  // Grid-aligned phase lookup across analytic segments.
  auto phase_at = [&](TimePoint t, double& out) {
    for (const auto& series : analytic) {
      if (series.size() == 0) continue;
      const double raw = (t - series.start) / series.step;
      const auto idx = static_cast<std::ptrdiff_t>(std::llround(raw));
      if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(series.size())) continue;
      if (std::abs(raw - static_cast<double>(idx)) > 1e-6) continue;
      out = series.phase[static_cast<std::size_t>(idx)];
      return true;
    }
    return false;
  };

  LabelledDesign design;
  design.kind = kind;
  switch (kind) {
    case PredictorKind::kClockTime:
      design.feature_names = {"sin_clock", "cos_clock"};
      break;
    case PredictorKind::kCircadianPhase:
      design.feature_names = {"sin_phase", "cos_phase"};
      break;
    case PredictorKind::kSleepScore:
      design.feature_names = {"sleep_z"};
      break;
  }

  std::size_t next_event = 0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const TimePoint t = grid.time_at(i);

    while (next_event < onsets.size() && onsets[next_event] < t) ++next_event;
    std::size_t scan = next_event;
    int label = 0;
    while (scan < onsets.size() && onsets[scan] < t + grid.step()) {
      label = 1;
      ++scan;
    }

    DesignRow row;
    row.time = t;
    row.label = label;
    switch (kind) {
      case PredictorKind::kClockTime: {
        const double hours = positive_fmod(t + tz_seconds, kSecondsPerDay) / kSecondsPerHour;
        const double angle = 2.0 * kPi * hours / 24.0;
        row.features = {std::sin(angle), std::cos(angle)};
        break;
      }
      case PredictorKind::kCircadianPhase: {
        double phi = 0;
        if (!phase_at(t, phi)) continue;
        row.features = {std::sin(phi), std::cos(phi)};
        break;
      }
      case PredictorKind::kSleepScore: {
        const double raw = (t - sleep->start()) / sleep->step();
        const auto day = static_cast<std::ptrdiff_t>(std::floor(raw + 1e-9));
        if (day < 0 || day >= static_cast<std::ptrdiff_t>(sleep->size())) continue;
        const auto& v = sleep->values()[static_cast<std::size_t>(day)];
        if (!v) continue;
        row.features = {*v};
        break;
      }
    }
    positives += static_cast<std::size_t>(label);
    design.rows.push_back(std::move(row));
  }

  if (positives == 0) throw DataError("build_design: no events in coverage");
  return design;
}

LogisticFit fit_logistic(const LabelledDesign& design, double ridge, int max_iter,
                         double tol) {
  if (design.rows.empty()) throw std::invalid_argument("fit_logistic: empty design");
  if (ridge < 0) throw std::invalid_argument("fit_logistic: ridge must be >= 0");
  const std::size_t n_features = design.rows.front().features.size();
  for (const auto& row : design.rows) {
    if (row.features.size() != n_features) {
      throw std::invalid_argument("fit_logistic: ragged feature rows");
    }
  }
  const std::size_t dim = n_features + 1;  // intercept first

  auto x_at = [&](const DesignRow& row, std::size_t j) {
    return j == 0 ? 1.0 : row.features[j - 1];
  };
  auto gradient = [&](const std::vector<double>& beta, std::vector<double>& g) {
    g.assign(dim, 0.0);
    for (const auto& row : design.rows) {
      double eta = 0;
      for (std::size_t j = 0; j < dim; ++j) eta += beta[j] * x_at(row, j);
      const double p = 1.0 / (1.0 + std::exp(-eta));
      const double resid = row.label - p;
      for (std::size_t j = 0; j < dim; ++j) g[j] += resid * x_at(row, j);
    }
    for (std::size_t j = 1; j < dim; ++j) g[j] -= ridge * beta[j];  // intercept unpenalized
  };
  auto max_norm = [](const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };

  LogisticFit fit;
  fit.coefficients.assign(dim, 0.0);
  std::vector<double> grad(dim), trial_grad(dim);
  gradient(fit.coefficients, grad);

  for (int iter = 0; iter < max_iter; ++iter) {
    const double gmax = max_norm(grad);
    if (gmax < tol) {
      fit.converged = true;
      break;
    }
    fit.iterations = iter + 1;

    // Newton system: (X^T W X + ridge I') delta = gradient.
    std::vector<std::vector<double>> hess(dim, std::vector<double>(dim, 0.0));
    for (const auto& row : design.rows) {
      double eta = 0;
      for (std::size_t j = 0; j < dim; ++j) eta += fit.coefficients[j] * x_at(row, j);
      const double p = 1.0 / (1.0 + std::exp(-eta));
      const double w = p * (1.0 - p);
      for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = a; b < dim; ++b) {
          hess[a][b] += w * x_at(row, a) * x_at(row, b);
        }
      }
    }
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = 0; b < a; ++b) hess[a][b] = hess[b][a];
    }
    for (std::size_t j = 1; j < dim; ++j) hess[j][j] += ridge;

    std::vector<double> delta = grad;
    if (!solve_linear(hess, delta)) break;  // degenerate curvature: give up, flagged below

    // Step halving on the gradient norm. A likelihood-based search cannot
    // discriminate steps once improvements fall below the FP resolution of
    // the summed log-likelihood; the gradient stays resolvable far below tol.
    double scale = 1.0;
    bool stepped = false;
    for (int h = 0; h < 30; ++h) {
      std::vector<double> trial = fit.coefficients;
      for (std::size_t j = 0; j < dim; ++j) trial[j] += scale * delta[j];
      gradient(trial, trial_grad);
      if (max_norm(trial_grad) < gmax) {
        fit.coefficients = std::move(trial);
        grad = trial_grad;
        stepped = true;
        break;
      }
      scale *= 0.5;
    }
    if (!stepped) break;

    double bmax = 0;
    for (double b : fit.coefficients) bmax = std::max(bmax, std::abs(b));
    if (bmax > kSeparationBound) break;  // runaway coefficients, separation
  }

  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(design.rows.size());
  labels.reserve(design.rows.size());
  for (const auto& row : design.rows) {
    double eta = 0;
    for (std::size_t j = 0; j < dim; ++j) eta += fit.coefficients[j] * x_at(row, j);
    scores.push_back(eta);
    labels.push_back(row.label);
  }

  // Without a penalty, a score that separates the classes completely means the
  // likelihood has no finite maximizer; the vanishing gradient there is
  // saturation, not convergence.
  if (fit.converged && ridge == 0.0) {
    double min_pos = std::numeric_limits<double>::infinity();
    double max_neg = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (labels[i] == 1) {
        min_pos = std::min(min_pos, scores[i]);
      } else {
        max_neg = std::max(max_neg, scores[i]);
      }
    }
    if (min_pos > max_neg) fit.converged = false;
  }

  fit.auc = auc(scores, labels);
  return fit;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("auc: size mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  std::uint64_t n_pos = 0, n_neg = 0;
  for (int label : labels) {
    if (label == 1) {
      ++n_pos;
    } else if (label == 0) {
      ++n_neg;
    } else {
      throw std::invalid_argument("auc: labels must be 0 or 1");
    }
  }
  if (n_pos == 0 || n_neg == 0) throw DataError("auc: need both classes");

  // 2U = 2 * (pos > neg pairs) + tie pairs, accumulated exactly in integers.
  std::uint64_t two_u = 0;
  std::uint64_t negatives_below = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::uint64_t group_pos = 0, group_neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1) {
        ++group_pos;
      } else {
        ++group_neg;
      }
      ++j;
    }
    two_u += 2 * group_pos * negatives_below + group_pos * group_neg;
    negatives_below += group_neg;
    i = j;
  }
  return static_cast<double>(two_u) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace cyclephase
