#include "cyclephase/filtering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "cyclephase/errors.hpp"

namespace cyclephase {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Complex = std::complex<double>;

std::string default_label(double low, double high) {
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return std::string(buf);
  };
  return fmt(low) + "-" + fmt(high);
}

// Polynomial product; coefficients in descending powers, both monic or not.
std::vector<double> poly_multiply(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// Groups digital poles into biquad denominators. Complex poles pair with
// their conjugates; real poles pair among themselves.
std::vector<Biquad> pair_poles(const std::vector<Complex>& poles) {
  std::vector<Complex> upper;
  std::vector<double> reals;
  for (const auto& p : poles) {
    const double tol = 1e-10 * std::max(1.0, std::abs(p));
    if (std::abs(p.imag()) <= tol) {
      reals.push_back(p.real());
    } else if (p.imag() > 0) {
      upper.push_back(p);
    }
  }
  std::sort(upper.begin(), upper.end(),
            [](const Complex& a, const Complex& b) { return std::abs(a) > std::abs(b); });
  std::sort(reals.begin(), reals.end(),
            [](double a, double b) { return std::abs(a) > std::abs(b); });

  std::vector<Biquad> sections;
  for (const auto& p : upper) {
    sections.push_back(Biquad{0, 0, 0, -2.0 * p.real(), std::norm(p)});
  }
  for (std::size_t i = 0; i + 1 < reals.size(); i += 2) {
    sections.push_back(Biquad{0, 0, 0, -(reals[i] + reals[i + 1]), reals[i] * reals[i + 1]});
  }
  if (reals.size() % 2 != 0) {
    throw NumericError("bandpass design produced an unpaired real pole");
  }
  return sections;
}

}  // namespace

BandSpec BandSpec::make(double low_period_days, double high_period_days, std::string label) {
  if (!(low_period_days > 0) || !(high_period_days > low_period_days)) {
    throw std::invalid_argument("band: need 0 < low_period < high_period");
  }
  BandSpec spec;
  spec.low_period_days = low_period_days;
  spec.high_period_days = high_period_days;
  spec.label = label.empty() ? default_label(low_period_days, high_period_days)
                             : std::move(label);
  return spec;
}

IirCoefficients design_bandpass(const BandSpec& band, Duration sample_step, int order) {
  if (!(band.low_period_days > 0) || !(band.high_period_days > band.low_period_days)) {
    throw std::invalid_argument("design_bandpass: invalid band");
  }
  if (order < 1 || order > 4) {
    throw std::invalid_argument("design_bandpass: order must be in 1..4");
  }
  if (!(sample_step > 0)) throw std::invalid_argument("design_bandpass: step must be positive");

  const double fs = kSecondsPerDay / sample_step;       // samples per day
  const double f_lo = 1.0 / band.high_period_days;      // cycles per day
  const double f_hi = 1.0 / band.low_period_days;
  if (f_hi >= fs / 2.0) {
    throw DataError("design_bandpass: band edge at or above the Nyquist frequency");
  }

  // Pre-warp the corners so the bilinear transform lands them exactly.
  const double w1 = 2.0 * fs * std::tan(kPi * f_lo / fs);
  const double w2 = 2.0 * fs * std::tan(kPi * f_hi / fs);
  const double bw = w2 - w1;
  const double w0 = std::sqrt(w1 * w2);

  // Butterworth prototype: poles equally spaced on the left unit semicircle.
  std::vector<Complex> proto;
  for (int k = 1; k <= order; ++k) {
    const double theta = kPi * (2.0 * k - 1.0) / (2.0 * order) + kPi / 2.0;
    proto.emplace_back(std::cos(theta), std::sin(theta));
  }

  // Lowpass -> bandpass: each prototype pole splits into a pair; the `order`
  // zeros at infinity become `order` zeros at s = 0 with gain bw^order.
  std::vector<Complex> analog_poles;
  analog_poles.reserve(2 * static_cast<std::size_t>(order));
  for (const auto& p : proto) {
    const Complex plp = p * (bw / 2.0);
    const Complex disc = std::sqrt(plp * plp - Complex(w0 * w0, 0.0));
    analog_poles.push_back(plp + disc);
    analog_poles.push_back(plp - disc);
  }

  // Bilinear transform. Analog zeros at s = 0 map to z = 1; the degree
  // deficit contributes `order` zeros at z = -1.
  const double fs2 = 2.0 * fs;
  std::vector<Complex> digital_poles;
  digital_poles.reserve(analog_poles.size());
  Complex denom_prod(1.0, 0.0);
  for (const auto& p : analog_poles) {
    digital_poles.push_back((Complex(fs2, 0.0) + p) / (Complex(fs2, 0.0) - p));
    denom_prod *= Complex(fs2, 0.0) - p;
  }
  const double gain =
      std::pow(bw, order) * std::pow(fs2, order) / denom_prod.real();

  for (const auto& p : digital_poles) {
    if (!(std::abs(p) < 1.0)) {
      throw NumericError("design_bandpass: unstable design (pole on or outside the unit circle)");
    }
  }

  IirCoefficients coeffs;
  coeffs.order = order;
  coeffs.band = band;
  coeffs.sample_step = sample_step;
  coeffs.poles = digital_poles;
  coeffs.sections = pair_poles(digital_poles);
  if (coeffs.sections.size() != static_cast<std::size_t>(order)) {
    throw NumericError("design_bandpass: pole pairing failed");
  }
  // One zero at +1 and one at -1 per section: numerator (z^2 - 1). The
  // overall gain rides on the first section.
  for (std::size_t i = 0; i < coeffs.sections.size(); ++i) {
    const double g = (i == 0) ? gain : 1.0;
    coeffs.sections[i].b0 = g;
    coeffs.sections[i].b1 = 0.0;
    coeffs.sections[i].b2 = -g;
  }

  // Expanded polynomials, for inspection only.
  std::vector<double> num{1.0};
  std::vector<double> den{1.0};
  for (const auto& s : coeffs.sections) {
    num = poly_multiply(num, {s.b0, s.b1, s.b2});
    den = poly_multiply(den, {1.0, s.a1, s.a2});
  }
  coeffs.numerator = std::move(num);
  coeffs.denominator = std::move(den);
  return coeffs;
}

namespace {

// Steady-state DF2T state per section for a unit-step input, with the
// cumulative DC gain of the preceding sections folded in. Scaling these by
// the first input sample suppresses the start-up transient.
std::vector<std::array<double, 2>> step_initial_state(const std::vector<Biquad>& sections) {
  std::vector<std::array<double, 2>> zi;
  zi.reserve(sections.size());
  double scale = 1.0;
  for (const auto& s : sections) {
    const double a_sum = 1.0 + s.a1 + s.a2;
    const double b_sum = s.b0 + s.b1 + s.b2;
    double y_dc = 0.0;
    if (b_sum != 0.0) {
      if (a_sum == 0.0) throw NumericError("filtfilt: section has a pole at z = 1");
      y_dc = b_sum / a_sum;
    }
    const double z2 = s.b2 - s.a2 * y_dc;
    const double z1 = s.b1 - s.a1 * y_dc + z2;
    zi.push_back({scale * z1, scale * z2});
    scale *= y_dc;
  }
  return zi;
}

void sosfilt_in_place(const std::vector<Biquad>& sections, std::vector<double>& x,
                      std::vector<std::array<double, 2>> state) {
  for (std::size_t s = 0; s < sections.size(); ++s) {
    const Biquad& q = sections[s];
    double z1 = state[s][0];
    double z2 = state[s][1];
    for (double& v : x) {
      const double in = v;
      const double out = q.b0 * in + z1;
      z1 = q.b1 * in - q.a1 * out + z2;
      z2 = q.b2 * in - q.a2 * out;
      v = out;
    }
  }
}

}  // namespace

namespace {

// One forward-backward sweep: odd-reflection padding, forward pass, reverse,
// second pass, reverse, strip.
std::vector<double> filtfilt_directional(const IirCoefficients& coeffs,
                                         std::span<const double> values) {
  const std::size_t n = values.size();
  const std::size_t pad = static_cast<std::size_t>(3 * (2 * coeffs.order));

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) ext.push_back(2.0 * values[0] - values[pad - i]);
  ext.insert(ext.end(), values.begin(), values.end());
  for (std::size_t i = 0; i < pad; ++i) ext.push_back(2.0 * values[n - 1] - values[n - 2 - i]);

  const auto zi = step_initial_state(coeffs.sections);
  auto scaled = [&zi](double x0) {
    auto state = zi;
    for (auto& z : state) {
      z[0] *= x0;
      z[1] *= x0;
    }
    return state;
  };

  sosfilt_in_place(coeffs.sections, ext, scaled(ext.front()));
  std::reverse(ext.begin(), ext.end());
  sosfilt_in_place(coeffs.sections, ext, scaled(ext.front()));
  std::reverse(ext.begin(), ext.end());

  return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                             ext.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

}  // namespace

std::vector<double> filtfilt(const IirCoefficients& coeffs, std::span<const double> values) {
  if (coeffs.sections.empty()) throw std::invalid_argument("filtfilt: empty filter");
  const std::size_t n = values.size();
  const std::size_t min_len = static_cast<std::size_t>(3 * (2 * coeffs.order + 1));
  if (n <= min_len) throw DataError("filtfilt: segment too short for padding");

  // The sweep is run in both temporal orientations and averaged. A single
  // sweep is only approximately time-symmetric: its residual edge transient
  // outlives the padding for narrow bands. The average makes reversing the
  // input exactly equivalent to reversing the output, while keeping the
  // zero-phase and |H|^2 magnitude semantics of each sweep.
  const auto forward = filtfilt_directional(coeffs, values);
  std::vector<double> reversed(values.rbegin(), values.rend());
  const auto backward = filtfilt_directional(coeffs, reversed);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = 0.5 * (forward[i] + backward[n - 1 - i]);
  }
  return out;
}

double magnitude_response(const IirCoefficients& coeffs, double freq_cpd) {
  const double fs = kSecondsPerDay / coeffs.sample_step;
  const double omega = 2.0 * kPi * freq_cpd / fs;
  const Complex z_inv = std::exp(Complex(0.0, -omega));
  Complex h(1.0, 0.0);
  for (const auto& s : coeffs.sections) {
    const Complex num = Complex(s.b0, 0.0) + Complex(s.b1, 0.0) * z_inv +
                        Complex(s.b2, 0.0) * z_inv * z_inv;
    const Complex den = Complex(1.0, 0.0) + Complex(s.a1, 0.0) * z_inv +
                        Complex(s.a2, 0.0) * z_inv * z_inv;
    h *= num / den;
  }
  return std::abs(h);
}

std::vector<Segment> eligible_segments(const std::vector<Segment>& segments,
                                       const BandSpec& band, Duration step) {
  const double min_duration = 3.0 * band.high_period_days * kSecondsPerDay;
  std::vector<Segment> kept;
  for (const auto& seg : segments) {
    if (static_cast<double>(seg.length) * step >= min_duration) kept.push_back(seg);
  }
  return kept;
}

}  // namespace cyclephase
