#include "cyclephase/fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "cyclephase/errors.hpp"

namespace cyclephase {

namespace {

// FFTW planning is not thread-safe; execution of a fresh plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<std::complex<double>> transform(std::span<const std::complex<double>> input,
                                            int sign) {
  if (input.empty()) throw DataError("fft: empty input");
  const auto n = input.size();
  std::vector<std::complex<double>> in(input.begin(), input.end());
  std::vector<std::complex<double>> out(n);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_plan plan = fftw_plan_dft_1d(
        static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
        reinterpret_cast<fftw_complex*>(out.data()), sign, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> input) {
  return transform(input, FFTW_FORWARD);
}

std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> input) {
  auto out = transform(input, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(input.size());
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<std::complex<double>> rfft(std::span<const double> input) {
  if (input.empty()) throw DataError("rfft: empty input");
  const auto n = input.size();
  std::vector<double> in(input.begin(), input.end());
  std::vector<std::complex<double>> out(n / 2 + 1);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_plan plan = fftw_plan_dft_r2c_1d(
        static_cast<int>(n), in.data(),
        reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace cyclephase
