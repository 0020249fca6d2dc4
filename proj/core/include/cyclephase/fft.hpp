#pragma once

#include <complex>
#include <span>
#include <vector>

namespace cyclephase {

// Thin FFT layer; any transform length is supported. Thread-safe.
std::vector<std::complex<double>> fft(std::span<const std::complex<double>> input);
std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> input);

// Real-input transform; returns the n/2 + 1 non-negative frequency bins.
std::vector<std::complex<double>> rfft(std::span<const double> input);

}  // namespace cyclephase
