#pragma once

#include <complex>
#include <vector>

namespace acg {

// Thin FFTW wrappers; unnormalized forward, 1/n on the inverse.
std::vector<std::complex<double>> rfft(const std::vector<double>& x);
std::vector<double> irfft(const std::vector<std::complex<double>>& spec, std::size_t n);

}  // namespace acg
