#include "acg/fft.hpp"

#include <fftw3.h>

#include "acg/errors.hpp"

namespace acg {

std::vector<std::complex<double>> rfft(const std::vector<double>& x) {
  std::size_t n = x.size();
  if (n == 0) throw NumericsError("rfft of empty array");
  std::vector<double> in(x);
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                        reinterpret_cast<fftw_complex*>(out.data()),
                                        FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return out;
}

std::vector<double> irfft(const std::vector<std::complex<double>>& spec, std::size_t n) {
  if (spec.size() != n / 2 + 1) throw NumericsError("irfft spectrum length mismatch");
  std::vector<std::complex<double>> in(spec);
  std::vector<double> out(n);
  fftw_plan plan = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                        reinterpret_cast<fftw_complex*>(in.data()),
                                        out.data(), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  for (double& v : out) v /= static_cast<double>(n);
  return out;
}

}  // namespace acg
