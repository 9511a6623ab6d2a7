#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "acg/analysis.hpp"
#include "acg/constants.hpp"
#include "acg/errors.hpp"
#include "acg/rng.hpp"

using namespace acg;
using namespace acg::constants;

namespace {

double total(const DensityProfile& p) {
  return std::accumulate(p.count.begin(), p.count.end(), 0.0);
}

}  // namespace

TEST_CASE("binning covers the range and counts everything inside") {
  std::vector<double> pos = {-9e-6, 0.0, 1e-6, 1.4e-6, 9e-6, 25e-6};  // last outside
  DensityProfile p = bin_density(pos, -10e-6, 10e-6, 2e-6);
  CHECK(p.bin_width == doctest::Approx(2e-6));
  CHECK(p.n_total == 5.0);
  CHECK(total(p) == doctest::Approx(5.0));
  // bin centres are uniform
  for (std::size_t i = 1; i < p.z.size(); ++i)
    CHECK(p.z[i] - p.z[i - 1] == doctest::Approx(2e-6).epsilon(1e-12));
}

TEST_CASE("resolution convolution preserves the total count") {
  std::vector<double> pos;
  CounterRng r(3, 0, 0);
  for (int i = 0; i < 5000; ++i) pos.push_back(100e-6 * r.gauss());
  DensityProfile p = bin_density(pos, -500e-6, 500e-6, 2e-6);
  DensityProfile s = convolve_resolution(p, 8e-6);
  CHECK(total(s) == doctest::Approx(total(p)).epsilon(1e-9));
  REQUIRE(s.z.size() == p.z.size());
}

TEST_CASE("convolution demands six sigma of margin") {
  std::vector<double> pos = {0.0};
  DensityProfile p = bin_density(pos, -20e-6, 20e-6, 2e-6);
  CHECK_THROWS_AS(convolve_resolution(p, 8e-6), ConfigError);
}

TEST_CASE("a 60 um corrugation survives 8 um optics at ~70% contrast") {
  // density 1 + 0.5 cos(k z): after Gaussian blur the modulation shrinks by
  // exp(-k^2 sigma^2 / 2) = 0.704 for lambda = 60 um, sigma = 8 um
  double lambda = 60e-6, sigma = 8e-6;
  double k = 2.0 * pi / lambda;
  DensityProfile p;
  p.bin_width = 1e-6;
  for (double z = -300e-6; z <= 300e-6 + 0.5e-6; z += 1e-6) {
    p.z.push_back(z);
    p.count.push_back(1.0 + 0.5 * std::cos(k * z));
  }
  p.n_total = total(p);
  DensityProfile s = convolve_resolution(p, sigma);

  // measure the modulation amplitude on the middle third
  double amp = 0.0;
  std::size_t n = s.z.size();
  for (std::size_t i = n / 3; i < 2 * n / 3; ++i)
    amp = std::max(amp, std::abs(s.count[i] - 1.0));
  double expect = 0.5 * std::exp(-k * k * sigma * sigma / 2.0);
  CHECK(amp == doctest::Approx(expect).epsilon(0.02));
}

TEST_CASE("pixel noise is seeded and optional") {
  DensityProfile p;
  p.bin_width = 6e-6;
  for (int i = 0; i < 100; ++i) {
    p.z.push_back(i * 6e-6);
    p.count.push_back(50.0);
  }
  DensityProfile a = add_pixel_noise(p, 5.0, 11);
  DensityProfile b = add_pixel_noise(p, 5.0, 11);
  DensityProfile c = add_pixel_noise(p, 5.0, 12);
  bool same_ab = true, same_ac = true;
  for (std::size_t i = 0; i < p.count.size(); ++i) {
    same_ab &= a.count[i] == b.count[i];
    same_ac &= a.count[i] == c.count[i];
  }
  CHECK(same_ab);
  CHECK_FALSE(same_ac);

  DensityProfile clean = add_pixel_noise(p, 0.0, 11);
  for (std::size_t i = 0; i < p.count.size(); ++i)
    CHECK(clean.count[i] == p.count[i]);
}

TEST_CASE("Boltzmann inversion inverts a synthetic Boltzmann profile") {
  double temp = 280e-9;
  double omega = 2.0 * pi * 7.0;
  DensityProfile p;
  p.bin_width = 2e-6;
  auto vz = [&](double z) { return 0.5 * m_rb87 * omega * omega * z * z; };
  for (double z = -600e-6; z <= 600e-6; z += 2e-6) {
    p.z.push_back(z);
    p.count.push_back(1e4 * std::exp(-vz(z) / (k_B * temp)));
  }
  p.n_total = total(p);

  ExtractedPotential ex = extract_potential(p, temp, 10.0);
  REQUIRE(!ex.z.empty());
  CHECK(ex.z.size() < p.z.size());  // thin tails are masked out
  for (std::size_t i = 0; i < ex.z.size(); ++i)
    CHECK(ex.v[i] == doctest::Approx(vz(ex.z[i])).epsilon(1e-6));
}

TEST_CASE("bins below the count threshold are excluded, not interpolated") {
  DensityProfile p;
  p.bin_width = 1e-6;
  for (int i = 0; i < 9; ++i) {
    p.z.push_back(i * 1e-6);
    p.count.push_back(i == 4 ? 2.0 : 100.0);  // hole in the middle
  }
  p.n_total = total(p);
  ExtractedPotential ex = extract_potential(p, 280e-9, 10.0);
  CHECK(ex.z.size() == 8);
  for (double z : ex.z) CHECK(std::abs(z - 4e-6) > 1e-7);
}

TEST_CASE("kinetic temperature estimator") {
  double temp = 280e-9;
  double vth = std::sqrt(k_B * temp / m_rb87);
  std::vector<ParticleState> states(100000);
  CounterRng r(21, 0, 0);
  for (auto& s : states) s.velocity.z() = vth * r.gauss();
  CHECK(temperature_from_velocity(states) == doctest::Approx(temp).epsilon(0.02));
}

TEST_CASE("time of flight translates positions ballistically") {
  std::vector<ParticleState> states(2);
  states[0].position.z() = 1e-6;
  states[0].velocity.z() = 1e-3;
  states[1].position.z() = -2e-6;
  states[1].velocity.z() = -0.5e-3;
  auto pos = tof_positions(states, 10e-3);
  CHECK(pos[0] == doctest::Approx(1e-6 + 1e-3 * 10e-3));
  CHECK(pos[1] == doctest::Approx(-2e-6 - 0.5e-3 * 10e-3));
}

TEST_CASE("roughness statistics of a pure sine") {
  double amp_kelvin = 30e-9;
  double lambda = 100e-6;
  std::vector<double> z, v;
  std::size_t n = 1000;
  double dz = 1e-6;
  for (std::size_t i = 0; i < n; ++i) {
    z.push_back(i * dz);
    v.push_back(k_B * amp_kelvin * std::sin(2.0 * pi * z.back() / lambda));
  }
  RoughnessStats st = roughness_statistics(z, v);
  CHECK(st.rms_kelvin == doctest::Approx(amp_kelvin / std::sqrt(2.0)).epsilon(1e-3));

  // the periodogram peaks at k = 2 pi / lambda
  std::size_t imax = 0;
  for (std::size_t i = 1; i < st.psd.size(); ++i)
    if (st.psd[i] > st.psd[imax]) imax = i;
  CHECK(st.k[imax] == doctest::Approx(2.0 * pi / lambda).epsilon(0.01));

  // one-sided periodogram integrates to the variance
  double dk = st.k[1] - st.k[0];
  double integral = 0.0;
  for (double p : st.psd) integral += p * dk;
  CHECK(integral == doctest::Approx(amp_kelvin * amp_kelvin / 2.0).epsilon(0.01));
}
