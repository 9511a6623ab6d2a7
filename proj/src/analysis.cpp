#include "acg/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "acg/constants.hpp"
#include "acg/errors.hpp"
#include "acg/fft.hpp"
#include "acg/rng.hpp"

namespace acg {

namespace {

using constants::k_B;
using constants::m_rb87;
using constants::pi;

}  // namespace

std::vector<double> tof_positions(const std::vector<ParticleState>& states,
                                  double time_of_flight) {
  if (!(time_of_flight >= 0.0)) throw ConfigError("time of flight must be >= 0");
  std::vector<double> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i)
    out[i] = states[i].position.z() + states[i].velocity.z() * time_of_flight;
  return out;
}

DensityProfile bin_density(const std::vector<double>& positions, double z_min,
                           double z_max, double bin_width) {
  if (!(bin_width > 0.0) || !(z_max > z_min))
    throw ConfigError("bin_density needs a positive bin width and a proper range");
  std::size_t n_bins = static_cast<std::size_t>(std::ceil((z_max - z_min) / bin_width));
  DensityProfile p;
  p.bin_width = bin_width;
  p.z.resize(n_bins);
  p.count.assign(n_bins, 0.0);
  for (std::size_t i = 0; i < n_bins; ++i)
    p.z[i] = z_min + (static_cast<double>(i) + 0.5) * bin_width;
  for (double x : positions) {
    if (x < z_min || x >= z_min + static_cast<double>(n_bins) * bin_width) continue;
    std::size_t i = static_cast<std::size_t>((x - z_min) / bin_width);
    p.count[i] += 1.0;
    p.n_total += 1.0;
  }
  return p;
}

DensityProfile convolve_resolution(const DensityProfile& profile, double psf_sigma) {
  if (!(psf_sigma > 0.0)) throw ConfigError("psf sigma must be positive");
  if (profile.z.size() < 2) throw ConfigError("profile too short to smooth");
  double extent = profile.z.back() - profile.z.front();
  if (extent < 6.0 * psf_sigma)
    throw ConfigError("histogram narrower than 6 psf sigma; smoothing would "
                      "push weight off the grid");

  // discrete Gaussian kernel, normalized so the total count is conserved
  int half = static_cast<int>(std::ceil(4.0 * psf_sigma / profile.bin_width));
  std::vector<double> kernel(2 * half + 1);
  double norm = 0.0;
  for (int j = -half; j <= half; ++j) {
    double x = static_cast<double>(j) * profile.bin_width;
    kernel[j + half] = std::exp(-x * x / (2.0 * psf_sigma * psf_sigma));
    norm += kernel[j + half];
  }
  for (double& kv : kernel) kv /= norm;

  DensityProfile out = profile;
  std::fill(out.count.begin(), out.count.end(), 0.0);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(profile.count.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (profile.count[i] == 0.0) continue;
    for (int j = -half; j <= half; ++j) {
      std::ptrdiff_t k = i + j;
      if (k < 0 || k >= n) {
        // reflect at the edges so no weight is lost
        k = k < 0 ? -k - 1 : 2 * n - k - 1;
      }
      out.count[k] += profile.count[i] * kernel[j + half];
    }
  }
  return out;
}

DensityProfile add_pixel_noise(const DensityProfile& profile, double sigma_counts,
                               std::uint64_t seed) {
  if (!(sigma_counts >= 0.0)) throw ConfigError("noise sigma must be >= 0");
  DensityProfile out = profile;
  CounterRng rng(seed, 0, 0);
  for (double& c : out.count) c += sigma_counts * rng.gauss();
  return out;
}

ExtractedPotential extract_potential(const DensityProfile& profile,
                                     double temperature, double min_count) {
  if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
  double n0 = *std::max_element(profile.count.begin(), profile.count.end());
  if (!(n0 > 0.0)) throw NumericsError("empty density profile");
  ExtractedPotential out;
  const double kt = k_B * temperature;
  for (std::size_t i = 0; i < profile.count.size(); ++i) {
    if (profile.count[i] < min_count) continue;  // masked, not interpolated
    out.z.push_back(profile.z[i]);
    out.v.push_back(-kt * std::log(profile.count[i] / n0));
  }
  if (out.z.empty())
    throw NumericsError("no bin reached the extraction count threshold");
  return out;
}

double temperature_from_velocity(const std::vector<ParticleState>& states) {
  if (states.empty()) throw ConfigError("empty ensemble");
  double s = 0.0;
  for (const auto& st : states) s += st.velocity.z() * st.velocity.z();
  return m_rb87 * s / (static_cast<double>(states.size()) * k_B);
}

RoughnessStats roughness_statistics(const std::vector<double>& z,
                                    const std::vector<double>& v_joule) {
  if (z.size() != v_joule.size() || z.size() < 4)
    throw ConfigError("roughness_statistics needs matching grids of >= 4 points");
  const std::size_t n = z.size();
  const double dz = z[1] - z[0];
  double mean = 0.0;
  for (double v : v_joule) mean += v;
  mean /= static_cast<double>(n);

  std::vector<double> centered(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    centered[i] = (v_joule[i] - mean) / k_B;  // K
    ss += centered[i] * centered[i];
  }

  RoughnessStats stats;
  stats.rms_kelvin = std::sqrt(ss / static_cast<double>(n));
  auto spec = rfft(centered);
  const double span = dz * static_cast<double>(n);
  for (std::size_t m = 1; m < spec.size(); ++m) {
    stats.k.push_back(2.0 * pi * static_cast<double>(m) / span);
    // one-sided periodogram normalized so sum(psd) * dk = variance
    double mag2 = std::norm(spec[m]) / (static_cast<double>(n) * static_cast<double>(n));
    double factor = (2 * m == n) ? 1.0 : 2.0;  // Nyquist bin is not doubled
    stats.psd.push_back(factor * mag2 * span / (2.0 * pi));
  }
  return stats;
}

}  // namespace acg
