#pragma once

#include <cstdint>
#include <vector>

#include "acg/dynamics.hpp"

namespace acg {

struct DensityProfile {
  std::vector<double> z;      // m, bin centres (uniform)
  std::vector<double> count;  // atoms per bin (real-valued after smoothing)
  double bin_width = 0.0;     // m
  double n_total = 0.0;       // atoms inside the histogram range
};

// Imaging chain used when emulating an absorption picture of the cloud.
struct ResolutionModel {
  double psf_sigma = 8e-6;      // m, optical point-spread width
  double pixel = 6e-6;          // m
  double time_of_flight = 1.5e-3;  // s
};

// Ballistic longitudinal positions after free flight.
std::vector<double> tof_positions(const std::vector<ParticleState>& states,
                                  double time_of_flight);

DensityProfile bin_density(const std::vector<double>& positions, double z_min,
                           double z_max, double bin_width);

// Gaussian smoothing of the binned profile; total count is preserved.
// The histogram must extend at least 6 sigma beyond the kernel width.
DensityProfile convolve_resolution(const DensityProfile& profile, double psf_sigma);

// Independent Gaussian noise per pixel (detection/photon noise emulation).
DensityProfile add_pixel_noise(const DensityProfile& profile, double sigma_counts,
                               std::uint64_t seed);

struct ExtractedPotential {
  std::vector<double> z;  // m, only bins that passed the count threshold
  std::vector<double> v;  // J, relative to the densest bin
};

// Boltzmann inversion V = -kT ln(n / n_max). Bins below min_count are masked
// out, never interpolated across.
ExtractedPotential extract_potential(const DensityProfile& profile,
                                     double temperature, double min_count = 10.0);

// kT = m <v_z^2>
double temperature_from_velocity(const std::vector<ParticleState>& states);

struct RoughnessStats {
  double rms_kelvin = 0.0;
  std::vector<double> k;    // rad/m
  std::vector<double> psd;  // K^2 m, one-sided periodogram of V/k_B
};

// rms and periodogram of a mean-removed potential sample on a uniform grid.
RoughnessStats roughness_statistics(const std::vector<double>& z,
                                    const std::vector<double>& v_joule);

}  // namespace acg
