#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace acg {

// White-noise border deformations of the central micro-wire.
struct EdgeNoiseSpec {
  double rms_amplitude = 5e-9;  // m
  double grid_step = 1e-6;      // m
  double z_extent = 2e-3;       // m (must hold >= 100 grid steps)
  std::uint64_t seed = 1;

  std::size_t grid_size() const;
  void validate() const;
};

struct EdgeProfiles {
  std::vector<double> z;      // m
  std::vector<double> left;   // m
  std::vector<double> right;  // m
  std::uint64_t seed = 0;
  double rms_amplitude = 0.0;
};

// Rough field sampled along the guide line, stored per ampere of central-wire
// current. Field at current I is I * per-amp array.
struct RoughRealization {
  std::vector<double> z;              // m, uniform
  std::vector<double> bz_per_amp;     // T/A, zero mean over the grid
  std::vector<double> bx_per_amp;     // T/A
  std::vector<double> by_per_amp;     // T/A
  double height = 7e-6;               // m
  double reference_current = 13e-3;   // A
  std::uint64_t seed = 0;
  double rms_amplitude = 0.0;         // m, edge noise used
  double grid_step = 0.0;             // m
  std::string provenance = "direct";  // direct | spectral

  // Inner 50% of the grid (away from the wire ends).
  std::size_t window_begin() const { return z.size() / 4; }
  std::size_t window_end() const { return z.size() - z.size() / 4; }

  // rms of mu * |delta Bz| * I over the usable window, J
  double energy_rms(double current) const;
};

// Magnitude of the delta-Bz response (per unit border amplitude per ampere)
// at the guide height, versus wavevector. The response to a border mode
// a sin(kz) is 90 degrees out of phase: tf(k) * a * cos(kz).
struct TransferFunction {
  std::vector<double> k;            // rad/m
  std::vector<double> bz_response;  // T per (m of border amplitude) per A
  std::vector<double> bx_response;
  std::vector<double> by_response;
  double height = 0.0;              // m
};

struct WireRoughnessGeometry {
  double wire_width = 700e-9;  // m
  double height = 7e-6;        // m, guide line above the wire
};

EdgeProfiles generate_edge_profiles(const EdgeNoiseSpec& spec);

// Direct Biot-Savart oracle: the wire centerline meanders by
// (left+right)/2 and the field on the guide line is re-evaluated segment by
// segment; the straight-wire field is subtracted.
RoughRealization rough_field_direct(const EdgeProfiles& edges,
                                    const WireRoughnessGeometry& geom,
                                    double reference_current);

TransferFunction compute_transfer_function(const WireRoughnessGeometry& geom,
                                           const std::vector<double>& k_grid,
                                           double z_extent = 2e-3,
                                           double grid_step = 1e-6);

// Fast path: shape a white Gaussian spectrum with the transfer function.
// Uses the same edge-profile streams as the direct path, so matched seeds
// give pointwise-comparable realizations.
RoughRealization rough_field_spectral(const EdgeNoiseSpec& spec,
                                      const TransferFunction& tf,
                                      double reference_current,
                                      double height);

// Rescale so rms of mu*|dBz|*I over the usable window equals k_B * target_rms.
RoughRealization calibrate_to_energy_rms(const RoughRealization& real,
                                         double target_rms_kelvin, double current);

void save_realization(const std::filesystem::path& path, const RoughRealization& r,
                      const std::map<std::string, std::string>& extra_meta = {});
RoughRealization load_realization(const std::filesystem::path& path);

}  // namespace acg
