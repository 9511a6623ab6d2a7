#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace acg {

// Flat view of a nested key=value config file. Keys are dotted paths; values
// keep their raw text until a typed getter interprets them. Every physical
// quantity must carry a unit suffix ("13 mA", "1.8 G"); bare numbers are
// accepted only by the dimensionless getters.
class ConfigMap {
 public:
  static ConfigMap parse_file(const std::filesystem::path& path);
  static ConfigMap parse_string(const std::string& text);

  bool has(const std::string& key) const;

  // Value in SI units; `dimension` is one of: length, current, field,
  // temperature, frequency, time, gradient.
  double quantity(const std::string& key, const std::string& dimension) const;
  double quantity_or(const std::string& key, const std::string& dimension,
                     double fallback_si) const;
  std::vector<double> quantity_list(const std::string& key,
                                    const std::string& dimension) const;

  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::uint64_t integer(const std::string& key) const;
  std::uint64_t integer_or(const std::string& key, std::uint64_t fallback) const;
  std::string text(const std::string& key) const;
  std::string text_or(const std::string& key, const std::string& fallback) const;

  // Keys present in the file but never read by any getter.
  std::vector<std::string> unread_keys() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> read_;
};

enum class ScenarioKind { DcPositive, DcNegative, Ac };

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Ac;

  // trap
  double pair_spacing = 2.5e-6;     // m
  double wire_length = 2e-3;        // m
  double central_current = 13e-3;   // A
  double bias_current = 15e-3;      // A
  double ioffe_field = 1.8e-4;      // T
  double h_current = 0.4;           // A, each H leg
  double residual_bx = 0.0;         // T
  double residual_by = 0.0;         // T
  double modulation_frequency = 30e3;  // Hz (ignored for DC kinds)

  // roughness
  double edge_rms = 5e-9;        // m
  double grid_step = 1e-6;       // m
  double z_extent = 2e-3;        // m
  double target_roughness = 30e-9;  // K of DC rms; 0 keeps the raw amplitude
  std::size_t realizations = 1;

  // ensemble
  std::size_t atoms = 2000;
  double temperature = 280e-9;    // K
  double displacement = 20e-6;    // m

  // integrator
  double dt = 0.0;                // s, 0 = derive from the stability rule
  double t_max = 2.0;             // s
  double sample_interval = 1e-3;  // s
  double escape_radius = 12e-6;   // m, beyond the guide's outward saddle

  // analysis
  double psf_sigma = 8e-6;        // m
  double pixel = 6e-6;            // m
  double time_of_flight = 0.0;    // s, 0 = folded imaging model (no explicit tof)
  double noise_counts = 0.0;      // atoms per pixel, Gaussian

  // lifetime scan
  std::vector<double> scan_frequencies;  // Hz

  std::uint64_t seed = 0;
  bool seed_set = false;
  std::filesystem::path out_dir = "out";

  void validate() const;
};

// Defaults overlaid with the file contents; rejects unknown keys and values
// outside the sanity bounds. `path` may be empty (defaults only), but a seed
// must then arrive via the override.
ScenarioConfig load_scenario(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override,
                             std::optional<std::filesystem::path> out_override);

}  // namespace acg
