#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "acg/analysis.hpp"
#include "acg/config.hpp"
#include "acg/dynamics.hpp"
#include "acg/potential.hpp"
#include "acg/roughness.hpp"

namespace acg {

// Ordered key=value document: resolved config, derived quantities and
// per-output checksums. The config hash is stamped into every output file so
// data can be traced back to the manifest that produced it.
struct RunManifest {
  std::vector<std::pair<std::string, std::string>> entries;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  std::string config_hash() const;
  void add_output(const std::filesystem::path& path);
  void write(const std::filesystem::path& path) const;
};

// Resolved scenario (defaults materialized) as manifest entries.
RunManifest manifest_for(const ScenarioConfig& sc);

// Finalized trap for the scenario; `rough` may be null. DC polarity and the
// modulation frequency follow sc.kind.
TrapConfig build_trap(const ScenarioConfig& sc,
                      std::shared_ptr<const RoughRealization> rough);

// Spectral-synthesis realization for one seed, calibrated so the DC energy
// rms equals sc.target_roughness (0 keeps the raw amplitude). The transfer
// function is computed once per wire geometry and cached.
RoughRealization make_realization(const ScenarioConfig& sc, std::uint64_t seed);

// z-grid covering the usable window of a realization.
std::vector<double> profile_grid(const RoughRealization& r);

// Longitudinal trap frequency from a harmonic fit of the smooth profile.
double measure_omega_z(const TrapConfig& trap, double fit_window = 100e-6);

void cmd_roughness(const ScenarioConfig& sc);
void cmd_profile(const ScenarioConfig& sc);
void cmd_cmo(const ScenarioConfig& sc);
void cmd_lifetime(const ScenarioConfig& sc);
void cmd_stability(const ScenarioConfig& sc);

}  // namespace acg
