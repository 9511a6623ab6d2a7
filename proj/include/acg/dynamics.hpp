#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "acg/potential.hpp"

namespace acg {

struct ParticleState {
  Vec3 position = Vec3::Zero();  // m
  Vec3 velocity = Vec3::Zero();  // m/s
};

struct EnsembleSpec {
  std::size_t n = 2000;
  double temperature = 280e-9;     // K
  double cm_displacement = 20e-6;  // m, initial centre-of-mass offset along z
  std::uint64_t seed = 1;

  void validate() const;
};

struct IntegratorConfig {
  double dt = 0.0;               // s
  double t_max = 0.0;            // s
  double sample_interval = 0.0;  // s, trajectory/survival sampling cadence
  double escape_radius = 50e-6;  // m, transverse distance counted as loss
  // Fastest dynamical angular frequency the run must resolve; dt is rejected
  // unless dt <= (2 pi / fastest_omega) / 40.
  double fastest_omega = 0.0;

  void validate() const;
  std::size_t n_steps() const;
  std::size_t steps_per_sample() const;
};

struct TrajectoryRecord {
  std::vector<double> t;   // s
  std::vector<double> cm;  // m, ensemble-averaged z
  // max over particles of |E(t) - E(0)| / E(0)
  double max_energy_drift = 0.0;
};

struct SurvivalRecord {
  std::vector<double> t;      // s
  std::vector<double> alive;  // count at each sample time
  std::vector<double> loss_time;  // per particle, NaN if it survived
};

// Thermal ensemble in a tabulated 1D potential: positions rejection-sampled
// from exp(-(V - Vmin)/kT), velocities Maxwellian, then the whole cloud is
// shifted by cm_displacement. Deterministic given the seed; independent of
// thread count. Throws if the rejection acceptance drops below 1e-4.
std::vector<ParticleState> sample_thermal_ensemble_1d(const EnsembleSpec& spec,
                                                      const PotentialProfile& profile);

// 3D ensemble: transverse coordinates Gaussian with the harmonic widths of the
// trap (omega_perp from cfg, scaled by 1/sqrt(2) in modulated mode),
// longitudinal ones with the width set by omega_z.
std::vector<ParticleState> sample_thermal_ensemble_3d(const EnsembleSpec& spec,
                                                      const TrapConfig& cfg,
                                                      double omega_z);

// Velocity-Verlet integration of independent particles in the 1D potential
// (cubic-spline force). The serial and parallel variants are bit-identical;
// the parallel one distributes particles across OpenMP threads and reduces
// trajectories in fixed index order.
TrajectoryRecord integrate_static_1d(std::vector<ParticleState>& states,
                                     const PotentialProfile& profile,
                                     const IntegratorConfig& icfg);
TrajectoryRecord integrate_static_1d_serial(std::vector<ParticleState>& states,
                                            const PotentialProfile& profile,
                                            const IntegratorConfig& icfg);

// RK4 integration in the full time-dependent 3D potential mu|B(r,t)|.
// A particle whose transverse distance from the guide exceeds escape_radius
// is counted as lost and no longer integrated.
SurvivalRecord integrate_modulated_3d(std::vector<ParticleState>& states,
                                      const TrapConfig& cfg,
                                      const IntegratorConfig& icfg);

struct DampingStudyRow {
  double scale = 0.0;              // roughness multiplier
  double tau_mean = 0.0;           // s
  double tau_scatter = 0.0;        // s, std over realizations
  bool any_lower_bound = false;    // some fit only bounded tau from below
  std::vector<double> tau;         // per realization
};

// Centre-of-mass damping time versus roughness amplitude: for each scale the
// smooth profile plus scale * rough_terms[i] is integrated and the CM fit with
// a decaying cosine. rough_terms holds delta-V arrays (J) on the profile grid.
std::vector<DampingStudyRow> damping_vs_roughness_study(
    const PotentialProfile& smooth,
    const std::vector<std::vector<double>>& rough_terms,
    const std::vector<double>& scales, const EnsembleSpec& spec,
    const IntegratorConfig& icfg);

struct MathieuResult {
  bool stable = false;
  double trace = 0.0;            // of the one-period monodromy matrix
  double determinant = 0.0;      // should be 1 (area preservation)
  std::complex<double> multipliers[2];
};

// Parametric stability of x'' + omega_perp^2 cos^2(omega_m t) x = 0 over one
// period of the coefficient.
MathieuResult mathieu_stability(double omega_perp_dc, double omega_m);

// Smallest omega_m above which the motion stays stable, found by scanning
// down from 2 omega_perp and bisecting the boundary.
double mathieu_threshold(double omega_perp_dc);

struct LifetimeRow {
  double omega_m = 0.0;   // rad/s
  double lifetime = 0.0;  // s
  double sigma = 0.0;     // s, fit uncertainty
  bool lower_bound = false;
};

// Trapped-fraction lifetime versus modulation frequency. The exponential is
// fit only after t_skip (typically one longitudinal period) to discard the
// initial sloshing transient.
std::vector<LifetimeRow> lifetime_scan(const std::vector<double>& omega_m_values,
                                       TrapConfig cfg, const EnsembleSpec& spec,
                                       const IntegratorConfig& icfg_base,
                                       double omega_z, double t_skip);

}  // namespace acg
