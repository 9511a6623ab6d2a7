#pragma once

#include <memory>
#include <string>
#include <vector>

#include "acg/magnetostatics.hpp"
#include "acg/roughness.hpp"
#include "acg/spline.hpp"

namespace acg {

// omega_m = 0 means DC; the amplitudes are then constant currents with the
// stored polarity. "Positive DC" is I_c > 0 along +z.
struct ModulationSpec {
  double omega_m = 0.0;  // rad/s
  double phase = 0.0;    // rad
  double dc_sign = 1.0;  // +-1

  bool is_dc() const { return omega_m == 0.0; }
};

// Full trap description. Call finalize() after filling the fields; it locates
// the guide line, fixes the uniform longitudinal field so the trap-bottom
// field equals bz0, and caches splines/gradients.
struct TrapConfig {
  WireLayout five_wire;  // at the amplitude currents
  WireLayout h_wire;     // DC, not modulated
  double bz0 = 1.8e-4;   // T, longitudinal field at the trap bottom
  double residual_bx = 0.0, residual_by = 0.0;  // T, uncompensated stray field
  std::shared_ptr<const RoughRealization> rough;
  ModulationSpec modulation;
  double central_current = 13e-3;  // A, amplitude of the rough-field source

  // derived, set by finalize()
  double uniform_bz = 0.0;
  Eigen::Vector2d guide_xy = Eigen::Vector2d::Zero();
  double b_prime_dc = 0.0;     // T/m, five-wire quadrupole gradient at the guide
  double omega_perp_dc = 0.0;  // rad/s

  void finalize();

  double modulation_factor(double t) const;
  // Full instantaneous field, all sources.
  Vec3 field(const Vec3& r, double t) const;
  // Static (unmodulated) part only.
  Vec3 static_field(const Vec3& r) const;
  // Modulated part at unit modulation factor (five-wire + rough).
  Vec3 modulated_field_amplitude(const Vec3& r) const;

  Vec3 rough_field_at(double z) const;  // at amplitude current, T
  bool has_rough() const { return rough != nullptr; }

  // Instantaneous field and its exact spatial Jacobian (analytic segment
  // derivatives plus spline derivatives of the rough field). The force on a
  // low-field seeker is -mu grad|B| = -mu J^T B / |B|.
  void field_and_jacobian(const Vec3& r, double t, Vec3& b, Mat3& jac) const;

 private:
  CubicSpline rough_bx_, rough_by_, rough_bz_;
  bool finalized_ = false;
  void require_finalized() const;
};

struct PotentialProfile {
  std::vector<double> z;  // m
  std::vector<double> v;  // J
  std::string construction;  // dc | ac-averaged | ac-closed-form
};

struct HarmonicFitResult {
  double omega = 0.0;   // rad/s
  double center = 0.0;  // m
  double offset = 0.0;  // J
  std::vector<double> window_z;
  std::vector<double> residual;  // J, V minus fit on the window
  double rms_residual = 0.0;     // J
};

double instantaneous_potential(const TrapConfig& cfg, const Vec3& r, double t);

// One-cycle average by 64-node Gauss-Legendre quadrature.
double averaged_potential_numeric(const TrapConfig& cfg, const Vec3& r,
                                  int quadrature_nodes = 64);

// Closed-form approximation: mu|<Bz>| + (mu/2 Bz0)(|Bperp_w|^2/2 + |Bperp|^2).
double averaged_potential_closed_form(const TrapConfig& cfg, const Vec3& r);

PotentialProfile longitudinal_profile(const TrapConfig& cfg,
                                      const std::vector<double>& z_grid);

HarmonicFitResult harmonic_fit(const PotentialProfile& profile, double window);

double predicted_omega_z_ac(double omega_z_dc, double b_h_prime, double bz0);

struct AdiabaticityResult {
  double ratio = 0.0;
  double larmor_frequency = 0.0;  // Hz, mu_B Bz0 / (4 pi hbar)
};
AdiabaticityResult adiabaticity_ratio(double omega_m, double bz0);

// rms variation of the micro-motion energy F(z)^2/(4 m omega_m^2), J
double micromotion_roughness_estimate(const TrapConfig& cfg);

struct TransverseDefects {
  double meander_rms = 0.0;               // m
  double freq_modulation_relative = 0.0;  // dimensionless
};
TransverseDefects transverse_defect_estimates(const TrapConfig& cfg);

}  // namespace acg
