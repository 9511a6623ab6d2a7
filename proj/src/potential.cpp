#include "acg/potential.hpp"

#include <cmath>
#include <cstdio>

#include "acg/constants.hpp"
#include "acg/errors.hpp"
#include "acg/fitting.hpp"

namespace acg {

namespace {

using constants::k_B;
using constants::m_rb87;
using constants::mu_eff;
using constants::pi;

struct GaussLegendre {
  std::vector<double> x, w;  // on [-1, 1]
};

// Newton iteration on the Legendre polynomial roots.
GaussLegendre gauss_legendre(int n) {
  GaussLegendre g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        g.x[n - 1 - i] = x;
        g.w[n - 1 - i] = w;
        break;
      }
    }
  }
  return g;
}

}  // namespace

void TrapConfig::require_finalized() const {
  if (!finalized_) throw NumericsError("TrapConfig used before finalize()");
}

void TrapConfig::finalize() {
  ZeroLineOptions opts;
  opts.initial_guess = Vec3(0.0, 5e-6, 0.0);
  guide_xy = find_zero_line(five_wire, 0.0, opts);
  Vec3 center(guide_xy.x(), guide_xy.y(), 0.0);

  b_prime_dc = transverse_gradient(five_wire, center);
  omega_perp_dc = b_prime_dc * std::sqrt(mu_eff / (m_rb87 * bz0));

  double bz_static_sources = field_at(h_wire, center).B.z();
  uniform_bz = bz0 - bz_static_sources;

  if (rough) {
    if (rough->z.size() < 4) throw ConfigError("rough realization grid too short");
    double dz = rough->z[1] - rough->z[0];
    rough_bx_ = CubicSpline(rough->z.front(), dz, rough->bx_per_amp);
    rough_by_ = CubicSpline(rough->z.front(), dz, rough->by_per_amp);
    rough_bz_ = CubicSpline(rough->z.front(), dz, rough->bz_per_amp);
    double rough_rms = rough->energy_rms(central_current) / mu_eff;
    if (rough_rms > 0.0 && bz0 < 100.0 * rough_rms)
      std::fprintf(stderr,
                   "warning: Bz0 is only %.1fx the rough-field rms; the "
                   "cycle-averaged expansion degrades\n",
                   bz0 / rough_rms);
  }
  finalized_ = true;
}

double TrapConfig::modulation_factor(double t) const {
  if (modulation.is_dc()) return modulation.dc_sign;
  return std::cos(modulation.omega_m * t + modulation.phase);
}

Vec3 TrapConfig::rough_field_at(double z) const {
  require_finalized();
  if (!rough) return Vec3::Zero();
  std::size_t b = rough->window_begin(), e = rough->window_end();
  if (z < rough->z[b] || z > rough->z[e - 1])
    throw NumericsError("evaluation outside the rough realization's usable window");
  return Vec3(rough_bx_(z), rough_by_(z), rough_bz_(z)) * central_current;
}

Vec3 TrapConfig::static_field(const Vec3& r) const {
  require_finalized();
  Vec3 b = field_at(h_wire, r).B;
  b += Vec3(residual_bx, residual_by, uniform_bz);
  return b;
}

Vec3 TrapConfig::modulated_field_amplitude(const Vec3& r) const {
  require_finalized();
  Vec3 b = field_at(five_wire, r).B;
  if (rough) b += rough_field_at(r.z());
  return b;
}

Vec3 TrapConfig::field(const Vec3& r, double t) const {
  return static_field(r) + modulation_factor(t) * modulated_field_amplitude(r);
}

void TrapConfig::field_and_jacobian(const Vec3& r, double t, Vec3& b, Mat3& jac) const {
  require_finalized();
  b = Vec3(residual_bx, residual_by, uniform_bz);
  jac = Mat3::Zero();
  Vec3 bs;
  Mat3 js;
  for (const auto& seg : h_wire.segments) {
    biot_savart_segment_with_jacobian(seg, r, bs, js);
    b += bs;
    jac += js;
  }
  const double c = modulation_factor(t);
  for (const auto& seg : five_wire.segments) {
    biot_savart_segment_with_jacobian(seg, r, bs, js);
    b += c * bs;
    jac += c * js;
  }
  if (rough) {
    Vec3 br = rough_field_at(r.z());
    b += c * br;
    jac(0, 2) += c * central_current * rough_bx_.derivative(r.z());
    jac(1, 2) += c * central_current * rough_by_.derivative(r.z());
    jac(2, 2) += c * central_current * rough_bz_.derivative(r.z());
  }
}

double instantaneous_potential(const TrapConfig& cfg, const Vec3& r, double t) {
  return mu_eff * cfg.field(r, t).norm();
}

double averaged_potential_numeric(const TrapConfig& cfg, const Vec3& r,
                                  int quadrature_nodes) {
  if (cfg.modulation.is_dc())
    throw NumericsError("cycle average undefined in DC mode");
  static thread_local int cached_n = 0;
  static thread_local GaussLegendre gl;
  if (cached_n != quadrature_nodes) {
    gl = gauss_legendre(quadrature_nodes);
    cached_n = quadrature_nodes;
  }
  const Vec3 bs = cfg.static_field(r);
  const Vec3 bm = cfg.modulated_field_amplitude(r);
  const double period = 2.0 * pi / cfg.modulation.omega_m;
  double acc = 0.0;
  for (int i = 0; i < quadrature_nodes; ++i) {
    double t = 0.5 * period * (gl.x[i] + 1.0);
    double c = std::cos(cfg.modulation.omega_m * t + cfg.modulation.phase);
    acc += gl.w[i] * (bs + c * bm).norm();
  }
  return mu_eff * 0.5 * acc;  // weights sum to 2
}

double averaged_potential_closed_form(const TrapConfig& cfg, const Vec3& r) {
  if (cfg.modulation.is_dc())
    throw NumericsError("cycle average undefined in DC mode");
  const Vec3 bs = cfg.static_field(r);
  const Vec3 bm = cfg.modulated_field_amplitude(r);
  double bperp_static2 = bs.x() * bs.x() + bs.y() * bs.y();
  double bperp_mod2 = bm.x() * bm.x() + bm.y() * bm.y();
  return mu_eff * std::abs(bs.z()) +
         mu_eff / (2.0 * cfg.bz0) * (0.5 * bperp_mod2 + bperp_static2);
}

PotentialProfile longitudinal_profile(const TrapConfig& cfg,
                                      const std::vector<double>& z_grid) {
  PotentialProfile p;
  p.z = z_grid;
  p.v.resize(z_grid.size());
  if (cfg.modulation.is_dc()) {
    p.construction = "dc";
    // Follow the transverse zero line; the quadrupole nulls any static
    // transverse field there, so V is mu |Bz| along the line.
    Eigen::Vector2d guess = cfg.guide_xy;
    for (std::size_t i = 0; i < z_grid.size(); ++i) {
      double z = z_grid[i];
      // total DC transverse field: shift the quadrupole zero by Newton steps
      Vec3 q(guess.x(), guess.y(), z);
      for (int it = 0; it < 50; ++it) {
        Vec3 b = cfg.field(q, 0.0);
        if (std::hypot(b.x(), b.y()) < 1e-13) break;
        double h = std::max(1e-2 * std::abs(q.y()), 1e-9);
        Eigen::Matrix2d jac;
        for (int j = 0; j < 2; ++j) {
          Vec3 dq = Vec3::Zero();
          dq[j] = h;
          Vec3 bp = cfg.field(q + dq, 0.0);
          Vec3 bmn = cfg.field(q - dq, 0.0);
          jac(0, j) = (bp.x() - bmn.x()) / (2.0 * h);
          jac(1, j) = (bp.y() - bmn.y()) / (2.0 * h);
        }
        Eigen::Vector2d step = jac.fullPivLu().solve(-Eigen::Vector2d(b.x(), b.y()));
        q.x() += step.x();
        q.y() += step.y();
      }
      guess = Eigen::Vector2d(q.x(), q.y());  // warm start for the next z
      p.v[i] = mu_eff * std::abs(cfg.field(q, 0.0).z());
    }
  } else {
    p.construction = "ac-averaged";
    for (std::size_t i = 0; i < z_grid.size(); ++i)
      p.v[i] = averaged_potential_numeric(
          cfg, Vec3(cfg.guide_xy.x(), cfg.guide_xy.y(), z_grid[i]));
  }
  return p;
}

HarmonicFitResult harmonic_fit(const PotentialProfile& profile, double window) {
  if (profile.z.empty()) throw NumericsError("empty profile");
  std::size_t imin = 0;
  for (std::size_t i = 1; i < profile.z.size(); ++i)
    if (profile.v[i] < profile.v[imin]) imin = i;
  double zc = profile.z[imin];

  std::vector<double> zw, vw;
  for (std::size_t i = 0; i < profile.z.size(); ++i)
    if (std::abs(profile.z[i] - zc) <= window) {
      zw.push_back(profile.z[i]);
      vw.push_back(profile.v[i]);
    }
  if (zw.size() < 10)
    throw NumericsError("harmonic fit window holds fewer than 10 grid points");

  QuadraticFit qf = fit_quadratic(zw, vw);
  if (qf.c2 < 0.0) throw NumericsError("harmonic fit found negative curvature");
  HarmonicFitResult h;
  h.omega = std::sqrt(2.0 * qf.c2 / m_rb87);
  h.center = qf.center;
  h.offset = qf.offset;
  h.window_z = std::move(zw);
  h.residual = std::move(qf.residual);
  h.rms_residual = qf.rms_residual;
  return h;
}

double predicted_omega_z_ac(double omega_z_dc, double b_h_prime, double bz0) {
  if (!(omega_z_dc >= 0.0) || !(bz0 > 0.0))
    throw ConfigError("predicted_omega_z_ac needs positive inputs");
  return std::sqrt(omega_z_dc * omega_z_dc +
                   mu_eff * b_h_prime * b_h_prime / (m_rb87 * bz0));
}

AdiabaticityResult adiabaticity_ratio(double omega_m, double bz0) {
  if (!(bz0 > 0.0)) throw ConfigError("adiabaticity ratio needs Bz0 > 0");
  AdiabaticityResult r;
  r.larmor_frequency = constants::mu_B * bz0 / (4.0 * pi * constants::hbar);
  r.ratio = (omega_m / (2.0 * pi)) / r.larmor_frequency;
  return r;
}

double micromotion_roughness_estimate(const TrapConfig& cfg) {
  if (cfg.modulation.is_dc())
    throw NumericsError("micro-motion estimate undefined in DC mode");
  if (!cfg.has_rough()) return 0.0;
  const auto& r = *cfg.rough;
  std::size_t b = r.window_begin(), e = r.window_end();
  double dz = r.grid_step;
  std::vector<double> emm;
  for (std::size_t i = b + 1; i + 1 < e; ++i) {
    double dforce = mu_eff * cfg.central_current *
                    (r.bz_per_amp[i + 1] - r.bz_per_amp[i - 1]) / (2.0 * dz);
    double f2 = dforce * dforce;
    emm.push_back(f2 / (4.0 * m_rb87 * cfg.modulation.omega_m * cfg.modulation.omega_m));
  }
  double mean = 0.0;
  for (double v : emm) mean += v;
  mean /= static_cast<double>(emm.size());
  double ss = 0.0;
  for (double v : emm) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(emm.size()));
}

TransverseDefects transverse_defect_estimates(const TrapConfig& cfg) {
  if (!cfg.has_rough()) throw NumericsError("realization has no transverse data");
  const auto& r = *cfg.rough;
  if (r.bx_per_amp.empty() || r.by_per_amp.empty())
    throw NumericsError("realization has no transverse data");
  std::size_t b = r.window_begin(), e = r.window_end();
  double dz = r.grid_step;
  double ss_disp = 0.0, ss_grad = 0.0;
  std::size_t n = 0;
  for (std::size_t i = b + 1; i + 1 < e; ++i) {
    double bx = r.bx_per_amp[i] * cfg.central_current;
    double by = r.by_per_amp[i] * cfg.central_current;
    ss_disp += bx * bx + by * by;
    double gx = (r.bx_per_amp[i + 1] - r.bx_per_amp[i - 1]) / (2.0 * dz) *
                cfg.central_current;
    double gy = (r.by_per_amp[i + 1] - r.by_per_amp[i - 1]) / (2.0 * dz) *
                cfg.central_current;
    ss_grad += gx * gx + gy * gy;
    ++n;
  }
  TransverseDefects d;
  d.meander_rms = std::sqrt(ss_disp / static_cast<double>(n)) / cfg.b_prime_dc;
  d.freq_modulation_relative =
      std::sqrt(ss_grad / static_cast<double>(n)) / cfg.b_prime_dc;
  return d;
}

}  // namespace acg
