#include "acg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "acg/constants.hpp"
#include "acg/errors.hpp"
#include "acg/fitting.hpp"
#include "acg/rng.hpp"
#include "acg/spline.hpp"

namespace acg {

namespace {

using constants::k_B;
using constants::m_rb87;
using constants::mu_eff;
using constants::pi;

// Fixed-shape reduction tree: the result depends only on the element order,
// never on thread count.
double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

}  // namespace

void EnsembleSpec::validate() const {
  if (n == 0) throw ConfigError("ensemble size must be positive");
  if (!(temperature > 0.0)) throw ConfigError("ensemble temperature must be positive");
  if (!std::isfinite(cm_displacement))
    throw ConfigError("ensemble displacement must be finite");
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !(t_max > 0.0) || !(sample_interval > 0.0))
    throw ConfigError("integrator needs positive dt, t_max and sample_interval");
  if (sample_interval < dt)
    throw ConfigError("sample_interval must be at least dt");
  if (fastest_omega > 0.0 && dt > (2.0 * pi / fastest_omega) / 40.0)
    throw ConfigError("dt too coarse: need at least 40 steps per fastest period");
}

std::size_t IntegratorConfig::n_steps() const {
  return static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
}

std::size_t IntegratorConfig::steps_per_sample() const {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::round(sample_interval / dt)));
}

std::vector<ParticleState> sample_thermal_ensemble_1d(const EnsembleSpec& spec,
                                                      const PotentialProfile& profile) {
  spec.validate();
  if (profile.z.size() < 4) throw ConfigError("profile too short to sample from");
  CubicSpline vz(profile.z.front(), profile.z[1] - profile.z[0], profile.v);
  double vmin = *std::min_element(profile.v.begin(), profile.v.end());
  const double kt = k_B * spec.temperature;
  const double sigma_v = std::sqrt(kt / m_rb87);
  const double z_lo = profile.z.front(), z_hi = profile.z.back();

  std::vector<ParticleState> states(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    CounterRng pos_rng(spec.seed, i, 0);
    CounterRng vel_rng(spec.seed, i, 1);
    double z = 0.0;
    bool accepted = false;
    for (int attempt = 0; attempt < 1000000; ++attempt) {
      z = z_lo + (z_hi - z_lo) * pos_rng.uniform();
      if (pos_rng.uniform() <= std::exp(-(vz(z) - vmin) / kt)) {
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw NumericsError("rejection-sampling acceptance below 1e-4; "
                          "potential window far exceeds the thermal region");
    states[i].position = Vec3(0.0, 0.0, z + spec.cm_displacement);
    states[i].velocity = Vec3(0.0, 0.0, sigma_v * vel_rng.gauss());
  }
  return states;
}

std::vector<ParticleState> sample_thermal_ensemble_3d(const EnsembleSpec& spec,
                                                      const TrapConfig& cfg,
                                                      double omega_z) {
  spec.validate();
  if (!(omega_z > 0.0)) throw ConfigError("omega_z must be positive");
  double omega_perp = cfg.omega_perp_dc;
  if (!cfg.modulation.is_dc()) omega_perp /= std::sqrt(2.0);
  if (!(omega_perp > 0.0)) throw ConfigError("trap has no transverse confinement");

  const double sigma_v = std::sqrt(k_B * spec.temperature / m_rb87);
  const double sigma_perp = sigma_v / omega_perp;
  const double sigma_z = sigma_v / omega_z;

  std::vector<ParticleState> states(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    CounterRng pos_rng(spec.seed, i, 0);
    CounterRng vel_rng(spec.seed, i, 1);
    states[i].position =
        Vec3(cfg.guide_xy.x() + sigma_perp * pos_rng.gauss(),
             cfg.guide_xy.y() + sigma_perp * pos_rng.gauss(),
             sigma_z * pos_rng.gauss() + spec.cm_displacement);
    states[i].velocity =
        Vec3(sigma_v * vel_rng.gauss(), sigma_v * vel_rng.gauss(),
             sigma_v * vel_rng.gauss());
  }
  return states;
}

namespace {

TrajectoryRecord integrate_static_1d_impl(std::vector<ParticleState>& states,
                                          const PotentialProfile& profile,
                                          const IntegratorConfig& icfg,
                                          bool parallel) {
  icfg.validate();
  if (profile.z.size() < 4) throw ConfigError("profile too short to integrate in");
  CubicSpline vz(profile.z.front(), profile.z[1] - profile.z[0], profile.v);

  const std::size_t n_steps = icfg.n_steps();
  const std::size_t stride = icfg.steps_per_sample();
  const std::size_t n_samples = n_steps / stride + 1;
  const std::size_t n = states.size();
  const double dt = icfg.dt;

  std::vector<double> zbuf(n_samples * n);
  std::vector<double> drift(n, 0.0);
  bool out_of_range = false;

#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t ip = 0; ip < static_cast<std::ptrdiff_t>(n); ++ip) {
    const std::size_t i = static_cast<std::size_t>(ip);
    double z = states[i].position.z();
    double v = states[i].velocity.z();
    if (z < vz.z_min() || z > vz.z_max()) {
#pragma omp atomic write
      out_of_range = true;
      continue;
    }
    double e0 = 0.5 * m_rb87 * v * v + vz(z);
    double a = -vz.derivative(z) / m_rb87;
    double dmax = 0.0;
    std::size_t isample = 0;
    zbuf[isample * n + i] = z;
    bool ok = true;
    for (std::size_t s = 1; s <= n_steps && ok; ++s) {
      // velocity Verlet
      v += 0.5 * dt * a;
      z += dt * v;
      if (z < vz.z_min() || z > vz.z_max()) {
        ok = false;
        break;
      }
      a = -vz.derivative(z) / m_rb87;
      v += 0.5 * dt * a;
      if (s % stride == 0) {
        ++isample;
        zbuf[isample * n + i] = z;
        double e = 0.5 * m_rb87 * v * v + vz(z);
        dmax = std::max(dmax, std::abs(e - e0) / std::abs(e0));
      }
    }
    if (!ok) {
#pragma omp atomic write
      out_of_range = true;
      continue;
    }
    states[i].position.z() = z;
    states[i].velocity.z() = v;
    drift[i] = dmax;
  }
  if (out_of_range)
    throw NumericsError("particle left the tabulated potential window");

  TrajectoryRecord rec;
  rec.t.resize(n_samples);
  rec.cm.resize(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    rec.t[s] = static_cast<double>(s * stride) * dt;
    rec.cm[s] = pairwise_sum(&zbuf[s * n], n) / static_cast<double>(n);
  }
  rec.max_energy_drift = 0.0;
  for (double d : drift) rec.max_energy_drift = std::max(rec.max_energy_drift, d);
  return rec;
}

}  // namespace

TrajectoryRecord integrate_static_1d(std::vector<ParticleState>& states,
                                     const PotentialProfile& profile,
                                     const IntegratorConfig& icfg) {
  return integrate_static_1d_impl(states, profile, icfg, true);
}

TrajectoryRecord integrate_static_1d_serial(std::vector<ParticleState>& states,
                                            const PotentialProfile& profile,
                                            const IntegratorConfig& icfg) {
  return integrate_static_1d_impl(states, profile, icfg, false);
}

SurvivalRecord integrate_modulated_3d(std::vector<ParticleState>& states,
                                      const TrapConfig& cfg,
                                      const IntegratorConfig& icfg) {
  icfg.validate();
  const std::size_t n_steps = icfg.n_steps();
  const std::size_t stride = icfg.steps_per_sample();
  const std::size_t n_samples = n_steps / stride + 1;
  const std::size_t n = states.size();
  const double dt = icfg.dt;
  const double r_esc2 = icfg.escape_radius * icfg.escape_radius;
  const double gx = cfg.guide_xy.x(), gy = cfg.guide_xy.y();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> loss(n, nan);

#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t ip = 0; ip < static_cast<std::ptrdiff_t>(n); ++ip) {
    const std::size_t i = static_cast<std::size_t>(ip);
    Vec3 r = states[i].position;
    Vec3 v = states[i].velocity;
    Vec3 b;
    Mat3 jac;
    auto accel = [&](const Vec3& rr, double tt) -> Vec3 {
      cfg.field_and_jacobian(rr, tt, b, jac);
      double bn = b.norm();
      if (bn == 0.0) return Vec3::Zero();
      return (-mu_eff / m_rb87) * (jac.transpose() * (b / bn));
    };
    for (std::size_t s = 0; s < n_steps; ++s) {
      double t = static_cast<double>(s) * dt;
      double dx = r.x() - gx, dy = r.y() - gy;
      if (dx * dx + dy * dy > r_esc2) {
        loss[i] = t;
        break;
      }
      try {
        Vec3 k1r = v, k1v = accel(r, t);
        Vec3 k2r = v + 0.5 * dt * k1v, k2v = accel(r + 0.5 * dt * k1r, t + 0.5 * dt);
        Vec3 k3r = v + 0.5 * dt * k2v, k3v = accel(r + 0.5 * dt * k2r, t + 0.5 * dt);
        Vec3 k4r = v + dt * k3v, k4v = accel(r + dt * k3r, t + dt);
        r += (dt / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        v += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      } catch (const NumericsError&) {
        // entered a wire core or left the tabulated rough window: lost
        loss[i] = t;
        break;
      }
    }
    states[i].position = r;
    states[i].velocity = v;
  }

  SurvivalRecord rec;
  rec.t.resize(n_samples);
  rec.alive.resize(n_samples);
  rec.loss_time = std::move(loss);
  for (std::size_t s = 0; s < n_samples; ++s) {
    double t = static_cast<double>(s * stride) * dt;
    rec.t[s] = t;
    std::size_t count = 0;
    for (double lt : rec.loss_time)
      if (std::isnan(lt) || lt > t) ++count;
    rec.alive[s] = static_cast<double>(count);
  }
  return rec;
}

std::vector<DampingStudyRow> damping_vs_roughness_study(
    const PotentialProfile& smooth,
    const std::vector<std::vector<double>>& rough_terms,
    const std::vector<double>& scales, const EnsembleSpec& spec,
    const IntegratorConfig& icfg) {
  if (rough_terms.empty()) throw ConfigError("damping study needs realizations");
  for (const auto& rt : rough_terms)
    if (rt.size() != smooth.z.size())
      throw ConfigError("rough term grid does not match the smooth profile");

  std::vector<DampingStudyRow> rows;
  for (double scale : scales) {
    DampingStudyRow row;
    row.scale = scale;
    for (std::size_t r = 0; r < rough_terms.size(); ++r) {
      PotentialProfile p = smooth;
      for (std::size_t i = 0; i < p.v.size(); ++i)
        p.v[i] += scale * rough_terms[r][i];
      EnsembleSpec es = spec;
      es.seed = spec.seed + r;  // fresh but reproducible draw per realization
      auto states = sample_thermal_ensemble_1d(es, p);
      TrajectoryRecord tr = integrate_static_1d(states, p, icfg);
      DampedOscFit fit = fit_damped_oscillation(tr.t, tr.cm);
      row.tau.push_back(fit.tau);
      row.any_lower_bound = row.any_lower_bound || fit.tau_lower_bound;
    }
    double mean = 0.0;
    for (double t : row.tau) mean += t;
    mean /= static_cast<double>(row.tau.size());
    double ss = 0.0;
    for (double t : row.tau) ss += (t - mean) * (t - mean);
    row.tau_mean = mean;
    row.tau_scatter = std::sqrt(ss / static_cast<double>(row.tau.size()));
    rows.push_back(std::move(row));
  }
  return rows;
}

MathieuResult mathieu_stability(double omega_perp_dc, double omega_m) {
  if (!(omega_perp_dc > 0.0) || !(omega_m > 0.0))
    throw ConfigError("mathieu_stability needs positive frequencies");
  // coefficient period of cos^2 is pi/omega_m
  const double T = pi / omega_m;
  const int n = 4096;
  const double h = T / n;
  auto rhs = [&](double t, const Eigen::Vector2d& y) {
    double c = std::cos(omega_m * t);
    return Eigen::Vector2d(y[1], -omega_perp_dc * omega_perp_dc * c * c * y[0]);
  };
  Eigen::Matrix2d M;
  for (int col = 0; col < 2; ++col) {
    Eigen::Vector2d y = Eigen::Vector2d::Zero();
    y[col] = 1.0;
    for (int s = 0; s < n; ++s) {
      double t = s * h;
      Eigen::Vector2d k1 = rhs(t, y);
      Eigen::Vector2d k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
      Eigen::Vector2d k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
      Eigen::Vector2d k4 = rhs(t + h, y + h * k3);
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    M.col(col) = y;
  }
  MathieuResult res;
  res.trace = M.trace();
  res.determinant = M.determinant();
  res.stable = std::abs(res.trace) <= 2.0 + 1e-9;
  std::complex<double> tr(res.trace, 0.0);
  std::complex<double> disc = std::sqrt(tr * tr - 4.0 * res.determinant);
  res.multipliers[0] = 0.5 * (tr + disc);
  res.multipliers[1] = 0.5 * (tr - disc);
  return res;
}

double mathieu_threshold(double omega_perp_dc) {
  // scan the ratio omega_m / omega_perp downward for the first unstable band
  double hi = 2.0;
  double lo = 0.0;
  bool found = false;
  for (double r = hi - 0.005; r > 0.05; r -= 0.005) {
    if (!mathieu_stability(omega_perp_dc, r * omega_perp_dc).stable) {
      lo = r;
      hi = r + 0.005;
      found = true;
      break;
    }
  }
  if (!found) throw NumericsError("no instability band found below 2 omega_perp");
  for (int it = 0; it < 50; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mathieu_stability(omega_perp_dc, mid * omega_perp_dc).stable)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi) * omega_perp_dc;
}

std::vector<LifetimeRow> lifetime_scan(const std::vector<double>& omega_m_values,
                                       TrapConfig cfg, const EnsembleSpec& spec,
                                       const IntegratorConfig& icfg_base,
                                       double omega_z, double t_skip) {
  std::vector<LifetimeRow> rows;
  for (double wm : omega_m_values) {
    if (!(wm > 0.0)) throw ConfigError("lifetime scan needs positive omega_m");
    cfg.modulation.omega_m = wm;
    IntegratorConfig icfg = icfg_base;
    icfg.fastest_omega = std::max(wm, cfg.omega_perp_dc);
    double period40 = (2.0 * pi / icfg.fastest_omega) / 40.0;
    if (icfg.dt > period40) icfg.dt = period40;
    icfg.validate();

    auto states = sample_thermal_ensemble_3d(spec, cfg, omega_z);
    SurvivalRecord sr = integrate_modulated_3d(states, cfg, icfg);

    std::vector<double> t, nn;
    for (std::size_t i = 0; i < sr.t.size(); ++i)
      if (sr.t[i] >= t_skip) {
        t.push_back(sr.t[i] - t_skip);
        nn.push_back(sr.alive[i]);
      }
    if (t.size() < 4) throw NumericsError("lifetime fit window too short");
    ExpDecayFit fit = fit_exp_decay(t, nn);
    rows.push_back({wm, fit.tau, fit.sigma_tau, fit.tau_lower_bound});
  }
  return rows;
}

}  // namespace acg
