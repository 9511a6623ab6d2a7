#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "acg/constants.hpp"
#include "acg/dynamics.hpp"
#include "acg/errors.hpp"
#include "acg/harness.hpp"

using namespace acg;
using namespace acg::constants;

namespace {

PotentialProfile harmonic_profile(double omega, double half_range, double step) {
  PotentialProfile p;
  p.construction = "dc";
  for (double z = -half_range; z <= half_range + 0.5 * step; z += step) {
    p.z.push_back(z);
    p.v.push_back(0.5 * m_rb87 * omega * omega * z * z);
  }
  return p;
}

}  // namespace

TEST_CASE("integrator config validation enforces the stability rule") {
  IntegratorConfig icfg;
  icfg.t_max = 1.0;
  icfg.sample_interval = 1e-3;
  icfg.fastest_omega = 2.0 * pi * 1000.0;
  icfg.dt = 1e-3;  // far beyond period/40
  CHECK_THROWS_AS(icfg.validate(), ConfigError);
  icfg.dt = (2.0 * pi / icfg.fastest_omega) / 40.0;
  CHECK_NOTHROW(icfg.validate());
  CHECK(icfg.n_steps() > 0);
  CHECK(icfg.steps_per_sample() > 0);
}

TEST_CASE("thermal ensemble reproduces Boltzmann statistics in a harmonic well") {
  double omega = 2.0 * pi * 7.0;
  PotentialProfile p = harmonic_profile(omega, 800e-6, 2e-6);
  EnsembleSpec spec;
  spec.n = 20000;
  spec.temperature = 280e-9;
  spec.cm_displacement = 20e-6;
  spec.seed = 5;
  auto states = sample_thermal_ensemble_1d(spec, p);
  REQUIRE(states.size() == spec.n);

  double zm = 0.0, z2 = 0.0, v2 = 0.0;
  for (const auto& s : states) {
    zm += s.position.z();
    v2 += s.velocity.z() * s.velocity.z();
  }
  zm /= static_cast<double>(spec.n);
  v2 /= static_cast<double>(spec.n);
  for (const auto& s : states) {
    double d = s.position.z() - zm;
    z2 += d * d;
  }
  z2 /= static_cast<double>(spec.n);

  double sigma_z2 = k_B * spec.temperature / (m_rb87 * omega * omega);
  CHECK(zm == doctest::Approx(spec.cm_displacement).epsilon(0.05));
  CHECK(z2 == doctest::Approx(sigma_z2).epsilon(0.05));
  CHECK(v2 == doctest::Approx(k_B * spec.temperature / m_rb87).epsilon(0.05));
}

TEST_CASE("ensemble sampling is deterministic in the seed") {
  PotentialProfile p = harmonic_profile(2.0 * pi * 7.0, 600e-6, 2e-6);
  EnsembleSpec spec;
  spec.n = 500;
  spec.seed = 17;
  auto a = sample_thermal_ensemble_1d(spec, p);
  auto b = sample_thermal_ensemble_1d(spec, p);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].position.z() == b[i].position.z());
    CHECK(a[i].velocity.z() == b[i].velocity.z());
  }
}

TEST_CASE("1D integration conserves energy and oscillates at the trap frequency") {
  double omega = 2.0 * pi * 7.0;
  PotentialProfile p = harmonic_profile(omega, 800e-6, 2e-6);
  EnsembleSpec spec;
  spec.n = 200;
  spec.cm_displacement = 20e-6;
  spec.seed = 3;
  auto states = sample_thermal_ensemble_1d(spec, p);

  IntegratorConfig icfg;
  icfg.fastest_omega = omega;
  icfg.dt = (2.0 * pi / omega) / 400.0;
  icfg.t_max = 0.5;
  icfg.sample_interval = 2e-3;
  TrajectoryRecord rec = integrate_static_1d(states, p, icfg);

  // drift is bounded by the spline interpolation error of the tabulated force
  CHECK(rec.max_energy_drift < 5e-4);
  // undamped harmonic motion: the CM amplitude at t = one period is intact
  std::size_t per = static_cast<std::size_t>(std::lround(1.0 / 7.0 / icfg.sample_interval));
  REQUIRE(per < rec.cm.size());
  CHECK(rec.cm[per] == doctest::Approx(rec.cm[0]).epsilon(0.01));
  // and crosses zero a quarter period in
  CHECK(std::abs(rec.cm[per / 4]) < 0.1 * std::abs(rec.cm[0]));
}

TEST_CASE("serial and parallel 1D integrators are bit-identical") {
  double omega = 2.0 * pi * 7.0;
  PotentialProfile p = harmonic_profile(omega, 600e-6, 2e-6);
  EnsembleSpec spec;
  spec.n = 300;
  spec.seed = 8;
  auto sa = sample_thermal_ensemble_1d(spec, p);
  auto sb = sa;

  IntegratorConfig icfg;
  icfg.fastest_omega = omega;
  icfg.dt = (2.0 * pi / omega) / 400.0;
  icfg.t_max = 0.2;
  icfg.sample_interval = 1e-3;
  TrajectoryRecord ra = integrate_static_1d_serial(sa, p, icfg);
  TrajectoryRecord rb = integrate_static_1d(sb, p, icfg);

  REQUIRE(ra.cm.size() == rb.cm.size());
  for (std::size_t i = 0; i < ra.cm.size(); ++i)
    CHECK(std::memcmp(&ra.cm[i], &rb.cm[i], sizeof(double)) == 0);
  for (std::size_t i = 0; i < sa.size(); ++i) {
    CHECK(sa[i].position.z() == sb[i].position.z());
    CHECK(sa[i].velocity.z() == sb[i].velocity.z());
  }
}

TEST_CASE("modulated 3D integration holds a resting atom on the guide line") {
  ScenarioConfig sc;
  sc.kind = ScenarioKind::Ac;
  sc.modulation_frequency = 30e3;
  TrapConfig t = build_trap(sc, nullptr);

  std::vector<ParticleState> states(1);
  states[0].position = Vec3(t.guide_xy.x(), t.guide_xy.y(), 0.0);
  states[0].velocity = Vec3::Zero();

  IntegratorConfig icfg;
  icfg.fastest_omega = 2.0 * pi * 30e3;
  icfg.dt = (2.0 * pi / icfg.fastest_omega) / 40.0;
  icfg.t_max = 10e-3;
  icfg.sample_interval = 1e-3;
  icfg.escape_radius = 12e-6;
  SurvivalRecord rec = integrate_modulated_3d(states, t, icfg);

  CHECK(rec.alive.back() == 1.0);
  CHECK(std::isnan(rec.loss_time[0]));
  // micro-motion stays well inside the guide
  Eigen::Vector2d d(states[0].position.x() - t.guide_xy.x(),
                    states[0].position.y() - t.guide_xy.y());
  CHECK(d.norm() < 2e-6);
}

TEST_CASE("an atom launched past the escape radius is recorded as lost") {
  ScenarioConfig sc;
  sc.kind = ScenarioKind::Ac;
  TrapConfig t = build_trap(sc, nullptr);

  std::vector<ParticleState> states(2);
  states[0].position = Vec3(t.guide_xy.x(), t.guide_xy.y(), 0.0);
  states[1].position = Vec3(t.guide_xy.x(), t.guide_xy.y(), 0.0);
  states[1].velocity = Vec3(0.5, 0, 0);  // far beyond the trap depth

  IntegratorConfig icfg;
  icfg.fastest_omega = 2.0 * pi * 30e3;
  icfg.dt = (2.0 * pi / icfg.fastest_omega) / 40.0;
  icfg.t_max = 5e-3;
  icfg.sample_interval = 0.5e-3;
  icfg.escape_radius = 12e-6;
  SurvivalRecord rec = integrate_modulated_3d(states, t, icfg);

  CHECK(rec.alive.back() == 1.0);
  CHECK(std::isnan(rec.loss_time[0]));
  CHECK(rec.loss_time[1] >= 0.0);
  CHECK(rec.loss_time[1] < 1e-3);
}

TEST_CASE("parametric stability of the cos^2 drive") {
  double omega_perp = 2.0 * pi * 1598.6;

  MathieuResult fast = mathieu_stability(omega_perp, 2.0 * pi * 30e3);
  CHECK(fast.stable);
  CHECK(fast.determinant == doctest::Approx(1.0).epsilon(1e-9));

  double thr = mathieu_threshold(omega_perp);
  MathieuResult slow = mathieu_stability(omega_perp, 0.99 * thr);
  CHECK(slow.determinant == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(thr / omega_perp == doctest::Approx(0.8717).epsilon(0.002));
  CHECK(mathieu_stability(omega_perp, thr * 1.01).stable);
  CHECK_FALSE(mathieu_stability(omega_perp, thr * 0.99).stable);
}

TEST_CASE("threshold scales linearly with the transverse frequency") {
  double t1 = mathieu_threshold(2.0 * pi * 1000.0);
  double t2 = mathieu_threshold(2.0 * pi * 2000.0);
  CHECK(t2 / t1 == doctest::Approx(2.0).epsilon(1e-3));
}
