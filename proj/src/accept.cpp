#include "acg/accept.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "acg/analysis.hpp"
#include "acg/constants.hpp"
#include "acg/errors.hpp"
#include "acg/fitting.hpp"
#include "acg/harness.hpp"

namespace acg {

namespace {

using constants::k_B;
using constants::m_rb87;
using constants::mu_eff;
using constants::pi;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

ScenarioConfig base_scenario(std::uint64_t seed) {
  ScenarioConfig sc;
  sc.seed = seed;
  sc.seed_set = true;
  return sc;
}

double rms_of(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

struct ResidualProfile {
  std::vector<double> z;
  PotentialProfile total;
  PotentialProfile smooth;
  std::vector<double> residual;  // J
};

ResidualProfile residual_profile(const ScenarioConfig& sc, ScenarioKind kind,
                                 std::shared_ptr<const RoughRealization> rough) {
  ScenarioConfig s = sc;
  s.kind = kind;
  TrapConfig trap = build_trap(s, rough);
  TrapConfig smooth_trap = build_trap(s, nullptr);
  ResidualProfile rp;
  rp.z = profile_grid(*rough);
  rp.total = longitudinal_profile(trap, rp.z);
  rp.smooth = longitudinal_profile(smooth_trap, rp.z);
  rp.residual.resize(rp.z.size());
  for (std::size_t i = 0; i < rp.z.size(); ++i)
    rp.residual[i] = rp.total.v[i] - rp.smooth.v[i];
  return rp;
}

// Synthetic absorption image of a thermal cloud in `profile`: expected counts
// per pixel from the Boltzmann weight, plus Gaussian pixel noise, then the
// inversion. Returns the mean-removed rms (K) of extracted-minus-true.
double noisy_extraction_residual_rms(const PotentialProfile& profile,
                                     const PotentialProfile& smooth,
                                     double temperature, double pixel,
                                     double peak_counts, double noise_counts,
                                     double min_count, std::uint64_t noise_seed) {
  CubicSpline vs(profile.z.front(), profile.z[1] - profile.z[0], profile.v);
  CubicSpline vsm(smooth.z.front(), smooth.z[1] - smooth.z[0], smooth.v);
  double vmin = *std::min_element(profile.v.begin(), profile.v.end());
  const double kt = k_B * temperature;

  DensityProfile img;
  img.bin_width = pixel;
  for (double z = profile.z.front() + pixel; z + pixel < profile.z.back(); z += pixel) {
    img.z.push_back(z);
    img.count.push_back(peak_counts * std::exp(-(vs(z) - vmin) / kt));
  }
  img = add_pixel_noise(img, noise_counts, noise_seed);
  ExtractedPotential ext = extract_potential(img, temperature, min_count);

  // measured residual roughness: extracted potential minus the known smooth
  // background (offsets drop out in the mean-removed rms)
  std::vector<double> diff;
  for (std::size_t i = 0; i < ext.z.size(); ++i)
    diff.push_back((ext.v[i] - vsm(ext.z[i])) / k_B);
  return rms_of(diff);
}

CriterionResult c1_roughness_suppression(std::uint64_t seed) {
  CriterionResult r{1, "roughness suppression (time-averaging)", false, ""};
  ScenarioConfig sc = base_scenario(seed);
  sc.target_roughness = 30e-9;
  auto rough = std::make_shared<RoughRealization>(make_realization(sc, seed));

  ResidualProfile dc = residual_profile(sc, ScenarioKind::DcPositive, rough);
  ResidualProfile ac = residual_profile(sc, ScenarioKind::Ac, rough);
  double rms_dc = roughness_statistics(dc.z, dc.residual).rms_kelvin;
  double rms_ac = roughness_statistics(ac.z, ac.residual).rms_kelvin;
  double ideal_ratio = rms_dc / rms_ac;

  // imaging-noise pipeline: ~3 nK noise floor at the cloud centre
  const double peak = 1000.0, noise = 10.0, min_count = 300.0;
  double noisy_dc = noisy_extraction_residual_rms(dc.total, dc.smooth, sc.temperature,
                                                  sc.pixel, peak, noise, min_count,
                                                  seed + 101);
  double noisy_ac = noisy_extraction_residual_rms(ac.total, ac.smooth, sc.temperature,
                                                  sc.pixel, peak, noise, min_count,
                                                  seed + 102);
  double noisy_ratio = noisy_dc / noisy_ac;

  r.passed = ideal_ratio >= 50.0 && noisy_ratio >= 5.0;
  r.detail = fmt("dc rms %.1f nK, ac rms %.3f nK, ideal ratio %.0fx (expect >= 50), "
                 "noisy ratio %.1fx (expect >= 5)",
                 rms_dc * 1e9, rms_ac * 1e9, ideal_ratio, noisy_ratio);
  return r;
}

CriterionResult c2_polarity_inversion(std::uint64_t seed) {
  CriterionResult r{2, "dc polarity inversion", false, ""};
  ScenarioConfig sc = base_scenario(seed);
  sc.target_roughness = 30e-9;
  auto rough = std::make_shared<RoughRealization>(make_realization(sc, seed));
  {
    // the inversion property concerns the longitudinal rough potential; the
    // transverse components add a small polarity-even term (zero-line shift
    // against the longitudinal-confinement field) that is physics, not noise,
    // and sits far above this tolerance
    auto r = std::make_shared<RoughRealization>(*rough);
    std::fill(r->bx_per_amp.begin(), r->bx_per_amp.end(), 0.0);
    std::fill(r->by_per_amp.begin(), r->by_per_amp.end(), 0.0);
    rough = r;
  }

  ResidualProfile plus = residual_profile(sc, ScenarioKind::DcPositive, rough);
  ResidualProfile minus = residual_profile(sc, ScenarioKind::DcNegative, rough);
  double max_sum = 0.0, max_abs = 0.0;
  for (std::size_t i = 0; i < plus.residual.size(); ++i) {
    max_sum = std::max(max_sum, std::abs(plus.residual[i] + minus.residual[i]));
    max_abs = std::max(max_abs, std::abs(plus.residual[i]));
  }
  double rel = max_sum / max_abs;
  r.passed = rel <= 1e-10;
  r.detail = fmt("max |res(+) + res(-)| / max |res(+)| = %.2e (expect <= 1e-10)", rel);
  return r;
}

CriterionResult c3_sqrt2_rule(std::uint64_t seed) {
  CriterionResult r{3, "transverse sqrt(2) reduction", false, ""};
  ScenarioConfig sc = base_scenario(seed);
  TrapConfig trap = build_trap(sc, nullptr);  // ac, zero residual fields

  std::vector<double> xs, vs;
  for (int i = -10; i <= 10; ++i) {
    double x = trap.guide_xy.x() + 0.05e-6 * i;
    xs.push_back(x);
    vs.push_back(averaged_potential_numeric(trap, Vec3(x, trap.guide_xy.y(), 0.0)));
  }
  QuadraticFit qf = fit_quadratic(xs, vs);
  double omega_ac = std::sqrt(2.0 * qf.c2 / m_rb87);
  double expected = trap.omega_perp_dc / std::sqrt(2.0);
  double rel = std::abs(omega_ac - expected) / expected;
  double f_ac = omega_ac / (2.0 * pi);
  r.passed = rel <= 0.01 && f_ac >= 1000.0 && f_ac <= 1400.0;
  r.detail = fmt("omega_perp_ac/2pi = %.0f Hz vs dc/sqrt2 = %.0f Hz (%.2f%% off, "
                 "expect <= 1%%; band 1.0-1.4 kHz)",
                 f_ac, expected / (2.0 * pi), rel * 100.0);
  return r;
}

CriterionResult c4_longitudinal_shift(std::uint64_t seed) {
  CriterionResult r{4, "longitudinal frequency shift", false, ""};
  ScenarioConfig sc = base_scenario(seed);

  ScenarioConfig dc_sc = sc;
  dc_sc.kind = ScenarioKind::DcPositive;
  TrapConfig dc_trap = build_trap(dc_sc, nullptr);
  double f_dc = measure_omega_z(dc_trap) / (2.0 * pi);

  TrapConfig ac_trap = build_trap(sc, nullptr);
  double f_ac = measure_omega_z(ac_trap) / (2.0 * pi);

  double bhp = 0.0;
  {
    const double h = 10e-6;
    Vec3 c(ac_trap.guide_xy.x(), ac_trap.guide_xy.y(), 0.0);
    Vec3 bp = field_at(ac_trap.h_wire, c + Vec3(0, 0, h)).B;
    Vec3 bm = field_at(ac_trap.h_wire, c - Vec3(0, 0, h)).B;
    bhp = std::hypot((bp.x() - bm.x()) / (2.0 * h), (bp.y() - bm.y()) / (2.0 * h));
  }
  double predicted =
      predicted_omega_z_ac(2.0 * pi * f_dc, bhp, sc.ioffe_field) / (2.0 * pi);

  bool dc_ok = std::abs(f_dc - 7.1) <= 0.1;
  bool ac_ok = std::abs(f_ac - 11.3) <= 0.2;
  bool pred_ok = std::abs(f_ac - predicted) / predicted <= 0.02;
  r.passed = dc_ok && ac_ok && pred_ok;
  r.detail = fmt("f_z dc %.2f Hz (expect 7.1), ac %.2f Hz (expect 11.3 +- 0.2), "
                 "predicted %.2f Hz",
                 f_dc, f_ac, predicted);
  return r;
}

CriterionResult c5_damping_study(std::uint64_t seed) {
  CriterionResult r{5, "cm damping vs roughness", false, ""};
  ScenarioConfig sc = base_scenario(seed);
  sc.target_roughness = 80e-9;

  RoughRealization r0 = make_realization(sc, seed);
  // harmonic confinement at the modulated trap's longitudinal frequency with
  // the scaled rough term superimposed; the launch energy must exceed the
  // bump height or the cloud pins instead of dephasing
  TrapConfig ac_trap = build_trap(sc, nullptr);
  const double omega_z = measure_omega_z(ac_trap);
  const std::vector<double>& grid = r0.z;
  PotentialProfile smooth;
  smooth.construction = "dc";
  smooth.z = grid;
  for (double z : grid) smooth.v.push_back(0.5 * m_rb87 * omega_z * omega_z * z * z);

  const std::size_t n_real = 5;
  std::vector<std::vector<double>> terms;
  for (std::size_t i = 0; i < n_real; ++i) {
    RoughRealization ri = i == 0 ? r0 : make_realization(sc, seed + i);
    std::vector<double> term(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
      term[j] = mu_eff * sc.central_current * ri.bz_per_amp[j];
    terms.push_back(std::move(term));
  }

  EnsembleSpec es;
  es.n = sc.atoms;
  es.temperature = sc.temperature;
  es.cm_displacement = 200e-6;
  es.seed = seed;

  IntegratorConfig icfg;
  icfg.dt = 2e-5;
  icfg.t_max = 4.0;
  icfg.sample_interval = 2e-3;

  auto rows = damping_vs_roughness_study(smooth, terms, {1.0, 1.0 / 14.0}, es, icfg);
  double tau_dc = rows[0].tau_mean;
  double tau_low = rows[1].tau_mean;
  double ratio = tau_low / tau_dc;
  bool finite_dc = !rows[0].any_lower_bound && tau_dc > 0.0;
  r.passed = finite_dc && ratio >= 7.0 && ratio <= 13.0;
  r.detail = fmt("tau(80 nK) = %.2f +- %.2f s%s, tau(80/14 nK) = %.2f s, ratio %.1fx "
                 "(expect 10 +- 30%%)",
                 tau_dc, rows[0].tau_scatter, rows[0].any_lower_bound ? " [bound]" : "",
                 tau_low, ratio);
  return r;
}

CriterionResult c6_mathieu_threshold(std::uint64_t seed) {
  (void)seed;
  CriterionResult r{6, "mathieu stability threshold", false, ""};
  const double omega_perp = 2.0 * pi * 2090.0;
  double crit = mathieu_threshold(omega_perp);
  double ratio = crit / omega_perp;
  double f_crit = crit / (2.0 * pi) * 1e-3;  // kHz
  r.passed = std::abs(ratio - 0.87) <= 0.02 && std::abs(f_crit - 1.82) <= 0.05;
  r.detail = fmt("critical ratio %.3f (expect 0.87 +- 0.02), critical f_m %.2f kHz "
                 "(expect 1.82 +- 0.05)",
                 ratio, f_crit);
  return r;
}

CriterionResult c7_lifetime_knee(std::uint64_t seed) {
  CriterionResult r{7, "lifetime knee vs modulation frequency", false, ""};
  ScenarioConfig sc = base_scenario(seed);
  sc.atoms = 500;
  sc.t_max = 0.5;
  sc.residual_bx = 1.5e-5;  // 150 mG
  sc.residual_by = 1.5e-5;

  TrapConfig stray_trap = build_trap(sc, nullptr);
  double omega_z = measure_omega_z(stray_trap);
  double t_skip = 2.0 * pi / omega_z;

  EnsembleSpec es;
  es.n = sc.atoms;
  es.temperature = sc.temperature;
  es.cm_displacement = 0.0;
  es.seed = seed;

  IntegratorConfig icfg;
  icfg.dt = 1e-5;
  icfg.t_max = sc.t_max;
  icfg.sample_interval = 1e-3;
  icfg.escape_radius = sc.escape_radius;

  auto rows = lifetime_scan({2.0 * pi * 8e3, 2.0 * pi * 20e3}, stray_trap, es, icfg,
                            omega_z, t_skip);
  double tau8 = rows[0].lifetime, tau20 = rows[1].lifetime;
  double ratio = tau20 / tau8;

  // Zero transverse field: the stability onset sits below 2.5 kHz. The probe
  // is the bare guide (no longitudinal wires, whose field is transverse away
  // from the symmetry plane) with a cold cloud at the guide centre, so the
  // motion stays in the linear regime the onset statement refers to; warmer
  // atoms sample the steeper gradient on the chip side of the guide, which
  // moves their local stability edge upward.
  ScenarioConfig clean = sc;
  clean.residual_bx = clean.residual_by = 0.0;
  auto clean_fraction = [&](double f_m) {
    clean.modulation_frequency = f_m;
    TrapConfig ct = build_trap(clean, nullptr);
    ct.h_wire.segments.clear();
    ct.finalize();
    EnsembleSpec probe = es;
    probe.temperature = 50e-9;
    auto states = sample_thermal_ensemble_3d(probe, ct, 2.0 * pi * 100.0);
    for (auto& s : states) {
      s.position.z() = 0.0;
      s.velocity.z() = 0.0;
    }
    IntegratorConfig ic2 = icfg;
    ic2.fastest_omega = std::max(2.0 * pi * f_m, ct.omega_perp_dc);
    ic2.dt = std::min(icfg.dt, (2.0 * pi / ic2.fastest_omega) / 40.0);
    SurvivalRecord sr = integrate_modulated_3d(states, ct, ic2);
    return sr.alive.back() / static_cast<double>(probe.n);
  };
  double frac_hi = clean_fraction(2.5e3);   // above the onset: stable
  double frac_lo = clean_fraction(1.5e3);   // below the onset: unstable

  r.passed = ratio >= 5.0 && frac_hi >= 0.5 && frac_lo < 0.5;
  r.detail = fmt("stray 150 mG: tau(8 kHz) %.3f s, tau(20 kHz) %.3f s%s, ratio %.1fx "
                 "(expect >= 5); zero stray keeps %.0f%% at 2.5 kHz (expect >= 50%%) "
                 "vs %.0f%% at 1.5 kHz (expect < 50%%)",
                 tau8, tau20, rows[1].lower_bound ? " [bound]" : "", ratio,
                 frac_hi * 100.0, frac_lo * 100.0);
  return r;
}

CriterionResult c8_larmor_bound(std::uint64_t seed) {
  (void)seed;
  CriterionResult r{8, "larmor adiabaticity denominator", false, ""};
  AdiabaticityResult a = adiabaticity_ratio(2.0 * pi * 30e3, 1.8e-4);
  double rel = std::abs(a.larmor_frequency - 1.26e6) / 1.26e6;
  r.passed = rel <= 0.01;
  r.detail = fmt("larmor/2 = %.4f MHz (expect 1.26 MHz +- 1%%)",
                 a.larmor_frequency * 1e-6);
  return r;
}

CriterionResult c9_boltzmann_roundtrip(std::uint64_t seed) {
  CriterionResult r{9, "boltzmann inversion round trip", false, ""};
  ScenarioConfig sc = base_scenario(seed);
  sc.target_roughness = 80e-9;
  sc.atoms = 100000;

  auto rough = std::make_shared<RoughRealization>(make_realization(sc, seed));
  ResidualProfile dc = residual_profile(sc, ScenarioKind::DcPositive, rough);

  EnsembleSpec es;
  es.n = sc.atoms;
  es.temperature = sc.temperature;
  es.cm_displacement = 0.0;
  es.seed = seed;
  auto states = sample_thermal_ensemble_1d(es, dc.total);

  std::vector<double> zs(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) zs[i] = states[i].position.z();
  DensityProfile img =
      bin_density(zs, dc.z.front(), dc.z.back(), sc.pixel);
  ExtractedPotential ext = extract_potential(img, sc.temperature, 10.0);

  // model counts per bin: Boltzmann weight averaged over the bin
  CubicSpline vs(dc.z.front(), dc.z[1] - dc.z[0], dc.total.v);
  const double kt = k_B * sc.temperature;
  double vmin = *std::min_element(dc.total.v.begin(), dc.total.v.end());
  double norm = 0.0;
  std::vector<double> weight(img.z.size(), 0.0);
  for (std::size_t i = 0; i < img.z.size(); ++i) {
    double acc = 0.0;
    const int sub = 8;
    for (int s = 0; s < sub; ++s) {
      double z = img.z[i] + img.bin_width * ((s + 0.5) / sub - 0.5);
      if (z < vs.z_min() || z > vs.z_max()) continue;
      acc += std::exp(-(vs(z) - vmin) / kt);
    }
    weight[i] = acc / sub;
    norm += weight[i];
  }

  // chi^2 of extracted vs model potential, free offset, Poisson weights
  double sw = 0.0, swd = 0.0;
  std::vector<double> d, w;
  for (std::size_t i = 0; i < ext.z.size(); ++i) {
    std::size_t bin =
        static_cast<std::size_t>((ext.z[i] - img.z.front()) / img.bin_width + 0.5);
    double mu = img.n_total * weight[bin] / norm;
    if (mu < 10.0) continue;
    double model = -kt * std::log(weight[bin] / norm);
    d.push_back(ext.v[i] - model);
    w.push_back(mu / (kt * kt));  // 1/var of -kT ln(n), delta method
    sw += w.back();
    swd += w.back() * d.back();
  }
  double offset = swd / sw;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    chi2 += w[i] * (d[i] - offset) * (d[i] - offset);
  double red = chi2 / static_cast<double>(d.size() - 1);
  r.passed = red >= 0.8 && red <= 1.25 && d.size() >= 50;
  r.detail = fmt("reduced chi^2 = %.3f over %zu bins (expect 0.8-1.25)", red, d.size());
  return r;
}

CriterionResult c10_numerical_hygiene(std::uint64_t seed) {
  CriterionResult r{10, "numerical hygiene", false, ""};

  // symplectic drift in a pure harmonic profile over 2 s
  const double omega_z = 2.0 * pi * 7.1;
  PotentialProfile harm;
  harm.construction = "dc";
  for (double z = -500e-6; z <= 500e-6 + 1e-9; z += 2e-6) {
    harm.z.push_back(z);
    harm.v.push_back(0.5 * m_rb87 * omega_z * omega_z * z * z);
  }
  EnsembleSpec es;
  es.n = 200;
  es.temperature = 280e-9;
  es.cm_displacement = 20e-6;
  es.seed = seed;
  IntegratorConfig icfg;
  icfg.dt = 2e-5;
  icfg.t_max = 2.0;
  icfg.sample_interval = 10e-3;
  icfg.fastest_omega = omega_z;
  auto states = sample_thermal_ensemble_1d(es, harm);
  double drift = integrate_static_1d(states, harm, icfg).max_energy_drift;

  // monodromy determinant over a spread of frequency pairs
  double max_det_err = 0.0;
  for (double wp : {2.0 * pi * 1500.0, 2.0 * pi * 2090.0}) {
    for (double ratio : {0.5, 0.87, 1.3, 2.0}) {
      MathieuResult mr = mathieu_stability(wp, ratio * wp);
      max_det_err = std::max(max_det_err, std::abs(mr.determinant - 1.0));
    }
  }

  // bit-exactness across worker counts
  int saved = omp_get_max_threads();
  std::vector<std::vector<double>> cms;
  std::vector<std::vector<double>> alives;
  ScenarioConfig sc3 = base_scenario(seed);
  sc3.atoms = 16;
  TrapConfig trap3 = build_trap(sc3, nullptr);
  for (int workers : {1, 4, 16}) {
    omp_set_num_threads(workers);
    EnsembleSpec e1 = es;
    e1.n = 200;
    auto st = sample_thermal_ensemble_1d(e1, harm);
    IntegratorConfig ic = icfg;
    ic.t_max = 0.2;
    cms.push_back(integrate_static_1d(st, harm, ic).cm);

    EnsembleSpec e3 = es;
    e3.n = 16;
    e3.cm_displacement = 0.0;
    auto st3 = sample_thermal_ensemble_3d(e3, trap3, omega_z);
    IntegratorConfig ic3;
    ic3.dt = 8e-7;
    ic3.t_max = 5e-3;
    ic3.sample_interval = 1e-3;
    ic3.fastest_omega = trap3.modulation.omega_m;
    alives.push_back(integrate_modulated_3d(st3, trap3, ic3).alive);
  }
  omp_set_num_threads(saved);
  bool bitexact = cms[0] == cms[1] && cms[0] == cms[2] && alives[0] == alives[1] &&
                  alives[0] == alives[2];

  r.passed = drift < 1e-5 && max_det_err <= 1e-9 && bitexact;
  r.detail = fmt("energy drift %.1e (expect < 1e-5), |det-1| %.1e (expect <= 1e-9), "
                 "workers 1/4/16 %s",
                 drift, max_det_err, bitexact ? "bit-exact" : "MISMATCH");
  return r;
}

}  // namespace

std::vector<int> acceptance_ids() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}; }

CriterionResult run_criterion(int id, std::uint64_t seed) {
  switch (id) {
    case 1: return c1_roughness_suppression(seed);
    case 2: return c2_polarity_inversion(seed);
    case 3: return c3_sqrt2_rule(seed);
    case 4: return c4_longitudinal_shift(seed);
    case 5: return c5_damping_study(seed);
    case 6: return c6_mathieu_threshold(seed);
    case 7: return c7_lifetime_knee(seed);
    case 8: return c8_larmor_bound(seed);
    case 9: return c9_boltzmann_roundtrip(seed);
    case 10: return c10_numerical_hygiene(seed);
    default: throw ConfigError("unknown acceptance criterion id");
  }
}

bool run_acceptance(std::uint64_t seed, std::ostream& out) {
  bool all = true;
  for (int id : acceptance_ids()) {
    CriterionResult r = run_criterion(id, seed);
    all = all && r.passed;
    out << "[" << (r.passed ? "PASS" : "FAIL") << "] criterion " << r.id << " ("
        << r.name << "): " << r.detail << "\n";
    out.flush();
  }
  return all;
}

}  // namespace acg
