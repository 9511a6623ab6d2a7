#include "acg/roughness.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "acg/constants.hpp"
#include "acg/errors.hpp"
#include "acg/fft.hpp"
#include "acg/io.hpp"
#include "acg/kernels.hpp"
#include "acg/rng.hpp"

namespace acg {

namespace kernels {

void polyline_field_serial(const std::vector<Vec3>& nodes, double current,
                           const std::vector<Vec3>& points, std::vector<Vec3>& out) {
  out.assign(points.size(), Vec3::Zero());
  for (std::size_t j = 0; j < points.size(); ++j) {
    Vec3 b = Vec3::Zero();
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
      b += biot_savart_segment({nodes[i], nodes[i + 1], current}, points[j]);
    out[j] = b;
  }
}

void polyline_field_parallel(const std::vector<Vec3>& nodes, double current,
                             const std::vector<Vec3>& points, std::vector<Vec3>& out) {
  out.assign(points.size(), Vec3::Zero());
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    Vec3 b = Vec3::Zero();
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
      b += biot_savart_segment({nodes[i], nodes[i + 1], current}, points[j]);
    out[j] = b;
  }
}

}  // namespace kernels

std::size_t EdgeNoiseSpec::grid_size() const {
  return static_cast<std::size_t>(std::llround(z_extent / grid_step));
}

void EdgeNoiseSpec::validate() const {
  if (!(grid_step > 0.0)) throw ConfigError("edge noise: grid step must be positive");
  if (z_extent < 100.0 * grid_step)
    throw ConfigError("edge noise: z extent must hold at least 100 grid steps");
  if (rms_amplitude < 0.0) throw ConfigError("edge noise: rms amplitude must be >= 0");
}

EdgeProfiles generate_edge_profiles(const EdgeNoiseSpec& spec) {
  spec.validate();
  const std::size_t n = spec.grid_size();
  EdgeProfiles p;
  p.seed = spec.seed;
  p.rms_amplitude = spec.rms_amplitude;
  p.z.resize(n);
  p.left.resize(n);
  p.right.resize(n);
  CounterRng left(spec.seed, 0, 0);
  CounterRng right(spec.seed, 0, 1);
  for (std::size_t i = 0; i < n; ++i) {
    p.z[i] = -spec.z_extent / 2 + spec.grid_step * static_cast<double>(i);
    p.left[i] = spec.rms_amplitude * left.gauss();
    p.right[i] = spec.rms_amplitude * right.gauss();
  }
  return p;
}

namespace {

// Direct oracle at arbitrary evaluation z positions: field of the meandering
// centerline minus the straight wire, both with the same discretization.
void direct_delta_field(const EdgeProfiles& edges, const WireRoughnessGeometry& geom,
                        double current, const std::vector<double>& eval_z,
                        std::vector<double>& dbx, std::vector<double>& dby,
                        std::vector<double>& dbz) {
  const std::size_t n = edges.z.size();
  if (n < 2) throw ConfigError("edge profiles too short");
  const double dz_grid = edges.z[1] - edges.z[0];
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (edges.z[i + 1] - edges.z[i] > 4.0 * dz_grid + 1e-15)
      throw NumericsError("wire discretization too coarse (> 4 grid steps)");

  std::vector<Vec3> bent(n), straight(n);
  for (std::size_t i = 0; i < n; ++i) {
    double c = 0.5 * (edges.left[i] + edges.right[i]);
    if (std::abs(c) > 0.25 * geom.wire_width)
      throw ConfigError("edge deformation not small against the wire width");
    bent[i] = Vec3(c, 0.0, edges.z[i]);
    straight[i] = Vec3(0.0, 0.0, edges.z[i]);
  }
  std::vector<Vec3> points(eval_z.size());
  for (std::size_t j = 0; j < eval_z.size(); ++j)
    points[j] = Vec3(0.0, geom.height, eval_z[j]);

  std::vector<Vec3> fb, fs;
  kernels::polyline_field_parallel(bent, current, points, fb);
  kernels::polyline_field_parallel(straight, current, points, fs);
  dbx.resize(eval_z.size());
  dby.resize(eval_z.size());
  dbz.resize(eval_z.size());
  for (std::size_t j = 0; j < eval_z.size(); ++j) {
    Vec3 d = fb[j] - fs[j];
    dbx[j] = d.x();
    dby[j] = d.y();
    dbz[j] = d.z();
  }
}

void remove_mean(std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

}  // namespace

RoughRealization rough_field_direct(const EdgeProfiles& edges,
                                    const WireRoughnessGeometry& geom,
                                    double reference_current) {
  RoughRealization r;
  r.z = edges.z;
  r.height = geom.height;
  r.reference_current = reference_current;
  r.grid_step = edges.z.size() > 1 ? edges.z[1] - edges.z[0] : 0.0;
  r.seed = edges.seed;
  r.rms_amplitude = edges.rms_amplitude;
  r.provenance = "direct";
  direct_delta_field(edges, geom, reference_current, r.z, r.bx_per_amp, r.by_per_amp,
                     r.bz_per_amp);
  // per amp
  for (auto* a : {&r.bx_per_amp, &r.by_per_amp, &r.bz_per_amp})
    for (double& v : *a) v /= reference_current;
  remove_mean(r.bz_per_amp);
  return r;
}

TransferFunction compute_transfer_function(const WireRoughnessGeometry& geom,
                                           const std::vector<double>& k_grid,
                                           double z_extent, double grid_step) {
  const std::size_t n = static_cast<std::size_t>(std::llround(z_extent / grid_step));
  const double nyquist = constants::pi / grid_step;
  for (double k : k_grid)
    if (!(k > 0.0) || k >= nyquist)
      throw ConfigError("transfer function k grid must be positive and below Nyquist");

  EdgeProfiles edges;
  edges.z.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    edges.z[i] = -z_extent / 2 + grid_step * static_cast<double>(i);

  // evaluation points restricted to the inner half, away from the wire ends
  std::vector<double> eval_z;
  const std::size_t m = 256;
  for (std::size_t j = 0; j < m; ++j)
    eval_z.push_back(-z_extent / 4 + z_extent / 2 * static_cast<double>(j) /
                                          static_cast<double>(m));

  const double amp = 1e-9;  // small against the wire width; response is linear
  const double unit_current = 1.0;
  TransferFunction tf;
  tf.k = k_grid;
  tf.height = geom.height;
  for (double k : k_grid) {
    edges.left.resize(n);
    edges.right.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      edges.left[i] = edges.right[i] = amp * std::sin(k * edges.z[i]);
    std::vector<double> dbx, dby, dbz;
    direct_delta_field(edges, geom, unit_current, eval_z, dbx, dby, dbz);

    // least-squares projection onto {sin(kz), cos(kz)}
    auto project = [&](const std::vector<double>& f) {
      double ss = 0, cc = 0, sc = 0, fs = 0, fc = 0;
      for (std::size_t j = 0; j < eval_z.size(); ++j) {
        double s = std::sin(k * eval_z[j]), c = std::cos(k * eval_z[j]);
        ss += s * s;
        cc += c * c;
        sc += s * c;
        fs += f[j] * s;
        fc += f[j] * c;
      }
      double det = ss * cc - sc * sc;
      double a = (fs * cc - fc * sc) / det;
      double b = (fc * ss - fs * sc) / det;
      return std::sqrt(a * a + b * b);
    };
    tf.bz_response.push_back(project(dbz) / amp);
    tf.bx_response.push_back(project(dbx) / amp);
    tf.by_response.push_back(project(dby) / amp);
  }
  return tf;
}

namespace {

double interp_tf(const std::vector<double>& kg, const std::vector<double>& resp,
                 double k) {
  if (k <= kg.front()) {
    // response -> k * (const) as k -> 0; extrapolate linearly through zero
    return resp.front() * k / kg.front();
  }
  if (k >= kg.back()) return resp.back();
  auto it = std::upper_bound(kg.begin(), kg.end(), k);
  std::size_t i = static_cast<std::size_t>(it - kg.begin()) - 1;
  if (i + 1 >= kg.size()) return resp.back();
  double t = (k - kg[i]) / (kg[i + 1] - kg[i]);
  return resp[i] * (1.0 - t) + resp[i + 1] * t;
}

}  // namespace

RoughRealization rough_field_spectral(const EdgeNoiseSpec& spec,
                                      const TransferFunction& tf,
                                      double reference_current, double height) {
  spec.validate();
  const std::size_t n = spec.grid_size();
  const double nyq = constants::pi / spec.grid_step;
  if (tf.k.empty() || tf.k.back() < 0.995 * nyq)
    throw NumericsError("transfer function does not cover the synthesis band");

  EdgeProfiles edges = generate_edge_profiles(spec);
  std::vector<double> centerline(n);
  for (std::size_t i = 0; i < n; ++i)
    centerline[i] = 0.5 * (edges.left[i] + edges.right[i]);

  auto spec_c = rfft(centerline);
  const double dk = 2.0 * constants::pi / (spec.grid_step * static_cast<double>(n));
  std::vector<std::complex<double>> sz(spec_c.size()), sy(spec_c.size()),
      sx(spec_c.size());
  for (std::size_t m = 0; m < spec_c.size(); ++m) {
    double k = dk * static_cast<double>(m);
    if (m == 0) continue;  // zero-mean output
    double rz = interp_tf(tf.k, tf.bz_response, k);
    double ry = interp_tf(tf.k, tf.by_response, k);
    double rx = interp_tf(tf.k, tf.bx_response, k);
    // delta Bz responds in quadrature with the centerline; the transverse
    // components respond in phase
    sz[m] = std::complex<double>(0.0, 1.0) * rz * spec_c[m];
    sy[m] = ry * spec_c[m];
    sx[m] = rx * spec_c[m];
  }
  if (n % 2 == 0) sz[n / 2] = 0.0;  // keep the series real

  RoughRealization r;
  r.z = edges.z;
  r.bz_per_amp = irfft(sz, n);
  r.by_per_amp = irfft(sy, n);
  r.bx_per_amp = irfft(sx, n);
  r.height = height;
  r.reference_current = reference_current;
  r.seed = spec.seed;
  r.rms_amplitude = spec.rms_amplitude;
  r.grid_step = spec.grid_step;
  r.provenance = "spectral";
  remove_mean(r.bz_per_amp);
  return r;
}

double RoughRealization::energy_rms(double current) const {
  double ss = 0.0;
  std::size_t b = window_begin(), e = window_end();
  for (std::size_t i = b; i < e; ++i) {
    double v = constants::mu_eff * bz_per_amp[i] * current;
    ss += v * v;
  }
  return std::sqrt(ss / static_cast<double>(e - b));
}

RoughRealization calibrate_to_energy_rms(const RoughRealization& real,
                                         double target_rms_kelvin, double current) {
  if (target_rms_kelvin == 0.0) {
    RoughRealization r = real;
    std::fill(r.bz_per_amp.begin(), r.bz_per_amp.end(), 0.0);
    std::fill(r.bx_per_amp.begin(), r.bx_per_amp.end(), 0.0);
    std::fill(r.by_per_amp.begin(), r.by_per_amp.end(), 0.0);
    r.rms_amplitude = 0.0;
    return r;
  }
  double rms = real.energy_rms(current);
  if (rms <= 0.0) throw NumericsError("cannot calibrate a zero realization");
  double scale = constants::k_B * target_rms_kelvin / rms;
  RoughRealization r = real;
  for (auto* a : {&r.bx_per_amp, &r.by_per_amp, &r.bz_per_amp})
    for (double& v : *a) v *= scale;
  r.rms_amplitude *= scale;
  return r;
}

void save_realization(const std::filesystem::path& path, const RoughRealization& r,
                      const std::map<std::string, std::string>& extra_meta) {
  io::Table t;
  t.meta = extra_meta;
  t.meta["rms_amplitude_m"] = io::format_double(r.rms_amplitude);
  t.meta["grid_step_m"] = io::format_double(r.grid_step);
  t.meta["height_m"] = io::format_double(r.height);
  t.meta["reference_current_A"] = io::format_double(r.reference_current);
  t.meta["seed"] = std::to_string(r.seed);
  t.meta["provenance"] = r.provenance;
  t.columns = {"z", "delta_Bz_per_amp", "delta_Bx_per_amp", "delta_By_per_amp"};
  t.data = {r.z, r.bz_per_amp, r.bx_per_amp, r.by_per_amp};
  io::write_table(path, t);
}

RoughRealization load_realization(const std::filesystem::path& path) {
  io::Table t = io::read_table(path);
  RoughRealization r;
  r.z = t.col("z");
  r.bz_per_amp = t.col("delta_Bz_per_amp");
  r.bx_per_amp = t.col("delta_Bx_per_amp");
  r.by_per_amp = t.col("delta_By_per_amp");
  r.rms_amplitude = std::stod(t.meta.at("rms_amplitude_m"));
  r.grid_step = std::stod(t.meta.at("grid_step_m"));
  r.height = std::stod(t.meta.at("height_m"));
  r.reference_current = std::stod(t.meta.at("reference_current_A"));
  r.seed = std::stoull(t.meta.at("seed"));
  r.provenance = t.meta.at("provenance");
  return r;
}

}  // namespace acg
