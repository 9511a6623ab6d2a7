// Benchmark of the OpenMP kernels against their serial references.
// Prints wall times and cross-checks that both variants agree bit-for-bit.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "acg/constants.hpp"
#include "acg/dynamics.hpp"
#include "acg/kernels.hpp"
#include "acg/rng.hpp"

using namespace acg;

namespace {

double seconds(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main() {
  // polyline field: a meandering wire with 4000 nodes, 20000 eval points
  std::vector<Vec3> nodes;
  CounterRng rng(7, 0, 0);
  const std::size_t n_nodes = 4000;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    double z = -1e-3 + 2e-3 * static_cast<double>(i) / (n_nodes - 1);
    nodes.emplace_back(5e-9 * rng.gauss(), 0.0, z);
  }
  std::vector<Vec3> points;
  for (std::size_t i = 0; i < 20000; ++i)
    points.emplace_back(0.0, 7e-6, -0.9e-3 + 1.8e-3 * i / 19999.0);

  std::vector<Vec3> out_s, out_p;
  double ts = seconds([&] { kernels::polyline_field_serial(nodes, 13e-3, points, out_s); });
  double tp = seconds([&] { kernels::polyline_field_parallel(nodes, 13e-3, points, out_p); });
  bool same = out_s.size() == out_p.size();
  for (std::size_t i = 0; same && i < out_s.size(); ++i)
    same = out_s[i] == out_p[i];
  std::printf("polyline field   serial %7.3f s  parallel %7.3f s  speedup %5.2fx  %s\n",
              ts, tp, ts / tp, same ? "bit-identical" : "MISMATCH");

  // 1D ensemble integration in a harmonic profile
  const double omega = 2.0 * constants::pi * 7.1;
  PotentialProfile harm;
  for (double z = -500e-6; z <= 500e-6 + 1e-9; z += 2e-6) {
    harm.z.push_back(z);
    harm.v.push_back(0.5 * constants::m_rb87 * omega * omega * z * z);
  }
  EnsembleSpec es;
  es.n = 2000;
  es.seed = 7;
  IntegratorConfig icfg;
  icfg.dt = 2e-5;
  icfg.t_max = 0.5;
  icfg.sample_interval = 2e-3;

  auto s1 = sample_thermal_ensemble_1d(es, harm);
  auto s2 = s1;
  TrajectoryRecord r1, r2;
  double t1 = seconds([&] { r1 = integrate_static_1d_serial(s1, harm, icfg); });
  double t2 = seconds([&] { r2 = integrate_static_1d(s2, harm, icfg); });
  bool same2 = r1.cm == r2.cm;
  std::printf("1d integration   serial %7.3f s  parallel %7.3f s  speedup %5.2fx  %s\n",
              t1, t2, t1 / t2, same2 ? "bit-identical" : "MISMATCH");
  return (same && same2) ? 0 : 1;
}
