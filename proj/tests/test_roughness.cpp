#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>

#include "acg/constants.hpp"
#include "acg/errors.hpp"
#include "acg/roughness.hpp"

using namespace acg;

namespace {

double rms(const std::vector<double>& v, std::size_t b, std::size_t e) {
  double s = 0.0;
  for (std::size_t i = b; i < e; ++i) s += v[i] * v[i];
  return std::sqrt(s / static_cast<double>(e - b));
}

EdgeNoiseSpec small_spec(std::uint64_t seed) {
  EdgeNoiseSpec spec;
  spec.rms_amplitude = 5e-9;
  spec.grid_step = 1e-6;
  spec.z_extent = 400e-6;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("edge profiles are deterministic in the seed") {
  EdgeNoiseSpec spec = small_spec(42);
  EdgeProfiles a = generate_edge_profiles(spec);
  EdgeProfiles b = generate_edge_profiles(spec);
  REQUIRE(a.left.size() == b.left.size());
  for (std::size_t i = 0; i < a.left.size(); ++i) {
    CHECK(a.left[i] == b.left[i]);
    CHECK(a.right[i] == b.right[i]);
  }
  spec.seed = 43;
  EdgeProfiles c = generate_edge_profiles(spec);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.left.size(); ++i)
    diff = std::max(diff, std::abs(a.left[i] - c.left[i]));
  CHECK(diff > 1e-10);
}

TEST_CASE("edge profiles carry the requested rms and independent borders") {
  EdgeNoiseSpec spec = small_spec(7);
  spec.z_extent = 2e-3;  // more samples for tighter statistics
  EdgeProfiles e = generate_edge_profiles(spec);
  std::size_t n = e.left.size();
  CHECK(n == spec.grid_size());
  CHECK(rms(e.left, 0, n) == doctest::Approx(5e-9).epsilon(0.1));
  CHECK(rms(e.right, 0, n) == doctest::Approx(5e-9).epsilon(0.1));
  double cross = 0.0;
  for (std::size_t i = 0; i < n; ++i) cross += e.left[i] * e.right[i];
  cross /= static_cast<double>(n);
  CHECK(std::abs(cross) < 0.1 * 25e-18);  // uncorrelated borders
}

TEST_CASE("spec validation") {
  EdgeNoiseSpec spec = small_spec(1);
  spec.z_extent = 20e-6;  // fewer than 100 grid steps
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = small_spec(1);
  spec.grid_step = -1e-6;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("spectral synthesis tracks the direct oracle pointwise") {
  EdgeNoiseSpec spec = small_spec(11);
  spec.z_extent = 800e-6;  // keep finite-window edge effects small
  WireRoughnessGeometry geom;
  EdgeProfiles edges = generate_edge_profiles(spec);
  RoughRealization direct = rough_field_direct(edges, geom, 13e-3);

  // log-spaced band from the fundamental to just below the grid Nyquist
  std::vector<double> k_grid;
  const double k_lo = 2.0 * constants::pi / spec.z_extent;
  const double k_hi = 0.999 * constants::pi / spec.grid_step;
  const int nk = 96;
  for (int i = 0; i < nk; ++i)
    k_grid.push_back(k_lo *
                     std::pow(k_hi / k_lo, static_cast<double>(i) / (nk - 1)));
  TransferFunction tf = compute_transfer_function(geom, k_grid, spec.z_extent,
                                                  spec.grid_step);
  RoughRealization spectral = rough_field_spectral(spec, tf, 13e-3, geom.height);

  REQUIRE(direct.z.size() == spectral.z.size());
  std::size_t b = direct.window_begin(), e = direct.window_end();
  std::vector<double> diff(direct.bz_per_amp.size(), 0.0);
  for (std::size_t i = 0; i < diff.size(); ++i)
    diff[i] = direct.bz_per_amp[i] - spectral.bz_per_amp[i];
  double rel = rms(diff, b, e) / rms(direct.bz_per_amp, b, e);
  CHECK(rel < 0.10);
}

TEST_CASE("transfer function decays at large wavevector") {
  WireRoughnessGeometry geom;
  std::vector<double> k_grid = {1e4, 1e5, 3e5, 1e6, 3e6};
  TransferFunction tf = compute_transfer_function(geom, k_grid, 400e-6, 1e-6);
  REQUIRE(tf.bz_response.size() == k_grid.size());
  for (double r : tf.bz_response) CHECK(r >= 0.0);
  // modes much shorter than the guide height are exponentially filtered
  CHECK(tf.bz_response.back() < 1e-3 * tf.bz_response[1]);
}

TEST_CASE("calibration pins the energy rms to the target") {
  EdgeNoiseSpec spec = small_spec(3);
  WireRoughnessGeometry geom;
  RoughRealization raw = rough_field_direct(generate_edge_profiles(spec), geom, 13e-3);
  RoughRealization cal = calibrate_to_energy_rms(raw, 30e-9, 13e-3);
  CHECK(cal.energy_rms(13e-3) / constants::k_B ==
        doctest::Approx(30e-9).epsilon(1e-10));
  // pure rescale: shape unchanged
  double ratio = cal.bz_per_amp[10] / raw.bz_per_amp[10];
  for (std::size_t i = 0; i < raw.bz_per_amp.size(); ++i)
    if (std::abs(raw.bz_per_amp[i]) > 0)
      CHECK(cal.bz_per_amp[i] / raw.bz_per_amp[i] ==
            doctest::Approx(ratio).epsilon(1e-9));
}

TEST_CASE("realization save/load round trip is exact") {
  EdgeNoiseSpec spec = small_spec(5);
  WireRoughnessGeometry geom;
  RoughRealization r = rough_field_direct(generate_edge_profiles(spec), geom, 13e-3);

  auto path = std::filesystem::temp_directory_path() / "acg_rough_roundtrip.dat";
  save_realization(path, r, {{"note", "test"}});
  RoughRealization back = load_realization(path);
  std::filesystem::remove(path);

  REQUIRE(back.z.size() == r.z.size());
  for (std::size_t i = 0; i < r.z.size(); ++i) {
    CHECK(back.z[i] == r.z[i]);
    CHECK(back.bz_per_amp[i] == r.bz_per_amp[i]);
    CHECK(back.bx_per_amp[i] == r.bx_per_amp[i]);
    CHECK(back.by_per_amp[i] == r.by_per_amp[i]);
  }
  CHECK(back.seed == r.seed);
  CHECK(back.height == r.height);
  CHECK(back.reference_current == r.reference_current);
  CHECK(back.provenance == r.provenance);
}

TEST_CASE("rough field is stored per amp and zero-mean") {
  EdgeNoiseSpec spec = small_spec(9);
  WireRoughnessGeometry geom;
  RoughRealization r = rough_field_direct(generate_edge_profiles(spec), geom, 13e-3);
  double mean =
      std::accumulate(r.bz_per_amp.begin(), r.bz_per_amp.end(), 0.0) /
      static_cast<double>(r.bz_per_amp.size());
  CHECK(std::abs(mean) < 1e-12 * rms(r.bz_per_amp, 0, r.bz_per_amp.size()));
  // energy rms scales linearly with the current
  CHECK(r.energy_rms(26e-3) == doctest::Approx(2.0 * r.energy_rms(13e-3)));
}
