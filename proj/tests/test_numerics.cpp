#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "acg/constants.hpp"
#include "acg/fft.hpp"
#include "acg/fitting.hpp"
#include "acg/kernels.hpp"
#include "acg/rng.hpp"
#include "acg/spline.hpp"

using namespace acg;
using constants::pi;

TEST_CASE("counter rng is deterministic and stream-separated") {
  CounterRng a(123, 4, 5), b(123, 4, 5), c(123, 4, 6);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  bool differs = false;
  CounterRng a2(123, 4, 5);
  for (int i = 0; i < 100; ++i) differs |= (a2.next_u64() != c.next_u64());
  CHECK(differs);
}

TEST_CASE("rng moments") {
  CounterRng r(7, 0, 0);
  const int n = 200000;
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = r.uniform();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
    mean += u;
  }
  mean /= n;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));

  CounterRng g(9, 1, 0);
  mean = 0.0;
  std::vector<double> xs(n);
  for (auto& x : xs) {
    x = g.gauss();
    mean += x;
  }
  mean /= n;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("cubic spline reproduces cubic polynomials") {
  auto f = [](double z) { return 1.0 + 2.0 * z - z * z + 0.5 * z * z * z; };
  auto fp = [](double z) { return 2.0 - 2.0 * z + 1.5 * z * z; };
  std::vector<double> y;
  double z0 = -2.0, dz = 0.25;
  for (int i = 0; i <= 16; ++i) y.push_back(f(z0 + i * dz));
  CubicSpline s(z0, dz, y);
  for (double z = -1.9; z < 1.9; z += 0.137) {
    CHECK(s(z) == doctest::Approx(f(z)).epsilon(1e-12));
    CHECK(s.derivative(z) == doctest::Approx(fp(z)).epsilon(1e-10));
  }
  CHECK(s.z_min() == doctest::Approx(-2.0));
  CHECK(s.z_max() == doctest::Approx(2.0));
}

TEST_CASE("fft round trip and cosine spectrum") {
  const std::size_t n = 256;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = 0.3 + 1.7 * std::cos(2.0 * pi * 5.0 * i / n + 0.4);
  auto spec = rfft(x);
  REQUIRE(spec.size() == n / 2 + 1);
  // unnormalized forward: bin 5 carries amplitude * n/2, bin 0 the mean * n
  CHECK(std::abs(spec[0]) == doctest::Approx(0.3 * n).epsilon(1e-10));
  CHECK(std::abs(spec[5]) == doctest::Approx(1.7 * n / 2.0).epsilon(1e-10));
  for (std::size_t k = 1; k < spec.size(); ++k)
    if (k != 5) CHECK(std::abs(spec[k]) < 1e-9);

  auto back = irfft(spec, n);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("quadratic fit is exact on quadratic data") {
  std::vector<double> z, v;
  for (double x = -3.0; x <= 3.0; x += 0.1) {
    z.push_back(x);
    v.push_back(4.0 - 2.0 * x + 0.7 * x * x);
  }
  QuadraticFit fit = fit_quadratic(z, v);
  CHECK(fit.c0 == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(fit.c1 == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(fit.c2 == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(fit.center == doctest::Approx(2.0 / (2.0 * 0.7)).epsilon(1e-10));
  CHECK(fit.rms_residual < 1e-12);
}

TEST_CASE("levenberg-marquardt solves a small nonlinear least squares") {
  // fit y = a exp(b x) on clean data
  std::vector<double> xs, ys;
  for (double x = 0.0; x <= 2.0; x += 0.1) {
    xs.push_back(x);
    ys.push_back(2.5 * std::exp(-1.3 * x));
  }
  auto residuals = [&](const std::vector<double>& p) {
    std::vector<double> r(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
      r[i] = p[0] * std::exp(p[1] * xs[i]) - ys[i];
    return r;
  };
  LmResult res = levenberg_marquardt(residuals, {1.0, -0.5});
  CHECK(res.converged);
  CHECK(res.params[0] == doctest::Approx(2.5).epsilon(1e-6));
  CHECK(res.params[1] == doctest::Approx(-1.3).epsilon(1e-6));
}

TEST_CASE("exponential decay fit recovers the lifetime") {
  std::vector<double> t, n;
  for (double x = 0.0; x <= 2.0; x += 0.02) {
    t.push_back(x);
    n.push_back(1000.0 * std::exp(-x / 0.45));
  }
  ExpDecayFit fit = fit_exp_decay(t, n);
  CHECK(fit.converged);
  CHECK_FALSE(fit.tau_lower_bound);
  CHECK(fit.tau == doctest::Approx(0.45).epsilon(1e-6));
  CHECK(fit.amplitude == doctest::Approx(1000.0).epsilon(1e-6));
}

TEST_CASE("undecayed data yields a lower bound, not a bogus lifetime") {
  std::vector<double> t, n;
  for (double x = 0.0; x <= 2.0; x += 0.02) {
    t.push_back(x);
    n.push_back(1000.0 * std::exp(-x / 1e4));
  }
  ExpDecayFit fit = fit_exp_decay(t, n);
  CHECK(fit.tau_lower_bound);
  CHECK(fit.tau >= 100.0);  // far beyond the observation span
}

TEST_CASE("damped oscillation fit recovers envelope and frequency") {
  double tau = 0.35, omega = 2.0 * pi * 7.0;
  std::vector<double> t, z;
  for (double x = 0.0; x <= 1.5; x += 0.002) {
    t.push_back(x);
    z.push_back(1e-6 + 20e-6 * std::exp(-x * x / (tau * tau)) *
                            std::cos(omega * x + 0.3));
  }
  DampedOscFit fit = fit_damped_oscillation(t, z);
  CHECK(fit.converged);
  CHECK(fit.tau == doctest::Approx(tau).epsilon(1e-4));
  CHECK(fit.omega == doctest::Approx(omega).epsilon(1e-5));
  CHECK_FALSE(fit.tau_lower_bound);
}

TEST_CASE("gaussian fit recovers the peak parameters") {
  std::vector<double> x, y;
  for (double v = -5.0; v <= 5.0; v += 0.05) {
    x.push_back(v);
    y.push_back(0.2 + 3.0 * std::exp(-(v - 0.7) * (v - 0.7) / (2.0 * 1.2 * 1.2)));
  }
  GaussianFit fit = fit_gaussian(x, y);
  CHECK(fit.converged);
  CHECK(fit.amplitude == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(fit.center == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(std::abs(fit.sigma) == doctest::Approx(1.2).epsilon(1e-6));
  CHECK(fit.offset == doctest::Approx(0.2).epsilon(1e-5));
}

TEST_CASE("polyline kernels agree with each other bit for bit") {
  std::vector<Vec3> nodes;
  for (int i = 0; i <= 50; ++i) {
    double s = i / 50.0;
    nodes.emplace_back(1e-6 * std::sin(20.0 * s), 0.0, -1e-3 + 2e-3 * s);
  }
  std::vector<Vec3> points;
  CounterRng r(2, 0, 0);
  for (int i = 0; i < 400; ++i)
    points.emplace_back(4e-6 * (r.uniform() - 0.5), 5e-6 + 4e-6 * r.uniform(),
                        8e-4 * (r.uniform() - 0.5));

  std::vector<Vec3> serial, parallel;
  kernels::polyline_field_serial(nodes, 13e-3, points, serial);
  kernels::polyline_field_parallel(nodes, 13e-3, points, parallel);
  REQUIRE(serial.size() == points.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].x() == parallel[i].x());
    CHECK(serial[i].y() == parallel[i].y());
    CHECK(serial[i].z() == parallel[i].z());
  }
}

TEST_CASE("polyline kernel matches per-segment summation") {
  std::vector<Vec3> nodes = {Vec3(0, 0, -1e-3), Vec3(1e-6, 0, 0), Vec3(0, 0, 1e-3)};
  Vec3 p(2e-6, 7e-6, 1e-4);
  std::vector<Vec3> out;
  kernels::polyline_field_serial(nodes, 13e-3, {p}, out);

  Vec3 expect = Vec3::Zero();
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    expect += biot_savart_segment({nodes[i], nodes[i + 1], 13e-3}, p);
  CHECK((out[0] - expect).norm() < 1e-18);
}
