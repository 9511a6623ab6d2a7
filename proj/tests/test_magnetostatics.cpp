#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "acg/constants.hpp"
#include "acg/errors.hpp"
#include "acg/magnetostatics.hpp"

using namespace acg;
using constants::mu0;
using constants::pi;

namespace {

// Midpoint-rule quadrature of the Biot-Savart integral, independent of the
// closed-form segment expression.
Vec3 quadrature_field(const WireSegment& seg, const Vec3& p, int n = 200000) {
  Vec3 u = seg.end - seg.start;
  Vec3 acc = Vec3::Zero();
  for (int i = 0; i < n; ++i) {
    double s = (i + 0.5) / n;
    Vec3 r = p - (seg.start + s * u);
    acc += (u / n).cross(r) / std::pow(r.norm(), 3);
  }
  return mu0 * seg.current / (4.0 * pi) * acc;
}

}  // namespace

TEST_CASE("segment field matches numerical quadrature") {
  WireSegment seg{Vec3(-1e-3, 0, -2e-3), Vec3(0.5e-3, 0.2e-3, 1e-3), 0.013};
  Vec3 p(3e-6, 9e-6, 4e-4);
  Vec3 b = biot_savart_segment(seg, p);
  Vec3 bq = quadrature_field(seg, p);
  CHECK((b - bq).norm() < 1e-9 * b.norm() + 1e-18);
}

TEST_CASE("long straight wire reproduces the infinite-wire field") {
  // 1 A along +z, field probed 1 mm away on the +y axis: mu0 I / (2 pi r)
  // pointing along -x.
  WireSegment seg{Vec3(0, 0, -5.0), Vec3(0, 0, 5.0), 1.0};
  Vec3 b = biot_savart_segment(seg, Vec3(0, 1e-3, 0));
  CHECK(b.x() == doctest::Approx(-2.0e-4).epsilon(1e-7));
  CHECK(std::abs(b.y()) < 1e-16);
  CHECK(std::abs(b.z()) < 1e-16);
}

TEST_CASE("field scales linearly with current and superposes") {
  WireSegment a{Vec3(-1e-3, 0, -1e-3), Vec3(1e-3, 0, 1e-3), 0.01};
  WireSegment b = a;
  b.current = -0.035;
  b.start.y() = 5e-6;
  b.end.y() = 5e-6;
  Vec3 p(2e-6, 8e-6, 1e-5);

  Vec3 fa = biot_savart_segment(a, p);
  WireSegment a2 = a;
  a2.current *= 3.0;
  CHECK((biot_savart_segment(a2, p) - 3.0 * fa).norm() < 1e-15);

  WireLayout layout;
  layout.add(a);
  layout.add(b);
  layout.uniform_field = Vec3(0, 0, 1.8e-4);
  Vec3 sum = fa + biot_savart_segment(b, p) + layout.uniform_field;
  CHECK((field_at(layout, p).B - sum).norm() < 1e-18);
}

TEST_CASE("analytic Jacobian agrees with central differences") {
  WireSegment seg{Vec3(-1e-3, 0, -2e-3), Vec3(1e-3, 0.1e-3, 2e-3), 0.015};
  Vec3 p(4e-6, 7e-6, 3e-4);
  Vec3 b;
  Mat3 jac;
  biot_savart_segment_with_jacobian(seg, p, b, jac);
  CHECK((b - biot_savart_segment(seg, p)).norm() < 1e-18);

  double h = 1e-9;
  Mat3 fd;
  for (int j = 0; j < 3; ++j) {
    Vec3 dp = Vec3::Zero();
    dp[j] = h;
    fd.col(j) =
        (biot_savart_segment(seg, p + dp) - biot_savart_segment(seg, p - dp)) /
        (2.0 * h);
  }
  CHECK((jac - fd).norm() < 1e-6 * jac.norm());
}

TEST_CASE("Jacobian is traceless; symmetric in the closed-circuit limit") {
  // div B = 0 holds for any segment, so the trace vanishes identically.
  WireSegment seg{Vec3(-2e-3, 0, -1e-3), Vec3(2e-3, 0.3e-3, 1e-3), 0.02};
  Vec3 b;
  Mat3 jac;
  biot_savart_segment_with_jacobian(seg, Vec3(-6e-6, 9e-6, 2e-4), b, jac);
  CHECK(std::abs(jac.trace()) < 1e-10 * jac.norm());

  // curl B = 0 only where the current is solenoidal: an isolated finite
  // segment is not, but a very long one probed near its middle is, so the
  // Jacobian becomes symmetric there.
  WireSegment longseg{Vec3(0, 0, -50.0), Vec3(0, 0, 50.0), 0.02};
  biot_savart_segment_with_jacobian(longseg, Vec3(2e-6, 8e-6, 1e-4), b, jac);
  CHECK((jac - jac.transpose()).norm() < 1e-8 * jac.norm());
}

TEST_CASE("evaluation inside the wire core is rejected") {
  WireSegment seg{Vec3(0, 0, -1e-3), Vec3(0, 0, 1e-3), 0.013};
  CHECK_THROWS_AS(biot_savart_segment(seg, Vec3(1e-7, 0, 0)), NumericsError);
  Vec3 b;
  Mat3 jac;
  CHECK_THROWS_AS(biot_savart_segment_with_jacobian(seg, Vec3(0, 2e-7, 1e-4), b, jac),
                  NumericsError);
  // just outside the core is fine
  CHECK_NOTHROW(biot_savart_segment(seg, Vec3(0, 4e-7, 0)));
}

TEST_CASE("five-wire guide sits 7 um above the chip with the tuned gradient") {
  WireLayout layout = build_five_wire_layout(2.5e-6, 2e-3, 13e-3, 15e-3);
  Eigen::Vector2d q = find_zero_line(layout, 0.0);
  CHECK(std::abs(q.x()) < 1e-9);
  CHECK(q.y() == doctest::Approx(7.0e-6).epsilon(2e-3));
  double bp = transverse_gradient(layout, Vec3(q.x(), q.y(), 0));
  CHECK(bp == doctest::Approx(16.81).epsilon(0.01));
}

TEST_CASE("five-wire field has no second zero on the outward ray") {
  WireLayout layout = build_five_wire_layout(2.5e-6, 2e-3, 13e-3, 15e-3);
  double min_b = 1.0;
  for (double y = 12e-6; y <= 80e-6; y += 0.5e-6) {
    Vec3 b = field_at(layout, Vec3(0, y, 0)).B;
    min_b = std::min(min_b, std::hypot(b.x(), b.y()));
  }
  // the field dips on the far side of the guide but never closes a second
  // zero; the remaining transverse barrier stays near 0.3 G
  CHECK(min_b > 2e-5);
}

TEST_CASE("five-wire field grows monotonically toward the chip") {
  WireLayout layout = build_five_wire_layout(2.5e-6, 2e-3, 13e-3, 15e-3);
  double prev = 0.0;
  for (double y = 6.5e-6; y >= 1e-6; y -= 0.25e-6) {
    Vec3 b = field_at(layout, Vec3(0, y, 0)).B;
    double mag = std::hypot(b.x(), b.y());
    CHECK(mag > prev);
    prev = mag;
  }
}

TEST_CASE("five-wire layout symmetry under x -> -x") {
  WireLayout layout = build_five_wire_layout(2.5e-6, 2e-3, 13e-3, 15e-3);
  Vec3 bp = field_at(layout, Vec3(3e-6, 5e-6, 1e-4)).B;
  Vec3 bm = field_at(layout, Vec3(-3e-6, 5e-6, 1e-4)).B;
  // mirror symmetry: Bx even, By odd, Bz odd in x for z-directed currents
  CHECK(bp.x() == doctest::Approx(bm.x()).epsilon(1e-12));
  CHECK(bp.y() == doctest::Approx(-bm.y()).epsilon(1e-12));
}

TEST_CASE("H layout is symmetric for equal leg currents") {
  WireLayout layout = build_h_wire_layout(0.4, 0.4);
  Vec3 bp = field_at(layout, Vec3(0, 7e-6, 2e-4)).B;
  Vec3 bm = field_at(layout, Vec3(0, 7e-6, -2e-4)).B;
  CHECK(bp.z() == doctest::Approx(bm.z()).epsilon(1e-12));
  CHECK(bp.y() == doctest::Approx(-bm.y()).epsilon(1e-10));
  // between the legs the longitudinal field has its minimum at z = 0:
  // that dip is what closes the guide longitudinally
  Vec3 b0 = field_at(layout, Vec3(0, 7e-6, 0)).B;
  CHECK(std::abs(b0.z()) < std::abs(bp.z()));
}

TEST_CASE("degenerate geometry is rejected") {
  CHECK_THROWS_AS(build_five_wire_layout(0.0, 2e-3, 13e-3, 15e-3), ConfigError);
  CHECK_THROWS_AS(biot_savart_segment({Vec3(0, 0, 0), Vec3(0, 0, 0), 1.0},
                                      Vec3(0, 1e-3, 0)),
                  NumericsError);
}
