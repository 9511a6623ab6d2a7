#include "acg/magnetostatics.hpp"

#include <cmath>

#include "acg/constants.hpp"
#include "acg/errors.hpp"

namespace acg {

namespace {

double distance_to_axis(const WireSegment& seg, const Vec3& p, double& along) {
  Vec3 u = seg.end - seg.start;
  double len = u.norm();
  Vec3 r1 = p - seg.start;
  along = r1.dot(u) / len;
  return (r1.cross(u)).norm() / len;
}

}  // namespace

void WireLayout::add(const WireSegment& s, const std::string& label) {
  segments.push_back(s);
  segment_labels.push_back(label);
}

void WireLayout::scale_currents(double factor) {
  for (auto& s : segments) s.current *= factor;
}

Vec3 biot_savart_segment(const WireSegment& seg, const Vec3& p, double core_radius) {
  Vec3 u = seg.end - seg.start;
  double len = u.norm();
  if (!(len > 0.0) || !p.allFinite())
    throw NumericsError("degenerate wire segment or evaluation point");

  Vec3 r1 = p - seg.start;
  Vec3 r2 = p - seg.end;
  Vec3 w = u.cross(r2);  // constant along the segment; B is parallel to it
  double w2 = w.squaredNorm();
  double along = r1.dot(u) / len;
  double rho = std::sqrt(w2) / len;

  if (rho < core_radius && along > -core_radius && along < len + core_radius)
    throw NumericsError("evaluation point inside wire core");
  if (w2 == 0.0) return Vec3::Zero();  // on the axis extension: field vanishes

  double n1 = r1.norm(), n2 = r2.norm();
  double geom = r1.dot(u) / (n1 * len) - r2.dot(u) / (n2 * len);
  double c = constants::mu0 * seg.current / (4.0 * constants::pi);
  return w * (c * len * geom / w2);
}

void biot_savart_segment_with_jacobian(const WireSegment& seg, const Vec3& p,
                                       Vec3& b, Mat3& jac, double core_radius) {
  Vec3 u = seg.end - seg.start;
  double len = u.norm();
  if (!(len > 0.0) || !p.allFinite())
    throw NumericsError("degenerate wire segment or evaluation point");

  Vec3 r1 = p - seg.start;
  Vec3 r2 = p - seg.end;
  Vec3 w = u.cross(r2);
  double w2 = w.squaredNorm();
  double along = r1.dot(u) / len;
  double rho = std::sqrt(w2) / len;

  if (rho < core_radius && along > -core_radius && along < len + core_radius)
    throw NumericsError("evaluation point inside wire core");
  if (w2 == 0.0) {  // axis extension: B = 0, derivative direction undefined
    b = Vec3::Zero();
    jac = Mat3::Zero();
    return;
  }

  double n1 = r1.norm(), n2 = r2.norm();
  Vec3 uhat = u / len, e1 = r1 / n1, e2 = r2 / n2;
  double geom = uhat.dot(e1) - uhat.dot(e2);
  double c = constants::mu0 * seg.current / (4.0 * constants::pi);
  double s = c * len * geom / w2;
  b = w * s;

  // B = s(p) w(p): dw/dp = [u]x, grad geom and grad w2 in closed form.
  Mat3 W;
  W << 0, -u.z(), u.y(), u.z(), 0, -u.x(), -u.y(), u.x(), 0;
  Vec3 dgeom = (uhat - e1 * uhat.dot(e1)) / n1 - (uhat - e2 * uhat.dot(e2)) / n2;
  Vec3 dw2 = 2.0 * (W.transpose() * w);
  Vec3 ds = (c * len) * (dgeom / w2 - (geom / (w2 * w2)) * dw2);
  jac = w * ds.transpose() + s * W;
}

FieldVector field_at(const WireLayout& layout, const Vec3& p, bool with_gradient,
                     double core_radius) {
  FieldVector out;
  out.B = layout.uniform_field;
  for (const auto& s : layout.segments) out.B += biot_savart_segment(s, p, core_radius);

  if (with_gradient) {
    // step: 1% of the distance to the nearest wire axis
    double dmin = 1e-3;
    for (const auto& s : layout.segments) {
      double along;
      double rho = distance_to_axis(s, p, along);
      dmin = std::min(dmin, rho);
    }
    double h = std::max(1e-2 * dmin, 1e-12);
    Mat3 g;
    for (int j = 0; j < 3; ++j) {
      Vec3 dp = Vec3::Zero();
      dp[j] = h;
      FieldVector fp = field_at(layout, p + dp, false, core_radius);
      FieldVector fm = field_at(layout, p - dp, false, core_radius);
      g.col(j) = (fp.B - fm.B) / (2.0 * h);
    }
    out.gradient = g;
  }
  return out;
}

WireLayout build_five_wire_layout(double d, double wire_len, double I_c, double I_b,
                                  const FiveWireGeometry& geom) {
  if (!(d > 0.0) || !(wire_len > 0.0))
    throw ConfigError("five-wire layout needs positive spacing and length");
  WireLayout layout;
  const Vec3 zhat(0, 0, 1);
  auto wire = [&](double x, double current, const std::string& label) {
    layout.add({Vec3(x, 0, -wire_len / 2), Vec3(x, 0, wire_len / 2), current}, label);
  };
  wire(0.0, I_c, "central");
  double xi = geom.inner_pair_mult * d;
  double xo = geom.outer_pair_mult * d;
  double ii = geom.inner_pair_sign * geom.inner_pair_current * I_b;
  double io = geom.outer_pair_sign * geom.outer_pair_current * I_b;
  wire(-xi, ii, "outer-pair-1");
  wire(+xi, ii, "outer-pair-1");
  wire(-xo, io, "outer-pair-2");
  wire(+xo, io, "outer-pair-2");
  return layout;
}

WireLayout build_h_wire_layout(double I_z1, double I_z2, const HWireGeometry& geom) {
  if (!(geom.half_separation > 0.0) || !(geom.leg_length > 0.0))
    throw ConfigError("H layout needs positive separation and leg length");
  WireLayout layout;
  auto leg = [&](double z, double current, const std::string& label) {
    layout.add({Vec3(-geom.leg_length / 2, -geom.depth, z),
                Vec3(geom.leg_length / 2, -geom.depth, z), current},
               label);
  };
  leg(-geom.half_separation, I_z1, "h-wire");
  leg(+geom.half_separation, I_z2, "h-wire");
  return layout;
}

Eigen::Vector2d find_zero_line(const WireLayout& layout, double z,
                               const ZeroLineOptions& opts) {
  Eigen::Vector2d q(opts.initial_guess.x(), opts.initial_guess.y());
  auto bperp = [&](const Eigen::Vector2d& xy) {
    Vec3 b = field_at(layout, Vec3(xy.x(), xy.y(), z)).B;
    return Eigen::Vector2d(b.x(), b.y());
  };

  Eigen::Vector2d f = bperp(q);
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (f.norm() < opts.tolerance) return q;
    double h = std::max(1e-2 * q.norm(), 1e-9);
    Eigen::Matrix2d jac;
    for (int j = 0; j < 2; ++j) {
      Eigen::Vector2d dq = Eigen::Vector2d::Zero();
      dq[j] = h;
      jac.col(j) = (bperp(q + dq) - bperp(q - dq)) / (2.0 * h);
    }
    Eigen::Vector2d step = jac.fullPivLu().solve(-f);
    // damp on overshoot
    double scale = 1.0;
    for (int k = 0; k < 20; ++k) {
      Eigen::Vector2d fn = bperp(q + scale * step);
      if (fn.norm() <= f.norm() || fn.norm() < opts.tolerance) {
        q += scale * step;
        f = fn;
        break;
      }
      scale *= 0.5;
      if (k == 19) {
        q += scale * step;
        f = bperp(q);
      }
    }
  }
  if (f.norm() < opts.tolerance) return q;
  throw NumericsError("zero-line search did not converge (|B_perp| = " +
                      std::to_string(f.norm()) + " T)");
}

double transverse_gradient(const WireLayout& layout, const Vec3& p) {
  double height = std::abs(p.y());
  if (height == 0.0) height = std::abs(p.x());
  double h = std::max(1e-2 * height, 1e-9);
  Eigen::Matrix2d m;
  for (int j = 0; j < 2; ++j) {
    Vec3 dp = Vec3::Zero();
    dp[j] = h;
    Vec3 bp = field_at(layout, p + dp).B;
    Vec3 bm = field_at(layout, p - dp).B;
    Vec3 g = (bp - bm) / (2.0 * h);
    m(0, j) = g.x();
    m(1, j) = g.y();
  }
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(m);
  return svd.singularValues()(0);
}

}  // namespace acg
