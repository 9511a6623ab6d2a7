#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace acg {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct WireSegment {
  Vec3 start;     // m
  Vec3 end;       // m
  double current; // A, signed along start -> end
};

struct WireLayout {
  std::vector<WireSegment> segments;
  Vec3 uniform_field = Vec3::Zero();          // T
  std::vector<std::string> segment_labels;    // parallel to segments (may be empty)

  void add(const WireSegment& s, const std::string& label = "");
  // Scale every segment current (uniform_field untouched).
  void scale_currents(double factor);
};

struct FieldVector {
  Vec3 B = Vec3::Zero();
  std::optional<Mat3> gradient;  // dB_i/dx_j, T/m
};

// Evaluation closer than this to a wire axis is rejected (half the 700 nm
// wire width by default).
inline constexpr double kDefaultCoreRadius = 350e-9;

Vec3 biot_savart_segment(const WireSegment& seg, const Vec3& p,
                         double core_radius = kDefaultCoreRadius);

// Field and its analytic spatial Jacobian J_ij = dB_i/dx_j (exact, no finite
// differences); used by the trajectory integrator's force evaluation.
void biot_savart_segment_with_jacobian(const WireSegment& seg, const Vec3& p,
                                       Vec3& b, Mat3& jac,
                                       double core_radius = kDefaultCoreRadius);

FieldVector field_at(const WireLayout& layout, const Vec3& p,
                     bool with_gradient = false,
                     double core_radius = kDefaultCoreRadius);

// Five parallel z-directed wires at y=0: central wire at x=0 carrying I_c and
// two symmetric pairs carrying fractions of the bias current, both
// antiparallel to the centre wire. The pair placement and current fractions
// default to values tuned so the guide forms 7 um above the central wire with
// a transverse gradient of 16.81 T/m at the nominal currents, the field grows
// monotonically toward the chip, and the far side of the guide keeps a
// positive field barrier of ~0.5 G (no second zero line).
struct FiveWireGeometry {
  double inner_pair_mult = 1.0;              // inner pair at +-(mult * d)
  double outer_pair_mult = 11.3069450637;    // outer pair at +-(mult * d)
  double inner_pair_sign = -1.0;    // relative to I_c direction
  double outer_pair_sign = -1.0;
  double inner_pair_current = 0.4619447940;  // fraction of I_b in each inner wire
  double outer_pair_current = 0.4094054748;  // fraction of I_b in each outer wire
};

WireLayout build_five_wire_layout(double d, double wire_len, double I_c, double I_b,
                                  const FiveWireGeometry& geom = {});

// H structure on the lower wafer: two legs along x carrying I_z1 and I_z2
// (no current in the central rung). The legs sit `depth` below the guide line
// and z = +-half_separation away from the trap center.
struct HWireGeometry {
  double half_separation = 1.3230286867e-3;  // m, legs at z = +-half_separation
  double depth = 9.8016324342e-5;            // m, vertical distance from the guide line
  double leg_length = 10.0e-3;         // m
};

WireLayout build_h_wire_layout(double I_z1, double I_z2,
                               const HWireGeometry& geom = {});

struct ZeroLineOptions {
  Vec3 initial_guess = Vec3(0.0, 5e-6, 0.0);
  int max_iterations = 100;
  double tolerance = 1e-12;  // T, on |B_perp|
};

// Transverse (x,y) root of the field at fixed z, via damped Newton iteration
// on the numerically differentiated field.
Eigen::Vector2d find_zero_line(const WireLayout& layout, double z,
                               const ZeroLineOptions& opts = {});

// Quadrupole gradient magnitude at a point on the zero line (largest singular
// value of the transverse gradient block; finite differences with a step of
// 1% of the zero-line height).
double transverse_gradient(const WireLayout& layout, const Vec3& p_on_zero_line);

}  // namespace acg
