#pragma once

#include <vector>

namespace acg {

// Cubic spline on a uniform grid with not-a-knot end conditions.
// C2 interpolant, so derived forces are C1.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(double z0, double dz, std::vector<double> values);

  double operator()(double z) const;
  double derivative(double z) const;

  double z_min() const { return z0_; }
  double z_max() const { return z0_ + dz_ * static_cast<double>(n_ - 1); }

 private:
  void locate(double z, std::size_t& i, double& u) const;

  double z0_ = 0.0, dz_ = 1.0;
  std::size_t n_ = 0;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at nodes
};

}  // namespace acg
