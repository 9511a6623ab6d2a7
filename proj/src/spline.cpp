#include "acg/spline.hpp"

#include <cmath>

#include "acg/errors.hpp"

namespace acg {

CubicSpline::CubicSpline(double z0, double dz, std::vector<double> values)
    : z0_(z0), dz_(dz), n_(values.size()), y_(std::move(values)) {
  if (n_ < 4) throw NumericsError("spline needs at least 4 points");
  if (!(dz > 0.0)) throw NumericsError("spline grid step must be positive");
  const double h2 = dz_ * dz_;
  m_.assign(n_, 0.0);
  auto d = [&](std::size_t i) { return (y_[i - 1] - 2.0 * y_[i] + y_[i + 1]) / h2; };

  // Not-a-knot on a uniform grid pins the first/last interior curvature:
  // m1 = d1 and m_{n-2} = d_{n-2}; the rest is a tridiagonal solve.
  m_[1] = d(1);
  m_[n_ - 2] = d(n_ - 2);
  if (n_ > 4) {
    std::size_t nu = n_ - 4;  // unknowns m_2 .. m_{n-3}
    std::vector<double> diag(nu, 4.0), rhs(nu);
    for (std::size_t j = 0; j < nu; ++j) rhs[j] = 6.0 * d(j + 2);
    rhs[0] -= m_[1];
    rhs[nu - 1] -= m_[n_ - 2];
    if (nu == 1) {
      m_[2] = rhs[0] / diag[0];
    } else {
      for (std::size_t j = 1; j < nu; ++j) {
        double w = 1.0 / diag[j - 1];
        diag[j] -= w;
        rhs[j] -= w * rhs[j - 1];
      }
      m_[nu + 1] = rhs[nu - 1] / diag[nu - 1];
      for (std::size_t j = nu - 1; j-- > 0;)
        m_[j + 2] = (rhs[j] - m_[j + 3]) / diag[j];
    }
  }
  m_[0] = 2.0 * m_[1] - m_[2];
  m_[n_ - 1] = 2.0 * m_[n_ - 2] - m_[n_ - 3];
}

void CubicSpline::locate(double z, std::size_t& i, double& t) const {
  double s = (z - z0_) / dz_;
  if (s < 0.0 || s > static_cast<double>(n_ - 1))
    throw NumericsError("spline evaluation out of range");
  double fi = std::floor(s);
  i = static_cast<std::size_t>(fi);
  if (i >= n_ - 1) i = n_ - 2;
  t = s - static_cast<double>(i);
}

double CubicSpline::operator()(double z) const {
  std::size_t i;
  double t;
  locate(z, i, t);
  double a = 1.0 - t, b = t;
  double h2 = dz_ * dz_ / 6.0;
  return a * y_[i] + b * y_[i + 1] +
         h2 * ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]);
}

double CubicSpline::derivative(double z) const {
  std::size_t i;
  double t;
  locate(z, i, t);
  double a = 1.0 - t, b = t;
  return (y_[i + 1] - y_[i]) / dz_ +
         (dz_ / 6.0) * ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]);
}

}  // namespace acg
