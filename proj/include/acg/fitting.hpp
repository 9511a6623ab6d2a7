#pragma once

#include <functional>
#include <vector>

namespace acg {

// offset + 0.5*m*omega^2*(z-z0)^2 least-squares fit (linear in the quadratic
// basis, then converted).
struct QuadraticFit {
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;  // c0 + c1 z + c2 z^2
  double center = 0.0;                  // -c1/(2 c2)
  double offset = 0.0;                  // value at center
  std::vector<double> residual;
  double rms_residual = 0.0;
};

QuadraticFit fit_quadratic(const std::vector<double>& z, const std::vector<double>& v);

// Levenberg-Marquardt on r(p); Jacobian by forward differences.
// Converges when the relative step norm drops below `step_tol`; the residual
// norm decreases monotonically across accepted steps.
struct LmResult {
  std::vector<double> params;
  std::vector<double> sigma;  // parameter uncertainties from (J^T J)^-1
  double rms = 0.0;
  int iterations = 0;
  bool converged = false;
};

LmResult levenberg_marquardt(
    const std::function<std::vector<double>(const std::vector<double>&)>& residuals,
    std::vector<double> p0, int max_iter = 200, double step_tol = 1e-10);

// Z(t) = Z0 + Z1 exp(-t^2/tau^2) cos(omega t + phi)
struct DampedOscFit {
  double z0 = 0.0, z1 = 0.0, tau = 0.0, omega = 0.0, phi = 0.0;
  double sigma_tau = 0.0, sigma_omega = 0.0;
  double rms = 0.0;
  bool tau_lower_bound = false;  // envelope decay not resolved within the series
  bool converged = false;
};

DampedOscFit fit_damped_oscillation(const std::vector<double>& t,
                                    const std::vector<double>& z);

// A exp(-t/tau); returns tau and its uncertainty.
struct ExpDecayFit {
  double amplitude = 0.0, tau = 0.0, sigma_tau = 0.0;
  bool tau_lower_bound = false;
  bool converged = false;
};

ExpDecayFit fit_exp_decay(const std::vector<double>& t, const std::vector<double>& n);

// a exp(-(x-x0)^2/(2 s^2)) + b
struct GaussianFit {
  double amplitude = 0.0, center = 0.0, sigma = 0.0, offset = 0.0;
  bool converged = false;
};

GaussianFit fit_gaussian(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace acg
