#include "acg/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

#include "acg/errors.hpp"
#include "acg/fft.hpp"

namespace acg {

QuadraticFit fit_quadratic(const std::vector<double>& z, const std::vector<double>& v) {
  const std::size_t n = z.size();
  if (n != v.size() || n < 10)
    throw NumericsError("quadratic fit needs >= 10 matched points");
  // Shift/scale the abscissa before forming the Vandermonde system.
  double zc = 0.0;
  for (double x : z) zc += x;
  zc /= static_cast<double>(n);
  double scale = 0.0;
  for (double x : z) scale = std::max(scale, std::abs(x - zc));
  if (scale == 0.0) throw NumericsError("degenerate fit window");

  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = (z[i] - zc) / scale;
    a(i, 0) = 1.0;
    a(i, 1) = u;
    a(i, 2) = u * u;
    b(i) = v[i];
  }
  Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);

  QuadraticFit f;
  // back-substitute u = (z-zc)/scale
  f.c2 = c[2] / (scale * scale);
  f.c1 = c[1] / scale - 2.0 * f.c2 * zc;
  f.c0 = c[0] - c[1] * zc / scale + f.c2 * zc * zc;
  f.residual.resize(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double u = (z[i] - zc) / scale;
    f.residual[i] = v[i] - (c[0] + c[1] * u + c[2] * u * u);
    ss += f.residual[i] * f.residual[i];
  }
  f.rms_residual = std::sqrt(ss / static_cast<double>(n));
  if (f.c2 != 0.0) {
    f.center = -f.c1 / (2.0 * f.c2);
    f.offset = f.c0 - f.c1 * f.c1 / (4.0 * f.c2);
  }
  return f;
}

LmResult levenberg_marquardt(
    const std::function<std::vector<double>(const std::vector<double>&)>& residuals,
    std::vector<double> p0, int max_iter, double step_tol) {
  const int np = static_cast<int>(p0.size());
  std::vector<double> r0v = residuals(p0);
  const int nr = static_cast<int>(r0v.size());
  Eigen::VectorXd r = Eigen::Map<Eigen::VectorXd>(r0v.data(), nr);
  double cost = r.squaredNorm();
  double lambda = 1e-3;

  LmResult out;
  out.params = p0;
  Eigen::MatrixXd jac(nr, np);
  for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
    // forward-difference Jacobian
    for (int j = 0; j < np; ++j) {
      double h = 1e-7 * std::max(1.0, std::abs(out.params[j]));
      std::vector<double> pp = out.params;
      pp[j] += h;
      std::vector<double> rp = residuals(pp);
      for (int i = 0; i < nr; ++i) jac(i, j) = (rp[i] - r[i]) / h;
    }
    Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::VectorXd jtr = jac.transpose() * r;

    const double cost_before = cost;
    bool accepted = false;
    for (int tries = 0; tries < 30 && !accepted; ++tries) {
      Eigen::MatrixXd aug = jtj;
      for (int j = 0; j < np; ++j) aug(j, j) += lambda * std::max(jtj(j, j), 1e-30);
      Eigen::VectorXd step = aug.ldlt().solve(-jtr);
      std::vector<double> pn = out.params;
      for (int j = 0; j < np; ++j) pn[j] += step[j];
      std::vector<double> rnv = residuals(pn);
      Eigen::VectorXd rn = Eigen::Map<Eigen::VectorXd>(rnv.data(), nr);
      double cn = rn.squaredNorm();
      if (cn <= cost) {
        double rel = 0.0;
        for (int j = 0; j < np; ++j)
          rel = std::max(rel, std::abs(step[j]) / std::max(1.0, std::abs(pn[j])));
        out.params = pn;
        r = rn;
        cost = cn;
        lambda = std::max(lambda * 0.3, 1e-12);
        accepted = true;
        if (rel < step_tol) {
          out.converged = true;
        }
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted) {
      // no improving step within the damping sweep: minimum reached to within
      // the finite-difference noise floor
      if (out.iterations > 0) out.converged = true;
      break;
    }
    // cost plateau: further iterations only polish noise
    if (cost_before - cost <= 1e-10 * cost_before) out.converged = true;
    if (out.converged) break;
  }
  out.rms = std::sqrt(cost / static_cast<double>(nr));
  // covariance estimate
  double s2 = cost / std::max(1, nr - np);
  Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::MatrixXd cov = jtj.ldlt().solve(Eigen::MatrixXd::Identity(np, np)) * s2;
  out.sigma.resize(np);
  for (int j = 0; j < np; ++j)
    out.sigma[j] = cov(j, j) > 0 ? std::sqrt(cov(j, j)) : 0.0;
  return out;
}

DampedOscFit fit_damped_oscillation(const std::vector<double>& t,
                                    const std::vector<double>& z) {
  const std::size_t n = t.size();
  if (n != z.size() || n < 16) throw NumericsError("series too short for damping fit");
  const double span = t.back() - t.front();
  const double dt = span / static_cast<double>(n - 1);

  double mean = 0.0;
  for (double v : z) mean += v;
  mean /= static_cast<double>(n);

  // frequency guess from the periodogram peak
  std::size_t nfft = 1;
  while (nfft < 4 * n) nfft <<= 1;
  std::vector<double> padded(nfft, 0.0);
  for (std::size_t i = 0; i < n; ++i) padded[i] = z[i] - mean;
  auto spec = rfft(padded);
  std::size_t kpk = 1;
  double best = 0.0;
  for (std::size_t k = 1; k < spec.size(); ++k) {
    double p = std::norm(spec[k]);
    if (p > best) {
      best = p;
      kpk = k;
    }
  }
  double omega0 = 2.0 * 3.14159265358979323846 * static_cast<double>(kpk) /
                  (static_cast<double>(nfft) * dt);
  if (omega0 * span < 6.0 * 3.141592653589793)
    throw NumericsError("series spans fewer than 3 oscillation periods");
  double phi0 = std::arg(spec[kpk]) - omega0 * t.front();
  double amp0 = 0.0;
  for (double v : z) amp0 = std::max(amp0, std::abs(v - mean));

  auto model_res = [&](const std::vector<double>& p) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      double e = std::exp(-t[i] * t[i] / (p[2] * p[2]));
      r[i] = p[0] + p[1] * e * std::cos(p[3] * t[i] + p[4]) - z[i];
    }
    return r;
  };
  LmResult lm = levenberg_marquardt(model_res, {mean, amp0, span, omega0, phi0});
  if (!lm.converged)
    throw NumericsError("damped-oscillation fit did not converge (rms " +
                        std::to_string(lm.rms) + ")");
  DampedOscFit f;
  f.z0 = lm.params[0];
  f.z1 = lm.params[1];
  f.tau = std::abs(lm.params[2]);
  f.omega = std::abs(lm.params[3]);
  f.phi = lm.params[4];
  f.sigma_tau = lm.sigma[2];
  f.sigma_omega = lm.sigma[3];
  f.rms = lm.rms;
  f.converged = true;
  f.tau_lower_bound = f.tau > t.back();
  return f;
}

ExpDecayFit fit_exp_decay(const std::vector<double>& t, const std::vector<double>& nn) {
  const std::size_t n = t.size();
  if (n != nn.size() || n < 3) throw NumericsError("series too short for decay fit");
  ExpDecayFit f;
  double a0 = nn.front();
  if (a0 <= 0.0) throw NumericsError("decay fit needs positive initial count");
  if (nn.back() > 0.99 * a0) {
    // no resolved decay
    f.amplitude = a0;
    f.tau = 100.0 * (t.back() - t.front());
    f.tau_lower_bound = true;
    f.converged = true;
    return f;
  }
  double tau0 = (t.back() - t.front()) / std::max(1e-9, std::log(a0 / std::max(1e-9, nn.back())));
  auto res = [&](const std::vector<double>& p) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i)
      r[i] = p[0] * std::exp(-t[i] / p[1]) - nn[i];
    return r;
  };
  LmResult lm = levenberg_marquardt(res, {a0, std::max(tau0, 1e-6)});
  f.amplitude = lm.params[0];
  f.tau = std::abs(lm.params[1]);
  f.sigma_tau = lm.sigma[1];
  f.converged = lm.converged;
  f.tau_lower_bound = f.tau > 10.0 * (t.back() - t.front());
  return f;
}

GaussianFit fit_gaussian(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 5) throw NumericsError("too few points for gaussian fit");
  double ymin = *std::min_element(y.begin(), y.end());
  double sw = 0.0, swx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = y[i] - ymin;
    sw += w;
    swx += w * x[i];
  }
  if (sw <= 0.0) throw NumericsError("flat input for gaussian fit");
  double x0 = swx / sw;
  double svar = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    svar += (y[i] - ymin) * (x[i] - x0) * (x[i] - x0);
  double s0 = std::sqrt(std::max(svar / sw, 1e-300));
  double a0 = *std::max_element(y.begin(), y.end()) - ymin;

  auto res = [&](const std::vector<double>& p) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      double u = (x[i] - p[1]) / p[2];
      r[i] = p[0] * std::exp(-0.5 * u * u) + p[3] - y[i];
    }
    return r;
  };
  LmResult lm = levenberg_marquardt(res, {a0, x0, s0, ymin});
  GaussianFit f;
  f.amplitude = lm.params[0];
  f.center = lm.params[1];
  f.sigma = std::abs(lm.params[2]);
  f.offset = lm.params[3];
  f.converged = lm.converged;
  return f;
}

}  // namespace acg
