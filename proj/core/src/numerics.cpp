#include "simplexflow/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace simplexflow {

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& y,
                   double step) {
  const int m = static_cast<int>(y.size());
  Vector yp = y, ym = y;
  Matrix jac;
  for (int j = 0; j < m; ++j) {
    yp[j] += step;
    ym[j] -= step;
    const Vector d = (f(yp) - f(ym)) / (2.0 * step);
    if (j == 0) jac.resize(d.size(), m);
    jac.col(j) = d;
    yp[j] = y[j];
    ym[j] = y[j];
  }
  return jac;
}

Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& y,
                   double step) {
  const int m = static_cast<int>(y.size());
  Vector g(m);
  Vector yp = y, ym = y;
  for (int j = 0; j < m; ++j) {
    yp[j] += step;
    ym[j] -= step;
    g[j] = (f(yp) - f(ym)) / (2.0 * step);
    yp[j] = y[j];
    ym[j] = y[j];
  }
  return g;
}

namespace {

Matrix fd_hessian_step(const std::function<double(const Vector&)>& f, const Vector& y,
                       double h) {
  const int m = static_cast<int>(y.size());
  Matrix hess(m, m);
  const double f0 = f(y);
  Vector yp = y;
  for (int i = 0; i < m; ++i) {
    yp[i] = y[i] + h;
    const double fp = f(yp);
    yp[i] = y[i] - h;
    const double fm = f(yp);
    yp[i] = y[i];
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      Vector z = y;
      z[i] += h; z[j] += h; const double fpp = f(z);
      z = y; z[i] += h; z[j] -= h; const double fpm = f(z);
      z = y; z[i] -= h; z[j] += h; const double fmp = f(z);
      z = y; z[i] -= h; z[j] -= h; const double fmm = f(z);
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return hess;
}

}  // namespace

Matrix fd_hessian(const std::function<double(const Vector&)>& f, const Vector& y,
                  double step, bool richardson) {
  if (!richardson) return fd_hessian_step(f, y, step);
  const Matrix h1 = fd_hessian_step(f, y, step);
  const Matrix h2 = fd_hessian_step(f, y, step / 2.0);
  return (4.0 * h2 - h1) / 3.0;
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const int k = static_cast<int>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < k; ++i) {
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double plateau_cutoff(double t) {
  if (t <= 1.0) return 0.0;
  if (t >= 3.0) return 1.0;
  return smooth_step((t - 1.0) / 2.0);
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double b,
               double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_rec(const std::function<double(double)>& f, double a, double fa, double b,
                   double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(f, a, fa, m, fm, lm, flm);
  const double right = simpson(f, m, fm, b, fb, rm, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson(f, a, fa, b, fb, m, fm);
  return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 40);
}

SimplexPoint project_to_simplex(const Vector& y) {
  const int n = static_cast<int>(y.size());
  std::vector<double> sorted(y.data(), y.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  int rho = 0;
  for (int k = 0; k < n; ++k) {
    cumsum += sorted[k];
    const double t = (cumsum - 1.0) / (k + 1);
    if (sorted[k] - t > 0) {
      rho = k + 1;
      theta = t;
    }
  }
  (void)rho;
  Vector x = (y.array() - theta).cwiseMax(0.0);
  return SimplexPoint::from_normalized(std::move(x));
}

}  // namespace simplexflow
