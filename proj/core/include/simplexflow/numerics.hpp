#pragma once

#include <functional>

#include "simplexflow/types.hpp"

namespace simplexflow {

/// Central finite-difference Jacobian of a map R^m -> R^k at y.
Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& y,
                   double step);

/// Central finite-difference gradient of a scalar map at y.
Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& y,
                   double step);

/// Central finite-difference Hessian of a scalar map at y. With richardson
/// set, combines steps h and h/2 to cancel the leading error term.
Matrix fd_hessian(const std::function<double(const Vector&)>& f, const Vector& y,
                  double step, bool richardson = false);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

/// C-infinity step: 0 for t <= 0, 1 for t >= 1, strictly increasing between
/// (built from exp(-1/t)).
double smooth_step(double t);

/// C-infinity cutoff that is 0 on [0,1] and 1 on [3,inf); derivative bounded
/// by 1 (plateau structure used by the gradient blending construction).
double plateau_cutoff(double t);

/// Adaptive Simpson quadrature on [a, b] to the given absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol);

/// Euclidean projection onto the simplex (sorted-threshold algorithm).
SimplexPoint project_to_simplex(const Vector& y);

}  // namespace simplexflow
