#pragma once

#include "simplexflow/transform.hpp"
#include "simplexflow/types.hpp"

namespace simplexflow {

/// Validates a raw square matrix as a generator (see RateMatrix::validated).
RateMatrix validate_rate_matrix(const Matrix& raw, double tol = kSimplexTol);

/// True iff the directed graph with an edge i -> j whenever L_ij > 0 (i != j)
/// is strongly connected. Entries are constructed, not measured, so the
/// positivity threshold is exactly 0.
bool is_irreducible(const RateMatrix& L);

/// Unique probability pi with pi L = 0, solved as a linear system with the
/// normalization constraint replacing one redundant balance equation.
SimplexPoint invariant_probability(const RateMatrix& L);

/// Detailed balance check: |pi_i L_ij - pi_j L_ji| <= tol for all i, j.
bool is_reversible(const RateMatrix& L, const SimplexPoint& pi, double tol = 1e-10);

/// Adjoint generator L*_ij = pi_j L_ji / pi_i for the pi-weighted inner
/// product; shares the invariant probability pi, equals L iff L is reversible.
RateMatrix adjoint(const RateMatrix& L, const SimplexPoint& pi);

/// Dirichlet form E(f) = -<f, Lf>_pi, cross-computed against the quadratic
/// form (1/2) sum_ij (f_i - f_j)^2 L_ij pi_i; the two must agree to 1e-10.
double dirichlet_form(const RateMatrix& L, const SimplexPoint& pi, const Vector& f);

/// Smallest nonzero eigenvalue of the pi-symmetrized generator -(L + L*)/2,
/// i.e. the minimum of E(f) over <f,1>_pi = 0, <f,f>_pi = 1. Controls the
/// entropy production inequality through the shared Dirichlet form.
double spectral_gap(const RateMatrix& L, const SimplexPoint& pi);

struct PoincareCheck {
  double lhs;  // <xL, s(f)> with f = x / pi
  double rhs;  // -c_f * gap * Var_pi(f) with c_f = min_i s'(f_i)
  bool holds(double slack = 1e-9) const { return lhs <= rhs + slack; }
};

/// Entropy production bound at state x for the monotone transform s.
PoincareCheck poincare_inequality_check(const RateMatrix& L, const SimplexPoint& x,
                                        const MonotoneTransform& s);

/// Generalized entropy H^S_pi(x) = sum_i pi_i S(x_i / pi_i).
double entropy_functional(const SimplexPoint& pi, const ConvexWeight& S,
                          const SimplexPoint& x);

/// Transition semigroup exp(tL) for t >= 0, computed by uniformization with
/// scaling-and-squaring; rows stay stochastic to roundoff.
Matrix transition_matrix(const RateMatrix& L, double t);

/// Chart matrix of the tangent-space operator u |-> uL.
Matrix tangent_operator_matrix(const RateMatrix& L, const ChartProjection& chart);

}  // namespace simplexflow
