#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "simplexflow/dynamics.hpp"
#include "simplexflow/transform.hpp"
#include "simplexflow/types.hpp"

namespace simplexflow {

/// Componentwise h_i(x) = s(x_i / pi_i(x)) on the interior.
Vector transform_h(const std::function<SimplexPoint(const SimplexPoint&)>& pi_eval,
                   const MonotoneTransform& s, const SimplexPoint& x);

/// Free energy sum x_i log x_i + sum u0_j x_j + (beta/2) sum U_ij x_i x_j.
double free_energy(const Vector& u0, const Matrix& coupling, double beta,
                   const SimplexPoint& x);

/// Occupancy weight family for potential-game Lyapunov functions: the
/// integral of log f_i has a closed form for powers and exponentials of
/// constants, and falls back to adaptive quadrature otherwise.
class OccupancyWeight {
 public:
  enum class Kind { One, Power, ExpConstant, Custom };

  static OccupancyWeight one(int n);
  /// f_i(t) = t^a (a > 0).
  static OccupancyWeight power(int n, double a);
  /// f_i(t) = exp(c_i).
  static OccupancyWeight exp_constant(Vector c);
  static OccupancyWeight custom(int n, std::function<double(int, double)> f);

  double value(int i, double t) const;
  /// int_1^x log f_i(u) du.
  double log_integral(int i, double x) const;
  int dim() const { return n_; }
  Kind kind() const { return kind_; }

 private:
  OccupancyWeight() = default;
  Kind kind_ = Kind::One;
  int n_ = 0;
  double a_ = 1.0;
  Vector c_;
  std::function<double(int, double)> f_;
};

/// Potential-game Lyapunov function
///   V(x) = sum x_i log x_i - sum int_1^{x_i} log f_i(u) du + beta W(x).
double potential_game_V(const OccupancyWeight& f,
                        const std::function<double(const Vector&)>& potential,
                        double beta, const SimplexPoint& x);

/// Reinforcement Lyapunov function V(x) = -sum_ij A_ij x_i^gamma x_j^gamma,
/// defined on all of the simplex.
double reinforcement_V(const Matrix& a, double gamma, const SimplexPoint& x);

/// Positive scalar field alpha(x) for the reinforcement family (the
/// quasigradient normalizer for s(t) = -t^(-1/beta)).
double reinforcement_alpha(const Matrix& a, double gamma, const SimplexPoint& x);

/// Bundle of evaluators realizing one quasigradient structure: V, its
/// tangential gradient, the positive normalizer alpha, the transform s, and
/// the target measure pi.
struct LyapunovSpec {
  int n = 0;
  std::function<double(const SimplexPoint&)> value;
  /// Gradient projected onto the tangent space (mean subtracted).
  std::function<Vector(const SimplexPoint&)> gradient;
  std::function<double(const SimplexPoint&)> alpha;
  MonotoneTransform s = MonotoneTransform::log();
  std::function<SimplexPoint(const SimplexPoint&)> pi;

  static LyapunovSpec gibbs(Vector u0, Matrix coupling, double beta);
  static LyapunovSpec potential_game(OccupancyWeight f, PayoffSpec payoff, double beta);
  static LyapunovSpec reinforcement(Matrix a, double gamma);
  /// Relative-entropy spec for a constant target measure.
  static LyapunovSpec constant_target(SimplexPoint pi);
};

struct QuasigradientReport {
  double max_identity_violation = 0.0;  // |alpha <h,u> - <grad V,u>| over samples/basis
  double max_cyclic_defect = 0.0;       // integrability criterion via finite differences
  int samples_checked = 0;
  std::vector<int> violating_samples;   // indices where the identity exceeded tol
  bool passed(double tol) const { return max_identity_violation <= tol; }
};

/// Verifies alpha(x) <h(x), u> = <grad V(x), u> on chart basis tangents at
/// each sample, and runs the cyclic integrability criterion on h by finite
/// differences.
QuasigradientReport quasigradient_check(const LyapunovSpec& spec,
                                        const std::vector<SimplexPoint>& samples,
                                        double tol);

struct DecreaseAngleReport {
  double min_decrease_margin = 0.0;  // min of -<grad V, F> over non-equilibrium samples
  double angle_constant = 0.0;       // min of -<grad V,F>/(|grad V| |F|)
  int samples_used = 0;
  int decrease_violations = 0;
};

/// Samples K = {x : min_i x_i >= delta}; near-equilibrium samples with
/// ||F|| <= 1e-9 are excluded from the angle statistics.
DecreaseAngleReport decrease_and_angle(const LyapunovSpec& spec,
                                       const VectorFieldSpec& field, double delta,
                                       const std::vector<SimplexPoint>& samples);

struct BilinearFormReport {
  Matrix form;             // chart matrix
  double symmetry_defect = 0.0;  // max |M - M^T|, reported, never hidden
  Vector eigenvalues;      // of the symmetrized matrix, ascending
  int positive = 0;
  int negative = 0;
  int zeros = 0;
  int index() const { return negative; }
  bool positive_definite() const { return negative == 0 && zeros == 0; }
};

/// Hessian of V at an interior equilibrium p: alpha(p) s'(1)
/// <(I - Dpi(p)) u, v>_{1/p} on the chart, cross-checked against the
/// finite-difference Hessian of V.
BilinearFormReport hessian_V(const LyapunovSpec& spec, const SimplexPoint& p);

/// Reversible local metric g0(p)(u, v) = -<(L^T)^{-1} u, v>_{1/p}; symmetric
/// positive definite for irreducible reversible L.
BilinearFormReport reversible_metric(const RateMatrix& l_at_p, const SimplexPoint& p);

/// Blended gradient approximation: G = (1 - lam) G0 + lam F with
/// G0 = -grad_{g} V for the reversible metric g and lam = cutoff(d(x, Eq)/eps).
/// G equals F wherever d(x, Eq) >= 3 eps and <grad V, G> <= 0 everywhere.
VectorFieldSpec build_gradient_approximation(const VectorFieldSpec& field,
                                             const LyapunovSpec& spec,
                                             const std::vector<SimplexPoint>& equilibria,
                                             double eps);

}  // namespace simplexflow
