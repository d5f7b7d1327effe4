#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "simplexflow/protocols.hpp"
#include "simplexflow/types.hpp"

namespace simplexflow {

/// Vector field on the simplex. Values are tangent vectors (coordinate sum 0).
class VectorFieldSpec {
 public:
  enum class Kind { GeneratorField, PiField, Replicator, Explicit };

  VectorFieldSpec() = default;  // empty; fill via the named constructors

  /// F(x) = x L(x) from a protocol.
  static VectorFieldSpec generator(ProtocolSpec protocol);
  static VectorFieldSpec generator(int n,
                                   std::function<RateMatrix(const SimplexPoint&)> rate,
                                   bool interior_only = false);
  /// F_pi(x) = -x + pi(x).
  static VectorFieldSpec pi_field(int n,
                                  std::function<SimplexPoint(const SimplexPoint&)> pi,
                                  bool interior_only = false);
  /// Replicator: F_i(x) = x_i (U_i(x) - <U(x), x>).
  static VectorFieldSpec replicator(PayoffSpec payoff);
  static VectorFieldSpec explicit_field(int n,
                                        std::function<Vector(const Vector&)> field);

  TangentVector operator()(const SimplexPoint& x) const;
  /// Raw evaluation for steppers and finite differences; accepts ambient
  /// coordinates near the simplex.
  Vector eval_raw(const Vector& x) const;

  Kind kind() const { return kind_; }
  int dim() const { return n_; }
  bool interior_only() const { return interior_only_; }

  bool has_rate() const { return static_cast<bool>(rate_); }
  RateMatrix rate(const SimplexPoint& x) const { return rate_(x); }
  bool has_pi() const { return static_cast<bool>(pi_); }
  SimplexPoint pi(const SimplexPoint& x) const { return pi_(x); }

 private:
  Kind kind_ = Kind::Explicit;
  int n_ = 0;
  bool interior_only_ = false;
  std::function<Vector(const Vector&)> field_;
  std::function<RateMatrix(const SimplexPoint&)> rate_;
  std::function<SimplexPoint(const SimplexPoint&)> pi_;
};

TangentVector eval_field(const VectorFieldSpec& spec, const SimplexPoint& x);

struct IntegrateOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0 = choose automatically
  double min_step = 1e-12;
  double max_step = 0.0;  // 0 = no cap
  std::vector<double> sample_times;  // dense output requests; empty = every step
  std::size_t max_steps = 50'000'000;
};

/// Time-stamped states plus stepper metadata.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> accepted_steps;
  std::vector<double> error_estimates;

  std::size_t size() const { return times.size(); }
  SimplexPoint state(std::size_t k) const { return SimplexPoint::from_normalized(states[k]); }
  const Vector& back() const { return states.back(); }
};

/// Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince) with per-step
/// projection: roundoff-level negatives (|.| <= 1e-12) are clamped to 0 and
/// the state renormalized; larger excursions shrink the step.
Trajectory integrate(const VectorFieldSpec& spec, const SimplexPoint& x0, double t_end,
                     const IntegrateOptions& opts = {});

enum class Stability { Sink, Source, Saddle, Nonhyperbolic };

std::string stability_tag(Stability s);

struct EquilibriumReport {
  SimplexPoint location;
  double residual = 0.0;  // ||x - pi(x)|| or ||F(x)|| depending on the route
  std::vector<std::complex<double>> spectrum;  // chart Jacobian eigenvalues
  int unstable_dim = 0;
  Stability classification = Stability::Nonhyperbolic;
  std::optional<int> hessian_index;
};

struct FindEquilibriaResult {
  std::vector<EquilibriumReport> reports;
  int seeds_tried = 0;
  int seeds_dropped = 0;
};

struct NewtonOptions {
  double tol = 1e-10;
  int max_iterations = 80;
  int max_halvings = 30;
  double dedup_distance = 1e-6;
  bool include_grid = true;  // add the 10^(n-1)-point low-discrepancy seed grid
  // Roots with a coordinate below this floor are treated as boundary zeros
  // and discarded by find_field_zeros (fields like the replicator vanish on
  // every face, so the Newton residual alone cannot tell them apart).
  double boundary_floor = 1e-7;
};

/// Damped Newton on the chart for x - pi(x) = 0, seeded by the given points
/// plus a 10^(n-1)-point low-discrepancy grid. Converged roots are
/// deduplicated; non-convergent seeds are dropped and counted.
FindEquilibriaResult find_equilibria(
    const std::function<SimplexPoint(const SimplexPoint&)>& pi_eval, int n,
    const std::vector<SimplexPoint>& seeds = {}, const NewtonOptions& opts = {});

/// Damped Newton for zeros of an arbitrary field on the chart (independent
/// route used to cross-check equilibria of generator fields).
FindEquilibriaResult find_field_zeros(const VectorFieldSpec& spec,
                                      const std::vector<SimplexPoint>& seeds = {},
                                      const NewtonOptions& opts = {});

struct JacobianOptions {
  double fd_step = 1e-6;
  bool cross_check_factorization = true;  // at generator-field equilibria
  double factorization_tol = 1e-5;
};

/// Chart Jacobian of the field at p by central finite differences. For
/// generator fields at equilibria, also assembles -L^T(p) DF_pi(p) on the
/// chart and asserts agreement.
Matrix jacobian(const VectorFieldSpec& spec, const SimplexPoint& p,
                const ChartProjection& chart, const JacobianOptions& opts = {});

/// Factorized Jacobian -L^T(p) DF_pi(p) on the chart (generator fields at
/// equilibria only).
Matrix jacobian_factorized(const VectorFieldSpec& spec, const SimplexPoint& p,
                           const ChartProjection& chart, double fd_step = 1e-6);

/// Eigen-decomposition of the chart Jacobian; unstable_dim counts real parts
/// above the hyperbolicity threshold, nonhyperbolic if any |Re| falls within
/// it.
EquilibriumReport classify_equilibrium(const VectorFieldSpec& spec, const SimplexPoint& p,
                                       double hyperbolicity_threshold = 1e-7);

struct OmegaLimitOptions {
  double burn_in = 0.0;        // 0 = use 60% of the trajectory
  double window = 0.0;         // 0 = remaining 40%
  double fixed_point_diameter = 1e-6;
  double return_spread = 1e-4;
  double period_agreement = 0.01;
};

struct OmegaLimitSummary {
  enum class Verdict { FixedPoint, Periodic, Undecided };
  Verdict verdict = Verdict::Undecided;
  std::optional<SimplexPoint> fixed_point;
  std::optional<double> period;
  std::vector<Vector> orbit_sample;
  double tail_diameter = 0.0;
  double return_point_spread = 0.0;
};

std::string verdict_tag(OmegaLimitSummary::Verdict v);

/// Classifies the tail of a trajectory: fixed point when the tail diameter
/// collapses, periodic when a Poincare section through the tail has a
/// stable return map, else undecided.
OmegaLimitSummary omega_limit_summary(const Trajectory& traj,
                                      const OmegaLimitOptions& opts = {});

/// The 3-strategy construction with a globally attracting spiral target map:
/// pi(x) = x + eps G(x) where G is the linear spiral [[-eta,-1],[1,-eta]]
/// around the barycenter blended with the inward field p - x near the
/// boundary, and F(x) = x L(x) with L_ij(x) = W_ij pi_j(x).
struct CounterexampleSystem {
  VectorFieldSpec generator_field;  // F
  VectorFieldSpec pi_field_spec;    // F_pi = eps G
  std::function<SimplexPoint(const SimplexPoint&)> pi;
  std::function<Vector(const Vector&)> spiral;  // G
  double eta = 0.0;
  double epsilon = 0.0;
  Matrix exchange;  // W
};

CounterexampleSystem build_counterexample(double eta, double epsilon, const Matrix& w);

}  // namespace simplexflow
