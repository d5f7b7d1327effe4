#pragma once

#include <functional>
#include <optional>
#include <string>

#include "simplexflow/markov.hpp"
#include "simplexflow/types.hpp"

namespace simplexflow {

/// Payoff of an i-strategist at population state x.
class PayoffSpec {
 public:
  enum class Kind { LinearMatrix, PotentialGradient, ExplicitTable };

  /// U_i(x) = (U x)_i.
  static PayoffSpec linear(Matrix payoff_matrix);
  /// Potential game with W(x) = (1/2) x' Q x + b' x, payoffs U = -grad W.
  static PayoffSpec quadratic_potential(Matrix q, Vector b = Vector());
  /// Potential game from callables; the gradient is validated against finite
  /// differences of W at sampled interior points.
  static PayoffSpec potential(int n, std::function<double(const Vector&)> w,
                              std::function<Vector(const Vector&)> grad_w);
  static PayoffSpec table(int n, std::function<Vector(const Vector&)> payoff);

  Vector payoff(const Vector& x) const;
  int dim() const { return n_; }
  Kind kind() const { return kind_; }

  bool has_potential() const { return static_cast<bool>(potential_); }
  double potential_value(const Vector& x) const;
  Vector potential_gradient(const Vector& x) const;

  /// Serialization accessors (valid for the matrix-backed kinds).
  const Matrix& matrix_data() const { return matrix_; }
  const Vector& linear_data() const { return linear_; }

 private:
  PayoffSpec() = default;
  Kind kind_ = Kind::ExplicitTable;
  int n_ = 0;
  Matrix matrix_;
  Vector linear_;
  std::function<Vector(const Vector&)> payoff_;
  std::function<double(const Vector&)> potential_;
  std::function<Vector(const Vector&)> potential_grad_;
};

/// A priori attachment w_ij(x) of an i-strategist for strategy j.
class AttachmentSpec {
 public:
  enum class Kind { ConstantWeights, Imitative, CustomTable };

  static AttachmentSpec constant(Matrix weights);
  /// Imitative: w_ij(x) = x_j * wtilde_ij.
  static AttachmentSpec imitative(Matrix wtilde);
  static AttachmentSpec table(int n, std::function<Matrix(const Vector&)> weights);

  Matrix weights(const Vector& x) const;
  int dim() const { return n_; }
  Kind kind() const { return kind_; }
  const Matrix& base_matrix() const { return base_; }

  /// Decomposition w_ij(x) = phi_j(x) * b_ij with b symmetric, when it
  /// exists; phi is the occupancy factor entering reversible target measures
  /// (1 for symmetric constants, x_j for imitative symmetric bases, c_j for
  /// column-scaled constants). Empty when no such structure is detected.
  std::optional<std::function<Vector(const Vector&)>> occupancy_factor() const;

 private:
  AttachmentSpec() = default;
  Kind kind_ = Kind::CustomTable;
  int n_ = 0;
  Matrix base_;
  std::function<Matrix(const Vector&)> table_;
};

enum class ComparisonRule { Logistic, Metropolis, Dissatisfaction, Success, ImitateExcess };
enum class SamplingTransform { ExpBeta, PowerShifted, IdentityPositive };

ComparisonRule comparison_rule_from_tag(const std::string& tag);
std::string comparison_rule_tag(ComparisonRule g);

/// Declarative revision protocol / target-measure family. Immutable after
/// construction; kernel evaluation is pure.
class ProtocolSpec {
 public:
  enum class Kind {
    Sampling,
    Comparison,
    GibbsDirect,
    VertexReinforcement,
    ReversibleFromTarget,
    Replicator,
  };

  /// K_ij = w_ij(x) f(U_j(x)) / sum_k w_ik(x) f(U_k(x)).
  static ProtocolSpec sampling(PayoffSpec payoff, AttachmentSpec attachment,
                               SamplingTransform f, double beta, double shift = 0.0);
  /// K_ij = R w_ij(x) g(U_i(x), U_j(x)) for i != j, diagonal fills the row.
  /// The global rate scale R is calibrated on a low-discrepancy grid so that
  /// every off-diagonal row sum stays <= 1.
  static ProtocolSpec comparison(PayoffSpec payoff, AttachmentSpec attachment,
                                 ComparisonRule g, double beta);
  /// Every row of K(x) equals the Gibbs measure of (u0, U, beta) at x.
  static ProtocolSpec gibbs_direct(Vector u0, Matrix coupling, double beta);
  /// K_ij = A_ij x_j^gamma / sum_k A_ik x_k^gamma, A entrywise positive.
  static ProtocolSpec vertex_reinforcement(Matrix a, double gamma);
  /// L_ij(x) = W_ij pi_j(x) with W symmetric, positive off-diagonal.
  static ProtocolSpec reversible_from_target(
      Matrix w, std::function<SimplexPoint(const SimplexPoint&)> target_pi);
  /// Imitative pairwise-comparison protocol whose mean field is the
  /// replicator dynamics (up to the calibrated rate scale).
  static ProtocolSpec replicator(PayoffSpec payoff);

  Kind kind() const { return kind_; }
  int dim() const { return n_; }

  MarkovMatrix markov_kernel(const SimplexPoint& x) const;
  /// Generator L(x); for kernel-based kinds this is K(x) - Id, for
  /// rate-based kinds the rate matrix itself.
  RateMatrix rate_matrix(const SimplexPoint& x) const;

  /// Whether the invariant probability of L(x) is available in closed form.
  bool has_invariant_family() const;
  SimplexPoint invariant_measure(const SimplexPoint& x) const;

  /// Whether x_i = 0 forces L_ji(x) = 0 (boundary faces invariant).
  bool is_imitative_boundary_preserving() const;

  const PayoffSpec& payoff() const { return *payoff_; }
  const AttachmentSpec& attachment() const { return *attachment_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  double rate_scale() const { return rate_scale_; }
  const Vector& baseline() const { return u0_; }
  const Matrix& coupling() const { return coupling_; }
  const Matrix& reinforcement_matrix() const { return a_; }
  const Matrix& target_exchange_matrix() const { return w_; }
  ComparisonRule comparison_rule() const { return g_; }
  SamplingTransform sampling_transform() const { return f_; }
  double sampling_shift() const { return shift_; }

 private:
  ProtocolSpec() = default;
  void calibrate_comparison_scale();

  Kind kind_ = Kind::GibbsDirect;
  int n_ = 0;
  std::optional<PayoffSpec> payoff_;
  std::optional<AttachmentSpec> attachment_;
  ComparisonRule g_ = ComparisonRule::Metropolis;
  SamplingTransform f_ = SamplingTransform::ExpBeta;
  double beta_ = 0.0;
  double gamma_ = 1.0;
  double shift_ = 0.0;
  double rate_scale_ = 1.0;
  Vector u0_;
  Matrix coupling_;
  Matrix a_;
  Matrix w_;
  std::function<SimplexPoint(const SimplexPoint&)> target_pi_;
};

/// L = -Id + K.
RateMatrix rate_from_kernel(const MarkovMatrix& k);

MarkovMatrix markov_kernel(const ProtocolSpec& spec, const SimplexPoint& x);

/// Gibbs measure pi_i = exp(-(u0_i + beta (U x)_i)) / Z(x), U symmetric;
/// computed with a max shift so large beta cannot overflow.
SimplexPoint gibbs_measure(const Vector& u0, const Matrix& coupling, double beta,
                           const SimplexPoint& x);

/// Logit measure pi_i = exp(beta U_i(x)) / Z(x).
SimplexPoint logit_measure(const PayoffSpec& payoff, double beta, const SimplexPoint& x);

MarkovMatrix vertex_reinforcement_kernel(const Matrix& a, double gamma,
                                         const SimplexPoint& x);

/// pi_i(x) = x_i^gamma (A x^gamma)_i / sum_jk A_jk x_j^gamma x_k^gamma; the
/// support of pi(x) equals the support of x.
SimplexPoint vertex_reinforcement_invariant(const Matrix& a, double gamma,
                                            const SimplexPoint& x);

/// L_ij = W_ij pi_j (i != j) with W symmetric positive off-diagonal;
/// irreducible and reversible with respect to pi.
RateMatrix reversible_rate_from_target(const Matrix& w, const SimplexPoint& pi);

}  // namespace simplexflow
