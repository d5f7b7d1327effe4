#include "simplexflow/protocols.hpp"

#include <cmath>

#include "simplexflow/numerics.hpp"
#include "simplexflow/sampling.hpp"

namespace simplexflow {

// ---------------------------------------------------------------------------
// PayoffSpec

PayoffSpec PayoffSpec::linear(Matrix payoff_matrix) {
  const int n = static_cast<int>(payoff_matrix.rows());
  if (payoff_matrix.cols() != n) throw DimensionMismatchError("payoff matrix must be square");
  PayoffSpec spec;
  spec.kind_ = Kind::LinearMatrix;
  spec.n_ = n;
  spec.matrix_ = std::move(payoff_matrix);
  return spec;
}

PayoffSpec PayoffSpec::quadratic_potential(Matrix q, Vector b) {
  const int n = static_cast<int>(q.rows());
  if (q.cols() != n) throw DimensionMismatchError("potential matrix must be square");
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw AsymmetricMatrixError("quadratic potential matrix must be symmetric");
  if (b.size() == 0) b = Vector::Zero(n);
  if (b.size() != n) throw DimensionMismatchError("potential linear term has wrong size");
  PayoffSpec spec;
  spec.kind_ = Kind::PotentialGradient;
  spec.n_ = n;
  spec.matrix_ = q;
  spec.linear_ = b;
  spec.potential_ = [q, b](const Vector& x) { return 0.5 * x.dot(q * x) + b.dot(x); };
  spec.potential_grad_ = [q, b](const Vector& x) -> Vector { return q * x + b; };
  return spec;
}

PayoffSpec PayoffSpec::potential(int n, std::function<double(const Vector&)> w,
                                 std::function<Vector(const Vector&)> grad_w) {
  PayoffSpec spec;
  spec.kind_ = Kind::PotentialGradient;
  spec.n_ = n;
  spec.potential_ = std::move(w);
  spec.potential_grad_ = std::move(grad_w);
  // Gradient consistency check on a handful of interior points.
  for (int k = 0; k < 5; ++k) {
    const Vector x = shrink_to_interior(simplex_from_cube(halton_point(k, n)), 0.05).coords();
    const Vector g = spec.potential_grad_(x);
    const Vector fd = fd_gradient(spec.potential_, x, 1e-6);
    if ((g - fd).cwiseAbs().maxCoeff() > 1e-5)
      throw InputError("potential gradient evaluator disagrees with finite differences");
  }
  return spec;
}

PayoffSpec PayoffSpec::table(int n, std::function<Vector(const Vector&)> payoff) {
  PayoffSpec spec;
  spec.kind_ = Kind::ExplicitTable;
  spec.n_ = n;
  spec.payoff_ = std::move(payoff);
  return spec;
}

Vector PayoffSpec::payoff(const Vector& x) const {
  switch (kind_) {
    case Kind::LinearMatrix:
      return matrix_ * x;
    case Kind::PotentialGradient:
      return -potential_grad_(x);
    case Kind::ExplicitTable:
      return payoff_(x);
  }
  return Vector();
}

double PayoffSpec::potential_value(const Vector& x) const {
  if (!potential_) throw InputError("payoff spec has no potential");
  return potential_(x);
}

Vector PayoffSpec::potential_gradient(const Vector& x) const {
  if (!potential_grad_) throw InputError("payoff spec has no potential");
  return potential_grad_(x);
}

// ---------------------------------------------------------------------------
// AttachmentSpec

AttachmentSpec AttachmentSpec::constant(Matrix weights) {
  const int n = static_cast<int>(weights.rows());
  if (weights.cols() != n) throw DimensionMismatchError("attachment matrix must be square");
  if (weights.minCoeff() < 0) throw InputError("attachment weights must be nonnegative");
  AttachmentSpec spec;
  spec.kind_ = Kind::ConstantWeights;
  spec.n_ = n;
  spec.base_ = std::move(weights);
  return spec;
}

AttachmentSpec AttachmentSpec::imitative(Matrix wtilde) {
  const int n = static_cast<int>(wtilde.rows());
  if (wtilde.cols() != n) throw DimensionMismatchError("attachment matrix must be square");
  if (wtilde.minCoeff() < 0) throw InputError("attachment weights must be nonnegative");
  AttachmentSpec spec;
  spec.kind_ = Kind::Imitative;
  spec.n_ = n;
  spec.base_ = std::move(wtilde);
  return spec;
}

AttachmentSpec AttachmentSpec::table(int n, std::function<Matrix(const Vector&)> weights) {
  AttachmentSpec spec;
  spec.kind_ = Kind::CustomTable;
  spec.n_ = n;
  spec.table_ = std::move(weights);
  return spec;
}

Matrix AttachmentSpec::weights(const Vector& x) const {
  switch (kind_) {
    case Kind::ConstantWeights:
      return base_;
    case Kind::Imitative: {
      Matrix w = base_;
      for (int j = 0; j < n_; ++j) w.col(j) *= x[j];
      return w;
    }
    case Kind::CustomTable:
      return table_(x);
  }
  return Matrix();
}

namespace {

// Detects b_ij = c_j * s_ij with s symmetric, returning c (up to scale).
std::optional<Vector> column_scale_decomposition(const Matrix& b) {
  const int n = static_cast<int>(b.rows());
  if ((b - b.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff()))
    return Vector::Ones(n);
  Vector c(n);
  c[0] = 1.0;
  for (int j = 1; j < n; ++j) {
    if (!(b(0, j) > 0) || !(b(j, 0) > 0)) return std::nullopt;
    c[j] = b(0, j) / b(j, 0);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double sij = b(i, j) / c[j];
      const double sji = b(j, i) / c[i];
      if (std::abs(sij - sji) > 1e-9 * std::max(1.0, std::abs(sij))) return std::nullopt;
    }
  }
  return c;
}

}  // namespace

std::optional<std::function<Vector(const Vector&)>> AttachmentSpec::occupancy_factor() const {
  if (kind_ == Kind::CustomTable) return std::nullopt;
  const auto c = column_scale_decomposition(base_);
  if (!c) return std::nullopt;
  const Vector scale = *c;
  if (kind_ == Kind::ConstantWeights) {
    return [scale](const Vector&) -> Vector { return scale; };
  }
  return [scale](const Vector& x) -> Vector { return scale.cwiseProduct(x); };
}

// ---------------------------------------------------------------------------
// Comparison rules

ComparisonRule comparison_rule_from_tag(const std::string& tag) {
  if (tag == "logistic") return ComparisonRule::Logistic;
  if (tag == "metropolis") return ComparisonRule::Metropolis;
  if (tag == "dissatisfaction") return ComparisonRule::Dissatisfaction;
  if (tag == "success") return ComparisonRule::Success;
  if (tag == "imitate-excess") return ComparisonRule::ImitateExcess;
  throw UnknownKindError(tag);
}

std::string comparison_rule_tag(ComparisonRule g) {
  switch (g) {
    case ComparisonRule::Logistic: return "logistic";
    case ComparisonRule::Metropolis: return "metropolis";
    case ComparisonRule::Dissatisfaction: return "dissatisfaction";
    case ComparisonRule::Success: return "success";
    case ComparisonRule::ImitateExcess: return "imitate-excess";
  }
  return "";
}

namespace {

double comparison_g(ComparisonRule rule, double beta, double u, double v) {
  switch (rule) {
    case ComparisonRule::Logistic:
      return 1.0 / (1.0 + std::exp(-beta * (v - u)));
    case ComparisonRule::Metropolis:
      return std::min(1.0, std::exp(beta * (v - u)));
    case ComparisonRule::Dissatisfaction:
      return std::exp(-beta * u);
    case ComparisonRule::Success:
      return std::exp(beta * v);
    case ComparisonRule::ImitateExcess:
      return std::max(0.0, v - u);
  }
  return 0.0;
}

double sampling_f(SamplingTransform f, double beta, double shift, double u,
                  double row_max) {
  switch (f) {
    case SamplingTransform::ExpBeta:
      // Row max subtracted before exponentiating; exact in real arithmetic.
      return std::exp(beta * (u - row_max));
    case SamplingTransform::PowerShifted: {
      const double t = u + shift;
      if (!(t > 0)) throw DomainViolationError("shifted payoff must be positive");
      return std::pow(t, beta);
    }
    case SamplingTransform::IdentityPositive:
      if (!(u > 0)) throw DomainViolationError("identity transform requires positive payoffs");
      return u;
  }
  return 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// ProtocolSpec

ProtocolSpec ProtocolSpec::sampling(PayoffSpec payoff, AttachmentSpec attachment,
                                    SamplingTransform f, double beta, double shift) {
  if (payoff.dim() != attachment.dim())
    throw DimensionMismatchError("payoff and attachment dimensions differ");
  if (beta < 0) throw InputError("beta must be >= 0");
  ProtocolSpec spec;
  spec.kind_ = Kind::Sampling;
  spec.n_ = payoff.dim();
  spec.payoff_ = std::move(payoff);
  spec.attachment_ = std::move(attachment);
  spec.f_ = f;
  spec.beta_ = beta;
  spec.shift_ = shift;
  return spec;
}

ProtocolSpec ProtocolSpec::comparison(PayoffSpec payoff, AttachmentSpec attachment,
                                      ComparisonRule g, double beta) {
  if (payoff.dim() != attachment.dim())
    throw DimensionMismatchError("payoff and attachment dimensions differ");
  if (beta < 0) throw InputError("beta must be >= 0");
  ProtocolSpec spec;
  spec.kind_ = Kind::Comparison;
  spec.n_ = payoff.dim();
  spec.payoff_ = std::move(payoff);
  spec.attachment_ = std::move(attachment);
  spec.g_ = g;
  spec.beta_ = beta;
  spec.calibrate_comparison_scale();
  return spec;
}

ProtocolSpec ProtocolSpec::gibbs_direct(Vector u0, Matrix coupling, double beta) {
  const int n = static_cast<int>(u0.size());
  if (coupling.rows() != n || coupling.cols() != n)
    throw DimensionMismatchError("coupling matrix size does not match baseline");
  if ((coupling - coupling.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw AsymmetricMatrixError("Gibbs coupling matrix must be symmetric");
  if (beta < 0) throw InputError("beta must be >= 0");
  ProtocolSpec spec;
  spec.kind_ = Kind::GibbsDirect;
  spec.n_ = n;
  spec.u0_ = std::move(u0);
  spec.coupling_ = std::move(coupling);
  spec.beta_ = beta;
  return spec;
}

ProtocolSpec ProtocolSpec::vertex_reinforcement(Matrix a, double gamma) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw DimensionMismatchError("reinforcement matrix must be square");
  if (!(a.minCoeff() > 0)) throw InputError("reinforcement matrix must be entrywise positive");
  if (gamma < 1.0) throw InputError("gamma must be >= 1");
  ProtocolSpec spec;
  spec.kind_ = Kind::VertexReinforcement;
  spec.n_ = n;
  spec.a_ = std::move(a);
  spec.gamma_ = gamma;
  return spec;
}

ProtocolSpec ProtocolSpec::reversible_from_target(
    Matrix w, std::function<SimplexPoint(const SimplexPoint&)> target_pi) {
  const int n = static_cast<int>(w.rows());
  if (w.cols() != n) throw DimensionMismatchError("exchange matrix must be square");
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw AsymmetricMatrixError("exchange matrix must be symmetric");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && !(w(i, j) > 0))
        throw InputError("exchange matrix needs positive off-diagonal entries");
  ProtocolSpec spec;
  spec.kind_ = Kind::ReversibleFromTarget;
  spec.n_ = n;
  spec.w_ = std::move(w);
  spec.target_pi_ = std::move(target_pi);
  // Hard bound on jump rates: -L_ii(x) <= sum_{j != i} W_ij since pi_j <= 1.
  double max_rate = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) s += spec.w_(i, j);
    max_rate = std::max(max_rate, s);
  }
  spec.rate_scale_ = max_rate;
  return spec;
}

ProtocolSpec ProtocolSpec::replicator(PayoffSpec payoff) {
  const int n = payoff.dim();
  Matrix ones = Matrix::Ones(n, n);
  ones.diagonal().setZero();
  ProtocolSpec spec = comparison(std::move(payoff), AttachmentSpec::imitative(std::move(ones)),
                                 ComparisonRule::ImitateExcess, 1.0);
  spec.kind_ = Kind::Replicator;
  return spec;
}

void ProtocolSpec::calibrate_comparison_scale() {
  double max_w = 0.0;
  double max_g = 0.0;
  for (const SimplexPoint& x : simplex_grid(n_, 1000)) {
    const Matrix w = attachment_->weights(x.coords());
    const Vector u = payoff_->payoff(x.coords());
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        if (i == j) continue;
        max_w = std::max(max_w, w(i, j));
        max_g = std::max(max_g, comparison_g(g_, beta_, u[i], u[j]));
      }
    }
  }
  rate_scale_ = (max_w * max_g > 0) ? 1.0 / (n_ * max_w * max_g) : 1.0;
}

MarkovMatrix ProtocolSpec::markov_kernel(const SimplexPoint& x) const {
  if (x.dim() != n_) throw DimensionMismatchError("state dimension does not match protocol");
  Matrix k = Matrix::Zero(n_, n_);
  switch (kind_) {
    case Kind::Sampling: {
      const Matrix w = attachment_->weights(x.coords());
      const Vector u = payoff_->payoff(x.coords());
      const double row_max = u.maxCoeff();
      for (int i = 0; i < n_; ++i) {
        double denom = 0.0;
        for (int j = 0; j < n_; ++j) {
          k(i, j) = w(i, j) * sampling_f(f_, beta_, shift_, u[j], row_max);
          denom += k(i, j);
        }
        if (denom <= 1e-300)
          throw DegenerateDenominatorError("sampling row " + std::to_string(i) +
                                           " normalizer underflows");
        k.row(i) /= denom;
      }
      break;
    }
    case Kind::Comparison:
    case Kind::Replicator: {
      const Matrix w = attachment_->weights(x.coords());
      const Vector u = payoff_->payoff(x.coords());
      for (int i = 0; i < n_; ++i) {
        double row = 0.0;
        for (int j = 0; j < n_; ++j) {
          if (i == j) continue;
          k(i, j) = rate_scale_ * w(i, j) * comparison_g(g_, beta_, u[i], u[j]);
          row += k(i, j);
        }
        if (row > 1.0 + 1e-12) throw RowOverflowError(i, row);
        k(i, i) = std::max(0.0, 1.0 - row);
      }
      break;
    }
    case Kind::GibbsDirect: {
      const Vector pi = gibbs_measure(u0_, coupling_, beta_, x).coords();
      for (int i = 0; i < n_; ++i) k.row(i) = pi.transpose();
      break;
    }
    case Kind::VertexReinforcement:
      return vertex_reinforcement_kernel(a_, gamma_, x);
    case Kind::ReversibleFromTarget: {
      const Matrix l = rate_matrix(x).entries();
      k = Matrix::Identity(n_, n_) + l / rate_scale_;
      break;
    }
  }
  return MarkovMatrix::validated(std::move(k), 1e-9);
}

RateMatrix ProtocolSpec::rate_matrix(const SimplexPoint& x) const {
  if (kind_ == Kind::ReversibleFromTarget)
    return reversible_rate_from_target(w_, target_pi_(x));
  return rate_from_kernel(markov_kernel(x));
}

bool ProtocolSpec::has_invariant_family() const {
  switch (kind_) {
    case Kind::GibbsDirect:
    case Kind::ReversibleFromTarget:
      return true;
    case Kind::VertexReinforcement:
      return (a_ - a_.transpose()).cwiseAbs().maxCoeff() <= 1e-12;
    case Kind::Comparison:
      return g_ != ComparisonRule::ImitateExcess &&
             attachment_->occupancy_factor().has_value();
    case Kind::Sampling: {
      // Rows of K coincide when the attachment does not depend on the row
      // index, making the shared row the invariant probability.
      const Matrix& b = attachment_->base_matrix();
      for (int i = 1; i < n_; ++i)
        if ((b.row(i) - b.row(0)).cwiseAbs().maxCoeff() > 0) return false;
      return true;
    }
    case Kind::Replicator:
      return false;
  }
  return false;
}

SimplexPoint ProtocolSpec::invariant_measure(const SimplexPoint& x) const {
  switch (kind_) {
    case Kind::GibbsDirect:
      return gibbs_measure(u0_, coupling_, beta_, x);
    case Kind::ReversibleFromTarget:
      return target_pi_(x);
    case Kind::VertexReinforcement:
      return vertex_reinforcement_invariant(a_, gamma_, x);
    case Kind::Comparison: {
      const auto phi = attachment_->occupancy_factor();
      if (!phi || g_ == ComparisonRule::ImitateExcess)
        throw InputError("protocol has no closed-form invariant family");
      // pi_i proportional to phi_i(x) e^{beta U_i(x)}, computed with a max
      // shift in the exponent.
      const Vector u = payoff_->payoff(x.coords());
      const Vector factor = (*phi)(x.coords());
      const double shift = (beta_ * u).maxCoeff();
      Vector pi(n_);
      for (int i = 0; i < n_; ++i) pi[i] = factor[i] * std::exp(beta_ * u[i] - shift);
      const double z = pi.sum();
      if (z <= 1e-300) throw DegenerateDenominatorError("invariant family normalizer underflows");
      return SimplexPoint::from_normalized(pi / z);
    }
    case Kind::Sampling: {
      if (!has_invariant_family())
        throw InputError("protocol has no closed-form invariant family");
      return SimplexPoint::from_normalized(
          markov_kernel(x).entries().row(0).transpose());
    }
    case Kind::Replicator:
      throw InputError("replicator protocols have a best-reply set, not an invariant map");
  }
  throw InputError("protocol has no closed-form invariant family");
}

bool ProtocolSpec::is_imitative_boundary_preserving() const {
  switch (kind_) {
    case Kind::VertexReinforcement:
    case Kind::Replicator:
      return true;
    case Kind::Sampling:
    case Kind::Comparison:
      return attachment_->kind() == AttachmentSpec::Kind::Imitative;
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Free functions

RateMatrix rate_from_kernel(const MarkovMatrix& k) {
  Matrix l = k.entries();
  l.diagonal().array() -= 1.0;
  return RateMatrix::validated(std::move(l), 1e-9);
}

MarkovMatrix markov_kernel(const ProtocolSpec& spec, const SimplexPoint& x) {
  return spec.markov_kernel(x);
}

SimplexPoint gibbs_measure(const Vector& u0, const Matrix& coupling, double beta,
                           const SimplexPoint& x) {
  const int n = static_cast<int>(u0.size());
  if (coupling.rows() != n || coupling.cols() != n || x.dim() != n)
    throw DimensionMismatchError("gibbs_measure dimensions disagree");
  if ((coupling - coupling.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw AsymmetricMatrixError("Gibbs coupling matrix must be symmetric");
  if (beta < 0) throw InputError("beta must be >= 0");
  Vector expo = -(u0 + beta * (coupling * x.coords()));
  expo.array() -= expo.maxCoeff();
  Vector pi = expo.array().exp();
  return SimplexPoint::from_normalized(pi / pi.sum());
}

SimplexPoint logit_measure(const PayoffSpec& payoff, double beta, const SimplexPoint& x) {
  if (beta < 0) throw InputError("beta must be >= 0");
  Vector expo = beta * payoff.payoff(x.coords());
  expo.array() -= expo.maxCoeff();
  Vector pi = expo.array().exp();
  return SimplexPoint::from_normalized(pi / pi.sum());
}

MarkovMatrix vertex_reinforcement_kernel(const Matrix& a, double gamma,
                                         const SimplexPoint& x) {
  const int n = static_cast<int>(a.rows());
  if (!(a.minCoeff() > 0)) throw InputError("reinforcement matrix must be entrywise positive");
  if (x.dim() != n) throw DimensionMismatchError("state dimension does not match matrix");
  Vector xg(n);
  for (int i = 0; i < n; ++i) xg[i] = std::pow(x[i], gamma);
  Matrix k(n, n);
  for (int i = 0; i < n; ++i) {
    const double denom = a.row(i).dot(xg);
    if (denom <= 1e-300) {
      // Only reachable if a row's support misses the state's support; make
      // the state absorbing rather than dividing by zero.
      k.row(i).setZero();
      k(i, i) = 1.0;
      continue;
    }
    for (int j = 0; j < n; ++j) k(i, j) = a(i, j) * xg[j] / denom;
  }
  return MarkovMatrix::validated(std::move(k), 1e-9);
}

SimplexPoint vertex_reinforcement_invariant(const Matrix& a, double gamma,
                                            const SimplexPoint& x) {
  const int n = static_cast<int>(a.rows());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw AsymmetricMatrixError("reinforcement invariant needs a symmetric matrix");
  if (!(a.minCoeff() > 0)) throw InputError("reinforcement matrix must be entrywise positive");
  if (x.dim() != n) throw DimensionMismatchError("state dimension does not match matrix");
  Vector xg(n);
  for (int i = 0; i < n; ++i) xg[i] = std::pow(x[i], gamma);
  const Vector axg = a * xg;
  const double z = xg.dot(axg);
  if (z <= 1e-300)
    throw DegenerateDenominatorError("reinforcement invariant denominator underflows");
  Vector pi = xg.cwiseProduct(axg) / z;
  return SimplexPoint::from_normalized(std::move(pi));
}

RateMatrix reversible_rate_from_target(const Matrix& w, const SimplexPoint& pi) {
  const int n = static_cast<int>(w.rows());
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw AsymmetricMatrixError("exchange matrix must be symmetric");
  if (!pi.is_interior()) throw BoundaryPointError("target measure must be interior");
  Matrix l = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!(w(i, j) > 0)) throw InputError("exchange matrix needs positive off-diagonal entries");
      l(i, j) = w(i, j) * pi[j];
    }
    l(i, i) = -l.row(i).sum();
  }
  return RateMatrix::validated(std::move(l), 1e-9);
}

}  // namespace simplexflow
