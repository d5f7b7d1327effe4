#pragma once

#include <Eigen/Dense>
#include <vector>

#include "simplexflow/errors.hpp"

namespace simplexflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kSimplexTol = 1e-12;

/// Probability vector on the unit simplex. Coordinates are nonnegative and
/// sum to 1 within kSimplexTol at construction (then renormalized exactly).
class SimplexPoint {
 public:
  SimplexPoint() = default;  // empty; fill via the named constructors

  static SimplexPoint validated(Vector coords, double tol = kSimplexTol);
  static SimplexPoint barycenter(int n);
  static SimplexPoint vertex(int n, int i);
  /// Trusted constructor for coordinates already known to lie in the simplex
  /// (e.g. produced by a normalizing formula). Clamps roundoff-level negatives.
  static SimplexPoint from_normalized(Vector coords);

  const Vector& coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  double operator[](int i) const { return coords_[i]; }

  std::vector<int> support() const;
  bool is_interior() const { return coords_.minCoeff() > 0.0; }
  double min_coord() const { return coords_.minCoeff(); }

 private:
  explicit SimplexPoint(Vector coords) : coords_(std::move(coords)) {}
  Vector coords_;
};

/// Element of the tangent space of the simplex: coordinates sum to 0.
class TangentVector {
 public:
  static TangentVector validated(Vector coords, double tol = kSimplexTol);

  const Vector& coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  double operator[](int i) const { return coords_[i]; }
  double norm() const { return coords_.norm(); }

 private:
  explicit TangentVector(Vector coords) : coords_(std::move(coords)) {}
  Vector coords_;
};

/// Generator of a continuous-time Markov chain: nonnegative off-diagonal
/// entries, zero row sums.
class RateMatrix {
 public:
  /// Validates a raw matrix. Row sums with |sum| <= tol are clamped to zero
  /// by adjusting the diagonal; anything larger is rejected.
  static RateMatrix validated(Matrix raw, double tol = kSimplexTol);

  const Matrix& entries() const { return entries_; }
  int dim() const { return static_cast<int>(entries_.rows()); }
  double operator()(int i, int j) const { return entries_(i, j); }

  /// Left action x |-> xL as a plain vector (sums to 0 for any x).
  Vector apply_left(const Vector& x) const { return entries_.transpose() * x; }

 private:
  explicit RateMatrix(Matrix entries) : entries_(std::move(entries)) {}
  Matrix entries_;
};

/// Row-stochastic matrix.
class MarkovMatrix {
 public:
  static MarkovMatrix validated(Matrix raw, double tol = kSimplexTol);

  const Matrix& entries() const { return entries_; }
  int dim() const { return static_cast<int>(entries_.rows()); }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  explicit MarkovMatrix(Matrix entries) : entries_(std::move(entries)) {}
  Matrix entries_;
};

/// Weighted inner product <f,g>_w = sum_i f_i g_i w_i with strictly positive
/// finite weights (w = pi or w = 1/pi in practice).
class WeightedInnerProduct {
 public:
  explicit WeightedInnerProduct(Vector weights);
  static WeightedInnerProduct pi(const SimplexPoint& p);
  static WeightedInnerProduct inverse_pi(const SimplexPoint& p);

  const Vector& weights() const { return weights_; }
  double dot(const Vector& f, const Vector& g) const {
    return (f.array() * g.array() * weights_.array()).sum();
  }
  double norm(const Vector& f) const { return std::sqrt(dot(f, f)); }
  /// Var_w(f) = <f - m, f - m>_w with m = <f, 1>_w / <1, 1>_w.
  double variance(const Vector& f) const;

 private:
  Vector weights_;
};

/// Linear chart on the simplex obtained by dropping one coordinate. Maps the
/// tangent space bijectively onto R^(n-1) and the simplex affinely onto the
/// corner of the positive orthant under the hyperplane sum <= 1.
class ChartProjection {
 public:
  ChartProjection(int n, int drop_index);
  static ChartProjection drop_last(int n) { return ChartProjection(n, n - 1); }

  int ambient_dim() const { return n_; }
  int chart_dim() const { return n_ - 1; }
  int drop_index() const { return drop_; }

  Vector project_point(const Vector& x) const;
  Vector embed_point(const Vector& y) const;  // dropped coordinate = 1 - sum(y)
  Vector project_tangent(const Vector& u) const;
  Vector embed_tangent(const Vector& v) const;  // dropped coordinate = -sum(v)

  /// j-th basis tangent vector: e_(map(j)) - e_(drop).
  Vector tangent_basis(int j) const;

  /// Chart matrix of a linear operator A : T-simplex -> T-simplex, columns
  /// project(A(tangent_basis(j))).
  template <typename Op>
  Matrix operator_matrix(Op&& op) const {
    Matrix m(chart_dim(), chart_dim());
    for (int j = 0; j < chart_dim(); ++j) {
      m.col(j) = project_tangent(op(tangent_basis(j)));
    }
    return m;
  }

 private:
  int n_;
  int drop_;
};

}  // namespace simplexflow
