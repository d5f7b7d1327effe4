#include "simplexflow/types.hpp"

#include <cmath>

namespace simplexflow {

SimplexPoint SimplexPoint::validated(Vector coords, double tol) {
  const int n = static_cast<int>(coords.size());
  if (n == 0) throw DimensionMismatchError("empty simplex point");
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(coords[i])) throw InputError("non-finite coordinate");
    if (coords[i] < -tol)
      throw InputError("negative coordinate " + std::to_string(coords[i]) + " at index " +
                       std::to_string(i));
    if (coords[i] < 0) coords[i] = 0.0;
  }
  const double sum = coords.sum();
  if (std::abs(sum - 1.0) > tol)
    throw InputError("coordinates sum to " + std::to_string(sum) + ", expected 1");
  coords /= sum;
  return SimplexPoint(std::move(coords));
}

SimplexPoint SimplexPoint::barycenter(int n) {
  return SimplexPoint(Vector::Constant(n, 1.0 / n));
}

SimplexPoint SimplexPoint::vertex(int n, int i) {
  Vector v = Vector::Zero(n);
  v[i] = 1.0;
  return SimplexPoint(std::move(v));
}

SimplexPoint SimplexPoint::from_normalized(Vector coords) {
  for (int i = 0; i < coords.size(); ++i) {
    if (coords[i] < 0) {
      if (coords[i] < -kSimplexTol)
        throw InputError("from_normalized: coordinate below -1e-12");
      coords[i] = 0.0;
    }
  }
  coords /= coords.sum();
  return SimplexPoint(std::move(coords));
}

std::vector<int> SimplexPoint::support() const {
  std::vector<int> s;
  for (int i = 0; i < coords_.size(); ++i)
    if (coords_[i] > 0) s.push_back(i);
  return s;
}

TangentVector TangentVector::validated(Vector coords, double tol) {
  const double sum = coords.sum();
  if (std::abs(sum) > tol * std::max(1.0, coords.cwiseAbs().maxCoeff()))
    throw InputError("tangent coordinates sum to " + std::to_string(sum));
  return TangentVector(std::move(coords));
}

RateMatrix RateMatrix::validated(Matrix raw, double tol) {
  const int n = static_cast<int>(raw.rows());
  if (raw.cols() != n) throw DimensionMismatchError("rate matrix must be square");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && raw(i, j) < 0) throw NegativeOffDiagonalError(i, j);
  for (int i = 0; i < n; ++i) {
    const double sum = raw.row(i).sum();
    if (std::abs(sum) > tol) throw RowSumViolationError(i, sum);
    raw(i, i) -= sum;  // clamp to an exact generator
  }
  return RateMatrix(std::move(raw));
}

MarkovMatrix MarkovMatrix::validated(Matrix raw, double tol) {
  const int n = static_cast<int>(raw.rows());
  if (raw.cols() != n) throw DimensionMismatchError("Markov matrix must be square");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (raw(i, j) < 0) {
        if (raw(i, j) < -tol)
          throw InputError("negative kernel entry at (" + std::to_string(i) + "," +
                           std::to_string(j) + ")");
        raw(i, j) = 0.0;
      }
    }
    const double sum = raw.row(i).sum();
    if (std::abs(sum - 1.0) > tol) throw RowSumViolationError(i, sum);
    raw.row(i) /= sum;
  }
  return MarkovMatrix(std::move(raw));
}

WeightedInnerProduct::WeightedInnerProduct(Vector weights) : weights_(std::move(weights)) {
  for (int i = 0; i < weights_.size(); ++i)
    if (!(weights_[i] > 0) || !std::isfinite(weights_[i]))
      throw InputError("inner product weights must be positive and finite");
}

WeightedInnerProduct WeightedInnerProduct::pi(const SimplexPoint& p) {
  if (!p.is_interior()) throw BoundaryPointError();
  return WeightedInnerProduct(p.coords());
}

WeightedInnerProduct WeightedInnerProduct::inverse_pi(const SimplexPoint& p) {
  if (!p.is_interior()) throw BoundaryPointError();
  return WeightedInnerProduct(p.coords().cwiseInverse());
}

double WeightedInnerProduct::variance(const Vector& f) const {
  const double mass = weights_.sum();
  const double mean = (f.array() * weights_.array()).sum() / mass;
  return ((f.array() - mean).square() * weights_.array()).sum();
}

ChartProjection::ChartProjection(int n, int drop_index) : n_(n), drop_(drop_index) {
  if (n < 2 || drop_index < 0 || drop_index >= n)
    throw DimensionMismatchError("invalid chart projection");
}

Vector ChartProjection::project_point(const Vector& x) const {
  Vector y(n_ - 1);
  int k = 0;
  for (int i = 0; i < n_; ++i)
    if (i != drop_) y[k++] = x[i];
  return y;
}

Vector ChartProjection::embed_point(const Vector& y) const {
  Vector x(n_);
  int k = 0;
  for (int i = 0; i < n_; ++i)
    if (i != drop_) x[i] = y[k++];
  x[drop_] = 1.0 - y.sum();
  return x;
}

Vector ChartProjection::project_tangent(const Vector& u) const { return project_point(u); }

Vector ChartProjection::embed_tangent(const Vector& v) const {
  Vector u(n_);
  int k = 0;
  for (int i = 0; i < n_; ++i)
    if (i != drop_) u[i] = v[k++];
  u[drop_] = -v.sum();
  return u;
}

Vector ChartProjection::tangent_basis(int j) const {
  Vector u = Vector::Zero(n_);
  const int mapped = j < drop_ ? j : j + 1;
  u[mapped] = 1.0;
  u[drop_] = -1.0;
  return u;
}

}  // namespace simplexflow
