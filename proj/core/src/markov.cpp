#include "simplexflow/markov.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

namespace simplexflow {

RateMatrix validate_rate_matrix(const Matrix& raw, double tol) {
  return RateMatrix::validated(raw, tol);
}

namespace {

// Reachability sweep over the positivity graph, with edges optionally
// reversed. Strong connectivity == everything reachable from node 0 in both
// orientations.
bool all_reachable(const Matrix& m, bool reversed) {
  const int n = static_cast<int>(m.rows());
  std::vector<bool> seen(n, false);
  std::vector<int> stack = {0};
  seen[0] = true;
  int count = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      if (j == i || seen[j]) continue;
      const double edge = reversed ? m(j, i) : m(i, j);
      if (edge > 0) {
        seen[j] = true;
        ++count;
        stack.push_back(j);
      }
    }
  }
  return count == n;
}

}  // namespace

bool is_irreducible(const RateMatrix& L) {
  return all_reachable(L.entries(), false) && all_reachable(L.entries(), true);
}

SimplexPoint invariant_probability(const RateMatrix& L) {
  if (!is_irreducible(L)) throw NotIrreducibleError();
  const int n = L.dim();
  // Balance equations sum_i pi_i L_ij = 0 for j < n-1, plus sum_i pi_i = 1.
  Matrix A(n, n);
  A.topRows(n - 1) = L.entries().transpose().topRows(n - 1);
  A.row(n - 1).setOnes();
  Vector b = Vector::Zero(n);
  b[n - 1] = 1.0;
  Eigen::FullPivLU<Matrix> lu(A);
  if (!lu.isInvertible())
    throw SingularSystemError("balance system is singular for an irreducible generator");
  Vector pi = lu.solve(b);
  const double residual = (L.entries().transpose() * pi).cwiseAbs().maxCoeff();
  if (residual > 1e-10)
    throw SingularSystemError("invariant probability residual " + std::to_string(residual));
  return SimplexPoint::from_normalized(std::move(pi));
}

bool is_reversible(const RateMatrix& L, const SimplexPoint& pi, double tol) {
  if (!pi.is_interior()) throw BoundaryPointError("reversibility needs a positive measure");
  const int n = L.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(pi[i] * L(i, j) - pi[j] * L(j, i)) > tol) return false;
  return true;
}

RateMatrix adjoint(const RateMatrix& L, const SimplexPoint& pi) {
  if (!pi.is_interior()) throw BoundaryPointError("adjoint needs a positive measure");
  const int n = L.dim();
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = pi[j] * L(j, i) / pi[i];
  // Row sums vanish because pi L = 0; clamp roundoff.
  return RateMatrix::validated(std::move(a), 1e-9);
}

double dirichlet_form(const RateMatrix& L, const SimplexPoint& pi, const Vector& f) {
  const int n = L.dim();
  const WeightedInnerProduct ip = WeightedInnerProduct::pi(pi);
  const double quadratic = -ip.dot(f, L.entries() * f);
  double pairwise = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) pairwise += (f[i] - f[j]) * (f[i] - f[j]) * L(i, j) * pi[i];
  pairwise *= 0.5;
  const double scale = std::max(1.0, std::abs(quadratic));
  if (std::abs(quadratic - pairwise) > 1e-10 * scale)
    throw NumericError("Dirichlet form routes disagree: " + std::to_string(quadratic) +
                       " vs " + std::to_string(pairwise));
  return pairwise;
}

double spectral_gap(const RateMatrix& L, const SimplexPoint& pi) {
  if (!is_irreducible(L)) throw NotIrreducibleError();
  const int n = L.dim();
  const RateMatrix Lstar = adjoint(L, pi);
  const Matrix sym = 0.5 * (L.entries() + Lstar.entries());
  // D^(1/2) sym D^(-1/2) is symmetric (sym is reversible w.r.t. pi); its
  // spectrum is the spectrum of sym in the pi inner product.
  Vector sqrt_pi = pi.coords().cwiseSqrt();
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = sqrt_pi[i] * sym(i, j) / sqrt_pi[j];
  m = 0.5 * (m + m.transpose());  // clean roundoff asymmetry
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  // Eigenvalues ascend; the last is ~0 (constants), the one before is -gap.
  return -es.eigenvalues()[n - 2];
}

PoincareCheck poincare_inequality_check(const RateMatrix& L, const SimplexPoint& x,
                                        const MonotoneTransform& s) {
  if (!x.is_interior()) throw BoundaryPointError("Poincare check needs an interior state");
  const SimplexPoint pi = invariant_probability(L);
  const int n = L.dim();
  Vector f = x.coords().cwiseQuotient(pi.coords());
  Vector sf(n);
  double c_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    sf[i] = s(f[i]);
    c_f = std::min(c_f, s.derivative(f[i]));
  }
  const Vector xL = L.apply_left(x.coords());
  const double lhs = xL.dot(sf);
  const double gap = spectral_gap(L, pi);
  const double var = WeightedInnerProduct::pi(pi).variance(f);
  return PoincareCheck{lhs, -c_f * gap * var};
}

double entropy_functional(const SimplexPoint& pi, const ConvexWeight& S,
                          const SimplexPoint& x) {
  if (!pi.is_interior()) throw BoundaryPointError("entropy functional needs pi > 0");
  if (!S.finite_at_zero() && !x.is_interior())
    throw BoundaryPointError("this S requires x > 0");
  double h = 0.0;
  for (int i = 0; i < pi.dim(); ++i) h += pi[i] * S(x[i] / pi[i]);
  return h;
}

Matrix transition_matrix(const RateMatrix& L, double t) {
  if (t < 0) throw InputError("transition_matrix requires t >= 0");
  const int n = L.dim();
  if (t == 0) return Matrix::Identity(n, n);
  const double a = std::max(1e-300, -L.entries().diagonal().minCoeff());
  // Halve t until the uniformization rate a*t is <= 1, run the short series,
  // then square back up; stochastic structure is preserved throughout.
  int squarings = 0;
  double tau = t;
  while (a * tau > 1.0 && squarings < 60) {
    tau *= 0.5;
    ++squarings;
  }
  const Matrix P = Matrix::Identity(n, n) + L.entries() / a;
  Matrix term = Matrix::Identity(n, n);
  Matrix sum = Matrix::Zero(n, n);
  double weight = std::exp(-a * tau);
  for (int k = 0;; ++k) {
    sum += weight * term;
    if (weight < 1e-18 && k > a * tau) break;
    if (k > 10000) break;
    term = term * P;
    weight *= a * tau / (k + 1);
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

Matrix tangent_operator_matrix(const RateMatrix& L, const ChartProjection& chart) {
  return chart.operator_matrix(
      [&](const Vector& u) -> Vector { return L.apply_left(u); });
}

}  // namespace simplexflow
