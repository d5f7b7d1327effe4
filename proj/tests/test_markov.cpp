#include <doctest.h>

#include <cmath>

#include "simplexflow/markov.hpp"
#include "simplexflow/protocols.hpp"
#include "simplexflow/rng.hpp"
#include "simplexflow/sampling.hpp"

using namespace simplexflow;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

RateMatrix directed_cycle(int n, double rate = 1.0) {
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, (i + 1) % n) = rate;
    m(i, i) = -rate;
  }
  return RateMatrix::validated(std::move(m));
}

}  // namespace

TEST_CASE("validate_rate_matrix accepts exact generators") {
  const RateMatrix l = validate_rate_matrix(mat2(-1, 1, 1, -1), 1e-12);
  CHECK(l.dim() == 2);
  CHECK(l(0, 1) == 1.0);
}

TEST_CASE("validate_rate_matrix clamps row sums within tolerance") {
  const RateMatrix l = validate_rate_matrix(mat2(-1, 0.999999999999, 1, -1), 1e-9);
  CHECK(l.entries().row(0).sum() == 0.0);
  CHECK(l.entries().row(1).sum() == 0.0);
}

TEST_CASE("validate_rate_matrix rejects negative off-diagonals and bad rows") {
  CHECK_THROWS_AS(validate_rate_matrix(mat2(-1, -0.5, 1, -1), 1e-12),
                  NegativeOffDiagonalError);
  CHECK_THROWS_AS(validate_rate_matrix(mat2(-1, 2, 1, -1), 1e-12), RowSumViolationError);
}

TEST_CASE("is_irreducible on small graphs") {
  CHECK(is_irreducible(validate_rate_matrix(mat2(-1, 1, 1, -1))));
  CHECK_FALSE(is_irreducible(validate_rate_matrix(mat2(0, 0, 1, -1))));
  CHECK(is_irreducible(directed_cycle(4)));
}

TEST_CASE("invariant probability of a two-state chain") {
  // Balance: -pi1 + 2 pi2 = 0 with pi1 + pi2 = 1 gives (2/3, 1/3).
  const SimplexPoint pi = invariant_probability(validate_rate_matrix(mat2(-1, 1, 2, -2)));
  CHECK(pi[0] == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(pi[1] == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("symmetric generators have uniform invariants") {
  CounterRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 5);
    Matrix m = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) m(i, j) = m(j, i) = rng.uniform(0.1, 2.0);
    for (int i = 0; i < n; ++i) m(i, i) = -m.row(i).sum();
    const SimplexPoint pi = invariant_probability(RateMatrix::validated(std::move(m), 1e-9));
    for (int i = 0; i < n; ++i) CHECK(pi[i] == doctest::Approx(1.0 / n).epsilon(1e-9));
  }
}

TEST_CASE("reversible construction has the prescribed invariant") {
  CounterRng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform() * 3);
    Matrix w = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) w(i, j) = w(j, i) = rng.uniform(0.2, 3.0);
    const SimplexPoint target = shrink_to_interior(random_simplex_point(n, rng), 0.02);
    const RateMatrix l = reversible_rate_from_target(w, target);
    CHECK(is_reversible(l, target, 1e-12));
    const SimplexPoint pi = invariant_probability(l);
    CHECK((pi.coords() - target.coords()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("is_reversible distinguishes symmetric chains from directed cycles") {
  const RateMatrix sym = validate_rate_matrix(mat2(-1, 1, 1, -1));
  CHECK(is_reversible(sym, SimplexPoint::barycenter(2), 1e-12));

  const RateMatrix cyc = directed_cycle(3);
  const SimplexPoint pi = invariant_probability(cyc);
  CHECK_FALSE(is_reversible(cyc, pi, 1e-12));
}

TEST_CASE("reversibility of the W pi construction is pointwise exact") {
  // L_ij = W_ij pi_j with symmetric W satisfies detailed balance identically.
  Matrix w(3, 3);
  w << 0, 1, 2, 1, 0, 1, 2, 1, 0;
  Vector piv(3);
  piv << 0.5, 0.3, 0.2;
  const SimplexPoint pi = SimplexPoint::validated(piv);
  const RateMatrix l = reversible_rate_from_target(w, pi);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(pi[i] * l(i, j) == doctest::Approx(pi[j] * l(j, i)).epsilon(1e-14));
}

TEST_CASE("adjoint: reversible chains are self-adjoint") {
  Matrix w(3, 3);
  w << 0, 1, 0.5, 1, 0, 2, 0.5, 2, 0;
  const SimplexPoint pi = SimplexPoint::validated((Vector(3) << 0.2, 0.5, 0.3).finished());
  const RateMatrix l = reversible_rate_from_target(w, pi);
  const RateMatrix lstar = adjoint(l, pi);
  CHECK((l.entries() - lstar.entries()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("adjoint of the directed cycle with uniform invariant is the reversed cycle") {
  const RateMatrix cyc = directed_cycle(3);
  const SimplexPoint pi = invariant_probability(cyc);
  const RateMatrix rev = adjoint(cyc, pi);
  CHECK(rev(0, 2) == doctest::Approx(1.0));
  CHECK(rev(2, 1) == doctest::Approx(1.0));
  CHECK(rev(1, 0) == doctest::Approx(1.0));
  CHECK(rev(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("adjoint preserves the invariant probability") {
  CounterRng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 5);
    const RateMatrix l = random_irreducible_rate_matrix(n, rng);
    const SimplexPoint pi = invariant_probability(l);
    const SimplexPoint pistar = invariant_probability(adjoint(l, pi));
    CHECK((pi.coords() - pistar.coords()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("dirichlet form: constants, a hand value, and route agreement") {
  const RateMatrix l = validate_rate_matrix(mat2(-1, 1, 1, -1));
  const SimplexPoint pi = SimplexPoint::barycenter(2);
  CHECK(dirichlet_form(l, pi, Vector::Constant(2, 3.7)) == doctest::Approx(0.0));
  // f = (1,-1): (1/2)[(2)^2 * 1 * 1/2 + (-2)^2 * 1 * 1/2] = 2.
  CHECK(dirichlet_form(l, pi, (Vector(2) << 1, -1).finished()) == doctest::Approx(2.0));

  CounterRng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 5);
    const RateMatrix lr = random_irreducible_rate_matrix(n, rng);
    const SimplexPoint pir = invariant_probability(lr);
    Vector f(n);
    for (int i = 0; i < n; ++i) f[i] = rng.uniform(-2, 2);
    CHECK(std::isfinite(dirichlet_form(lr, pir, f)));  // route agreement is internal
    CHECK(dirichlet_form(lr, pir, f) >= 0.0);
  }
}

TEST_CASE("dirichlet form is shared with the adjoint") {
  CounterRng rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 5);
    const RateMatrix l = random_irreducible_rate_matrix(n, rng);
    const SimplexPoint pi = invariant_probability(l);
    const RateMatrix lstar = adjoint(l, pi);
    Vector f(n);
    for (int i = 0; i < n; ++i) f[i] = rng.uniform(-2, 2);
    CHECK(dirichlet_form(l, pi, f) == doctest::Approx(dirichlet_form(lstar, pi, f)).epsilon(1e-10));
  }
}

TEST_CASE("spectral gap of the symmetric two-state chain is 2") {
  const RateMatrix l = validate_rate_matrix(mat2(-1, 1, 1, -1));
  CHECK(spectral_gap(l, SimplexPoint::barycenter(2)) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("spectral gap of the complete jump chain is 1") {
  // L = -Id + 1 pi^T moves any centered f to -f, so E(f) = 1 on the
  // constraint set.
  CounterRng rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 5);
    const SimplexPoint pi = shrink_to_interior(random_simplex_point(n, rng), 0.02);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.row(i) = pi.coords().transpose();
    m.diagonal().array() -= 1.0;
    const RateMatrix l = RateMatrix::validated(std::move(m), 1e-9);
    CHECK(spectral_gap(l, pi) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("spectral gap is positive for random irreducible generators") {
  CounterRng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 5);
    const RateMatrix l = random_irreducible_rate_matrix(n, rng);
    CHECK(spectral_gap(l, invariant_probability(l)) > 0.0);
  }
}

TEST_CASE("poincare check at the invariant state is (0,0)") {
  const RateMatrix l = validate_rate_matrix(mat2(-1, 1, 2, -2));
  const SimplexPoint pi = invariant_probability(l);
  const PoincareCheck pc = poincare_inequality_check(l, pi, MonotoneTransform::log());
  CHECK(std::abs(pc.lhs) < 1e-12);
  CHECK(std::abs(pc.rhs) < 1e-12);
}

TEST_CASE("entropy production inequality holds on random instances") {
  CounterRng rng(18);
  const auto transforms = {MonotoneTransform::log(), MonotoneTransform::neg_reciprocal(),
                           MonotoneTransform::neg_power(2.0), MonotoneTransform::identity()};
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 5);
    const RateMatrix l = random_irreducible_rate_matrix(n, rng);
    const SimplexPoint x = shrink_to_interior(random_simplex_point(n, rng), 1e-4);
    for (const MonotoneTransform& s : transforms) {
      const PoincareCheck pc = poincare_inequality_check(l, x, s);
      CHECK(pc.holds(1e-9));
    }
  }
}

TEST_CASE("entropy functional: fixed values and the variance identity") {
  const SimplexPoint pi = SimplexPoint::barycenter(2);
  const SimplexPoint x = SimplexPoint::validated((Vector(2) << 0.75, 0.25).finished());
  CHECK(entropy_functional(pi, ConvexWeight::t_log_t(), pi) == doctest::Approx(0.0));
  CHECK(entropy_functional(pi, ConvexWeight::squared_deviation(), x) ==
        doctest::Approx(0.25).epsilon(1e-14));

  // H with S(t) = t log t equals the KL divergence sum x log(x/pi).
  CounterRng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3;
    const SimplexPoint p = shrink_to_interior(random_simplex_point(n, rng), 0.01);
    const SimplexPoint q = shrink_to_interior(random_simplex_point(n, rng), 0.01);
    double kl = 0.0;
    for (int i = 0; i < n; ++i) kl += q[i] * std::log(q[i] / p[i]);
    CHECK(entropy_functional(p, ConvexWeight::t_log_t(), q) == doctest::Approx(kl).epsilon(1e-12));
  }
}

TEST_CASE("entropy functional boundary handling") {
  const SimplexPoint pi = SimplexPoint::barycenter(3);
  const SimplexPoint vertex = SimplexPoint::vertex(3, 0);
  CHECK(entropy_functional(pi, ConvexWeight::t_log_t(), vertex) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(entropy_functional(pi, ConvexWeight::neg_log(), vertex), BoundaryPointError);
}

TEST_CASE("transition semigroup preserves the simplex") {
  CounterRng rng(20);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 4);
    const RateMatrix l = random_irreducible_rate_matrix(n, rng);
    const SimplexPoint x = random_simplex_point(n, rng);
    for (double t : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0}) {
      const Vector xt = transition_matrix(l, t).transpose() * x.coords();
      CHECK(xt.minCoeff() >= -1e-12);
      CHECK(xt.sum() == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("invariant probability matches the semigroup row limit") {
  CounterRng rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 5);
    const RateMatrix l = random_irreducible_rate_matrix(n, rng);
    const SimplexPoint pi = invariant_probability(l);
    const double gap = spectral_gap(l, pi);
    const Matrix pt = transition_matrix(l, 50.0 / gap);
    for (int i = 0; i < n; ++i)
      CHECK((pt.row(i).transpose() - pi.coords()).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("tangent operator of a reversible chain is negative definite and invertible") {
  CounterRng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform() * 3);
    Matrix w = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) w(i, j) = w(j, i) = rng.uniform(0.2, 2.0);
    const SimplexPoint pi = shrink_to_interior(random_simplex_point(n, rng), 0.02);
    const RateMatrix l = reversible_rate_from_target(w, pi);

    const ChartProjection chart = ChartProjection::drop_last(n);
    const WeightedInnerProduct ip = WeightedInnerProduct::inverse_pi(pi);
    CounterRng dir(trial);
    for (int k = 0; k < 5; ++k) {
      Vector u(n);
      for (int i = 0; i < n; ++i) u[i] = dir.uniform(-1, 1);
      u.array() -= u.mean();
      if (u.norm() < 1e-12) continue;
      CHECK(ip.dot(l.apply_left(u), u) < 0.0);
    }

    // Solve uL = v on the tangent space and verify the residual.
    const Matrix lt = tangent_operator_matrix(l, chart);
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = dir.uniform(-1, 1);
    v.array() -= v.mean();
    const Vector u = chart.embed_tangent(lt.partialPivLu().solve(chart.project_tangent(v)));
    CHECK((l.apply_left(u) - v).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("entropy decay rate along the semigroup is bounded by the gap") {
  // d/dt H^S(x e^{tL}) at t = 0 is at most -min_i S''(x_i/pi_i) * gap * Var.
  CounterRng rng(23);
  const auto weights = {ConvexWeight::t_log_t(), ConvexWeight::squared_deviation(),
                        ConvexWeight::neg_log()};
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform() * 4);
    const RateMatrix l = random_irreducible_rate_matrix(n, rng);
    const SimplexPoint pi = invariant_probability(l);
    const SimplexPoint x = shrink_to_interior(random_simplex_point(n, rng), 1e-3);
    const double gap = spectral_gap(l, pi);
    Vector f = x.coords().cwiseQuotient(pi.coords());
    const double var = WeightedInnerProduct::pi(pi).variance(f);

    for (const ConvexWeight& s : weights) {
      double alpha = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) alpha = std::min(alpha, s.second_derivative(f[i]));
      const double h = 1e-6;
      const Vector xt = transition_matrix(l, h).transpose() * x.coords();
      const double dh =
          (entropy_functional(pi, s, SimplexPoint::from_normalized(xt)) -
           entropy_functional(pi, s, x)) /
          h;
      CHECK(dh <= -alpha * gap * var + 1e-4);
    }
  }
}
