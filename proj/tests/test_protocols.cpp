#include <doctest.h>

#include <cmath>

#include "simplexflow/markov.hpp"
#include "simplexflow/protocols.hpp"
#include "simplexflow/rng.hpp"
#include "simplexflow/sampling.hpp"

using namespace simplexflow;

namespace {

Matrix rps_matrix() {
  Matrix u(3, 3);
  u << 0, -1, 1, 1, 0, -1, -1, 1, 0;
  return u;
}

Matrix ones_off_diagonal(int n) {
  Matrix m = Matrix::Ones(n, n);
  m.diagonal().setZero();
  return m;
}

Matrix random_symmetric(int n, CounterRng& rng, double lo = -1, double hi = 1) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m(i, j) = m(j, i) = rng.uniform(lo, hi);
  return m;
}

}  // namespace

TEST_CASE("comparison kernel with no payoff differences is the identity") {
  // g(u, v) = max(0, v - u) vanishes when payoffs are constant.
  const ProtocolSpec spec =
      ProtocolSpec::comparison(PayoffSpec::linear(Matrix::Zero(3, 3)),
                               AttachmentSpec::constant(ones_off_diagonal(3)),
                               ComparisonRule::ImitateExcess, 1.0);
  const MarkovMatrix k = spec.markov_kernel(SimplexPoint::barycenter(3));
  CHECK((k.entries() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("sampling with unit weights and exponential transform gives logit rows") {
  CounterRng rng(31);
  const Matrix u = random_symmetric(3, rng);
  const PayoffSpec payoff = PayoffSpec::linear(u);
  const ProtocolSpec spec =
      ProtocolSpec::sampling(payoff, AttachmentSpec::constant(Matrix::Ones(3, 3)),
                             SamplingTransform::ExpBeta, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const SimplexPoint x = shrink_to_interior(random_simplex_point(3, rng), 0.01);
    const MarkovMatrix k = spec.markov_kernel(x);
    const SimplexPoint logit = logit_measure(payoff, 2.0, x);
    for (int i = 0; i < 3; ++i)
      CHECK((k.entries().row(i).transpose() - logit.coords()).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("kernels are row stochastic across protocol kinds") {
  CounterRng rng(32);
  std::vector<ProtocolSpec> specs;
  specs.push_back(ProtocolSpec::gibbs_direct((Vector(3) << 0.1, 0, -0.2).finished(),
                                             random_symmetric(3, rng), 1.5));
  specs.push_back(ProtocolSpec::comparison(PayoffSpec::linear(random_symmetric(3, rng)),
                                           AttachmentSpec::constant(ones_off_diagonal(3)),
                                           ComparisonRule::Metropolis, 2.0));
  specs.push_back(ProtocolSpec::comparison(PayoffSpec::linear(random_symmetric(3, rng)),
                                           AttachmentSpec::imitative(ones_off_diagonal(3)),
                                           ComparisonRule::Success, 1.0));
  specs.push_back(ProtocolSpec::sampling(PayoffSpec::linear(random_symmetric(3, rng)),
                                         AttachmentSpec::constant(Matrix::Ones(3, 3)),
                                         SamplingTransform::ExpBeta, 3.0));
  specs.push_back(ProtocolSpec::vertex_reinforcement(
      (Matrix(3, 3) << 1, 2, 1, 2, 1, 3, 1, 3, 1).finished(), 1.5));
  specs.push_back(ProtocolSpec::replicator(PayoffSpec::linear(rps_matrix())));

  for (const ProtocolSpec& spec : specs) {
    for (int trial = 0; trial < 20; ++trial) {
      const SimplexPoint x = shrink_to_interior(random_simplex_point(3, rng), 1e-3);
      const MarkovMatrix k = spec.markov_kernel(x);
      for (int i = 0; i < 3; ++i) {
        CHECK(k.entries().row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(k.entries().row(i).minCoeff() >= 0.0);
      }
      const RateMatrix l = spec.rate_matrix(x);
      for (int i = 0; i < 3; ++i) CHECK(std::abs(l.entries().row(i).sum()) < 1e-15);
    }
  }
}

TEST_CASE("rate_from_kernel basics") {
  const MarkovMatrix id = MarkovMatrix::validated(Matrix::Identity(3, 3));
  CHECK(rate_from_kernel(id).entries().cwiseAbs().maxCoeff() == 0.0);

  CounterRng rng(33);
  const SimplexPoint pi = shrink_to_interior(random_simplex_point(4, rng), 0.02);
  Matrix k(4, 4);
  for (int i = 0; i < 4; ++i) k.row(i) = pi.coords().transpose();
  const RateMatrix l = rate_from_kernel(MarkovMatrix::validated(k));
  const SimplexPoint invariant = invariant_probability(l);
  CHECK((invariant.coords() - pi.coords()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("gibbs measure limits and overflow safety") {
  const Vector u0 = (Vector(3) << 1.0, 0.5, -0.5).finished();
  CounterRng rng(34);
  const Matrix u = random_symmetric(3, rng);
  const SimplexPoint x = SimplexPoint::barycenter(3);

  // beta = 0: softmax of -u0, independent of x.
  const SimplexPoint p0 = gibbs_measure(u0, u, 0.0, x);
  Vector expected = (-u0.array()).exp();
  expected /= expected.sum();
  CHECK((p0.coords() - expected).cwiseAbs().maxCoeff() < 1e-14);
  const SimplexPoint p0b = gibbs_measure(u0, u, 0.0, random_simplex_point(3, rng));
  CHECK((p0b.coords() - p0.coords()).cwiseAbs().maxCoeff() < 1e-14);

  CHECK((gibbs_measure(Vector::Zero(3), Matrix::Zero(3, 3), 1.0, x).coords() -
         Vector::Constant(3, 1.0 / 3))
            .cwiseAbs()
            .maxCoeff() < 1e-15);

  const SimplexPoint hot = gibbs_measure(u0, u, 1e4, x);
  CHECK(hot.coords().allFinite());
  CHECK(hot.coords().sum() == doctest::Approx(1.0));
  CHECK(hot.coords().minCoeff() >= 0.0);

  Matrix asym = u;
  asym(0, 1) += 1e-3;
  CHECK_THROWS_AS(gibbs_measure(u0, asym, 1.0, x), AsymmetricMatrixError);
}

TEST_CASE("logit measure: uniform limits and the RPS barycenter") {
  const PayoffSpec rps = PayoffSpec::linear(rps_matrix());
  const SimplexPoint bary = SimplexPoint::barycenter(3);
  CounterRng rng(35);
  const SimplexPoint any = random_simplex_point(3, rng);
  CHECK((logit_measure(rps, 0.0, any).coords() - bary.coords()).cwiseAbs().maxCoeff() < 1e-15);
  for (double beta : {0.5, 5.0, 50.0, 500.0})
    CHECK((logit_measure(rps, beta, bary).coords() - bary.coords()).cwiseAbs().maxCoeff() <
          1e-14);
}

TEST_CASE("logit of a quadratic potential payoff matches the Gibbs measure") {
  CounterRng rng(36);
  const Matrix u = random_symmetric(3, rng);
  const PayoffSpec pot = PayoffSpec::quadratic_potential(u);
  for (int trial = 0; trial < 10; ++trial) {
    const SimplexPoint x = shrink_to_interior(random_simplex_point(3, rng), 0.01);
    const SimplexPoint a = logit_measure(pot, 1.7, x);
    const SimplexPoint b = gibbs_measure(Vector::Zero(3), u, 1.7, x);
    CHECK((a.coords() - b.coords()).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("vertex reinforcement kernel rows") {
  const Matrix ones = Matrix::Ones(3, 3);
  const MarkovMatrix k = vertex_reinforcement_kernel(ones, 1.0, SimplexPoint::barycenter(3));
  CHECK((k.entries() - Matrix::Constant(3, 3, 1.0 / 3)).cwiseAbs().maxCoeff() < 1e-14);

  CounterRng rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a(i, j) = rng.uniform(0.1, 2.0);
    const SimplexPoint x = shrink_to_interior(random_simplex_point(3, rng), 1e-3);
    const MarkovMatrix kk = vertex_reinforcement_kernel(a, 1.0 + rng.uniform() * 2, x);
    for (int i = 0; i < 3; ++i)
      CHECK(kk.entries().row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("vertex reinforcement invariant: identity case and support preservation") {
  const Matrix ones = Matrix::Ones(3, 3);
  CounterRng rng(38);
  for (int trial = 0; trial < 20; ++trial) {
    const SimplexPoint x = random_simplex_point(3, rng);
    const SimplexPoint pi = vertex_reinforcement_invariant(ones, 1.0, x);
    CHECK((pi.coords() - x.coords()).cwiseAbs().maxCoeff() < 1e-14);
  }

  // Constant row sums send the barycenter to the uniform measure.
  Matrix a(3, 3);
  a << 1, 2, 3, 2, 3, 1, 3, 1, 2;  // symmetric? no - use a symmetric circulant instead
  a = (Matrix(3, 3) << 2, 1, 3, 1, 2, 3, 3, 3, 2).finished();
  REQUIRE((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
  // rows sums: 6, 6, 8 - not constant; build one with constant sums
  a = (Matrix(3, 3) << 2, 1, 3, 1, 4, 1, 3, 1, 2).finished();
  REQUIRE((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(a.row(0).sum() == a.row(1).sum());
  REQUIRE(a.row(1).sum() == a.row(2).sum());
  const SimplexPoint pi_b =
      vertex_reinforcement_invariant(a, 1.0, SimplexPoint::barycenter(3));
  CHECK((pi_b.coords() - Vector::Constant(3, 1.0 / 3)).cwiseAbs().maxCoeff() < 1e-14);

  // Support of pi equals the support of x, including boundary faces.
  CounterRng rng2(39);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix s = random_symmetric(3, rng2, 0.2, 2.0);
    Vector xv = Vector::Zero(3);
    const int drop = trial % 3;
    for (int i = 0; i < 3; ++i)
      if (i != drop) xv[i] = rng2.uniform(0.1, 1.0);
    xv /= xv.sum();
    const SimplexPoint x = SimplexPoint::validated(xv, 1e-9);
    const SimplexPoint pi = vertex_reinforcement_invariant(s, 1.0 + (trial % 2), x);
    for (int i = 0; i < 3; ++i) CHECK((pi[i] > 0) == (x[i] > 0));
  }
}

TEST_CASE("vertex reinforcement kernel is reversible for its invariant") {
  CounterRng rng(40);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_symmetric(4, rng, 0.3, 2.0);
    const double gamma = 1.0 + rng.uniform() * 1.5;
    const SimplexPoint x = shrink_to_interior(random_simplex_point(4, rng), 0.01);
    const MarkovMatrix k = vertex_reinforcement_kernel(a, gamma, x);
    const RateMatrix l = rate_from_kernel(k);
    const SimplexPoint pi = vertex_reinforcement_invariant(a, gamma, x);
    CHECK(is_reversible(l, pi, 1e-12));
  }
}

TEST_CASE("metropolis comparison is reversible for the logit measure") {
  CounterRng rng(41);
  for (int trial = 0; trial < 15; ++trial) {
    const Matrix u = random_symmetric(3, rng);
    const double beta = rng.uniform(0.5, 4.0);
    const ProtocolSpec spec = ProtocolSpec::comparison(
        PayoffSpec::linear(u), AttachmentSpec::constant(ones_off_diagonal(3)),
        ComparisonRule::Metropolis, beta);
    const SimplexPoint x = shrink_to_interior(random_simplex_point(3, rng), 0.01);
    const RateMatrix l = spec.rate_matrix(x);
    const SimplexPoint pi = logit_measure(PayoffSpec::linear(u), beta, x);
    CHECK(is_reversible(l, pi, 1e-12));
    CHECK(spec.has_invariant_family());
    CHECK((spec.invariant_measure(x).coords() - pi.coords()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("imitation rules are reversible for the occupancy-weighted measure") {
  // w_ij(x) = f_j(x_j) wtilde_ij with symmetric wtilde; the target is
  // f_i(x_i) exp(-beta dW/dx_i), normalized.
  CounterRng rng(42);
  for (const ComparisonRule rule :
       {ComparisonRule::Dissatisfaction, ComparisonRule::Success, ComparisonRule::Logistic}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix q = random_symmetric(3, rng);
      const PayoffSpec payoff = PayoffSpec::quadratic_potential(q);
      const double beta = rng.uniform(0.5, 3.0);

      // Imitative occupancy: f_j(t) = t.
      const ProtocolSpec imit = ProtocolSpec::comparison(
          payoff, AttachmentSpec::imitative(ones_off_diagonal(3)), rule, beta);
      const SimplexPoint x = shrink_to_interior(random_simplex_point(3, rng), 0.01);
      const Vector grad = q * x.coords();
      Vector target(3);
      for (int i = 0; i < 3; ++i) target[i] = x[i] * std::exp(-beta * grad[i]);
      const SimplexPoint pi = SimplexPoint::from_normalized(target / target.sum());
      CHECK(is_reversible(imit.rate_matrix(x), pi, 1e-12));
      CHECK((imit.invariant_measure(x).coords() - pi.coords()).cwiseAbs().maxCoeff() < 1e-12);

      // Constant occupancy: f_j(t) = exp(-c_j).
      Vector c(3);
      for (int i = 0; i < 3; ++i) c[i] = rng.uniform(-0.5, 0.5);
      Matrix w = ones_off_diagonal(3);
      for (int j = 0; j < 3; ++j) w.col(j) *= std::exp(-c[j]);
      const ProtocolSpec scaled =
          ProtocolSpec::comparison(payoff, AttachmentSpec::constant(w), rule, beta);
      Vector target2(3);
      for (int i = 0; i < 3; ++i) target2[i] = std::exp(-c[i]) * std::exp(-beta * grad[i]);
      const SimplexPoint pi2 = SimplexPoint::from_normalized(target2 / target2.sum());
      CHECK(is_reversible(scaled.rate_matrix(x), pi2, 1e-12));
      CHECK((scaled.invariant_measure(x).coords() - pi2.coords()).cwiseAbs().maxCoeff() <
            1e-12);
    }
  }
}

TEST_CASE("imitative protocols keep boundary faces invariant") {
  // x_i = 0 forces L_ji(x) = 0 for every j.
  CounterRng rng(43);
  const ProtocolSpec imit = ProtocolSpec::comparison(
      PayoffSpec::linear(random_symmetric(3, rng)),
      AttachmentSpec::imitative(ones_off_diagonal(3)), ComparisonRule::Success, 1.0);
  const ProtocolSpec vrrw =
      ProtocolSpec::vertex_reinforcement(random_symmetric(3, rng, 0.5, 2.0), 1.0);
  CHECK(imit.is_imitative_boundary_preserving());
  CHECK(vrrw.is_imitative_boundary_preserving());

  Vector xv(3);
  xv << 0.0, 0.4, 0.6;
  const SimplexPoint x = SimplexPoint::validated(xv, 1e-12);
  for (const ProtocolSpec* spec : {&imit, &vrrw}) {
    const RateMatrix l = spec->rate_matrix(x);
    for (int j = 0; j < 3; ++j)
      if (j != 0) CHECK(l(j, 0) == 0.0);
  }
}

TEST_CASE("replicator protocol mean field is proportional to the replicator field") {
  const PayoffSpec rps = PayoffSpec::linear(rps_matrix());
  const ProtocolSpec spec = ProtocolSpec::replicator(rps);
  CounterRng rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const SimplexPoint x = shrink_to_interior(random_simplex_point(3, rng), 1e-3);
    const Vector mean_field = spec.rate_matrix(x).apply_left(x.coords());
    const Vector u = rps.payoff(x.coords());
    const Vector replicator = x.coords().cwiseProduct((u.array() - u.dot(x.coords())).matrix());
    // Proportional with the calibrated rate scale.
    const Vector scaled = replicator * spec.rate_scale();
    CHECK((mean_field - scaled).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("sampling transform errors") {
  const PayoffSpec rps = PayoffSpec::linear(rps_matrix());
  // Identity-on-positive requires positive payoffs; RPS payoffs change sign.
  const ProtocolSpec ident =
      ProtocolSpec::sampling(rps, AttachmentSpec::constant(Matrix::Ones(3, 3)),
                             SamplingTransform::IdentityPositive, 1.0);
  CHECK_THROWS_AS(ident.markov_kernel(SimplexPoint::barycenter(3)), DomainViolationError);

  // A zero attachment row makes the normalizer vanish.
  Matrix w = Matrix::Ones(3, 3);
  w.row(0).setZero();
  const ProtocolSpec zero_row = ProtocolSpec::sampling(
      rps, AttachmentSpec::constant(w), SamplingTransform::ExpBeta, 1.0);
  CHECK_THROWS_AS(zero_row.markov_kernel(SimplexPoint::barycenter(3)),
                  DegenerateDenominatorError);
}

TEST_CASE("invariant family matches the balance equation across kinds") {
  CounterRng rng(45);
  std::vector<ProtocolSpec> specs;
  specs.push_back(ProtocolSpec::gibbs_direct((Vector(3) << 0.3, -0.1, 0).finished(),
                                             random_symmetric(3, rng), 2.0));
  specs.push_back(ProtocolSpec::comparison(PayoffSpec::linear(random_symmetric(3, rng)),
                                           AttachmentSpec::constant(ones_off_diagonal(3)),
                                           ComparisonRule::Logistic, 1.5));
  specs.push_back(ProtocolSpec::vertex_reinforcement(random_symmetric(3, rng, 0.4, 2.0), 2.0));
  for (const ProtocolSpec& spec : specs) {
    REQUIRE(spec.has_invariant_family());
    for (int trial = 0; trial < 10; ++trial) {
      const SimplexPoint x = shrink_to_interior(random_simplex_point(3, rng), 0.01);
      const SimplexPoint pi = spec.invariant_measure(x);
      const RateMatrix l = spec.rate_matrix(x);
      CHECK(l.apply_left(pi.coords()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}
