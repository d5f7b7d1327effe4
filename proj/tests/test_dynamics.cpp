#include <doctest.h>

#include <cmath>

#include "simplexflow/dynamics.hpp"
#include "simplexflow/markov.hpp"
#include "simplexflow/numerics.hpp"
#include "simplexflow/rng.hpp"
#include "simplexflow/sampling.hpp"

using namespace simplexflow;

namespace {

Matrix rps_matrix() {
  Matrix u(3, 3);
  u << 0, -1, 1, 1, 0, -1, -1, 1, 0;
  return u;
}

Matrix random_symmetric(int n, CounterRng& rng, double lo = -1, double hi = 1) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m(i, j) = m(j, i) = rng.uniform(lo, hi);
  return m;
}

Matrix counterexample_w() {
  Matrix w(3, 3);
  w << 0, 1, 2, 1, 0, 1, 2, 1, 0;
  return w;
}

VectorFieldSpec constant_pi_field(const SimplexPoint& pi) {
  return VectorFieldSpec::pi_field(pi.dim(), [pi](const SimplexPoint&) { return pi; });
}

ProtocolSpec metropolis_gibbs(const Vector& u0, const Matrix& coupling, double beta) {
  // Comparison protocol reversible w.r.t. the Gibbs measure of (u0, U, beta):
  // payoff -(Ux), attachment w_ij = exp(-u0_j) wtilde_ij with wtilde = ones.
  const int n = static_cast<int>(u0.size());
  Matrix w = Matrix::Ones(n, n);
  w.diagonal().setZero();
  for (int j = 0; j < n; ++j) w.col(j) *= std::exp(-u0[j]);
  return ProtocolSpec::comparison(PayoffSpec::linear(-coupling), AttachmentSpec::constant(w),
                                  ComparisonRule::Metropolis, beta);
}

}  // namespace

TEST_CASE("field values are tangent and vanish at fixed points of pi") {
  CounterRng rng(51);
  const SimplexPoint target = shrink_to_interior(random_simplex_point(3, rng), 0.05);
  const VectorFieldSpec field = constant_pi_field(target);
  CHECK(eval_field(field, target).norm() < 1e-15);
  for (int trial = 0; trial < 20; ++trial) {
    const SimplexPoint x = random_simplex_point(3, rng);
    const TangentVector v = eval_field(field, x);
    CHECK(std::abs(v.coords().sum()) < 1e-12);
  }
}

TEST_CASE("replicator field: barycenter is the unique interior zero for RPS") {
  const VectorFieldSpec field = VectorFieldSpec::replicator(PayoffSpec::linear(rps_matrix()));
  CHECK(eval_field(field, SimplexPoint::barycenter(3)).norm() < 1e-15);
  const FindEquilibriaResult zeros = find_field_zeros(field);
  REQUIRE(zeros.reports.size() == 1);
  CHECK((zeros.reports[0].location.coords() - Vector::Constant(3, 1.0 / 3))
            .cwiseAbs()
            .maxCoeff() < 1e-9);
}

TEST_CASE("integrate matches the closed form for a constant target") {
  // x(t) = pi + e^-t (x0 - pi).
  CounterRng rng(52);
  const SimplexPoint pi = shrink_to_interior(random_simplex_point(4, rng), 0.03);
  const SimplexPoint x0 = shrink_to_interior(random_simplex_point(4, rng), 0.03);
  IntegrateOptions opts;
  opts.sample_times = {0.5, 1.0, 5.0};
  const Trajectory traj = integrate(constant_pi_field(pi), x0, 5.0, opts);
  REQUIRE(traj.times.size() == 4);
  for (std::size_t k = 1; k < traj.times.size(); ++k) {
    const double t = traj.times[k];
    const Vector expected = pi.coords() + std::exp(-t) * (x0.coords() - pi.coords());
    CHECK((traj.states[k] - expected).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("trajectories respect the exponential positivity bound") {
  CounterRng rng(53);
  const ProtocolSpec proto = ProtocolSpec::gibbs_direct((Vector(3) << 0.2, -0.1, 0.4).finished(),
                                                        random_symmetric(3, rng), 1.0);
  const VectorFieldSpec field = VectorFieldSpec::generator(proto);
  const SimplexPoint x0 =
      SimplexPoint::validated((Vector(3) << 0.05, 0.9, 0.05).finished(), 1e-9);
  const Trajectory traj = integrate(field, x0, 3.0);
  double alpha = 0.0;
  for (const Vector& state : traj.states) {
    const RateMatrix l = proto.rate_matrix(SimplexPoint::from_normalized(state));
    alpha = std::max(alpha, -l.entries().diagonal().minCoeff());
  }
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double bound = std::exp(-alpha * traj.times[k]);
    for (int i = 0; i < 3; ++i) CHECK(traj.states[k][i] >= bound * x0[i] - 1e-9);
  }
}

TEST_CASE("trajectories stay in the simplex for random Gibbs systems") {
  CounterRng rng(54);
  for (int scenario = 0; scenario < 20; ++scenario) {
    const ProtocolSpec proto =
        ProtocolSpec::gibbs_direct(Vector::Zero(3), random_symmetric(3, rng), rng.uniform(0, 4));
    const VectorFieldSpec field = VectorFieldSpec::generator(proto);
    const SimplexPoint x0 = random_simplex_point(3, rng);
    IntegrateOptions opts;
    opts.sample_times = {0.5, 1, 2, 5, 10, 20};
    const Trajectory traj = integrate(field, x0, 20.0, opts);
    for (const Vector& state : traj.states) {
      CHECK(state.minCoeff() >= 0.0);
      CHECK(std::abs(state.sum() - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("integrate reports step size underflow") {
  const VectorFieldSpec field = constant_pi_field(SimplexPoint::barycenter(2));
  IntegrateOptions opts;
  opts.min_step = 0.5;
  opts.initial_step = 0.01;
  CHECK_THROWS_AS(integrate(field, SimplexPoint::vertex(2, 0), 1.0, opts),
                  StepsizeUnderflowError);
}

TEST_CASE("find_equilibria: constant target has exactly one root") {
  const SimplexPoint pi =
      SimplexPoint::validated((Vector(3) << 0.5, 0.2, 0.3).finished(), 1e-12);
  const FindEquilibriaResult result =
      find_equilibria([pi](const SimplexPoint&) { return pi; }, 3);
  REQUIRE(result.reports.size() == 1);
  CHECK((result.reports[0].location.coords() - pi.coords()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(result.reports[0].classification == Stability::Sink);
  CHECK(result.reports[0].unstable_dim == 0);
  for (const auto& ev : result.reports[0].spectrum)
    CHECK(ev.real() == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("find_equilibria: Gibbs at beta zero is the softmax point") {
  const Vector u0 = (Vector(3) << 0.7, -0.3, 0.1).finished();
  CounterRng rng(55);
  const Matrix u = random_symmetric(3, rng);
  const auto pi_eval = [&](const SimplexPoint& x) { return gibbs_measure(u0, u, 0.0, x); };
  const FindEquilibriaResult result = find_equilibria(pi_eval, 3);
  REQUIRE(result.reports.size() == 1);
  Vector softmax = (-u0.array()).exp();
  softmax /= softmax.sum();
  CHECK((result.reports[0].location.coords() - softmax).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("generator and target fields share equilibria and nondegeneracy") {
  CounterRng rng(56);
  for (int scenario = 0; scenario < 5; ++scenario) {
    const Vector u0 = Vector::Zero(3);
    const Matrix u = random_symmetric(3, rng, -1.5, 1.5);
    const double beta = rng.uniform(0.5, 3.0);
    const ProtocolSpec proto = metropolis_gibbs(u0, u, beta);
    REQUIRE(proto.has_invariant_family());
    const VectorFieldSpec gen = VectorFieldSpec::generator(proto);
    const auto pi_eval = [&proto](const SimplexPoint& x) { return proto.invariant_measure(x); };

    const FindEquilibriaResult pi_roots = find_equilibria(pi_eval, 3);
    const FindEquilibriaResult gen_roots = find_field_zeros(gen);
    REQUIRE(pi_roots.reports.size() == gen_roots.reports.size());
    const ChartProjection chart = ChartProjection::drop_last(3);
    for (const EquilibriumReport& r : pi_roots.reports) {
      double best = 1e9;
      const EquilibriumReport* match = nullptr;
      for (const EquilibriumReport& g : gen_roots.reports) {
        const double d = (g.location.coords() - r.location.coords()).norm();
        if (d < best) {
          best = d;
          match = &g;
        }
      }
      REQUIRE(match != nullptr);
      CHECK(best < 1e-8);

      // det(DF) = det(-L^T) det(DF_pi) ties the two notions of
      // nondegeneracy together.
      const SimplexPoint p = r.location;
      const Matrix jf = jacobian(gen, p, chart);
      const VectorFieldSpec pif = VectorFieldSpec::pi_field(3, pi_eval);
      const Matrix jpi = jacobian(pif, p, chart);
      const RateMatrix l = proto.rate_matrix(p);
      const Matrix lt = chart.operator_matrix(
          [&](const Vector& t) -> Vector { return l.apply_left(t); });
      const double lhs = jf.determinant();
      const double rhs = (-lt).determinant() * jpi.determinant();
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-5));
    }
  }
}

TEST_CASE("jacobian of a constant-target field is minus the identity") {
  const SimplexPoint pi =
      SimplexPoint::validated((Vector(3) << 0.25, 0.4, 0.35).finished(), 1e-12);
  const Matrix j = jacobian(constant_pi_field(pi), pi, ChartProjection::drop_last(3));
  CHECK((j + Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("factorized jacobian agrees with finite differences at equilibria") {
  CounterRng rng(57);
  for (int scenario = 0; scenario < 5; ++scenario) {
    const ProtocolSpec proto = metropolis_gibbs(Vector::Zero(3),
                                                random_symmetric(3, rng), rng.uniform(0.5, 2.5));
    const VectorFieldSpec gen = VectorFieldSpec::generator(proto);
    const auto pi_eval = [&proto](const SimplexPoint& x) { return proto.invariant_measure(x); };
    const FindEquilibriaResult roots = find_equilibria(pi_eval, 3);
    REQUIRE(!roots.reports.empty());
    const ChartProjection chart = ChartProjection::drop_last(3);
    for (const EquilibriumReport& r : roots.reports) {
      const Matrix fd = jacobian(gen, r.location, chart);  // includes the internal cross-check
      const Matrix fac = jacobian_factorized(gen, r.location, chart);
      CHECK((fd - fac).cwiseAbs().maxCoeff() <
            1e-5 * std::max(1.0, fac.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("factorized jacobian rejects non-equilibria") {
  const ProtocolSpec proto = metropolis_gibbs(Vector::Zero(3), rps_matrix() * 0.0, 1.0);
  const VectorFieldSpec gen = VectorFieldSpec::generator(proto);
  const SimplexPoint off =
      SimplexPoint::validated((Vector(3) << 0.7, 0.2, 0.1).finished(), 1e-12);
  // Zero coupling: pi is uniform, so off-center points are far from rest.
  CHECK_THROWS_AS(jacobian_factorized(gen, off, ChartProjection::drop_last(3)),
                  NotAnEquilibriumError);
}

TEST_CASE("classification at reversible equilibria has a real spectrum") {
  CounterRng rng(58);
  for (int scenario = 0; scenario < 5; ++scenario) {
    const ProtocolSpec proto =
        metropolis_gibbs(Vector::Zero(3), random_symmetric(3, rng), rng.uniform(0.5, 3.0));
    const auto pi_eval = [&proto](const SimplexPoint& x) { return proto.invariant_measure(x); };
    const VectorFieldSpec gen = VectorFieldSpec::generator(proto);
    for (const EquilibriumReport& r : find_equilibria(pi_eval, 3).reports) {
      const EquilibriumReport cls = classify_equilibrium(gen, r.location);
      for (const auto& ev : cls.spectrum) CHECK(std::abs(ev.imag()) <= 1e-8);
    }
  }
}

TEST_CASE("omega limit of a contracting system is its fixed point") {
  const SimplexPoint pi =
      SimplexPoint::validated((Vector(3) << 0.3, 0.45, 0.25).finished(), 1e-12);
  CounterRng rng(59);
  const SimplexPoint x0 = random_simplex_point(3, rng);
  const Trajectory traj = integrate(constant_pi_field(pi), x0, 60.0);
  const OmegaLimitSummary omega = omega_limit_summary(traj);
  REQUIRE(omega.verdict == OmegaLimitSummary::Verdict::FixedPoint);
  CHECK((omega.fixed_point->coords() - pi.coords()).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("omega limit of the RPS replicator is periodic") {
  const VectorFieldSpec field = VectorFieldSpec::replicator(PayoffSpec::linear(rps_matrix()));
  const SimplexPoint x0 =
      SimplexPoint::validated((Vector(3) << 0.5, 0.25, 0.25).finished(), 1e-12);
  const Trajectory traj = integrate(field, x0, 120.0);
  OmegaLimitOptions opts;
  opts.window = 60.0;
  const OmegaLimitSummary omega = omega_limit_summary(traj, opts);
  REQUIRE(omega.verdict == OmegaLimitSummary::Verdict::Periodic);
  CHECK(*omega.period > 1.0);
  CHECK_FALSE(omega.orbit_sample.empty());
}

TEST_CASE("counterexample: spiral linearization and instability transfer") {
  const double eta = 0.05, eps = 0.1;
  const CounterexampleSystem sys = build_counterexample(eta, eps, counterexample_w());
  const SimplexPoint p = SimplexPoint::barycenter(3);
  const ChartProjection chart = ChartProjection::drop_last(3);

  // jDG(p)j^-1 equals the spiral matrix.
  auto g_chart = [&](const Vector& y) -> Vector {
    return chart.project_tangent(sys.spiral(chart.embed_point(y)));
  };
  Matrix expected(2, 2);
  expected << -eta, -1, 1, -eta;
  const Matrix dg = fd_jacobian(g_chart, chart.project_point(p.coords()), 1e-6);
  CHECK((dg - expected).cwiseAbs().maxCoeff() < 1e-8);

  // Trace identity for DF(p).
  const Matrix jf = jacobian(sys.generator_field, p, chart);
  const double b = eps / 3 * 1, c = eps / 3 * 2, d = eps / 3 * 1;
  CHECK(std::abs(jf.trace() - ((c - d) - 2 * eta * (b + c + d))) < 1e-8);

  // The target field is linearly stable at p while F is unstable.
  const EquilibriumReport pi_cls = classify_equilibrium(sys.pi_field_spec, p);
  CHECK(pi_cls.classification == Stability::Sink);
  const EquilibriumReport f_cls = classify_equilibrium(sys.generator_field, p);
  CHECK(f_cls.unstable_dim > 0);
}

TEST_CASE("counterexample: target dynamics converge, generator dynamics cycle") {
  const CounterexampleSystem sys = build_counterexample(0.05, 0.1, counterexample_w());
  const SimplexPoint p = SimplexPoint::barycenter(3);
  CounterRng rng(60);
  IntegrateOptions fast;
  fast.rel_tol = 1e-8;
  for (int k = 0; k < 3; ++k) {
    const SimplexPoint x0 = random_simplex_point(3, rng);
    const Trajectory traj = integrate(sys.pi_field_spec, x0, 5000.0, fast);
    const OmegaLimitSummary omega = omega_limit_summary(traj);
    REQUIRE(omega.verdict == OmegaLimitSummary::Verdict::FixedPoint);
    CHECK((omega.fixed_point->coords() - p.coords()).cwiseAbs().maxCoeff() < 1e-5);
  }

  const SimplexPoint start =
      SimplexPoint::validated((Vector(3) << 0.5, 0.3, 0.2).finished(), 1e-12);
  const Trajectory traj = integrate(sys.generator_field, start, 900.0);
  const OmegaLimitSummary omega = omega_limit_summary(traj);
  REQUIRE(omega.verdict == OmegaLimitSummary::Verdict::Periodic);
}

TEST_CASE("counterexample rejects an epsilon that escapes the simplex") {
  CHECK_THROWS_AS(build_counterexample(0.05, 2.5, counterexample_w()), EpsilonTooLargeError);
}

TEST_CASE("interior attraction from boundary starts") {
  CounterRng rng(61);
  const ProtocolSpec proto =
      ProtocolSpec::gibbs_direct(Vector::Zero(3), random_symmetric(3, rng), 1.0);
  const VectorFieldSpec field = VectorFieldSpec::generator(proto);
  for (int v = 0; v < 3; ++v) {
    IntegrateOptions opts;
    opts.sample_times = {0.1};
    const Trajectory traj = integrate(field, SimplexPoint::vertex(3, v), 0.1, opts);
    CHECK(traj.states.back().minCoeff() > 0.0);
  }
}
