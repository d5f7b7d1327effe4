#include "simplexflow/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "simplexflow/numerics.hpp"
#include "simplexflow/sampling.hpp"

namespace simplexflow {

// ---------------------------------------------------------------------------
// VectorFieldSpec

namespace {

// Cheap retraction for stepper stage points that drift off the simplex by
// roundoff: clamp negatives, renormalize.
Vector clamp_to_simplex(Vector x) {
  for (int i = 0; i < x.size(); ++i)
    if (x[i] < 0) x[i] = 0.0;
  const double s = x.sum();
  if (s <= 0) throw NumericError("state collapsed to the zero vector");
  return x / s;
}

}  // namespace

VectorFieldSpec VectorFieldSpec::generator(ProtocolSpec protocol) {
  VectorFieldSpec spec;
  spec.kind_ = Kind::GeneratorField;
  spec.n_ = protocol.dim();
  auto proto = std::make_shared<ProtocolSpec>(std::move(protocol));
  spec.rate_ = [proto](const SimplexPoint& x) { return proto->rate_matrix(x); };
  if (proto->has_invariant_family())
    spec.pi_ = [proto](const SimplexPoint& x) { return proto->invariant_measure(x); };
  spec.field_ = [proto](const Vector& x) -> Vector {
    const SimplexPoint p = SimplexPoint::from_normalized(x);
    return proto->rate_matrix(p).apply_left(p.coords());
  };
  return spec;
}

VectorFieldSpec VectorFieldSpec::generator(
    int n, std::function<RateMatrix(const SimplexPoint&)> rate, bool interior_only) {
  VectorFieldSpec spec;
  spec.kind_ = Kind::GeneratorField;
  spec.n_ = n;
  spec.interior_only_ = interior_only;
  spec.rate_ = rate;
  spec.field_ = [rate](const Vector& x) -> Vector {
    const SimplexPoint p = SimplexPoint::from_normalized(x);
    return rate(p).apply_left(p.coords());
  };
  return spec;
}

VectorFieldSpec VectorFieldSpec::pi_field(
    int n, std::function<SimplexPoint(const SimplexPoint&)> pi, bool interior_only) {
  VectorFieldSpec spec;
  spec.kind_ = Kind::PiField;
  spec.n_ = n;
  spec.interior_only_ = interior_only;
  spec.pi_ = pi;
  spec.field_ = [pi](const Vector& x) -> Vector {
    const SimplexPoint p = SimplexPoint::from_normalized(x);
    return pi(p).coords() - p.coords();
  };
  return spec;
}

VectorFieldSpec VectorFieldSpec::replicator(PayoffSpec payoff) {
  VectorFieldSpec spec;
  spec.kind_ = Kind::Replicator;
  spec.n_ = payoff.dim();
  auto pay = std::make_shared<PayoffSpec>(std::move(payoff));
  spec.field_ = [pay](const Vector& x) -> Vector {
    const Vector u = pay->payoff(x);
    const double mean = u.dot(x);
    return x.cwiseProduct((u.array() - mean).matrix());
  };
  return spec;
}

VectorFieldSpec VectorFieldSpec::explicit_field(int n,
                                                std::function<Vector(const Vector&)> field) {
  VectorFieldSpec spec;
  spec.kind_ = Kind::Explicit;
  spec.n_ = n;
  spec.field_ = std::move(field);
  return spec;
}

TangentVector VectorFieldSpec::operator()(const SimplexPoint& x) const {
  if (interior_only_ && !x.is_interior())
    throw DomainViolationError("field is only defined on the simplex interior");
  return TangentVector::validated(field_(x.coords()), 1e-10);
}

Vector VectorFieldSpec::eval_raw(const Vector& x) const { return field_(clamp_to_simplex(x)); }

TangentVector eval_field(const VectorFieldSpec& spec, const SimplexPoint& x) {
  return spec(x);
}

// ---------------------------------------------------------------------------
// Integrator: Dormand-Prince 5(4)

namespace {

constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
// Difference between the 5th and embedded 4th order weights.
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

}  // namespace

Trajectory integrate(const VectorFieldSpec& spec, const SimplexPoint& x0, double t_end,
                     const IntegrateOptions& opts) {
  if (!(t_end > 0)) throw InputError("integration horizon must be positive");
  const int n = spec.dim();
  if (x0.dim() != n) throw DimensionMismatchError("initial state dimension mismatch");

  std::vector<double> samples = opts.sample_times;
  std::sort(samples.begin(), samples.end());
  samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
  while (!samples.empty() && samples.back() > t_end) samples.pop_back();
  const bool record_all = samples.empty();
  std::size_t next_sample = 0;
  while (next_sample < samples.size() && samples[next_sample] <= 0.0) ++next_sample;

  Trajectory traj;
  Vector y = x0.coords();
  double t = 0.0;
  traj.times.push_back(0.0);
  traj.states.push_back(y);

  Vector f0 = spec.eval_raw(y);
  double h = opts.initial_step;
  if (h <= 0) {
    const double scale = f0.cwiseAbs().maxCoeff() + 1e-8;
    h = std::min(0.01 * t_end, 0.1 / scale);
  }
  const double h_max = opts.max_step > 0 ? opts.max_step : t_end;

  std::size_t steps = 0;
  while (t < t_end) {
    if (++steps > opts.max_steps) throw NumericError("integrator exceeded max step count");
    h = std::min({h, h_max, t_end - t});
    if (next_sample < samples.size()) {
      const double gap = samples[next_sample] - t;
      if (gap >= 10 * opts.min_step) h = std::min(h, gap);
    }
    if (h < opts.min_step) throw StepsizeUnderflowError(t);

    const Vector k1 = spec.eval_raw(y);
    const Vector k2 = spec.eval_raw(y + h * (kA21 * k1));
    const Vector k3 = spec.eval_raw(y + h * (kA31 * k1 + kA32 * k2));
    const Vector k4 = spec.eval_raw(y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
    const Vector k5 = spec.eval_raw(y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
    const Vector k6 =
        spec.eval_raw(y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
    Vector y5 = y + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    const Vector k7 = spec.eval_raw(y5);
    const Vector err_vec =
        h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      const double scale =
          opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      const double r = err_vec[i] / scale;
      err += r * r;
    }
    err = std::sqrt(err / n);

    const double excursion = -std::min(0.0, y5.minCoeff());
    if (err > 1.0 || excursion > 1e-12) {
      // Reject: shrink and retry (also handles simplex excursions).
      const double shrink =
          err > 1.0 ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.5;
      h *= shrink;
      continue;
    }

    // Accepted: clamp roundoff negatives, renormalize the mass exactly.
    for (int i = 0; i < n; ++i)
      if (y5[i] < 0) y5[i] = 0.0;
    y5 /= y5.sum();

    t += h;
    y = y5;
    traj.accepted_steps.push_back(h);
    traj.error_estimates.push_back(err);

    bool record = record_all;
    while (next_sample < samples.size() &&
           samples[next_sample] <= t + 1e-11 * std::max(1.0, std::abs(t))) {
      record = true;
      ++next_sample;
    }
    if (t >= t_end) record = true;
    if (record && t > traj.times.back()) {
      traj.times.push_back(t);
      traj.states.push_back(y);
    }

    h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Newton solvers

std::string stability_tag(Stability s) {
  switch (s) {
    case Stability::Sink: return "sink";
    case Stability::Source: return "source";
    case Stability::Saddle: return "saddle";
    case Stability::Nonhyperbolic: return "nonhyperbolic";
  }
  return "";
}

namespace {

struct NewtonOutcome {
  bool converged = false;
  Vector root;  // ambient coordinates
  double residual = 0.0;
};

// Damped Newton on the chart for residual(y) = 0, iterates confined to the
// open simplex by step shortening.
NewtonOutcome newton_on_chart(const std::function<Vector(const Vector&)>& residual_chart,
                              const ChartProjection& chart, const Vector& seed_ambient,
                              const NewtonOptions& opts) {
  NewtonOutcome out;
  Vector y = chart.project_point(seed_ambient);
  Vector r = residual_chart(y);
  double rnorm = r.norm();
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (rnorm <= opts.tol) {
      out.converged = true;
      out.root = chart.embed_point(y);
      out.residual = rnorm;
      return out;
    }
    const double fd = 1e-7 * std::max(1.0, y.cwiseAbs().maxCoeff());
    const Matrix jac = fd_jacobian(residual_chart, y, fd);
    Eigen::FullPivLU<Matrix> lu(jac);
    if (!lu.isInvertible()) return out;
    const Vector step = lu.solve(-r);
    double lambda = 1.0;
    bool improved = false;
    for (int halving = 0; halving <= opts.max_halvings; ++halving) {
      const Vector trial = y + lambda * step;
      const Vector ambient = chart.embed_point(trial);
      if (ambient.minCoeff() > 0.0) {
        const Vector rt = residual_chart(trial);
        const double rtnorm = rt.norm();
        if (rtnorm < rnorm) {
          y = trial;
          r = rt;
          rnorm = rtnorm;
          improved = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!improved) return out;
  }
  if (rnorm <= opts.tol) {
    out.converged = true;
    out.root = chart.embed_point(y);
    out.residual = rnorm;
  }
  return out;
}

std::vector<SimplexPoint> newton_seed_set(int n, const std::vector<SimplexPoint>& user,
                                          bool include_grid) {
  std::vector<SimplexPoint> seeds = user;
  if (include_grid) {
    int grid = 1;
    for (int k = 1; k < n; ++k) grid *= 10;
    for (const SimplexPoint& p : simplex_grid(n, grid))
      seeds.push_back(shrink_to_interior(p, 1e-4 / n));
  }
  return seeds;
}

}  // namespace

FindEquilibriaResult find_equilibria(
    const std::function<SimplexPoint(const SimplexPoint&)>& pi_eval, int n,
    const std::vector<SimplexPoint>& seeds, const NewtonOptions& opts) {
  const ChartProjection chart = ChartProjection::drop_last(n);
  auto residual_chart = [&](const Vector& y) -> Vector {
    const Vector x = chart.embed_point(y);
    const SimplexPoint p = SimplexPoint::from_normalized(x);
    return chart.project_tangent(p.coords() - pi_eval(p).coords());
  };

  FindEquilibriaResult result;
  std::vector<Vector> roots;
  for (const SimplexPoint& seed : newton_seed_set(n, seeds, opts.include_grid)) {
    ++result.seeds_tried;
    const NewtonOutcome out = newton_on_chart(residual_chart, chart, seed.coords(), opts);
    if (!out.converged) {
      ++result.seeds_dropped;
      continue;
    }
    bool duplicate = false;
    for (const Vector& r : roots)
      if ((r - out.root).norm() < opts.dedup_distance) {
        duplicate = true;
        break;
      }
    if (!duplicate) roots.push_back(out.root);
  }

  VectorFieldSpec field = VectorFieldSpec::pi_field(n, pi_eval);
  for (const Vector& r : roots) {
    result.reports.push_back(classify_equilibrium(field, SimplexPoint::from_normalized(r)));
  }
  std::sort(result.reports.begin(), result.reports.end(),
            [](const EquilibriumReport& a, const EquilibriumReport& b) {
              return std::lexicographical_compare(
                  a.location.coords().data(), a.location.coords().data() + a.location.dim(),
                  b.location.coords().data(), b.location.coords().data() + b.location.dim());
            });
  return result;
}

FindEquilibriaResult find_field_zeros(const VectorFieldSpec& spec,
                                      const std::vector<SimplexPoint>& seeds,
                                      const NewtonOptions& opts) {
  const int n = spec.dim();
  const ChartProjection chart = ChartProjection::drop_last(n);
  auto residual_chart = [&](const Vector& y) -> Vector {
    return chart.project_tangent(spec.eval_raw(chart.embed_point(y)));
  };

  FindEquilibriaResult result;
  std::vector<Vector> roots;
  for (const SimplexPoint& seed : newton_seed_set(n, seeds, opts.include_grid)) {
    ++result.seeds_tried;
    const NewtonOutcome out = newton_on_chart(residual_chart, chart, seed.coords(), opts);
    if (!out.converged) {
      ++result.seeds_dropped;
      continue;
    }
    if (out.root.minCoeff() < opts.boundary_floor) continue;  // boundary zero
    bool duplicate = false;
    for (const Vector& r : roots)
      if ((r - out.root).norm() < opts.dedup_distance) {
        duplicate = true;
        break;
      }
    if (!duplicate) roots.push_back(out.root);
  }
  for (const Vector& r : roots)
    result.reports.push_back(classify_equilibrium(spec, SimplexPoint::from_normalized(r)));
  return result;
}

// ---------------------------------------------------------------------------
// Jacobians and classification

namespace {

Matrix fd_chart_jacobian(const VectorFieldSpec& spec, const SimplexPoint& p,
                         const ChartProjection& chart, double step) {
  auto field_chart = [&](const Vector& y) -> Vector {
    return chart.project_tangent(spec.eval_raw(chart.embed_point(y)));
  };
  return fd_jacobian(field_chart, chart.project_point(p.coords()), step);
}

}  // namespace

Matrix jacobian_factorized(const VectorFieldSpec& spec, const SimplexPoint& p,
                           const ChartProjection& chart, double fd_step) {
  if (!spec.has_rate() || !spec.has_pi())
    throw InputError("factorized Jacobian needs a generator field with an invariant family");
  const double res = spec.eval_raw(p.coords()).norm();
  if (res > 1e-8) throw NotAnEquilibriumError(res);
  const RateMatrix L = spec.rate(p);
  const Matrix lt_chart = chart.operator_matrix(
      [&](const Vector& u) -> Vector { return L.apply_left(u); });
  const VectorFieldSpec pif = VectorFieldSpec::pi_field(
      spec.dim(), [&spec](const SimplexPoint& x) { return spec.pi(x); });
  const Matrix dfpi_chart = fd_chart_jacobian(pif, p, chart, fd_step);
  return -lt_chart * dfpi_chart;
}

Matrix jacobian(const VectorFieldSpec& spec, const SimplexPoint& p,
                const ChartProjection& chart, const JacobianOptions& opts) {
  const double step = opts.fd_step * std::max(1.0, p.coords().norm());
  const Matrix fd = fd_chart_jacobian(spec, p, chart, step);
  if (opts.cross_check_factorization && spec.kind() == VectorFieldSpec::Kind::GeneratorField &&
      spec.has_pi() && spec.eval_raw(p.coords()).norm() <= 1e-8) {
    const Matrix fac = jacobian_factorized(spec, p, chart, opts.fd_step);
    const double diff = (fd - fac).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, fac.cwiseAbs().maxCoeff());
    if (diff > opts.factorization_tol * scale)
      throw NumericError("Jacobian routes disagree by " + std::to_string(diff));
  }
  return fd;
}

EquilibriumReport classify_equilibrium(const VectorFieldSpec& spec, const SimplexPoint& p,
                                       double hyperbolicity_threshold) {
  const double residual = spec.eval_raw(p.coords()).norm();
  if (residual > 1e-8) throw NotAnEquilibriumError(residual);
  const int n = spec.dim();
  const ChartProjection chart = ChartProjection::drop_last(n);
  const Matrix jac = jacobian(spec, p, chart);
  Eigen::EigenSolver<Matrix> es(jac);

  EquilibriumReport report;
  report.location = p;
  report.residual = residual;
  for (int i = 0; i < n - 1; ++i) report.spectrum.push_back(es.eigenvalues()[i]);
  std::sort(report.spectrum.begin(), report.spectrum.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (a.real() != b.real()) return a.real() > b.real();
              return a.imag() > b.imag();
            });

  bool hyperbolic = true;
  int unstable = 0;
  for (const auto& ev : report.spectrum) {
    if (std::abs(ev.real()) <= hyperbolicity_threshold) hyperbolic = false;
    if (ev.real() > hyperbolicity_threshold) ++unstable;
  }
  report.unstable_dim = unstable;
  if (!hyperbolic)
    report.classification = Stability::Nonhyperbolic;
  else if (unstable == 0)
    report.classification = Stability::Sink;
  else if (unstable == n - 1)
    report.classification = Stability::Source;
  else
    report.classification = Stability::Saddle;
  return report;
}

// ---------------------------------------------------------------------------
// Omega limit analysis

std::string verdict_tag(OmegaLimitSummary::Verdict v) {
  switch (v) {
    case OmegaLimitSummary::Verdict::FixedPoint: return "fixed-point";
    case OmegaLimitSummary::Verdict::Periodic: return "periodic";
    case OmegaLimitSummary::Verdict::Undecided: return "undecided";
  }
  return "";
}

OmegaLimitSummary omega_limit_summary(const Trajectory& traj, const OmegaLimitOptions& opts) {
  OmegaLimitSummary summary;
  if (traj.size() < 8) return summary;
  const double t0 = traj.times.front();
  const double t1 = traj.times.back();
  const double range = t1 - t0;
  const double window = opts.window > 0 ? opts.window : 0.4 * range;
  const double burn_in = opts.burn_in > 0 ? opts.burn_in : range - window;
  if (burn_in + window > range + 1e-9)
    throw InputError("trajectory too short for the omega-limit window");

  std::size_t start = 0;
  while (start < traj.size() && traj.times[start] < t1 - window) ++start;
  const std::size_t m = traj.size() - start;
  if (m < 4) return summary;
  const int n = static_cast<int>(traj.states.front().size());

  // Bounding-box diameter of the tail.
  Vector lo = traj.states[start], hi = traj.states[start];
  Vector mean = Vector::Zero(n);
  for (std::size_t k = start; k < traj.size(); ++k) {
    lo = lo.cwiseMin(traj.states[k]);
    hi = hi.cwiseMax(traj.states[k]);
    mean += traj.states[k];
  }
  mean /= static_cast<double>(m);
  summary.tail_diameter = (hi - lo).maxCoeff();

  if (summary.tail_diameter <= opts.fixed_point_diameter) {
    summary.verdict = OmegaLimitSummary::Verdict::FixedPoint;
    summary.fixed_point = SimplexPoint::from_normalized(mean);
    return summary;
  }

  // Poincare section through the tail mean, oriented by the motion at the
  // end of the tail.
  Vector normal = traj.states.back() - traj.states[traj.size() - 2];
  if (normal.norm() == 0) return summary;
  normal.normalize();

  std::vector<double> cross_times;
  std::vector<Vector> cross_points;
  double prev_g = (traj.states[start] - mean).dot(normal);
  for (std::size_t k = start + 1; k < traj.size(); ++k) {
    const double g = (traj.states[k] - mean).dot(normal);
    if (prev_g < 0.0 && g >= 0.0) {
      const double w = -prev_g / (g - prev_g);
      cross_times.push_back(traj.times[k - 1] + w * (traj.times[k] - traj.times[k - 1]));
      cross_points.push_back(traj.states[k - 1] + w * (traj.states[k] - traj.states[k - 1]));
    }
    prev_g = g;
  }

  if (cross_times.size() < 3) return summary;

  std::vector<double> periods;
  for (std::size_t k = 1; k < cross_times.size(); ++k)
    periods.push_back(cross_times[k] - cross_times[k - 1]);
  const double period =
      std::accumulate(periods.begin(), periods.end(), 0.0) / periods.size();
  double period_dev = 0.0;
  for (double p : periods) period_dev = std::max(period_dev, std::abs(p - period));

  // Return-point spread, discarding the first crossing (still relaxing onto
  // the limit set).
  Vector clo = cross_points[1], chi = cross_points[1];
  for (std::size_t k = 1; k < cross_points.size(); ++k) {
    clo = clo.cwiseMin(cross_points[k]);
    chi = chi.cwiseMax(cross_points[k]);
  }
  summary.return_point_spread = (chi - clo).maxCoeff();

  if (period_dev <= opts.period_agreement * period &&
      summary.return_point_spread <= opts.return_spread) {
    summary.verdict = OmegaLimitSummary::Verdict::Periodic;
    summary.period = period;
    const double orbit_start = cross_times[cross_times.size() - 2];
    for (std::size_t k = start; k < traj.size(); ++k)
      if (traj.times[k] >= orbit_start && traj.times[k] <= orbit_start + period)
        summary.orbit_sample.push_back(traj.states[k]);
  }
  return summary;
}

// ---------------------------------------------------------------------------
// Counterexample construction

CounterexampleSystem build_counterexample(double eta, double epsilon, const Matrix& w) {
  if (w.rows() != 3 || w.cols() != 3)
    throw DimensionMismatchError("counterexample is a 3-strategy construction");
  if (!(eta > 0)) throw InputError("eta must be positive");
  if (!(epsilon > 0)) throw InputError("epsilon must be positive");

  const Vector p = Vector::Constant(3, 1.0 / 3);
  Matrix spiral_matrix(2, 2);
  spiral_matrix << -eta, -1.0, 1.0, -eta;

  // Cutoff in terms of the smooth boundary gauge s(x) = 27 x1 x2 x3: zero on
  // s >= 0.45 (contains the inner half of the simplex, so DG(p) is exactly
  // the spiral), one on s <= 0.15.
  auto blend = [](const Vector& x) {
    const double s = 27.0 * x[0] * x[1] * x[2];
    return smooth_step((0.45 - s) / 0.3);
  };

  auto spiral = [spiral_matrix, p, blend](const Vector& x) -> Vector {
    Eigen::Vector2d y(x[0] - p[0], x[1] - p[1]);
    Eigen::Vector2d g2 = spiral_matrix * y;
    Vector g(3);
    g << g2[0], g2[1], -g2[0] - g2[1];
    const double lam = blend(x);
    return (1.0 - lam) * g + lam * (p - x);
  };

  auto pi = [spiral, epsilon](const SimplexPoint& x) -> SimplexPoint {
    Vector y = x.coords() + epsilon * spiral(x.coords());
    if (y.minCoeff() <= 0)
      throw EpsilonTooLargeError("pi(x) left the open simplex");
    return SimplexPoint::from_normalized(std::move(y));
  };

  // Validation grid: the target map must stay in the open simplex.
  {
    std::vector<SimplexPoint> grid = simplex_grid(3, 2000);
    for (int i = 0; i < 3; ++i) grid.push_back(SimplexPoint::vertex(3, i));
    for (const SimplexPoint& x : grid) {
      const Vector y = x.coords() + epsilon * spiral(x.coords());
      if (y.minCoeff() <= 1e-9)
        throw EpsilonTooLargeError("epsilon G(x) + x leaves the open simplex on the grid");
    }
  }

  CounterexampleSystem sys;
  sys.eta = eta;
  sys.epsilon = epsilon;
  sys.exchange = w;
  sys.pi = pi;
  sys.spiral = [spiral](const Vector& x) { return spiral(x); };
  sys.generator_field =
      VectorFieldSpec::generator(ProtocolSpec::reversible_from_target(w, pi));
  sys.pi_field_spec = VectorFieldSpec::pi_field(3, pi);
  return sys;
}

}  // namespace simplexflow
