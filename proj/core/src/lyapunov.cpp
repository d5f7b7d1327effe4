#include "simplexflow/lyapunov.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <memory>

#include "simplexflow/markov.hpp"
#include "simplexflow/numerics.hpp"
#include "simplexflow/sampling.hpp"

namespace simplexflow {

namespace {

Vector project_tangential(Vector g) {
  g.array() -= g.mean();
  return g;
}

}  // namespace

Vector transform_h(const std::function<SimplexPoint(const SimplexPoint&)>& pi_eval,
                   const MonotoneTransform& s, const SimplexPoint& x) {
  if (!x.is_interior()) throw BoundaryPointError("transform_h needs an interior point");
  const SimplexPoint pi = pi_eval(x);
  if (!pi.is_interior()) throw BoundaryPointError("transform_h needs pi(x) interior");
  Vector h(x.dim());
  for (int i = 0; i < x.dim(); ++i) h[i] = s(x[i] / pi[i]);
  return h;
}

double free_energy(const Vector& u0, const Matrix& coupling, double beta,
                   const SimplexPoint& x) {
  if (!x.is_interior()) throw BoundaryPointError("free energy needs an interior point");
  if ((coupling - coupling.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw AsymmetricMatrixError("free energy coupling must be symmetric");
  double v = 0.0;
  for (int i = 0; i < x.dim(); ++i) v += x[i] * std::log(x[i]);
  v += u0.dot(x.coords());
  v += 0.5 * beta * x.coords().dot(coupling * x.coords());
  return v;
}

// ---------------------------------------------------------------------------
// OccupancyWeight

OccupancyWeight OccupancyWeight::one(int n) {
  OccupancyWeight f;
  f.kind_ = Kind::One;
  f.n_ = n;
  return f;
}

OccupancyWeight OccupancyWeight::power(int n, double a) {
  if (!(a > 0)) throw InputError("power occupancy weight needs a > 0");
  OccupancyWeight f;
  f.kind_ = Kind::Power;
  f.n_ = n;
  f.a_ = a;
  return f;
}

OccupancyWeight OccupancyWeight::exp_constant(Vector c) {
  OccupancyWeight f;
  f.kind_ = Kind::ExpConstant;
  f.n_ = static_cast<int>(c.size());
  f.c_ = std::move(c);
  return f;
}

OccupancyWeight OccupancyWeight::custom(int n, std::function<double(int, double)> f) {
  OccupancyWeight w;
  w.kind_ = Kind::Custom;
  w.n_ = n;
  w.f_ = std::move(f);
  return w;
}

double OccupancyWeight::value(int i, double t) const {
  switch (kind_) {
    case Kind::One: return 1.0;
    case Kind::Power: return std::pow(t, a_);
    case Kind::ExpConstant: return std::exp(c_[i]);
    case Kind::Custom: return f_(i, t);
  }
  return 1.0;
}

double OccupancyWeight::log_integral(int i, double x) const {
  switch (kind_) {
    case Kind::One:
      return 0.0;
    case Kind::Power:
      // int_1^x a log u du = a (x log x - x + 1)
      return a_ * (x * std::log(x) - x + 1.0);
    case Kind::ExpConstant:
      return c_[i] * (x - 1.0);
    case Kind::Custom: {
      auto integrand = [this, i](double u) { return std::log(f_(i, u)); };
      return adaptive_simpson(integrand, 1.0, x, 1e-10);
    }
  }
  return 0.0;
}

double potential_game_V(const OccupancyWeight& f,
                        const std::function<double(const Vector&)>& potential,
                        double beta, const SimplexPoint& x) {
  if (!x.is_interior()) throw BoundaryPointError("potential_game_V needs an interior point");
  double v = 0.0;
  for (int i = 0; i < x.dim(); ++i) {
    v += x[i] * std::log(x[i]);
    v -= f.log_integral(i, x[i]);
  }
  return v + beta * potential(x.coords());
}

double reinforcement_V(const Matrix& a, double gamma, const SimplexPoint& x) {
  Vector xg(x.dim());
  for (int i = 0; i < x.dim(); ++i) xg[i] = std::pow(x[i], gamma);
  return -xg.dot(a * xg);
}

double reinforcement_alpha(const Matrix& a, double gamma, const SimplexPoint& x) {
  // sum_j x_j dW/dx_j for W = sum A_ij x_i^g x_j^g (A symmetric)
  Vector xg(x.dim());
  for (int i = 0; i < x.dim(); ++i) xg[i] = std::pow(x[i], gamma);
  return 2.0 * gamma * xg.dot(a * xg);
}

// ---------------------------------------------------------------------------
// LyapunovSpec factories

LyapunovSpec LyapunovSpec::gibbs(Vector u0, Matrix coupling, double beta) {
  const int n = static_cast<int>(u0.size());
  if ((coupling - coupling.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw AsymmetricMatrixError("Gibbs coupling matrix must be symmetric");
  LyapunovSpec spec;
  spec.n = n;
  spec.s = MonotoneTransform::log();
  spec.value = [u0, coupling, beta](const SimplexPoint& x) {
    return free_energy(u0, coupling, beta, x);
  };
  spec.gradient = [u0, coupling, beta](const SimplexPoint& x) -> Vector {
    Vector g(x.dim());
    const Vector ux = coupling * x.coords();
    for (int i = 0; i < x.dim(); ++i) g[i] = std::log(x[i]) + 1.0 + u0[i] + beta * ux[i];
    return project_tangential(std::move(g));
  };
  spec.alpha = [](const SimplexPoint&) { return 1.0; };
  spec.pi = [u0, coupling, beta](const SimplexPoint& x) {
    return gibbs_measure(u0, coupling, beta, x);
  };
  return spec;
}

LyapunovSpec LyapunovSpec::potential_game(OccupancyWeight f, PayoffSpec payoff, double beta) {
  if (!payoff.has_potential())
    throw InputError("potential-game Lyapunov spec needs a potential payoff");
  const int n = payoff.dim();
  auto pay = std::make_shared<PayoffSpec>(std::move(payoff));
  auto occ = std::make_shared<OccupancyWeight>(std::move(f));
  LyapunovSpec spec;
  spec.n = n;
  spec.s = MonotoneTransform::log();
  spec.value = [occ, pay, beta](const SimplexPoint& x) {
    return potential_game_V(*occ,
                            [&](const Vector& z) { return pay->potential_value(z); }, beta,
                            x);
  };
  spec.gradient = [occ, pay, beta](const SimplexPoint& x) -> Vector {
    const Vector gw = pay->potential_gradient(x.coords());
    Vector g(x.dim());
    for (int i = 0; i < x.dim(); ++i)
      g[i] = std::log(x[i]) + 1.0 - std::log(occ->value(i, x[i])) + beta * gw[i];
    return project_tangential(std::move(g));
  };
  spec.alpha = [](const SimplexPoint&) { return 1.0; };
  spec.pi = [occ, pay, beta](const SimplexPoint& x) -> SimplexPoint {
    const Vector gw = pay->potential_gradient(x.coords());
    Vector expo(x.dim());
    for (int i = 0; i < x.dim(); ++i)
      expo[i] = std::log(occ->value(i, x[i])) - beta * gw[i];
    expo.array() -= expo.maxCoeff();
    Vector pi = expo.array().exp();
    return SimplexPoint::from_normalized(pi / pi.sum());
  };
  return spec;
}

LyapunovSpec LyapunovSpec::reinforcement(Matrix a, double gamma) {
  const int n = static_cast<int>(a.rows());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw AsymmetricMatrixError("reinforcement matrix must be symmetric");
  LyapunovSpec spec;
  spec.n = n;
  spec.s = MonotoneTransform::neg_reciprocal();
  spec.value = [a, gamma](const SimplexPoint& x) { return reinforcement_V(a, gamma, x); };
  spec.gradient = [a, gamma](const SimplexPoint& x) -> Vector {
    Vector xg(x.dim()), xgm(x.dim());
    for (int i = 0; i < x.dim(); ++i) {
      xg[i] = std::pow(x[i], gamma);
      xgm[i] = gamma * std::pow(x[i], gamma - 1.0);
    }
    const Vector axg = a * xg;
    Vector g(x.dim());
    for (int i = 0; i < x.dim(); ++i) g[i] = -2.0 * xgm[i] * axg[i];
    return project_tangential(std::move(g));
  };
  spec.alpha = [a, gamma](const SimplexPoint& x) { return reinforcement_alpha(a, gamma, x); };
  spec.pi = [a, gamma](const SimplexPoint& x) {
    return vertex_reinforcement_invariant(a, gamma, x);
  };
  return spec;
}

LyapunovSpec LyapunovSpec::constant_target(SimplexPoint pi) {
  if (!pi.is_interior()) throw BoundaryPointError("constant target must be interior");
  const int n = pi.dim();
  LyapunovSpec spec;
  spec.n = n;
  spec.s = MonotoneTransform::log();
  spec.value = [pi](const SimplexPoint& x) {
    double v = 0.0;
    for (int i = 0; i < x.dim(); ++i) v += x[i] * std::log(x[i] / pi[i]);
    return v;
  };
  spec.gradient = [pi](const SimplexPoint& x) -> Vector {
    Vector g(x.dim());
    for (int i = 0; i < x.dim(); ++i) g[i] = std::log(x[i] / pi[i]) + 1.0;
    return project_tangential(std::move(g));
  };
  spec.alpha = [](const SimplexPoint&) { return 1.0; };
  spec.pi = [pi](const SimplexPoint&) { return pi; };
  return spec;
}

// ---------------------------------------------------------------------------
// Quasigradient verification

QuasigradientReport quasigradient_check(const LyapunovSpec& spec,
                                        const std::vector<SimplexPoint>& samples,
                                        double tol) {
  QuasigradientReport report;
  const int n = spec.n;
  const ChartProjection chart = ChartProjection::drop_last(n);

  // Ambient extension of alpha * h through the normalizing evaluators; the
  // rank-one corrections introduced by normalization cancel in cyclic sums.
  auto alpha_h = [&](const Vector& z) -> Vector {
    const SimplexPoint x = SimplexPoint::from_normalized(z);
    return spec.alpha(x) * transform_h(spec.pi, spec.s, x);
  };

  for (std::size_t k = 0; k < samples.size(); ++k) {
    const SimplexPoint& x = samples[k];
    const Vector h = transform_h(spec.pi, spec.s, x);
    const double a = spec.alpha(x);
    const Vector g = spec.gradient(x);
    double worst = 0.0;
    for (int j = 0; j < n - 1; ++j) {
      const Vector u = chart.tangent_basis(j);
      worst = std::max(worst, std::abs(a * h.dot(u) - g.dot(u)));
    }
    report.max_identity_violation = std::max(report.max_identity_violation, worst);
    if (worst > tol) report.violating_samples.push_back(static_cast<int>(k));
    ++report.samples_checked;

    // Cyclic integrability criterion on alpha h by finite differences.
    const Matrix jac = fd_jacobian(alpha_h, x.coords(), 1e-5);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int l = j + 1; l < n; ++l) {
          const double lhs = jac(i, j) + jac(j, l) + jac(l, i);
          const double rhs = jac(i, l) + jac(l, j) + jac(j, i);
          report.max_cyclic_defect = std::max(report.max_cyclic_defect, std::abs(lhs - rhs));
        }
  }
  return report;
}

DecreaseAngleReport decrease_and_angle(const LyapunovSpec& spec,
                                       const VectorFieldSpec& field, double delta,
                                       const std::vector<SimplexPoint>& samples) {
  DecreaseAngleReport report;
  report.min_decrease_margin = std::numeric_limits<double>::infinity();
  report.angle_constant = std::numeric_limits<double>::infinity();
  for (const SimplexPoint& x : samples) {
    if (x.min_coord() < delta) continue;
    const Vector f = field.eval_raw(x.coords());
    const double fnorm = f.norm();
    if (fnorm <= 1e-9) continue;  // near-equilibrium
    const Vector g = spec.gradient(x);
    const double inner = g.dot(f);
    ++report.samples_used;
    if (!(inner < 0)) ++report.decrease_violations;
    report.min_decrease_margin = std::min(report.min_decrease_margin, -inner);
    const double gnorm = g.norm();
    if (gnorm > 0)
      report.angle_constant = std::min(report.angle_constant, -inner / (gnorm * fnorm));
  }
  if (report.samples_used == 0) {
    report.min_decrease_margin = 0.0;
    report.angle_constant = 0.0;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Bilinear forms

namespace {

BilinearFormReport make_form_report(Matrix form, double zero_threshold = 1e-8) {
  BilinearFormReport report;
  report.symmetry_defect = (form - form.transpose()).cwiseAbs().maxCoeff();
  const Matrix sym = 0.5 * (form + form.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  report.eigenvalues = es.eigenvalues();
  const double scale = std::max(1.0, report.eigenvalues.cwiseAbs().maxCoeff());
  for (int i = 0; i < report.eigenvalues.size(); ++i) {
    const double ev = report.eigenvalues[i];
    if (std::abs(ev) <= zero_threshold * scale)
      ++report.zeros;
    else if (ev > 0)
      ++report.positive;
    else
      ++report.negative;
  }
  report.form = std::move(form);
  return report;
}

}  // namespace

BilinearFormReport hessian_V(const LyapunovSpec& spec, const SimplexPoint& p) {
  if (!p.is_interior()) throw BoundaryPointError("hessian_V needs an interior point");
  const double residual = (p.coords() - spec.pi(p).coords()).norm();
  if (residual > 1e-8) throw NotAnEquilibriumError(residual);
  const int n = spec.n;
  const ChartProjection chart = ChartProjection::drop_last(n);

  // D pi(p) as a chart operator, by central differences of the chart-lifted
  // target map.
  auto pi_chart = [&](const Vector& y) -> Vector {
    return chart.project_point(
        spec.pi(SimplexPoint::from_normalized(chart.embed_point(y))).coords());
  };
  const Matrix dpi = fd_jacobian(pi_chart, chart.project_point(p.coords()), 1e-5);

  const double scale = spec.alpha(p) * spec.s.derivative(1.0);
  const int m = n - 1;
  Matrix formula(m, m);
  for (int j = 0; j < m; ++j) {
    const Vector vj = chart.tangent_basis(j);
    const Vector dpij = chart.embed_tangent(dpi * chart.project_tangent(vj));
    const Vector wj = vj - dpij;  // (I - Dpi) v_j
    for (int i = 0; i < m; ++i) {
      const Vector vi = chart.tangent_basis(i);
      double acc = 0.0;
      for (int l = 0; l < n; ++l) acc += wj[l] * vi[l] / p[l];
      formula(i, j) = scale * acc;
    }
  }

  // Cross-check against the finite-difference Hessian of V on the chart.
  auto v_chart = [&](const Vector& y) {
    return spec.value(SimplexPoint::from_normalized(chart.embed_point(y)));
  };
  const Vector y0 = chart.project_point(p.coords());
  Matrix fd = fd_hessian(v_chart, y0, 1e-5);
  double err = (formula - fd).cwiseAbs().maxCoeff() /
               std::max(1.0, formula.cwiseAbs().maxCoeff());
  if (err > 1e-4) {
    fd = fd_hessian(v_chart, y0, 1e-5, /*richardson=*/true);
    err = (formula - fd).cwiseAbs().maxCoeff() /
          std::max(1.0, formula.cwiseAbs().maxCoeff());
    if (err > 1e-4)
      throw NumericError("Hessian routes disagree by relative " + std::to_string(err));
  }
  return make_form_report(std::move(formula));
}

BilinearFormReport reversible_metric(const RateMatrix& l_at_p, const SimplexPoint& p) {
  if (!is_irreducible(l_at_p)) throw NotIrreducibleError();
  if (!is_reversible(l_at_p, p, 1e-9)) throw NotReversibleError();
  const int n = l_at_p.dim();
  const ChartProjection chart = ChartProjection::drop_last(n);
  const Matrix lt = tangent_operator_matrix(l_at_p, chart);
  Eigen::FullPivLU<Matrix> lu(lt);
  if (!lu.isInvertible())
    throw SingularSystemError("tangent operator of an irreducible generator is singular");
  const int m = n - 1;
  Matrix g(m, m);
  for (int j = 0; j < m; ++j) {
    const Vector vj = chart.tangent_basis(j);
    const Vector z = chart.embed_tangent(lu.solve(chart.project_tangent(vj)));
    for (int i = 0; i < m; ++i) {
      const Vector vi = chart.tangent_basis(i);
      double acc = 0.0;
      for (int l = 0; l < n; ++l) acc += z[l] * vi[l] / p[l];
      g(i, j) = -acc;
    }
  }
  BilinearFormReport report = make_form_report(std::move(g));
  const double scale = std::max(1.0, report.form.cwiseAbs().maxCoeff());
  if (report.symmetry_defect > 1e-10 * scale)
    throw NumericError("reversible metric is not symmetric: defect " +
                       std::to_string(report.symmetry_defect));
  if (!report.positive_definite())
    throw NumericError("reversible metric is not positive definite");
  return report;
}

// ---------------------------------------------------------------------------
// Gradient approximation

VectorFieldSpec build_gradient_approximation(const VectorFieldSpec& field,
                                             const LyapunovSpec& spec,
                                             const std::vector<SimplexPoint>& equilibria,
                                             double eps) {
  if (!field.has_rate())
    throw InputError("gradient approximation needs a generator field");
  if (!(eps > 0)) throw InputError("eps must be positive");
  const int n = field.dim();

  // Refine the equilibrium list to residual 1e-12 so the cutoff geometry is
  // stable, and insist on interior hyperbolic points.
  NewtonOptions refine;
  refine.tol = 1e-12;
  refine.include_grid = false;
  std::vector<Vector> points;
  for (const SimplexPoint& e : equilibria) {
    FindEquilibriaResult res = find_equilibria(spec.pi, n, {e}, refine);
    const Vector* best = nullptr;
    double best_dist = 1e9;
    for (const EquilibriumReport& r : res.reports) {
      const double d = (r.location.coords() - e.coords()).norm();
      if (d < best_dist) {
        best_dist = d;
        best = &r.location.coords();
      }
    }
    if (!best || best_dist > 1e-3)
      throw EquilibriaNotHyperbolicError("equilibrium could not be refined");
    const SimplexPoint refined = SimplexPoint::from_normalized(*best);
    if (!refined.is_interior())
      throw EquilibriaNotHyperbolicError("equilibrium is not interior");
    const EquilibriumReport cls = classify_equilibrium(field, refined);
    if (cls.classification == Stability::Nonhyperbolic)
      throw EquilibriaNotHyperbolicError("equilibrium is not hyperbolic");
    points.push_back(refined.coords());
  }

  auto shared = std::make_shared<std::vector<Vector>>(std::move(points));
  const ChartProjection chart = ChartProjection::drop_last(n);
  auto field_copy = std::make_shared<VectorFieldSpec>(field);
  auto spec_copy = std::make_shared<LyapunovSpec>(spec);

  auto blended = [shared, chart, field_copy, spec_copy, eps, n](const Vector& z) -> Vector {
    const SimplexPoint x = SimplexPoint::from_normalized(z);
    double v = std::numeric_limits<double>::infinity();
    for (const Vector& p : *shared) v = std::min(v, (x.coords() - p).norm());
    const double lam = plateau_cutoff(v / eps);
    const Vector f = field_copy->eval_raw(x.coords());
    if (lam >= 1.0) return f;

    // G0 = -grad_g V for the rescaled reversible metric g = alpha s'(1) g0.
    const RateMatrix l = field_copy->rate(x);
    const Matrix lt = chart.operator_matrix(
        [&](const Vector& u) -> Vector { return l.apply_left(u); });
    Eigen::FullPivLU<Matrix> lu(lt);
    if (!lu.isInvertible()) throw SingularSystemError("tangent operator singular");
    const int m = n - 1;
    Matrix g(m, m);
    for (int j = 0; j < m; ++j) {
      const Vector vj = chart.tangent_basis(j);
      const Vector zt = chart.embed_tangent(lu.solve(chart.project_tangent(vj)));
      for (int i = 0; i < m; ++i) {
        const Vector vi = chart.tangent_basis(i);
        double acc = 0.0;
        for (int lidx = 0; lidx < n; ++lidx) acc += zt[lidx] * vi[lidx] / x[lidx];
        g(i, j) = -acc;
      }
    }
    g *= spec_copy->alpha(x) * spec_copy->s.derivative(1.0);
    const Vector grad_v = spec_copy->gradient(x);
    Vector cov(m);
    for (int i = 0; i < m; ++i) cov[i] = grad_v.dot(chart.tangent_basis(i));
    const Vector grad_chart = g.ldlt().solve(cov);
    const Vector g0 = -chart.embed_tangent(grad_chart);
    return (1.0 - lam) * g0 + lam * f;
  };
  return VectorFieldSpec::explicit_field(n, blended);
}

}  // namespace simplexflow
