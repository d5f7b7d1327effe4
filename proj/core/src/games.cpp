#include "simplexflow/games.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "simplexflow/numerics.hpp"
#include "simplexflow/sampling.hpp"

namespace simplexflow {

std::string nash_kind_tag(NashKind k) {
  switch (k) {
    case NashKind::Pure: return "pure";
    case NashKind::FullyMixed: return "fully-mixed";
    case NashKind::PartiallyMixed: return "partially-mixed";
  }
  return "";
}

NashCertificate is_nash(const PayoffSpec& payoff, const SimplexPoint& x, double tol) {
  const Vector u = payoff.payoff(x.coords());
  const double avg = u.dot(x.coords());
  NashCertificate cert;
  cert.max_violation = (u.array() - avg).maxCoeff();
  cert.is_nash = cert.max_violation <= tol;
  for (int i : x.support())
    if (std::abs(u[i] - avg) <= std::max(tol, 1e-9)) cert.equality_pattern.push_back(i);
  return cert;
}

namespace {

// Vertices of {t in R^d : A t >= b} intersected with a large bounding box,
// d <= 2. Used as a fallback for singular support systems.
std::vector<Vector> polytope_vertices(const Matrix& a, const Vector& b, int d) {
  std::vector<Vector> verts;
  if (d == 1) {
    double lo = -1e6, hi = 1e6;
    for (int k = 0; k < a.rows(); ++k) {
      const double c = a(k, 0);
      if (std::abs(c) < 1e-14) {
        if (b[k] > 1e-12) return {};
        continue;
      }
      const double t = b[k] / c;
      if (c > 0)
        lo = std::max(lo, t);
      else
        hi = std::min(hi, t);
    }
    if (lo > hi) return {};
    verts.push_back(Vector::Constant(1, lo));
    verts.push_back(Vector::Constant(1, hi));
    return verts;
  }
  // d == 2: clip a big square by each halfplane.
  std::vector<Eigen::Vector2d> poly = {{-1e6, -1e6}, {1e6, -1e6}, {1e6, 1e6}, {-1e6, 1e6}};
  for (int k = 0; k < a.rows(); ++k) {
    const Eigen::Vector2d normal(a(k, 0), a(k, 1));
    const double offset = b[k];
    std::vector<Eigen::Vector2d> next;
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Eigen::Vector2d& p = poly[i];
      const Eigen::Vector2d& q = poly[(i + 1) % m];
      const double dp = normal.dot(p) - offset;
      const double dq = normal.dot(q) - offset;
      if (dp >= -1e-12) next.push_back(p);
      if ((dp > 1e-12 && dq < -1e-12) || (dp < -1e-12 && dq > 1e-12)) {
        const double w = dp / (dp - dq);
        next.push_back(p + w * (q - p));
      }
    }
    poly = std::move(next);
    if (poly.empty()) return {};
  }
  for (const auto& p : poly) {
    Vector v(2);
    v << p[0], p[1];
    verts.push_back(v);
  }
  return verts;
}

std::vector<std::vector<int>> all_supports(int n) {
  std::vector<std::vector<int>> supports;
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) s.push_back(i);
    supports.push_back(std::move(s));
  }
  return supports;
}

}  // namespace

std::vector<NashPoint> enumerate_nash(const PayoffSpec& payoff) {
  if (payoff.kind() != PayoffSpec::Kind::LinearMatrix)
    throw InputError("Nash enumeration requires a linear payoff matrix");
  const int n = payoff.dim();
  if (n > 6) throw InputError("Nash enumeration is limited to n <= 6");
  const Matrix& u = payoff.matrix_data();

  std::vector<NashPoint> found;
  auto consider = [&](Vector x, bool degenerate_flag) {
    for (int i = 0; i < n; ++i) {
      if (x[i] < 0) {
        if (x[i] < -1e-9) return;
        x[i] = 0.0;
      }
    }
    const double total = x.sum();
    if (std::abs(total - 1.0) > 1e-7) return;
    x /= total;
    SimplexPoint p = SimplexPoint::from_normalized(x);
    if (!is_nash(payoff, p, 1e-9).is_nash) return;
    for (const NashPoint& q : found)
      if ((q.location.coords() - p.coords()).norm() < 1e-7) return;
    NashPoint np;
    np.location = p;
    np.support = p.support();
    np.degenerate_support_flag = degenerate_flag;
    found.push_back(classify_nash(payoff, np));
  };

  for (const std::vector<int>& support : all_supports(n)) {
    const int r = static_cast<int>(support.size());
    // Indifference + normalization system on the support: unknowns
    // (x_T, v), equations (U x)_i = v for i in T and sum x = 1.
    Matrix a = Matrix::Zero(r + 1, r + 1);
    Vector b = Vector::Zero(r + 1);
    for (int row = 0; row < r; ++row) {
      for (int col = 0; col < r; ++col) a(row, col) = u(support[row], support[col]);
      a(row, r) = -1.0;
    }
    a.row(r).head(r).setOnes();
    b[r] = 1.0;

    Eigen::FullPivLU<Matrix> lu(a);
    lu.setThreshold(1e-10);
    if (lu.isInvertible()) {
      const Vector z = lu.solve(b);
      Vector x = Vector::Zero(n);
      for (int k = 0; k < r; ++k) x[support[k]] = z[k];
      consider(std::move(x), false);
      continue;
    }

    // Singular support system: the solution set is an affine subspace.
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
    const Vector z0 = cod.solve(b);
    if ((a * z0 - b).cwiseAbs().maxCoeff() > 1e-9) continue;  // inconsistent
    const Matrix kernel = lu.kernel();
    const int d = static_cast<int>(kernel.cols());
    if (d > 2) continue;  // flagged below through the unresolved marker
    // Vertex enumeration of {t : x_T(t) >= 0} in parameter space.
    Matrix cons(r, d);
    Vector rhs(r);
    for (int k = 0; k < r; ++k) {
      cons.row(k) = kernel.row(k);
      rhs[k] = -z0[k];
    }
    for (const Vector& t : polytope_vertices(cons, rhs, d)) {
      const Vector z = z0 + kernel * t;
      Vector x = Vector::Zero(n);
      for (int k = 0; k < r; ++k) x[support[k]] = z[k];
      consider(std::move(x), true);
    }
  }
  return found;
}

NashPoint classify_nash(const PayoffSpec& payoff, const NashPoint& point) {
  const int n = payoff.dim();
  NashPoint out = point;
  out.support = out.location.support();
  const int r = static_cast<int>(out.support.size());
  out.kind = r == 1 ? NashKind::Pure : (r == n ? NashKind::FullyMixed : NashKind::PartiallyMixed);

  const Vector u = payoff.payoff(out.location.coords());
  const double avg = u.dot(out.location.coords());
  // Strict when every off-support strategy is worse by a margin; vacuously
  // true for fully mixed points.
  out.strict = true;
  for (int i = 0; i < n; ++i) {
    if (std::find(out.support.begin(), out.support.end(), i) != out.support.end()) continue;
    if (u[i] > avg - 1e-9) out.strict = false;
  }

  if (r == 1) {
    out.nondegenerate = std::nullopt;
    return out;
  }

  // Extrinsic nondegeneracy: invertibility of the (r-1)x(r-1) matrix of
  // partial derivatives of the payoff differences h_i = U_i - U_ref on the
  // support chart, by central finite differences.
  std::vector<int> order = out.support;
  for (int i = 0; i < n; ++i)
    if (std::find(out.support.begin(), out.support.end(), i) == out.support.end())
      order.push_back(i);
  const int ref = out.support[r - 1];

  auto embed = [&](const Vector& xfree) -> Vector {
    // xfree holds the first r-1 support coordinates; off-support stays 0.
    Vector z = Vector::Zero(n);
    double acc = 0.0;
    for (int k = 0; k < r - 1; ++k) {
      z[order[k]] = xfree[k];
      acc += xfree[k];
    }
    z[ref] = 1.0 - acc;
    return z;
  };

  Vector q(r - 1);
  for (int k = 0; k < r - 1; ++k) q[k] = out.location[order[k]];
  auto h = [&](const Vector& xfree) -> Vector {
    const Vector up = payoff.payoff(embed(xfree));
    Vector out_h(r - 1);
    for (int k = 0; k < r - 1; ++k) out_h[k] = up[order[k]] - up[ref];
    return out_h;
  };
  const Matrix m = fd_jacobian(h, q, 1e-6);
  Eigen::JacobiSVD<Matrix> svd(m);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  out.nondegenerate = smin > 0 && smax / smin < 1e10;
  return out;
}

BetaCorrespondenceTable beta_correspondence(
    const PayoffSpec& payoff, const std::vector<double>& beta_ladder,
    const std::function<ProtocolSpec(double)>& protocol_factory,
    const BetaCorrespondenceOptions& opts) {
  const int n = payoff.dim();
  BetaCorrespondenceTable table;
  table.betas = beta_ladder;

  if (payoff.kind() == PayoffSpec::Kind::LinearMatrix) {
    table.nash_points = enumerate_nash(payoff);
  }

  for (double beta : beta_ladder) {
    std::function<SimplexPoint(const SimplexPoint&)> pi_eval;
    std::optional<VectorFieldSpec> field;
    if (protocol_factory) {
      ProtocolSpec proto = protocol_factory(beta);
      VectorFieldSpec f = VectorFieldSpec::generator(std::move(proto));
      if (!f.has_pi())
        throw InputError("beta correspondence needs protocols with invariant families");
      pi_eval = [f](const SimplexPoint& x) { return f.pi(x); };
      field = std::move(f);
    } else {
      PayoffSpec pay = payoff;
      pi_eval = [pay, beta](const SimplexPoint& x) { return logit_measure(pay, beta, x); };
    }

    NewtonOptions nopts;
    nopts.tol = opts.newton_tol;
    const FindEquilibriaResult eq = find_equilibria(pi_eval, n, {}, nopts);
    for (const EquilibriumReport& report : eq.reports) {
      BetaRootEntry entry;
      entry.beta = beta;
      entry.root = field ? classify_equilibrium(*field, report.location) : report;

      double best = std::numeric_limits<double>::infinity();
      double second = std::numeric_limits<double>::infinity();
      int best_idx = -1;
      for (std::size_t k = 0; k < table.nash_points.size(); ++k) {
        const double d =
            (table.nash_points[k].location.coords() - report.location.coords()).norm();
        if (d < best) {
          second = best;
          best = d;
          best_idx = static_cast<int>(k);
        } else {
          second = std::min(second, d);
        }
      }
      if (best_idx >= 0 && best <= opts.matching_radius) {
        entry.matched_nash = best_idx;
        entry.distance = best;
        entry.tie = second <= best * (1.0 + 1e-6);
        const NashPoint& target = table.nash_points[best_idx];
        if (target.kind == NashKind::Pure && target.strict) {
          // Contraction diagnostic: sup of ||D pi_beta|| on a ball around the
          // target (spectral norm of the chart Jacobian).
          const ChartProjection chart = ChartProjection::drop_last(n);
          double supemp = 0.0;
          for (int s = 0; s < opts.contraction_samples; ++s) {
            const SimplexPoint q = simplex_from_cube(halton_point(s, n));
            const double ushrink =
                opts.contraction_ball * radical_inverse(s + 1, 2);
            Vector x = (1.0 - ushrink) * target.location.coords() + ushrink * q.coords();
            auto pi_chart = [&](const Vector& y) -> Vector {
              return chart.project_point(
                  pi_eval(SimplexPoint::from_normalized(chart.embed_point(y))).coords());
            };
            const Matrix dpi = fd_jacobian(pi_chart, chart.project_point(x), 1e-7);
            Eigen::JacobiSVD<Matrix> svd(dpi);
            supemp = std::max(supemp, svd.singularValues().maxCoeff());
          }
          entry.contraction_sup = supemp;
        }
      } else {
        entry.matched_nash = -1;
        entry.distance = best_idx >= 0 ? best : std::numeric_limits<double>::quiet_NaN();
      }
      table.entries.push_back(std::move(entry));
    }
  }
  return table;
}

BestReplyFace best_reply_set(const PayoffSpec& payoff, const SimplexPoint& x, double tol) {
  const Vector u = payoff.payoff(x.coords());
  const double top = u.maxCoeff();
  BestReplyFace face;
  for (int i = 0; i < u.size(); ++i)
    if (u[i] >= top - tol) face.strategies.push_back(i);
  face.full_simplex = static_cast<int>(face.strategies.size()) == payoff.dim();
  return face;
}

}  // namespace simplexflow
