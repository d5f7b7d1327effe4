#include "simplexflow/sampling.hpp"

#include <cmath>

namespace simplexflow {

namespace {
constexpr std::uint32_t kHaltonBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
}

double radical_inverse(std::uint64_t index, std::uint32_t base) {
  double inv_base = 1.0 / base;
  double scale = inv_base;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * scale;
    index /= base;
    scale *= inv_base;
  }
  return result;
}

Vector halton_point(std::uint64_t index, int dim) {
  Vector u(dim);
  for (int d = 0; d < dim; ++d) u[d] = radical_inverse(index + 1, kHaltonBases[d]);
  return u;
}

SimplexPoint simplex_from_cube(const Vector& u) {
  Vector e(u.size());
  for (int i = 0; i < u.size(); ++i) {
    const double v = std::min(std::max(u[i], 1e-12), 1.0 - 1e-12);
    e[i] = -std::log(v);
  }
  return SimplexPoint::from_normalized(e / e.sum());
}

std::vector<SimplexPoint> simplex_grid(int n, int count) {
  std::vector<SimplexPoint> pts;
  pts.reserve(count);
  for (int k = 0; k < count; ++k) pts.push_back(simplex_from_cube(halton_point(k, n)));
  return pts;
}

SimplexPoint random_simplex_point(int n, CounterRng& rng) {
  Vector u(n);
  for (int i = 0; i < n; ++i) u[i] = rng.uniform();
  return simplex_from_cube(u);
}

SimplexPoint shrink_to_interior(const SimplexPoint& x, double delta) {
  const int n = x.dim();
  if (delta * n >= 1.0) throw InputError("delta too large for the simplex dimension");
  const double t = 1.0 - delta * n;
  Vector y = t * x.coords() + Vector::Constant(n, delta);
  return SimplexPoint::from_normalized(std::move(y));
}

std::vector<SimplexPoint> sample_compact_interior(int n, int count, double delta) {
  std::vector<SimplexPoint> pts;
  pts.reserve(count);
  for (int k = 0; k < count; ++k)
    pts.push_back(shrink_to_interior(simplex_from_cube(halton_point(k, n)), delta));
  return pts;
}

RateMatrix random_irreducible_rate_matrix(int n, CounterRng& rng, double lo, double hi) {
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) m(i, j) = rng.uniform(lo, hi);
  for (int i = 0; i < n; ++i) m(i, i) = -m.row(i).sum();
  return RateMatrix::validated(std::move(m), 1e-9);
}

}  // namespace simplexflow
