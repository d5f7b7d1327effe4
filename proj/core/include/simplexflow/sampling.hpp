#pragma once

#include <vector>

#include "simplexflow/rng.hpp"
#include "simplexflow/types.hpp"

namespace simplexflow {

/// Van der Corput radical inverse of index in the given base.
double radical_inverse(std::uint64_t index, std::uint32_t base);

/// Halton point in (0,1)^dim (index starts at 1 internally to avoid 0).
Vector halton_point(std::uint64_t index, int dim);

/// Maps a point of the open unit cube to the simplex interior by the
/// exponential-spacings construction (pushes the uniform cube measure to the
/// uniform measure on the simplex).
SimplexPoint simplex_from_cube(const Vector& u);

/// Deterministic low-discrepancy grid of `count` interior points of the
/// (n-1)-simplex.
std::vector<SimplexPoint> simplex_grid(int n, int count);

/// Uniformly random point of the simplex (Dirichlet(1,...,1)).
SimplexPoint random_simplex_point(int n, CounterRng& rng);

/// Affine shrink toward the barycenter so that every coordinate is >= delta.
SimplexPoint shrink_to_interior(const SimplexPoint& x, double delta);

/// Low-discrepancy samples of {x : min_i x_i >= delta}.
std::vector<SimplexPoint> sample_compact_interior(int n, int count, double delta);

/// Deterministic random irreducible rate matrix with off-diagonal entries in
/// (lo, hi); used by property tests and sampling-based checks.
RateMatrix random_irreducible_rate_matrix(int n, CounterRng& rng, double lo = 0.1,
                                          double hi = 2.0);

}  // namespace simplexflow
