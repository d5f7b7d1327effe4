#pragma once

#include <cstdint>
#include <vector>

#include "simplexflow/dynamics.hpp"
#include "simplexflow/protocols.hpp"
#include "simplexflow/types.hpp"

namespace simplexflow {

/// Counts of agents per strategy; counts/N is the population state in the
/// simplex.
struct PopulationState {
  std::int64_t total = 0;
  Eigen::VectorXi counts;

  static PopulationState from_fractions(std::int64_t n_agents, const SimplexPoint& x);
  SimplexPoint as_simplex() const;
  int dim() const { return static_cast<int>(counts.size()); }
};

struct PopulationPath {
  std::int64_t total = 0;
  std::vector<Eigen::VectorXi> counts;  // counts[k] after k revision steps

  std::size_t steps() const { return counts.empty() ? 0 : counts.size() - 1; }
  SimplexPoint state(std::size_t k) const;
};

/// One revision opportunity at state x: picks an agent type from x and a
/// destination from the kernel row. Pure function of (seed, step).
std::pair<int, int> population_draw(const ProtocolSpec& spec, const SimplexPoint& x,
                                    std::uint64_t seed, std::uint64_t step);

/// Simulates the N-agent revision chain; deterministic given the seed.
PopulationPath simulate_population(const ProtocolSpec& spec, std::int64_t n_agents,
                                   std::int64_t steps, std::uint64_t seed,
                                   const PopulationState& x0);

/// Single-agent reinforcement path: the state jumps by the kernel evaluated
/// at the running occupation measure, which carries a weight-1 interior
/// prior so the kernel is defined at step 0.
struct OccupationPath {
  Vector prior;
  std::vector<int> visits;           // X_1, ..., X_steps
  std::vector<Vector> occupation;    // mu_k after k visits, k = 0..steps

  const Vector& measure(std::size_t k) const { return occupation[k]; }
};

OccupationPath simulate_reinforcement(const ProtocolSpec& spec, std::int64_t steps,
                                      std::uint64_t seed, int start_state,
                                      const SimplexPoint& mu_prior);

/// Sup over k <= N T of the distance between the empirical path and the
/// mean-field trajectory sampled at t = k / N.
double meanfield_deviation(const PopulationPath& path, const ProtocolSpec& spec,
                           const SimplexPoint& x0, double t_horizon,
                           const IntegrateOptions& opts = {});

}  // namespace simplexflow
