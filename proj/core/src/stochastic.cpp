#include "simplexflow/stochastic.hpp"

#include <cmath>

#include "simplexflow/rng.hpp"

namespace simplexflow {

PopulationState PopulationState::from_fractions(std::int64_t n_agents, const SimplexPoint& x) {
  const int n = x.dim();
  PopulationState state;
  state.total = n_agents;
  state.counts.resize(n);
  // Largest-remainder rounding keeps the total exact.
  std::int64_t assigned = 0;
  std::vector<std::pair<double, int>> remainders;
  for (int i = 0; i < n; ++i) {
    const double exact = x[i] * static_cast<double>(n_agents);
    const std::int64_t base = static_cast<std::int64_t>(std::floor(exact));
    state.counts[i] = static_cast<int>(base);
    assigned += base;
    remainders.push_back({exact - static_cast<double>(base), i});
  }
  std::sort(remainders.begin(), remainders.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::int64_t k = 0; k < n_agents - assigned; ++k)
    state.counts[remainders[static_cast<std::size_t>(k) % remainders.size()].second] += 1;
  return state;
}

SimplexPoint PopulationState::as_simplex() const {
  Vector x(counts.size());
  for (int i = 0; i < counts.size(); ++i)
    x[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return SimplexPoint::from_normalized(std::move(x));
}

SimplexPoint PopulationPath::state(std::size_t k) const {
  Vector x(counts[k].size());
  for (int i = 0; i < counts[k].size(); ++i)
    x[i] = static_cast<double>(counts[k][i]) / static_cast<double>(total);
  return SimplexPoint::from_normalized(std::move(x));
}

std::pair<int, int> population_draw(const ProtocolSpec& spec, const SimplexPoint& x,
                                    std::uint64_t seed, std::uint64_t step) {
  CounterRng rng(seed, /*stream=*/0);
  rng.set_counter(2 * step);
  const int agent = rng.categorical(x.coords());
  const MarkovMatrix k = spec.markov_kernel(x);
  const int dest = rng.categorical(k.entries().row(agent).transpose());
  return {agent, dest};
}

PopulationPath simulate_population(const ProtocolSpec& spec, std::int64_t n_agents,
                                   std::int64_t steps, std::uint64_t seed,
                                   const PopulationState& x0) {
  if (n_agents < 1) throw InputError("population size must be >= 1");
  if (x0.counts.sum() != n_agents)
    throw DimensionMismatchError("initial counts do not sum to the population size");
  PopulationPath path;
  path.total = n_agents;
  path.counts.reserve(static_cast<std::size_t>(steps) + 1);
  path.counts.push_back(x0.counts);
  Eigen::VectorXi counts = x0.counts;
  for (std::int64_t k = 0; k < steps; ++k) {
    Vector x(counts.size());
    for (int i = 0; i < counts.size(); ++i)
      x[i] = static_cast<double>(counts[i]) / static_cast<double>(n_agents);
    const auto [agent, dest] =
        population_draw(spec, SimplexPoint::from_normalized(x), seed,
                        static_cast<std::uint64_t>(k));
    if (counts[agent] > 0 && agent != dest) {
      counts[agent] -= 1;
      counts[dest] += 1;
    }
    path.counts.push_back(counts);
  }
  return path;
}

OccupationPath simulate_reinforcement(const ProtocolSpec& spec, std::int64_t steps,
                                      std::uint64_t seed, int start_state,
                                      const SimplexPoint& mu_prior) {
  if (!mu_prior.is_interior())
    throw InputError("reinforcement prior must be interior so the kernel is defined");
  const int n = spec.dim();
  if (start_state < 0 || start_state >= n) throw InputError("start state out of range");

  OccupationPath path;
  path.prior = mu_prior.coords();
  path.occupation.reserve(static_cast<std::size_t>(steps) + 1);
  path.occupation.push_back(path.prior);

  Eigen::VectorXi visit_counts = Eigen::VectorXi::Zero(n);
  int state = start_state;
  CounterRng rng(seed, /*stream=*/1);
  for (std::int64_t k = 0; k < steps; ++k) {
    const SimplexPoint mu = SimplexPoint::from_normalized(path.occupation.back());
    const MarkovMatrix kernel = spec.markov_kernel(mu);
    const Vector row = kernel.entries().row(state).transpose();
    if (!(row.sum() > 0.5) || !row.allFinite()) throw DegenerateKernelRowError(state);
    state = rng.categorical(row);
    path.visits.push_back(state);
    visit_counts[state] += 1;
    // mu_k = (prior + visit counts) / (k + 2): the prior acts as one
    // fictitious observation.
    Vector mu_next(n);
    for (int i = 0; i < n; ++i)
      mu_next[i] = (path.prior[i] + static_cast<double>(visit_counts[i])) /
                   static_cast<double>(k + 2);
    path.occupation.push_back(std::move(mu_next));
  }
  return path;
}

double meanfield_deviation(const PopulationPath& path, const ProtocolSpec& spec,
                           const SimplexPoint& x0, double t_horizon,
                           const IntegrateOptions& opts) {
  const std::int64_t n_agents = path.total;
  const std::size_t max_k = std::min<std::size_t>(
      path.counts.size() - 1,
      static_cast<std::size_t>(std::floor(t_horizon * static_cast<double>(n_agents))));
  if (max_k == 0) return 0.0;

  IntegrateOptions iopts = opts;
  iopts.sample_times.clear();
  for (std::size_t k = 1; k <= max_k; ++k)
    iopts.sample_times.push_back(static_cast<double>(k) / static_cast<double>(n_agents));

  const VectorFieldSpec field = VectorFieldSpec::generator(spec);
  const Trajectory traj = integrate(field, x0, iopts.sample_times.back(), iopts);

  double dev = (path.state(0).coords() - x0.coords()).cwiseAbs().maxCoeff();
  std::size_t ti = 1;  // traj.times[0] == 0
  for (std::size_t k = 1; k <= max_k; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n_agents);
    while (ti + 1 < traj.times.size() && traj.times[ti] < t - 1e-12) ++ti;
    const Vector diff = path.state(k).coords() - traj.states[ti];
    dev = std::max(dev, diff.cwiseAbs().maxCoeff());
  }
  return dev;
}

}  // namespace simplexflow
