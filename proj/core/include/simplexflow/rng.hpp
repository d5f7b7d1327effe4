#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace simplexflow {

/// Counter-based deterministic generator. The k-th draw of stream s under
/// seed q is a pure function of (q, s, k), so parallel replications never
/// couple through shared state and paths are reproducible bit-for-bit.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), counter_(0) {}

  /// Stateless access: uniform in [0,1) at a given counter.
  double uniform_at(std::uint64_t counter) const {
    return to_unit(mix3(seed_, stream_, counter));
  }

  double uniform() { return uniform_at(counter_++); }

  /// Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Samples an index with the given (nonnegative, not necessarily
  /// normalized) weights by inverse transform on one uniform draw.
  int categorical(const Eigen::VectorXd& weights) {
    const double total = weights.sum();
    double u = uniform() * total;
    int last_positive = -1;
    for (int i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0) continue;
      last_positive = i;
      u -= weights[i];
      if (u < 0) return i;
    }
    return last_positive;  // roundoff at u ~ total lands on the last mass point
  }

  std::uint64_t counter() const { return counter_; }
  void set_counter(std::uint64_t c) { counter_ = c; }

  static std::uint64_t mix(std::uint64_t z) {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t mix3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix(mix(mix(a) ^ b) ^ c);
  }
  static double to_unit(std::uint64_t z) {
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_;
};

}  // namespace simplexflow
