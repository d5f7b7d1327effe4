#pragma once

#include <cmath>
#include <stdexcept>

namespace simplexflow {

/// Strictly increasing C^1 transform on (0, inf), used both by the entropy
/// production inequality and by Lyapunov constructions h(x) = s(x / pi(x)).
class MonotoneTransform {
 public:
  enum class Kind { Log, NegReciprocal, NegPower, Identity };

  static MonotoneTransform log() { return MonotoneTransform(Kind::Log, 0.0); }
  static MonotoneTransform neg_reciprocal() { return MonotoneTransform(Kind::NegReciprocal, 1.0); }
  // s(t) = -t^(-1/beta), beta > 0
  static MonotoneTransform neg_power(double beta) {
    if (!(beta > 0)) throw std::invalid_argument("neg_power requires beta > 0");
    return MonotoneTransform(Kind::NegPower, beta);
  }
  static MonotoneTransform identity() { return MonotoneTransform(Kind::Identity, 0.0); }

  double operator()(double t) const {
    switch (kind_) {
      case Kind::Log: return std::log(t);
      case Kind::NegReciprocal: return -1.0 / t;
      case Kind::NegPower: return -std::pow(t, -1.0 / beta_);
      case Kind::Identity: return t;
    }
    return 0.0;
  }

  double derivative(double t) const {
    switch (kind_) {
      case Kind::Log: return 1.0 / t;
      case Kind::NegReciprocal: return 1.0 / (t * t);
      case Kind::NegPower: return (1.0 / beta_) * std::pow(t, -1.0 / beta_ - 1.0);
      case Kind::Identity: return 1.0;
    }
    return 0.0;
  }

  Kind kind() const { return kind_; }
  double beta() const { return beta_; }

 private:
  MonotoneTransform(Kind kind, double beta) : kind_(kind), beta_(beta) {}
  Kind kind_;
  double beta_;
};

/// Convex C^2 weight for the generalized entropy H^S(x) = sum_i pi_i S(x_i/pi_i).
class ConvexWeight {
 public:
  enum class Kind { TLogT, SquaredDeviation, NegLog };

  static ConvexWeight t_log_t() { return ConvexWeight(Kind::TLogT); }
  static ConvexWeight squared_deviation() { return ConvexWeight(Kind::SquaredDeviation); }
  static ConvexWeight neg_log() { return ConvexWeight(Kind::NegLog); }

  double operator()(double t) const {
    switch (kind_) {
      case Kind::TLogT: return t > 0 ? t * std::log(t) : 0.0;  // continuous extension at 0
      case Kind::SquaredDeviation: return (t - 1.0) * (t - 1.0);
      case Kind::NegLog: return -std::log(t);
    }
    return 0.0;
  }

  double second_derivative(double t) const {
    switch (kind_) {
      case Kind::TLogT: return 1.0 / t;
      case Kind::SquaredDeviation: return 2.0;
      case Kind::NegLog: return 1.0 / (t * t);
    }
    return 0.0;
  }

  /// Whether S is finite at t = 0 (controls boundary behaviour of H^S).
  bool finite_at_zero() const { return kind_ != Kind::NegLog; }

  Kind kind() const { return kind_; }

 private:
  explicit ConvexWeight(Kind kind) : kind_(kind) {}
  Kind kind_;
};

}  // namespace simplexflow
