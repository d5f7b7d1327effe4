#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "simplexflow/protocols.hpp"
#include "simplexflow/types.hpp"

namespace simplexflow {

/// Declarative payoff block of a scenario file.
struct PayoffConfig {
  std::string kind;  // "linear" | "quadratic-potential"
  Matrix matrix;
  Vector linear;  // optional linear term of the potential

  PayoffSpec build() const;
};

struct AttachmentConfig {
  std::string kind;  // "constant-weights" | "imitative"
  Matrix weights;

  AttachmentSpec build() const;
};

struct TargetConfig {
  std::string kind;  // "gibbs" | "constant"
  Vector u0;
  Matrix coupling;
  double beta = 0.0;
  Vector pi;
};

/// Declarative protocol block; round-trips through JSON bit-exactly for
/// decimal literals.
struct ProtocolConfig {
  std::string kind;
  double beta = 0.0;
  double gamma = 1.0;
  double shift = 0.0;
  std::string g;  // comparison rule tag
  std::string f;  // sampling transform tag: "exp" | "power-shifted" | "identity-positive"
  Vector u0;
  Matrix coupling;       // Gibbs U
  Matrix reinforcement;  // A
  Matrix exchange;       // W
  std::optional<PayoffConfig> payoff;
  std::optional<AttachmentConfig> attachment;
  std::optional<TargetConfig> target;

  ProtocolSpec build(int n) const;
};

struct IntegrateAnalysis {
  Vector x0;
  double t_end = 50.0;
  int samples = 0;  // 0 = record every accepted step
  double rel_tol = 1e-10;
  std::string field = "generator";  // "generator" | "pi" | "replicator"
  std::string expect_omega = "any";  // "any" | "fixed-point" | "periodic"
  bool verify_lyapunov_decrease = false;
  double burn_in = 0.0;
  double window = 0.0;
};

struct EquilibriaAnalysis {
  double tol = 1e-10;
  std::vector<Vector> seeds;
  bool verify_generator_match = false;
};

struct LyapunovCheckAnalysis {
  double delta = 0.05;
  int samples = 1000;
  double tol = 1e-6;
};

struct BetaLadderAnalysis {
  std::vector<double> betas;
  double radius = 0.1;
};

struct StochasticAnalysis {
  std::string mode = "population";  // "population" | "reinforcement"
  std::int64_t agents = 1000;
  std::int64_t steps = 0;  // 0 = agents * t_horizon for population mode
  double t_horizon = 5.0;
  int seeds = 10;
  Vector x0;  // empty = barycenter
  int start_state = 0;
};

struct CounterexampleAnalysis {
  double eta = 0.05;
  double epsilon = 0.1;
  Matrix exchange;
  int starts = 100;
  double t_end_generator = 900.0;
  double t_end_target = 5000.0;
};

using AnalysisRequest =
    std::variant<IntegrateAnalysis, EquilibriaAnalysis, LyapunovCheckAnalysis,
                 BetaLadderAnalysis, StochasticAnalysis, CounterexampleAnalysis>;

struct Scenario {
  int format_version = 1;
  std::string name;
  int n = 0;
  std::uint64_t seed = 0;
  std::string output = "out";
  ProtocolConfig protocol;
  std::vector<AnalysisRequest> analyses;

  ProtocolSpec build_protocol() const { return protocol.build(n); }
};

/// Parses and validates a scenario document; throws SchemaError /
/// DimensionMismatchError / UnknownKindError on malformed input.
Scenario parse_scenario(const std::string& text);

/// Canonical serialization (stable field order, shortest round-trip
/// numerals).
std::string serialize_scenario(const Scenario& scenario);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AnalysisResult {
  std::string type;
  std::vector<std::string> artifacts;
  std::vector<CheckResult> checks;
};

struct RunResult {
  std::vector<AnalysisResult> analyses;
  bool all_passed = true;
  std::string report_path;
};

struct RunOverrides {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
};

/// Executes the requested analyses in declaration order, writes CSV/JSON
/// artifacts plus report.json, and reports per-check verdicts.
RunResult run_scenario(const Scenario& scenario, const RunOverrides& overrides = {});

}  // namespace simplexflow
