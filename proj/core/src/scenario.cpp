#include "simplexflow/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "simplexflow/dynamics.hpp"
#include "simplexflow/games.hpp"
#include "simplexflow/io.hpp"
#include "simplexflow/lyapunov.hpp"
#include "simplexflow/markov.hpp"
#include "simplexflow/rng.hpp"
#include "simplexflow/sampling.hpp"
#include "simplexflow/stochastic.hpp"

namespace simplexflow {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Config -> spec builders

PayoffSpec PayoffConfig::build() const {
  if (kind == "linear") return PayoffSpec::linear(matrix);
  if (kind == "quadratic-potential") return PayoffSpec::quadratic_potential(matrix, linear);
  throw UnknownKindError(kind);
}

AttachmentSpec AttachmentConfig::build() const {
  if (kind == "constant-weights") return AttachmentSpec::constant(weights);
  if (kind == "imitative") return AttachmentSpec::imitative(weights);
  throw UnknownKindError(kind);
}

namespace {

SamplingTransform sampling_transform_from_tag(const std::string& tag) {
  if (tag == "exp") return SamplingTransform::ExpBeta;
  if (tag == "power-shifted") return SamplingTransform::PowerShifted;
  if (tag == "identity-positive") return SamplingTransform::IdentityPositive;
  throw UnknownKindError(tag);
}

std::string sampling_transform_tag(SamplingTransform f) {
  switch (f) {
    case SamplingTransform::ExpBeta: return "exp";
    case SamplingTransform::PowerShifted: return "power-shifted";
    case SamplingTransform::IdentityPositive: return "identity-positive";
  }
  return "";
}

void require_square(const Matrix& m, int n, const std::string& what) {
  if (m.rows() != n || m.cols() != n)
    throw DimensionMismatchError(what + " must be " + std::to_string(n) + "x" +
                                 std::to_string(n) + ", got " + std::to_string(m.rows()) +
                                 "x" + std::to_string(m.cols()));
}

}  // namespace

ProtocolSpec ProtocolConfig::build(int n) const {
  if (kind == "gibbs-direct") {
    Vector base = u0.size() ? u0 : Vector::Zero(n);
    if (base.size() != n) throw DimensionMismatchError("U0 size does not match n");
    require_square(coupling, n, "U");
    return ProtocolSpec::gibbs_direct(base, coupling, beta);
  }
  if (kind == "comparison") {
    if (!payoff || !attachment)
      throw SchemaError("protocol", "comparison needs payoff and attachment blocks");
    PayoffSpec p = payoff->build();
    if (p.dim() != n) throw DimensionMismatchError("payoff dimension does not match n");
    AttachmentSpec a = attachment->build();
    if (a.dim() != n) throw DimensionMismatchError("attachment dimension does not match n");
    return ProtocolSpec::comparison(std::move(p), std::move(a),
                                    comparison_rule_from_tag(g), beta);
  }
  if (kind == "sampling") {
    if (!payoff || !attachment)
      throw SchemaError("protocol", "sampling needs payoff and attachment blocks");
    PayoffSpec p = payoff->build();
    if (p.dim() != n) throw DimensionMismatchError("payoff dimension does not match n");
    AttachmentSpec a = attachment->build();
    if (a.dim() != n) throw DimensionMismatchError("attachment dimension does not match n");
    return ProtocolSpec::sampling(std::move(p), std::move(a),
                                  sampling_transform_from_tag(f), beta, shift);
  }
  if (kind == "vertex-reinforcement") {
    require_square(reinforcement, n, "A");
    return ProtocolSpec::vertex_reinforcement(reinforcement, gamma);
  }
  if (kind == "reversible-from-target") {
    require_square(exchange, n, "W");
    if (!target) throw SchemaError("protocol", "reversible-from-target needs a target block");
    if (target->kind == "gibbs") {
      Vector base = target->u0.size() ? target->u0 : Vector::Zero(n);
      if (base.size() != n) throw DimensionMismatchError("target U0 size does not match n");
      require_square(target->coupling, n, "target U");
      const Matrix c = target->coupling;
      const double b = target->beta;
      return ProtocolSpec::reversible_from_target(
          exchange, [base, c, b](const SimplexPoint& x) {
            return gibbs_measure(base, c, b, x);
          });
    }
    if (target->kind == "constant") {
      if (target->pi.size() != n)
        throw DimensionMismatchError("target pi size does not match n");
      const SimplexPoint pi = SimplexPoint::validated(target->pi, 1e-9);
      return ProtocolSpec::reversible_from_target(
          exchange, [pi](const SimplexPoint&) { return pi; });
    }
    throw UnknownKindError(target->kind);
  }
  if (kind == "replicator") {
    if (!payoff) throw SchemaError("protocol", "replicator needs a payoff block");
    PayoffSpec p = payoff->build();
    if (p.dim() != n) throw DimensionMismatchError("payoff dimension does not match n");
    return ProtocolSpec::replicator(std::move(p));
  }
  throw UnknownKindError(kind);
}

// ---------------------------------------------------------------------------
// JSON helpers

namespace {

const json& require_key(const json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path, "missing key \"" + key + "\"");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  return j.get<double>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

Vector as_vector(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = as_number(j[i], path);
  return v;
}

Matrix as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a nonempty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw SchemaError(path, "ragged matrix");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = as_number(j[i][k], path);
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json matrix_to_json_rows(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vector_to_json(m.row(i)));
  return a;
}

PayoffConfig parse_payoff(const json& j, const std::string& path) {
  PayoffConfig cfg;
  cfg.kind = as_string(require_key(j, "kind", path), path + ".kind");
  if (cfg.kind != "linear" && cfg.kind != "quadratic-potential") throw UnknownKindError(cfg.kind);
  cfg.matrix = as_matrix(require_key(j, "matrix", path), path + ".matrix");
  if (j.contains("linear")) cfg.linear = as_vector(j["linear"], path + ".linear");
  return cfg;
}

AttachmentConfig parse_attachment(const json& j, const std::string& path) {
  AttachmentConfig cfg;
  cfg.kind = as_string(require_key(j, "kind", path), path + ".kind");
  if (cfg.kind != "constant-weights" && cfg.kind != "imitative")
    throw UnknownKindError(cfg.kind);
  cfg.weights = as_matrix(require_key(j, "weights", path), path + ".weights");
  return cfg;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw SchemaError("$", "not valid JSON");
  if (!doc.is_object()) throw SchemaError("$", "top level must be an object");

  Scenario s;
  if (doc.contains("format_version"))
    s.format_version = static_cast<int>(as_number(doc["format_version"], "$.format_version"));
  s.name = as_string(require_key(doc, "name", "$"), "$.name");
  s.n = static_cast<int>(as_number(require_key(doc, "n", "$"), "$.n"));
  if (s.n < 2) throw SchemaError("$.n", "n must be >= 2");
  if (doc.contains("seed")) s.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("output")) s.output = as_string(doc["output"], "$.output");

  const json& proto = require_key(doc, "protocol", "$");
  ProtocolConfig& cfg = s.protocol;
  cfg.kind = as_string(require_key(proto, "kind", "$.protocol"), "$.protocol.kind");
  if (proto.contains("beta")) cfg.beta = as_number(proto["beta"], "$.protocol.beta");
  if (proto.contains("gamma")) cfg.gamma = as_number(proto["gamma"], "$.protocol.gamma");
  if (proto.contains("shift")) cfg.shift = as_number(proto["shift"], "$.protocol.shift");
  if (proto.contains("g")) cfg.g = as_string(proto["g"], "$.protocol.g");
  if (proto.contains("f")) cfg.f = as_string(proto["f"], "$.protocol.f");
  if (proto.contains("U0")) cfg.u0 = as_vector(proto["U0"], "$.protocol.U0");
  if (proto.contains("U")) cfg.coupling = as_matrix(proto["U"], "$.protocol.U");
  if (proto.contains("A")) cfg.reinforcement = as_matrix(proto["A"], "$.protocol.A");
  if (proto.contains("W")) cfg.exchange = as_matrix(proto["W"], "$.protocol.W");
  if (proto.contains("payoff")) cfg.payoff = parse_payoff(proto["payoff"], "$.protocol.payoff");
  if (proto.contains("attachment"))
    cfg.attachment = parse_attachment(proto["attachment"], "$.protocol.attachment");
  if (proto.contains("target")) {
    const json& t = proto["target"];
    TargetConfig tc;
    tc.kind = as_string(require_key(t, "kind", "$.protocol.target"), "$.protocol.target.kind");
    if (t.contains("U0")) tc.u0 = as_vector(t["U0"], "$.protocol.target.U0");
    if (t.contains("U")) tc.coupling = as_matrix(t["U"], "$.protocol.target.U");
    if (t.contains("beta")) tc.beta = as_number(t["beta"], "$.protocol.target.beta");
    if (t.contains("pi")) tc.pi = as_vector(t["pi"], "$.protocol.target.pi");
    cfg.target = std::move(tc);
  }

  // Build once to validate kinds and dimensions eagerly.
  s.build_protocol();

  if (doc.contains("analyses")) {
    const json& arr = doc["analyses"];
    if (!arr.is_array()) throw SchemaError("$.analyses", "expected an array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string path = "$.analyses[" + std::to_string(k) + "]";
      const json& a = arr[k];
      const std::string type = as_string(require_key(a, "type", path), path + ".type");
      if (type == "integrate") {
        IntegrateAnalysis ia;
        if (a.contains("x0")) ia.x0 = as_vector(a["x0"], path + ".x0");
        if (ia.x0.size() && ia.x0.size() != s.n)
          throw DimensionMismatchError("x0 size does not match n");
        if (a.contains("t_end")) ia.t_end = as_number(a["t_end"], path + ".t_end");
        if (a.contains("samples")) ia.samples = static_cast<int>(as_number(a["samples"], path));
        if (a.contains("rel_tol")) ia.rel_tol = as_number(a["rel_tol"], path);
        if (a.contains("field")) ia.field = as_string(a["field"], path + ".field");
        if (a.contains("expect_omega"))
          ia.expect_omega = as_string(a["expect_omega"], path + ".expect_omega");
        if (a.contains("verify_lyapunov_decrease"))
          ia.verify_lyapunov_decrease = a["verify_lyapunov_decrease"].get<bool>();
        if (a.contains("burn_in")) ia.burn_in = as_number(a["burn_in"], path);
        if (a.contains("window")) ia.window = as_number(a["window"], path);
        s.analyses.push_back(std::move(ia));
      } else if (type == "equilibria") {
        EquilibriaAnalysis ea;
        if (a.contains("tol")) ea.tol = as_number(a["tol"], path + ".tol");
        if (a.contains("seeds")) {
          for (const auto& seed : a["seeds"]) {
            Vector v = as_vector(seed, path + ".seeds");
            if (v.size() != s.n) throw DimensionMismatchError("seed size does not match n");
            ea.seeds.push_back(std::move(v));
          }
        }
        if (a.contains("verify_generator_match"))
          ea.verify_generator_match = a["verify_generator_match"].get<bool>();
        s.analyses.push_back(std::move(ea));
      } else if (type == "lyapunov-check") {
        LyapunovCheckAnalysis la;
        if (a.contains("delta")) la.delta = as_number(a["delta"], path);
        if (a.contains("samples")) la.samples = static_cast<int>(as_number(a["samples"], path));
        if (a.contains("tol")) la.tol = as_number(a["tol"], path);
        s.analyses.push_back(std::move(la));
      } else if (type == "beta-ladder") {
        BetaLadderAnalysis ba;
        if (a.contains("betas")) {
          for (const auto& b : a["betas"]) ba.betas.push_back(as_number(b, path + ".betas"));
        }
        if (a.contains("radius")) ba.radius = as_number(a["radius"], path);
        s.analyses.push_back(std::move(ba));
      } else if (type == "stochastic") {
        StochasticAnalysis st;
        if (a.contains("mode")) st.mode = as_string(a["mode"], path + ".mode");
        if (st.mode != "population" && st.mode != "reinforcement")
          throw UnknownKindError(st.mode);
        if (a.contains("agents"))
          st.agents = static_cast<std::int64_t>(as_number(a["agents"], path));
        if (a.contains("steps"))
          st.steps = static_cast<std::int64_t>(as_number(a["steps"], path));
        if (a.contains("t_horizon")) st.t_horizon = as_number(a["t_horizon"], path);
        if (a.contains("seeds")) st.seeds = static_cast<int>(as_number(a["seeds"], path));
        if (a.contains("x0")) {
          st.x0 = as_vector(a["x0"], path + ".x0");
          if (st.x0.size() != s.n) throw DimensionMismatchError("x0 size does not match n");
        }
        if (a.contains("start_state"))
          st.start_state = static_cast<int>(as_number(a["start_state"], path));
        s.analyses.push_back(std::move(st));
      } else if (type == "counterexample") {
        CounterexampleAnalysis ca;
        if (a.contains("eta")) ca.eta = as_number(a["eta"], path);
        if (a.contains("epsilon")) ca.epsilon = as_number(a["epsilon"], path);
        if (a.contains("W")) ca.exchange = as_matrix(a["W"], path + ".W");
        if (a.contains("starts")) ca.starts = static_cast<int>(as_number(a["starts"], path));
        if (a.contains("t_end_generator"))
          ca.t_end_generator = as_number(a["t_end_generator"], path);
        if (a.contains("t_end_target")) ca.t_end_target = as_number(a["t_end_target"], path);
        s.analyses.push_back(std::move(ca));
      } else {
        throw UnknownKindError(type);
      }
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

struct SerializeVisitor {
  json operator()(const IntegrateAnalysis& a) const {
    json j;
    j["type"] = "integrate";
    if (a.x0.size()) j["x0"] = vector_to_json(a.x0);
    j["t_end"] = a.t_end;
    j["samples"] = a.samples;
    j["rel_tol"] = a.rel_tol;
    j["field"] = a.field;
    j["expect_omega"] = a.expect_omega;
    j["verify_lyapunov_decrease"] = a.verify_lyapunov_decrease;
    if (a.burn_in > 0) j["burn_in"] = a.burn_in;
    if (a.window > 0) j["window"] = a.window;
    return j;
  }
  json operator()(const EquilibriaAnalysis& a) const {
    json j;
    j["type"] = "equilibria";
    j["tol"] = a.tol;
    if (!a.seeds.empty()) {
      json seeds = json::array();
      for (const Vector& v : a.seeds) seeds.push_back(vector_to_json(v));
      j["seeds"] = std::move(seeds);
    }
    j["verify_generator_match"] = a.verify_generator_match;
    return j;
  }
  json operator()(const LyapunovCheckAnalysis& a) const {
    json j;
    j["type"] = "lyapunov-check";
    j["delta"] = a.delta;
    j["samples"] = a.samples;
    j["tol"] = a.tol;
    return j;
  }
  json operator()(const BetaLadderAnalysis& a) const {
    json j;
    j["type"] = "beta-ladder";
    if (!a.betas.empty()) j["betas"] = a.betas;
    j["radius"] = a.radius;
    return j;
  }
  json operator()(const StochasticAnalysis& a) const {
    json j;
    j["type"] = "stochastic";
    j["mode"] = a.mode;
    j["agents"] = a.agents;
    if (a.steps > 0) j["steps"] = a.steps;
    j["t_horizon"] = a.t_horizon;
    j["seeds"] = a.seeds;
    if (a.x0.size()) j["x0"] = vector_to_json(a.x0);
    j["start_state"] = a.start_state;
    return j;
  }
  json operator()(const CounterexampleAnalysis& a) const {
    json j;
    j["type"] = "counterexample";
    j["eta"] = a.eta;
    j["epsilon"] = a.epsilon;
    if (a.exchange.size()) j["W"] = matrix_to_json_rows(a.exchange);
    j["starts"] = a.starts;
    j["t_end_generator"] = a.t_end_generator;
    j["t_end_target"] = a.t_end_target;
    return j;
  }
};

}  // namespace

std::string serialize_scenario(const Scenario& s) {
  json doc;
  doc["format_version"] = s.format_version;
  doc["name"] = s.name;
  doc["n"] = s.n;
  doc["seed"] = s.seed;
  doc["output"] = s.output;

  json proto;
  proto["kind"] = s.protocol.kind;
  if (s.protocol.kind == "gibbs-direct") {
    proto["beta"] = s.protocol.beta;
    if (s.protocol.u0.size()) proto["U0"] = vector_to_json(s.protocol.u0);
    proto["U"] = matrix_to_json_rows(s.protocol.coupling);
  } else if (s.protocol.kind == "comparison") {
    proto["beta"] = s.protocol.beta;
    proto["g"] = s.protocol.g;
  } else if (s.protocol.kind == "sampling") {
    proto["beta"] = s.protocol.beta;
    proto["f"] = s.protocol.f;
    if (s.protocol.shift != 0) proto["shift"] = s.protocol.shift;
  } else if (s.protocol.kind == "vertex-reinforcement") {
    proto["gamma"] = s.protocol.gamma;
    proto["A"] = matrix_to_json_rows(s.protocol.reinforcement);
  } else if (s.protocol.kind == "reversible-from-target") {
    proto["W"] = matrix_to_json_rows(s.protocol.exchange);
  }
  if (s.protocol.payoff) {
    json p;
    p["kind"] = s.protocol.payoff->kind;
    p["matrix"] = matrix_to_json_rows(s.protocol.payoff->matrix);
    if (s.protocol.payoff->linear.size()) p["linear"] = vector_to_json(s.protocol.payoff->linear);
    proto["payoff"] = std::move(p);
  }
  if (s.protocol.attachment) {
    json a;
    a["kind"] = s.protocol.attachment->kind;
    a["weights"] = matrix_to_json_rows(s.protocol.attachment->weights);
    proto["attachment"] = std::move(a);
  }
  if (s.protocol.target) {
    json t;
    t["kind"] = s.protocol.target->kind;
    if (s.protocol.target->kind == "gibbs") {
      if (s.protocol.target->u0.size()) t["U0"] = vector_to_json(s.protocol.target->u0);
      t["U"] = matrix_to_json_rows(s.protocol.target->coupling);
      t["beta"] = s.protocol.target->beta;
    } else if (s.protocol.target->kind == "constant") {
      t["pi"] = vector_to_json(s.protocol.target->pi);
    }
    proto["target"] = std::move(t);
  }
  doc["protocol"] = std::move(proto);

  json analyses = json::array();
  for (const AnalysisRequest& a : s.analyses)
    analyses.push_back(std::visit(SerializeVisitor{}, a));
  doc["analyses"] = std::move(analyses);
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Execution

namespace {

std::optional<LyapunovSpec> lyapunov_spec_for(const ProtocolSpec& proto) {
  switch (proto.kind()) {
    case ProtocolSpec::Kind::GibbsDirect:
      return LyapunovSpec::gibbs(proto.baseline(), proto.coupling(), proto.beta());
    case ProtocolSpec::Kind::VertexReinforcement:
      if ((proto.reinforcement_matrix() - proto.reinforcement_matrix().transpose())
              .cwiseAbs()
              .maxCoeff() > 1e-12)
        return std::nullopt;
      return LyapunovSpec::reinforcement(proto.reinforcement_matrix(), proto.gamma());
    case ProtocolSpec::Kind::Comparison:
    case ProtocolSpec::Kind::Sampling: {
      if (!proto.payoff().has_potential()) return std::nullopt;
      if (!proto.has_invariant_family()) return std::nullopt;
      if (proto.kind() == ProtocolSpec::Kind::Sampling &&
          proto.sampling_transform() != SamplingTransform::ExpBeta)
        return std::nullopt;
      const auto phi = proto.attachment().occupancy_factor();
      if (!phi) return std::nullopt;
      // phi at the all-ones vector recovers the per-strategy scale c; the
      // occupancy is then f_i(t) = c_i (constant weights) or c_i t (imitative).
      const Vector scale = (*phi)(Vector::Ones(proto.dim()));
      OccupancyWeight occ = OccupancyWeight::one(proto.dim());
      if (proto.attachment().kind() == AttachmentSpec::Kind::ConstantWeights) {
        occ = OccupancyWeight::exp_constant(scale.array().log().matrix());
      } else {
        occ = OccupancyWeight::custom(
            proto.dim(), [scale](int i, double t) { return scale[i] * t; });
      }
      return LyapunovSpec::potential_game(std::move(occ), proto.payoff(), proto.beta());
    }
    case ProtocolSpec::Kind::ReversibleFromTarget:
    case ProtocolSpec::Kind::Replicator:
      return std::nullopt;
  }
  return std::nullopt;
}

std::string analysis_artifact_name(const Scenario& s, std::size_t index,
                                   const std::string& suffix) {
  return s.name + "_" + std::to_string(index) + "_" + suffix;
}

json spectrum_to_json(const std::vector<std::complex<double>>& spectrum) {
  json a = json::array();
  for (const auto& ev : spectrum) a.push_back({{"re", ev.real()}, {"im", ev.imag()}});
  return a;
}

json report_to_json(const EquilibriumReport& r) {
  json j;
  j["location"] = vector_to_json(r.location.coords());
  j["residual"] = r.residual;
  j["spectrum"] = spectrum_to_json(r.spectrum);
  j["unstable_dim"] = r.unstable_dim;
  j["classification"] = stability_tag(r.classification);
  if (r.hessian_index) j["hessian_index"] = *r.hessian_index;
  return j;
}

}  // namespace

RunResult run_scenario(const Scenario& scenario, const RunOverrides& overrides) {
  const std::string out_dir = overrides.output_dir.value_or(scenario.output);
  const std::uint64_t seed = overrides.seed.value_or(scenario.seed);
  std::filesystem::create_directories(out_dir);

  const ProtocolSpec proto = scenario.build_protocol();
  const int n = scenario.n;

  RunResult result;
  json report;
  report["scenario"] = scenario.name;
  report["seed"] = seed;
  json analyses_json = json::array();

  for (std::size_t idx = 0; idx < scenario.analyses.size(); ++idx) {
    const AnalysisRequest& request = scenario.analyses[idx];
    AnalysisResult ar;

    auto add_check = [&](const std::string& name, bool passed, const std::string& detail) {
      ar.checks.push_back({name, passed, detail});
      if (!passed) result.all_passed = false;
    };
    auto write_artifact = [&](const std::string& file, const std::string& content) {
      const std::string path = out_dir + "/" + file;
      write_text_file(path, content);
      ar.artifacts.push_back(path);
    };

    if (const auto* ia = std::get_if<IntegrateAnalysis>(&request)) {
      ar.type = "integrate";
      VectorFieldSpec field = [&]() -> VectorFieldSpec {
        if (ia->field == "generator") return VectorFieldSpec::generator(proto);
        if (ia->field == "pi") {
          if (!proto.has_invariant_family())
            throw SchemaError("analyses", "pi field requested but protocol has no family");
          return VectorFieldSpec::pi_field(
              n, [proto](const SimplexPoint& x) { return proto.invariant_measure(x); });
        }
        if (ia->field == "replicator") return VectorFieldSpec::replicator(proto.payoff());
        throw UnknownKindError(ia->field);
      }();

      const SimplexPoint x0 = ia->x0.size() ? SimplexPoint::validated(ia->x0, 1e-9)
                                            : SimplexPoint::barycenter(n);
      IntegrateOptions iopts;
      iopts.rel_tol = ia->rel_tol;
      if (ia->samples > 0)
        for (int k = 1; k <= ia->samples; ++k)
          iopts.sample_times.push_back(ia->t_end * k / ia->samples);
      const Trajectory traj = integrate(field, x0, ia->t_end, iopts);
      write_artifact(analysis_artifact_name(scenario, idx, "trajectory.csv"),
                     trajectory_csv(traj.times, traj.states));

      bool in_simplex = true;
      for (const Vector& state : traj.states)
        if (state.minCoeff() < -1e-12 || std::abs(state.sum() - 1.0) > 1e-12)
          in_simplex = false;
      add_check("states-in-simplex", in_simplex, "");

      if (ia->expect_omega != "any") {
        OmegaLimitOptions oopts;
        oopts.burn_in = ia->burn_in;
        oopts.window = ia->window;
        const OmegaLimitSummary omega = omega_limit_summary(traj, oopts);
        add_check("omega-" + ia->expect_omega, verdict_tag(omega.verdict) == ia->expect_omega,
                  "verdict=" + verdict_tag(omega.verdict));
      }

      if (ia->verify_lyapunov_decrease) {
        const auto lspec = lyapunov_spec_for(proto);
        if (!lspec) throw SchemaError("analyses", "protocol has no Lyapunov structure");
        bool decreasing = true;
        int checked = 0;
        for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
          const SimplexPoint a = traj.state(k);
          if (field.eval_raw(a.coords()).norm() <= 1e-6) continue;
          if (!a.is_interior() || !traj.state(k + 1).is_interior()) continue;
          const double va = lspec->value(a);
          const double vb = lspec->value(traj.state(k + 1));
          ++checked;
          if (!(vb < va)) decreasing = false;
        }
        add_check("lyapunov-decrease", decreasing && checked > 0,
                  "steps_checked=" + std::to_string(checked));
      }
    } else if (const auto* ea = std::get_if<EquilibriaAnalysis>(&request)) {
      ar.type = "equilibria";
      if (!proto.has_invariant_family())
        throw SchemaError("analyses", "equilibria analysis needs an invariant family");
      auto pi_eval = [&proto](const SimplexPoint& x) { return proto.invariant_measure(x); };
      NewtonOptions nopts;
      nopts.tol = ea->tol;
      std::vector<SimplexPoint> seeds;
      for (const Vector& v : ea->seeds) seeds.push_back(SimplexPoint::validated(v, 1e-9));
      const FindEquilibriaResult eq = find_equilibria(pi_eval, n, seeds, nopts);

      json eq_json = json::array();
      bool residual_ok = true;
      for (const EquilibriumReport& r : eq.reports) {
        eq_json.push_back(report_to_json(r));
        if (r.residual > ea->tol) residual_ok = false;
      }
      json artifact;
      artifact["equilibria"] = std::move(eq_json);
      artifact["seeds_tried"] = eq.seeds_tried;
      artifact["seeds_dropped"] = eq.seeds_dropped;
      write_artifact(analysis_artifact_name(scenario, idx, "equilibria.json"),
                     artifact.dump(2) + "\n");
      add_check("roots-found", !eq.reports.empty(),
                "count=" + std::to_string(eq.reports.size()));
      add_check("residuals", residual_ok, "");

      if (ea->verify_generator_match) {
        const VectorFieldSpec gen = VectorFieldSpec::generator(proto);
        const FindEquilibriaResult gz = find_field_zeros(gen);
        bool match = gz.reports.size() == eq.reports.size();
        if (match) {
          for (const EquilibriumReport& r : eq.reports) {
            double best = 1e9;
            for (const EquilibriumReport& z : gz.reports)
              best = std::min(best,
                              (z.location.coords() - r.location.coords()).norm());
            if (best > 1e-8) match = false;
          }
        }
        add_check("generator-pi-root-match", match,
                  "pi_roots=" + std::to_string(eq.reports.size()) +
                      " generator_roots=" + std::to_string(gz.reports.size()));
      }
    } else if (const auto* la = std::get_if<LyapunovCheckAnalysis>(&request)) {
      ar.type = "lyapunov-check";
      const int samples_n = overrides.samples.value_or(la->samples);
      const auto lspec = lyapunov_spec_for(proto);
      if (!lspec) throw SchemaError("analyses", "protocol has no Lyapunov structure");
      const std::vector<SimplexPoint> samples =
          sample_compact_interior(n, samples_n, la->delta);
      const QuasigradientReport qg = quasigradient_check(*lspec, samples, la->tol);
      const VectorFieldSpec field = VectorFieldSpec::generator(proto);
      const DecreaseAngleReport da = decrease_and_angle(*lspec, field, la->delta, samples);

      json artifact;
      artifact["max_identity_violation"] = qg.max_identity_violation;
      artifact["max_cyclic_defect"] = qg.max_cyclic_defect;
      artifact["samples_checked"] = qg.samples_checked;
      artifact["violating_samples"] = qg.violating_samples;
      artifact["min_decrease_margin"] = da.min_decrease_margin;
      artifact["angle_constant"] = da.angle_constant;
      artifact["samples_used"] = da.samples_used;
      artifact["decrease_violations"] = da.decrease_violations;
      write_artifact(analysis_artifact_name(scenario, idx, "lyapunov.json"),
                     artifact.dump(2) + "\n");

      add_check("quasigradient-identity", qg.passed(la->tol),
                "max_violation=" + format_double(qg.max_identity_violation));
      add_check("strict-decrease", da.decrease_violations == 0,
                "violations=" + std::to_string(da.decrease_violations));
      add_check("angle-constant-positive", da.angle_constant > 0,
                "c=" + format_double(da.angle_constant));
    } else if (const auto* ba = std::get_if<BetaLadderAnalysis>(&request)) {
      ar.type = "beta-ladder";
      PayoffSpec payoff = [&]() -> PayoffSpec {
        switch (proto.kind()) {
          case ProtocolSpec::Kind::GibbsDirect:
            return PayoffSpec::linear(-proto.coupling());
          case ProtocolSpec::Kind::Comparison:
          case ProtocolSpec::Kind::Sampling:
          case ProtocolSpec::Kind::Replicator:
            return proto.payoff();
          default:
            throw SchemaError("analyses", "beta ladder needs a payoff-bearing protocol");
        }
      }();
      std::function<ProtocolSpec(double)> factory;
      if (proto.kind() == ProtocolSpec::Kind::GibbsDirect) {
        const Vector u0 = proto.baseline();
        const Matrix coupling = proto.coupling();
        factory = [u0, coupling](double beta) {
          return ProtocolSpec::gibbs_direct(u0, coupling, beta);
        };
      } else if (proto.kind() == ProtocolSpec::Kind::Comparison) {
        const ProtocolSpec base = proto;
        factory = [base](double beta) {
          return ProtocolSpec::comparison(base.payoff(), base.attachment(),
                                          base.comparison_rule(), beta);
        };
      }
      const std::vector<double> ladder =
          ba->betas.empty() ? default_beta_ladder() : ba->betas;
      BetaCorrespondenceOptions bopts;
      bopts.matching_radius = ba->radius;
      const BetaCorrespondenceTable table = beta_correspondence(payoff, ladder, factory, bopts);

      std::string csv = "beta";
      for (int i = 1; i <= n; ++i) csv += ",x" + std::to_string(i);
      csv += ",matched_nash,distance,classification,contraction_sup\n";
      bool max_beta_matched = true;
      const double beta_max = *std::max_element(ladder.begin(), ladder.end());
      for (const BetaRootEntry& e : table.entries) {
        csv += format_double(e.beta);
        for (int i = 0; i < n; ++i) csv += "," + format_double(e.root.location[i]);
        csv += "," + std::to_string(e.matched_nash) + "," + format_double(e.distance) + "," +
               stability_tag(e.root.classification) + "," +
               (e.contraction_sup ? format_double(*e.contraction_sup) : "") + "\n";
        if (e.beta == beta_max && e.matched_nash < 0) max_beta_matched = false;
      }
      write_artifact(analysis_artifact_name(scenario, idx, "beta_ladder.csv"), csv);

      json artifact;
      json nash_json = json::array();
      for (const NashPoint& np : table.nash_points) {
        json nj;
        nj["location"] = vector_to_json(np.location.coords());
        nj["kind"] = nash_kind_tag(np.kind);
        nj["strict"] = np.strict;
        if (np.nondegenerate) nj["nondegenerate"] = *np.nondegenerate;
        nash_json.push_back(std::move(nj));
      }
      artifact["nash_points"] = std::move(nash_json);
      write_artifact(analysis_artifact_name(scenario, idx, "beta_ladder.json"),
                     artifact.dump(2) + "\n");
      add_check("max-beta-roots-near-nash", max_beta_matched, "");
    } else if (const auto* st = std::get_if<StochasticAnalysis>(&request)) {
      ar.type = "stochastic";
      const int seeds_n = overrides.samples.value_or(st->seeds);
      if (st->mode == "population") {
        const SimplexPoint x0 = st->x0.size() ? SimplexPoint::validated(st->x0, 1e-9)
                                              : SimplexPoint::barycenter(n);
        const PopulationState s0 = PopulationState::from_fractions(st->agents, x0);
        const std::int64_t steps =
            st->steps > 0 ? st->steps
                          : static_cast<std::int64_t>(
                                std::llround(st->t_horizon * static_cast<double>(st->agents)));
        std::vector<double> deviations;
        PopulationPath first_path;
        for (int k = 0; k < seeds_n; ++k) {
          const PopulationPath path =
              simulate_population(proto, st->agents, steps, seed + k, s0);
          deviations.push_back(
              meanfield_deviation(path, proto, s0.as_simplex(), st->t_horizon));
          if (k == 0) first_path = path;
        }
        // Reproducibility: the same seed yields the same path bit-for-bit.
        const PopulationPath again = simulate_population(proto, st->agents, steps, seed, s0);
        bool reproducible = again.counts.size() == first_path.counts.size();
        if (reproducible)
          for (std::size_t k = 0; k < again.counts.size(); ++k)
            if (again.counts[k] != first_path.counts[k]) reproducible = false;

        std::string csv = "k";
        for (int i = 1; i <= n; ++i) csv += ",count" + std::to_string(i);
        csv += "\n";
        for (std::size_t k = 0; k < first_path.counts.size(); ++k) {
          csv += std::to_string(k);
          for (int i = 0; i < n; ++i) csv += "," + std::to_string(first_path.counts[k][i]);
          csv += "\n";
        }
        write_artifact(analysis_artifact_name(scenario, idx, "population.csv"), csv);

        std::vector<double> sorted = deviations;
        std::sort(sorted.begin(), sorted.end());
        json artifact;
        artifact["deviations"] = deviations;
        artifact["median_deviation"] = sorted[sorted.size() / 2];
        artifact["agents"] = st->agents;
        artifact["steps"] = steps;
        write_artifact(analysis_artifact_name(scenario, idx, "stochastic.json"),
                       artifact.dump(2) + "\n");

        bool finite = true;
        for (double d : deviations)
          if (!std::isfinite(d)) finite = false;
        add_check("deviation-finite", finite,
                  "median=" + format_double(sorted[sorted.size() / 2]));
        add_check("reproducible", reproducible, "");
      } else {
        const SimplexPoint prior = st->x0.size() ? SimplexPoint::validated(st->x0, 1e-9)
                                                 : SimplexPoint::barycenter(n);
        const std::int64_t steps = st->steps > 0 ? st->steps : 10000;
        OccupationPath first;
        bool mu_in_simplex = true;
        for (int k = 0; k < seeds_n; ++k) {
          const OccupationPath path =
              simulate_reinforcement(proto, steps, seed + k, st->start_state, prior);
          for (const Vector& mu : path.occupation)
            if (mu.minCoeff() < -1e-12 || std::abs(mu.sum() - 1.0) > 1e-9)
              mu_in_simplex = false;
          if (k == 0) first = path;
        }
        std::string csv = "k,X";
        for (int i = 1; i <= n; ++i) csv += ",mu" + std::to_string(i);
        csv += "\n";
        for (std::size_t k = 0; k < first.visits.size(); ++k) {
          csv += std::to_string(k + 1) + "," + std::to_string(first.visits[k]);
          for (int i = 0; i < n; ++i) csv += "," + format_double(first.occupation[k + 1][i]);
          csv += "\n";
        }
        write_artifact(analysis_artifact_name(scenario, idx, "reinforcement.csv"), csv);
        add_check("occupation-in-simplex", mu_in_simplex, "");
      }
    } else if (const auto* ca = std::get_if<CounterexampleAnalysis>(&request)) {
      ar.type = "counterexample";
      Matrix w = ca->exchange;
      if (w.size() == 0) {
        w = Matrix::Zero(3, 3);
        w << 0, 1, 2, 1, 0, 1, 2, 1, 0;
      }
      const CounterexampleSystem sys = build_counterexample(ca->eta, ca->epsilon, w);
      const SimplexPoint p = SimplexPoint::barycenter(3);
      const ChartProjection chart = ChartProjection::drop_last(3);

      const Matrix jf = jacobian(sys.generator_field, p, chart);
      const double b = ca->epsilon / 3.0 * w(0, 1);
      const double c = ca->epsilon / 3.0 * w(0, 2);
      const double d = ca->epsilon / 3.0 * w(1, 2);
      const double predicted_trace = (c - d) - 2.0 * ca->eta * (b + c + d);
      const double trace_err = std::abs(jf.trace() - predicted_trace);
      add_check("trace-formula", trace_err <= 1e-8, "error=" + format_double(trace_err));

      const EquilibriumReport pi_report = classify_equilibrium(sys.pi_field_spec, p);
      add_check("target-field-stable", pi_report.classification == Stability::Sink,
                stability_tag(pi_report.classification));
      const EquilibriumReport gen_report = classify_equilibrium(sys.generator_field, p);
      add_check("generator-field-unstable", gen_report.unstable_dim > 0,
                stability_tag(gen_report.classification));

      CounterRng rng(seed, 7);
      int converged = 0;
      IntegrateOptions fast;
      fast.rel_tol = 1e-8;
      for (int k = 0; k < ca->starts; ++k) {
        const SimplexPoint x0 = random_simplex_point(3, rng);
        const Trajectory traj = integrate(sys.pi_field_spec, x0, ca->t_end_target, fast);
        const OmegaLimitSummary omega = omega_limit_summary(traj);
        if (omega.verdict == OmegaLimitSummary::Verdict::FixedPoint &&
            (omega.fixed_point->coords() - p.coords()).norm() <= 1e-5)
          ++converged;
      }
      add_check("target-field-converges", converged == ca->starts,
                std::to_string(converged) + "/" + std::to_string(ca->starts));

      Vector start(3);
      start << 0.5, 0.3, 0.2;
      IntegrateOptions gopts;
      const Trajectory gen_traj = integrate(
          sys.generator_field, SimplexPoint::validated(start, 1e-9), ca->t_end_generator, gopts);
      write_artifact(analysis_artifact_name(scenario, idx, "generator_trajectory.csv"),
                     trajectory_csv(gen_traj.times, gen_traj.states));
      const OmegaLimitSummary omega_gen = omega_limit_summary(gen_traj);
      const bool periodic = omega_gen.verdict == OmegaLimitSummary::Verdict::Periodic;
      add_check("generator-field-periodic", periodic, "verdict=" + verdict_tag(omega_gen.verdict));

      bool period_stable = false;
      if (periodic) {
        IntegrateOptions halved = gopts;
        halved.rel_tol *= 0.5;
        const Trajectory t2 = integrate(sys.generator_field,
                                        SimplexPoint::validated(start, 1e-9),
                                        ca->t_end_generator, halved);
        const OmegaLimitSummary omega2 = omega_limit_summary(t2);
        if (omega2.verdict == OmegaLimitSummary::Verdict::Periodic)
          period_stable =
              std::abs(*omega2.period - *omega_gen.period) <= 0.01 * (*omega_gen.period);
      }
      add_check("period-stable", period_stable,
                omega_gen.period ? "period=" + format_double(*omega_gen.period) : "");

      json artifact;
      artifact["trace"] = jf.trace();
      artifact["predicted_trace"] = predicted_trace;
      artifact["generator_spectrum"] = spectrum_to_json(gen_report.spectrum);
      artifact["target_spectrum"] = spectrum_to_json(pi_report.spectrum);
      artifact["generator_verdict"] = verdict_tag(omega_gen.verdict);
      if (omega_gen.period) artifact["period"] = *omega_gen.period;
      artifact["target_converged"] = converged;
      write_artifact(analysis_artifact_name(scenario, idx, "counterexample.json"),
                     artifact.dump(2) + "\n");
    }

    json aj;
    aj["type"] = ar.type;
    aj["artifacts"] = ar.artifacts;
    json checks = json::array();
    for (const CheckResult& c : ar.checks)
      checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    aj["checks"] = std::move(checks);
    analyses_json.push_back(std::move(aj));
    result.analyses.push_back(std::move(ar));
  }

  report["analyses"] = std::move(analyses_json);
  report["all_passed"] = result.all_passed;
  result.report_path = out_dir + "/report.json";
  write_text_file(result.report_path, report.dump(2) + "\n");
  return result;
}

}  // namespace simplexflow
