#pragma once

#include <optional>
#include <vector>

#include "simplexflow/dynamics.hpp"
#include "simplexflow/protocols.hpp"
#include "simplexflow/types.hpp"

namespace simplexflow {

enum class NashKind { Pure, FullyMixed, PartiallyMixed };

std::string nash_kind_tag(NashKind k);

struct NashPoint {
  SimplexPoint location;
  std::vector<int> support;
  NashKind kind = NashKind::Pure;
  bool strict = false;
  std::optional<bool> nondegenerate;  // empty for pure points and unresolved cases
  bool degenerate_support_flag = false;  // support system was singular
};

struct NashCertificate {
  bool is_nash = false;
  double max_violation = 0.0;  // max_i U_i(x) - <U(x), x>
  std::vector<int> equality_pattern;  // indices with U_i(x) ~ <U(x), x> on the support
};

/// Checks U_i(x) <= <U(x), x> + tol for all i.
NashCertificate is_nash(const PayoffSpec& payoff, const SimplexPoint& x, double tol = 1e-9);

/// Support enumeration for linear payoffs U(x) = Ux, n <= 6. Singular
/// support systems fall back to vertex enumeration of the solution polytope
/// in dimension <= 2 and are flagged beyond that.
std::vector<NashPoint> enumerate_nash(const PayoffSpec& payoff);

/// Fills kind, strictness and the extrinsic nondegeneracy test (invertibility
/// of the (r-1)x(r-1) payoff-difference Jacobian on the support chart).
NashPoint classify_nash(const PayoffSpec& payoff, const NashPoint& point);

struct BetaRootEntry {
  double beta = 0.0;
  EquilibriumReport root;
  int matched_nash = -1;  // index into the Nash list, -1 = unmatched
  double distance = 0.0;
  bool tie = false;
  std::optional<double> contraction_sup;  // sup ||D pi_beta|| near pure strict targets
};

struct BetaCorrespondenceTable {
  std::vector<double> betas;
  std::vector<NashPoint> nash_points;
  std::vector<BetaRootEntry> entries;
};

struct BetaCorrespondenceOptions {
  double matching_radius = 0.1;
  double newton_tol = 1e-10;
  double contraction_ball = 0.05;
  int contraction_samples = 64;
};

/// For each beta: equilibria of the protocol's invariant-measure field,
/// matched to the nearest Nash point, with stability classifications and a
/// contraction diagnostic around pure strict targets. When no factory is
/// given, the canonical logit target pi_beta is used.
BetaCorrespondenceTable beta_correspondence(
    const PayoffSpec& payoff, const std::vector<double>& beta_ladder,
    const std::function<ProtocolSpec(double)>& protocol_factory = nullptr,
    const BetaCorrespondenceOptions& opts = {});

inline std::vector<double> default_beta_ladder() { return {1, 5, 10, 25, 50, 100}; }

struct BestReplyFace {
  std::vector<int> strategies;  // argmax set within tol
  bool full_simplex = false;
};

/// {i : U_i(x) >= max_j U_j(x) - tol} and the face it spans.
BestReplyFace best_reply_set(const PayoffSpec& payoff, const SimplexPoint& x,
                             double tol = 1e-9);

}  // namespace simplexflow
