#pragma once

#include <cstdint>
#include <optional>

#include "birch/net.hpp"

namespace birch {

// Resource bounds for the brute-force search. Token and atom caps carve out
// the invariant region the search exhausts; depth and state caps only stop
// the search early.
struct OracleBudget {
  int64_t max_tokens_per_place = 8;
  int64_t max_total_atoms = 8;
  size_t max_depth = 64;
  size_t max_states = 200000;
};

// A found run always validates with nonnegativity. When nothing is found,
// `frontier_empty` true means the token/atom-bounded state space was fully
// explored, so the negative is conclusive within that region; false means a
// depth or state cap cut the search short.
struct OracleAnswer {
  bool found = false;
  PseudoRun run;
  bool frontier_empty = false;
};

// Bounded breadth-first search for a concrete run src ->* tgt. States are
// deduplicated by canonical form with the atoms of src and tgt pinned, so
// orbit-equivalent configurations merge while the shared atom scope of the
// endpoints keeps its identity. Answers are deterministic: shortest run,
// canonical tie-break.
OracleAnswer bfs_reach(const Dvass& net, const Configuration& src, const Configuration& tgt,
                       const OracleBudget& b = {});

struct BireachAnswer {
  OracleAnswer forward;   // src ->* tgt
  OracleAnswer backward;  // tgt ->* src
};

enum class OracleVerdict { kYes, kNo, kUnknown };

BireachAnswer oracle_bireach(const Dvass& net, const Configuration& src, const Configuration& tgt,
                             const OracleBudget& b = {});

// kYes when both runs were found; kNo when either direction exhausted its
// region without finding one (conclusive within the budget); kUnknown when a
// cut search leaves the question open.
OracleVerdict bireach_verdict(const BireachAnswer& a);

// Checks that every step's difference triple (state, marking delta, state)
// lies in some transition orbit of the net; with the flag, also checks every
// marking is nonnegative (proper run rather than pseudo-run).
bool validate_pseudo_run(const Dvass& net, const PseudoRun& run, bool require_nonneg);

// Arranges a multiset of concrete transition instances into a pseudo-run from
// `start` traversing each exactly once (an Euler path over states), or
// nullopt when degrees or connectivity make that impossible.
std::optional<PseudoRun> assemble_euler_run(const State& start, const DataVector& start_marking,
                                            const std::vector<TransitionOrbit>& steps);

// Sufficient conditions for mutual plain-VASS reachability between q(0) and
// qp(0): theta1 asks for arbitrarily repeatable Euler flows (a path flow and a
// circulation, both using every transition, over a weakly connected graph),
// and the pump fields ask for an all-omega cover ideal at the named location,
// forward from its zero configuration or backward in the reversed net. When
// all five hold, runs exist in both directions.
struct ThetaAnswer {
  bool theta1 = false;
  bool pump_fwd_q = false;
  bool pump_fwd_qp = false;
  bool pump_bwd_q = false;
  bool pump_bwd_qp = false;
  bool ok() const { return theta1 && pump_fwd_q && pump_fwd_qp && pump_bwd_q && pump_bwd_qp; }
};

// Throws std::invalid_argument unless the net has neither registers nor atom
// places.
ThetaAnswer vass_theta_check(const Dvass& net, LocId q, LocId qp);

}  // namespace birch
