#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "birch/cover.hpp"
#include "birch/msum.hpp"
#include "birch/net.hpp"

namespace birch {

// Classification of one transition orbit: useful when pseudo-runs through it
// exist in both directions, useless when at least one direction is refuted
// with certification, unknown when a refutation exists but only within an
// exhausted budget.
enum class Usefulness { kUseful, kUseless, kUnknown };

struct OrbitUsefulness {
  Usefulness verdict = Usefulness::kUnknown;
  MsumOutcome toward;  // multiset-sum outcome for pseudo-runs q -> qp
  MsumOutcome back;    // and for qp -> q
};

// Per-orbit usefulness report, parallel to net.transitions.
struct Phi1Report {
  std::vector<OrbitUsefulness> orbits;

  bool all_useful() const;
  bool any_unknown() const;
  // Least index classified useless, the canonical removal candidate.
  std::optional<size_t> first_useless() const;
};

// Classifies every transition orbit of an SCC-restricted net with all-EMPTY
// endpoint states q and qp. A SAT answer in both directions is conclusive
// regardless of budget; refutations are conclusive only when certified.
// Throws std::invalid_argument unless q and qp are all-EMPTY states.
Phi1Report check_phi1(const Dvass& net, const State& q, const State& qp,
                      const MsumConfig& cfg = {});

// Where one place can be pumped: forward and backward, from each endpoint.
struct PlacePumpability {
  bool fwd_q = false;
  bool fwd_qp = false;
  bool bwd_q = false;
  bool bwd_qp = false;
  bool pumpable() const { return fwd_q && fwd_qp && bwd_q && bwd_qp; }
};

// Pumpability of every place, the bound on unpumpable ones, and the four
// cover analyses behind them: forward covers from q and qp on the net,
// backward ones from the same states on the reversed net.
struct Phi2Report {
  std::vector<PlacePumpability> plain;  // parallel to net.plain_places
  std::vector<PlacePumpability> atoms;  // parallel to net.atom_places
  // Largest finite measure of an unpumpable place across the ideals of the
  // analyses it fails; 0 when every place is pumpable. Certified only when
  // the four covers are complete.
  int64_t bound_b = 0;
  CoverResult fwd_q;
  CoverResult fwd_qp;
  CoverResult bwd_q;
  CoverResult bwd_qp;

  bool complete() const;
  bool all_pumpable() const;
  // Least unpumpable place of each kind. Positive pumpability is witnessed
  // by an ideal even under incomplete covers, but a false here is certified
  // only when complete() holds.
  std::optional<PlaceId> first_unpumpable_plain() const;
  std::optional<PlaceId> first_unpumpable_atom() const;
};

// Runs the four cover analyses from the zero configurations of q and qp and
// evaluates, for every place, the pumping criterion: an ideal at the start
// state with positive measure of the place. Resource-cap diagnostics leave
// complete() false, which forbids trusting any negative entry.
// Throws std::invalid_argument unless q and qp are all-EMPTY states.
Phi2Report check_phi2(const Dvass& net, const State& q, const State& qp,
                      const CoverCaps& caps = {});

// Measure of a place inside a cover ideal: the stored count for a plain
// place; for an atom place, omega if any atom is omega-marked, otherwise the
// total number of tokens.
NatOmega ideal_measure(const OmegaValuation& val, bool atom_place, PlaceId place);

}  // namespace birch
