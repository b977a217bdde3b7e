#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "birch/conditions.hpp"
#include "birch/cover.hpp"
#include "birch/msum.hpp"
#include "birch/net.hpp"

namespace birch {

// Rank of a net: atom places, then plain places, then transition orbits,
// compared lexicographically. Every reduction strictly decreases it, which is
// what terminates the decision loop.
struct Rank {
  size_t atom_places = 0;
  size_t plain_places = 0;
  size_t orbits = 0;
  friend auto operator<=>(const Rank&, const Rank&) = default;
};

Rank rank_of(const Dvass& net);

enum class Decision { kBireachable, kNotBireachable, kUnknown };

// One reduction applied by the loop, with the ranks around it.
struct ReductionRecord {
  enum class Kind { kSccRestrict, kRemoveOrbit, kFoldPlain, kFoldAtom };
  Kind kind = Kind::kSccRestrict;
  std::string item;   // removed orbits or the folded place, rendered for humans
  int64_t bound = 0;  // band/register bound of a fold, 0 elsewhere
  Rank before;
  Rank after;
};

struct Verdict {
  Decision decision = Decision::kUnknown;
  std::string reason;  // separation or base-case detail, or the unknown cause
  std::vector<ReductionRecord> trace;
};

// The net minus the given orbit. Throws std::invalid_argument if absent.
Dvass remove_orbit(const Dvass& net, const TransitionOrbit& o);

struct FoldResult {
  Dvass net;
  State q;
  State qp;
};

// Folds an unpumpable plain place into the locations: every location splits
// into bands 0..bound tracking the place's value, and each orbit survives at
// exactly the bands its effect keeps in range. The returned states sit in
// band 0.
FoldResult fold_plain_place(const Dvass& net, PlaceId h, int64_t bound,
                            const State& q, const State& qp);

// Folds an unpumpable atom place into `bound` fresh registers holding its
// tokens: each orbit spawns every canonical assignment of source and target
// register contents whose multiset difference equals the place part of the
// effect. The returned states leave the new registers empty.
FoldResult fold_atom_place(const Dvass& net, PlaceId p, int64_t bound,
                           const State& q, const State& qp);

struct DecideConfig {
  MsumConfig msum;
  CoverCaps cover;
  // Trust budget-qualified refutations and capped covers as if they were
  // complete, trading soundness of negatives for totality.
  bool assume_complete = false;
  // Called after every reduction with the instance before and after it.
  std::function<void(const ReductionRecord&, const Instance&, const Instance&)> observer;
};

// Decides bi-reachability of src and tgt in the net: normalizes, then loops
// condition checks and rank-decreasing reductions until a base case or a
// conclusive answer. Three-valued: budget-qualified evidence yields kUnknown
// unless assume_complete is set.
Verdict decide(const Dvass& net, const Configuration& src, const Configuration& tgt,
               const DecideConfig& cfg = {});

}  // namespace birch
