#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "birch/net.hpp"
#include "birch/vectors.hpp"

namespace birch {

// Vector over the extended index set used by the orbit-usefulness encoding:
// place coordinates (a DataVector), coordinates keyed by whole control states,
// and one distinguished star coordinate counting uses of the tested orbit.
struct YVector {
  DataVector vec;
  std::vector<std::pair<State, int64_t>> states;  // sorted by state, no zeros
  int64_t star = 0;

  friend auto operator<=>(const YVector&, const YVector&) = default;

  bool is_zero() const { return vec.is_zero() && states.empty() && star == 0; }
  int64_t state_coord(const State& s) const;
  void add_state(const State& s, int64_t delta);

  YVector& operator+=(const YVector& other);
  friend YVector operator+(YVector a, const YVector& b) { return a += b; }

  YVector renamed(const Renaming& r) const;
  void collect_atoms(std::vector<Atom>& acc) const;
};

// Least representative of y's orbit under renamings: support atoms are mapped
// bijectively onto {0, .., k-1} in the order that minimises the result.
YVector canonicalize_yvector(const YVector& y);

struct MsumInstance {
  std::vector<YVector> generators;  // one canonical representative per orbit
  YVector target;
};

// Three-valued answer. A SAT witness is a multiset (with repetition) of
// instantiated generators summing exactly to the target; atom_budget reports
// the pool size that produced it. UNSAT_WITHIN is qualified by the exhausted
// budget; UNSAT_CERTIFIED additionally asserts the budget was complete for
// the instance (caller-asserted via the config flag, or automatic when the
// generators use no atoms and the search ran uncapped).
struct MsumOutcome {
  enum class Kind { kSat, kUnsatWithin, kUnsatCertified };
  Kind kind = Kind::kUnsatWithin;
  std::vector<YVector> witness;
  int atom_budget = 0;
};

struct MsumConfig {
  int max_budget = -1;  // max fresh atoms per stage; < 0 selects default_msum_budget(inst)
  bool certified = false;
  size_t node_cap = 200000;  // per-stage search cap; hitting it forfeits certification
};

// Heuristic pool bound: |supp(target)| + 2 * (max generator support) * #generators.
int default_msum_budget(const MsumInstance& inst);

// Decides whether the target is a sum of a finite multiset of vectors drawn
// from the orbits of the generators. Complete for SAT within the atom budget:
// pools of supp(target) plus n fresh atoms are tried for n up to the budget,
// and every injective instantiation of every generator into the pool becomes
// a column of an integer-feasibility problem. Throws std::invalid_argument if
// the budget is below |supp(target)|.
MsumOutcome solve_msum(const MsumInstance& inst, const MsumConfig& cfg = {});

// Nonnegative-integer feasibility of sum_i x_i * columns[i] == target, by
// best-first search over partial-sum residuals with the scalar-product
// extension rule, deduplicating states by residual. Complete in both
// directions when the node cap is not hit.
enum class IntFeas { kSat, kUnsat, kInconclusive };
IntFeas integer_feasibility(const std::vector<std::vector<int64_t>>& columns,
                            const std::vector<int64_t>& target,
                            std::vector<int64_t>* solution, size_t node_cap);

// Builds the two Multiset Sum instances that decide whether the transition
// orbit at `orbit_index` is useful: one for pseudo-runs q -> qp, one for
// qp -> q. Every orbit contributes its flow vector; the tested orbit
// additionally contributes a starred copy that must be used exactly once.
// Throws std::out_of_range if orbit_index is not a transition of the net.
std::pair<MsumInstance, MsumInstance> build_usefulness_instances(
    const Dvass& net, const State& q, const State& qp, size_t orbit_index);

}  // namespace birch
