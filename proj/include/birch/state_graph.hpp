#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "birch/net.hpp"

namespace birch {

// One orbit of edges of the state graph: a pair of states up to joint
// renaming, stored as a canonical representative so equal orbits compare
// equal. The orbit data is the two locations, the EMPTY patterns, and the
// equality type across both register valuations.
struct EdgeOrbit {
  State source;
  State target;

  friend auto operator<=>(const EdgeOrbit&, const EdgeOrbit&) = default;

  EdgeOrbit renamed(const Renaming& r) const {
    return {source.renamed(r), target.renamed(r)};
  }
  void collect_atoms(std::vector<Atom>& acc) const {
    source.collect_atoms(acc);
    target.collect_atoms(acc);
  }
  void atom_signature(Atom a, AtomSignature& sig) const {
    signature_section(source, a, sig);
    signature_section(target, a, sig);
  }
};

// Canonical orbit of the pair (s, t).
EdgeOrbit make_edge_orbit(const State& s, const State& t);

// Projections of the net's transition orbits to state pairs: canonical,
// sorted, deduplicated (orbits differing only in effect collapse).
std::vector<EdgeOrbit> edge_orbits(const Dvass& net);

// All orbits of pairs (a.source, u) reachable by unifying a's target with
// b's source. The middles must agree on location, EMPTY pattern and equality
// type (EMPTY unifies only with EMPTY); that forces the identification of
// their atoms, and each atom private to b's target is then either identified
// with an atom of a's source absent from the middle or kept fresh, in every
// injective way. Canonical sorted set.
std::vector<EdgeOrbit> compose(const EdgeOrbit& a, const EdgeOrbit& b);

// Reflexive-transitive closure of a set of edge orbits. `witness[i]` is the
// length of the shortest edge chain realising `orbits[i]`: identities have 0,
// base edges 1, and a composition sums its parts.
struct ClosureTable {
  size_t num_locations = 0;
  size_t num_registers = 0;
  std::vector<EdgeOrbit> orbits;  // sorted, unique
  std::vector<int64_t> witness;   // parallel to orbits

  std::optional<int64_t> witness_of(const EdgeOrbit& o) const;
  bool contains(const EdgeOrbit& o) const { return witness_of(o).has_value(); }
};

// Least set of orbits containing every identity orbit over the signature
// (location x EMPTY pattern x equality type) and the given edges, closed
// under compose; witness lengths are minimal. Terminates because pairs of
// states form finitely many orbits.
ClosureTable saturate(size_t num_locations, size_t num_registers,
                      const std::vector<EdgeOrbit>& edges);
ClosureTable saturate(const Dvass& net);

// True iff the graph the closure was built from has a path s ->* sp.
bool path_exists(const ClosureTable& closure, const State& s, const State& sp);

// Atom pool size sufficient to realise any path the closure promises: a
// shortest witness chain visits witness+1 states of at most num_registers
// atoms each, and the bound adds the two endpoints' worth of atoms on top.
int64_t path_bound(const ClosureTable& closure);

// Drops every transition orbit that cannot lie on a cycle through q and qp:
// kept orbits (s, v, s') pass the four path queries q -> s, s' -> q,
// qp -> s, s' -> qp. Throws std::invalid_argument unless q and qp have
// all-EMPTY registers.
Dvass restrict_to_scc(const Dvass& net, const State& q, const State& qp);

}  // namespace birch
