#include <algorithm>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "birch/net.hpp"

namespace birch {
namespace {

// A total equality type over a transition's variables: block index per
// variable, blocks numbered by first appearance.
using EqualityType = std::vector<int>;

struct TransVars {
  std::vector<std::string> names;  // appearance order, deduplicated
  std::map<std::string, int> index;
};

TransVars collect_vars(const PetriTransition& t) {
  TransVars tv;
  auto add = [&](const std::string& v) {
    if (tv.index.emplace(v, (int)tv.names.size()).second) tv.names.push_back(v);
  };
  for (auto& [p, v] : t.inputs) add(v);
  for (auto& [p, v] : t.outputs) add(v);
  return tv;
}

// Union-find over variable indices for the forced equalities.
struct Uf {
  std::vector<int> parent;
  explicit Uf(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Enumerates all total equality types consistent with the constraint, in a
// deterministic order. Returns an empty list when the constraint itself is
// contradictory.
std::vector<EqualityType> equality_types(const PetriTransition& t,
                                         const TransVars& tv) {
  int n = (int)tv.names.size();
  Uf uf(n);
  for (auto& [a, b] : t.equalities) uf.unite(tv.index.at(a), tv.index.at(b));

  // Compress variables into forced classes, ordered by first appearance.
  std::vector<int> cls(n, -1);
  int num_cls = 0;
  for (int i = 0; i < n; ++i) {
    int root = uf.find(i);
    if (cls[root] < 0) cls[root] = num_cls++;
    cls[i] = cls[root];
  }
  std::vector<std::pair<int, int>> apart;  // forced-distinct class pairs
  for (auto& [a, b] : t.disequalities) {
    int ca = cls[tv.index.at(a)], cb = cls[tv.index.at(b)];
    if (ca == cb) return {};  // x=y and x!=y at once: no type satisfies it
    apart.emplace_back(ca, cb);
  }

  // Partition the forced classes into blocks; forced-distinct classes may not
  // share a block.
  std::vector<EqualityType> types;
  std::vector<int> block_of(num_cls, -1);
  auto rec = [&](auto&& self, int c, int used) -> void {
    if (c == num_cls) {
      EqualityType ty(n);
      for (int i = 0; i < n; ++i) ty[i] = block_of[cls[i]];
      types.push_back(std::move(ty));
      return;
    }
    for (int b = 0; b <= used && b < num_cls; ++b) {
      bool ok = true;
      for (auto& [x, y] : apart) {
        int bx = x == c ? b : block_of[x];
        int by = y == c ? b : block_of[y];
        if (bx >= 0 && bx == by) ok = false;
      }
      if (!ok) continue;
      block_of[c] = b;
      self(self, c + 1, std::max(used, b + 1));
      block_of[c] = -1;
    }
  };
  if (num_cls > 0)
    rec(rec, 0, 0);
  else
    types.push_back({});
  return types;
}

int num_blocks(const EqualityType& ty) {
  int m = 0;
  for (int b : ty) m = std::max(m, b + 1);
  return m;
}

// One data vector per side, with each variable resolved to its block's atom.
DataVector side_vector(const std::vector<std::pair<PlaceId, std::string>>& side,
                       const TransVars& tv, const EqualityType& ty,
                       int64_t sign) {
  DataVector v;
  for (auto& [p, var] : side)
    v.add_data(p, Atom{(uint32_t)ty[tv.index.at(var)]}, sign);
  return v;
}

// A type is tight when some (place, block) pair is both consumed and produced:
// a one-shot effect vector would cancel the pair and lose the requirement
// that the token be present before the transition fires.
bool is_tight(const DataVector& in, const DataVector& out) {
  for (auto& [key, cnt] : in.data)
    if (cnt > 0 && out.at(key.first, key.second) > 0) return true;
  return false;
}

}  // namespace

Dvass compile_petri(const PetriNet& petri) {
  Dvass net;
  net.name = petri.name;
  net.atom_places = petri.places;
  net.locations.push_back("l");

  struct Expanded {
    const PetriTransition* t;
    TransVars tv;
    std::vector<EqualityType> types;
  };
  std::vector<Expanded> all;
  int max_pins = 0;
  for (auto& t : petri.transitions) {
    Expanded e{&t, collect_vars(t), {}};
    e.types = equality_types(t, e.tv);
    if (e.types.empty())
      throw std::invalid_argument("transition '" + t.name +
                                  "' has an unsatisfiable constraint");
    for (auto& ty : e.types) {
      DataVector in = side_vector(t.inputs, e.tv, ty, 1);
      DataVector out = side_vector(t.outputs, e.tv, ty, 1);
      if (is_tight(in, out)) max_pins = std::max(max_pins, num_blocks(ty));
    }
    all.push_back(std::move(e));
  }
  for (int r = 0; r < max_pins; ++r)
    net.registers.push_back(std::string(1, kAuxSigil) + "pin" +
                            std::to_string(r));

  LocId home = 0;
  for (auto& e : all) {
    int type_idx = 0;
    for (auto& ty : e.types) {
      DataVector in = side_vector(e.t->inputs, e.tv, ty, 1);
      DataVector out = side_vector(e.t->outputs, e.tv, ty, 1);
      if (!is_tight(in, out)) {
        net.transitions.push_back(TransitionOrbit{
            net.empty_state(home), out - in, net.empty_state(home)});
      } else {
        // Split into a consume half and a produce half through a fresh
        // location, carrying every block atom across in the pin registers so
        // the two halves agree on the whole type.
        LocId mid = (LocId)net.locations.size();
        net.locations.push_back(std::string(1, kAuxSigil) + e.t->name + "_" +
                                std::to_string(type_idx));
        State pinned = net.empty_state(mid);
        for (int b = 0; b < num_blocks(ty); ++b)
          pinned.regs[b] = Atom{(uint32_t)b};
        net.transitions.push_back(
            TransitionOrbit{net.empty_state(home), in.negated(), pinned});
        net.transitions.push_back(
            TransitionOrbit{pinned, out, net.empty_state(home)});
      }
      ++type_idx;
    }
  }
  net.canonicalize_transitions();
  return net;
}

}  // namespace birch
