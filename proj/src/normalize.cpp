#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "birch/atoms.hpp"
#include "birch/net.hpp"
#include "birch/vectors.hpp"

namespace birch {
namespace {

std::string aux(const std::string& tail) {
  return std::string(1, kAuxSigil) + tail;
}

// All ways to split {0..n-1} into equality classes, as a class index per
// element with classes numbered by first appearance.
std::vector<std::vector<int>> set_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cls(n, 0);
  auto rec = [&](auto&& self, int i, int used) -> void {
    if (i == n) {
      out.push_back(cls);
      return;
    }
    for (int b = 0; b <= used && b < n; ++b) {
      cls[i] = b;
      self(self, i + 1, std::max(used, b + 1));
    }
  };
  if (n == 0)
    out.push_back({});
  else
    rec(rec, 0, 0);
  return out;
}

uint32_t empty_mask(const State& s) {
  uint32_t m = 0;
  for (size_t r = 0; r < s.regs.size(); ++r)
    if (!s.regs[r]) m |= 1u << r;
  return m;
}

// Step 1: move register contents onto auxiliary atom places, one "held" and
// one "incoming" place per register. Locations are annotated with the set of
// empty registers plus a half-step flag; each original transition deposits
// its target valuation on the incoming places and a flash-back move (one per
// equality pattern of the deposited atoms) transfers them to the held places.
void eliminate_registers(Instance& inst) {
  const Dvass& old_net = inst.net;
  int nr = (int)old_net.registers.size();
  uint32_t nmasks = 1u << nr;

  Dvass net;
  net.name = old_net.name;
  net.plain_places = old_net.plain_places;
  net.atom_places = old_net.atom_places;
  PlaceId held0 = (PlaceId)net.atom_places.size();
  for (auto& r : old_net.registers) net.atom_places.push_back(aux("reg_" + r));
  PlaceId inc0 = (PlaceId)net.atom_places.size();
  for (auto& r : old_net.registers) net.atom_places.push_back(aux("inc_" + r));

  // Location ids: (orig * nmasks + mask) * 2 + half, half 1 = mid-step.
  auto loc = [&](LocId l, uint32_t mask, int half) -> LocId {
    return (LocId)((l * nmasks + mask) * 2 + half);
  };
  for (LocId l = 0; l < (LocId)old_net.locations.size(); ++l)
    for (uint32_t m = 0; m < nmasks; ++m) {
      std::string base = aux(old_net.locations[l] + "_" + std::to_string(m));
      net.locations.push_back(base);
      net.locations.push_back(base + "_mid");
    }

  for (auto& t : old_net.transitions) {
    DataVector eff = t.effect;
    for (int r = 0; r < nr; ++r) {
      if (t.source.regs[r]) eff.add_data(held0 + r, *t.source.regs[r], -1);
      if (t.target.regs[r]) eff.add_data(inc0 + r, *t.target.regs[r], 1);
    }
    net.transitions.push_back(TransitionOrbit{
        net.empty_state(loc(t.source.location, empty_mask(t.source), 0)),
        std::move(eff),
        net.empty_state(loc(t.target.location, empty_mask(t.target), 1))});
  }

  // Flash-back moves. Exactly the pattern matching the deposited atoms can
  // fire: a coarser pattern demands equal atoms where they differ, a finer
  // one distinct atoms where they coincide.
  for (LocId l = 0; l < (LocId)old_net.locations.size(); ++l)
    for (uint32_t m = 0; m < nmasks; ++m) {
      std::vector<int> active;
      for (int r = 0; r < nr; ++r)
        if (!(m & (1u << r))) active.push_back(r);
      for (auto& cls : set_partitions((int)active.size())) {
        DataVector eff;
        for (size_t i = 0; i < active.size(); ++i) {
          Atom a{(uint32_t)cls[i]};
          eff.add_data(held0 + active[i], a, 1);
          eff.add_data(inc0 + active[i], a, -1);
        }
        net.transitions.push_back(
            TransitionOrbit{net.empty_state(loc(l, m, 1)), std::move(eff),
                            net.empty_state(loc(l, m, 0))});
      }
    }

  auto map_config = [&](const Configuration& c) -> Configuration {
    DataVector v = c.marking;
    for (int r = 0; r < nr; ++r)
      if (c.state.regs[r]) v.add_data(held0 + r, *c.state.regs[r], 1);
    return Configuration{
        net.empty_state(loc(c.state.location, empty_mask(c.state), 0)),
        std::move(v)};
  };
  inst.source = map_config(inst.source);
  inst.target = map_config(inst.target);
  inst.net = std::move(net);
}

// Step 2: freeze the atoms appearing in the source/target markings into
// dedicated plain places, one per (atom place, frozen atom) pair. Each orbit
// is restricted by every partial injection of its atoms into the frozen set;
// the instantiated occurrences move to the new plain places.
void freeze_marking_atoms(Instance& inst) {
  std::vector<Atom> frozen = support(inst.source.marking);
  for (Atom a : support(inst.target.marking)) frozen.push_back(a);
  std::sort(frozen.begin(), frozen.end());
  frozen.erase(std::unique(frozen.begin(), frozen.end()), frozen.end());
  if (frozen.empty()) return;

  const Dvass& old_net = inst.net;
  Dvass net;
  net.name = old_net.name;
  net.locations = old_net.locations;
  net.registers = old_net.registers;
  net.atom_places = old_net.atom_places;
  net.plain_places = old_net.plain_places;
  PlaceId nh = (PlaceId)old_net.plain_places.size();
  int ns = (int)frozen.size();
  auto frozen_place = [&](PlaceId p, int si) -> PlaceId {
    return nh + p * ns + si;
  };
  for (PlaceId p = 0; p < (PlaceId)old_net.atom_places.size(); ++p)
    for (int si = 0; si < ns; ++si)
      net.plain_places.push_back(old_net.atom_places[p] + aux("s") +
                                 std::to_string(si));

  auto freeze_vector = [&](const DataVector& v,
                           const std::map<Atom, int>& to) -> DataVector {
    DataVector out;
    out.plain = v.plain;
    for (auto& [key, cnt] : v.data) {
      auto it = to.find(key.second);
      if (it == to.end())
        out.add_data(key.first, key.second, cnt);
      else
        out.add_plain(frozen_place(key.first, it->second), cnt);
    }
    return out;
  };

  for (auto& t : old_net.transitions) {
    std::vector<Atom> supp = support(t);
    int k = (int)supp.size();
    // Choose the image slot per atom: -1 leaves it free, otherwise it is
    // identified with a frozen atom (injectively).
    std::vector<int> slot(k, -1);
    std::vector<bool> used(ns, false);
    auto rec = [&](auto&& self, int i) -> void {
      if (i == k) {
        std::map<Atom, int> to;
        for (int j = 0; j < k; ++j)
          if (slot[j] >= 0) to[supp[j]] = slot[j];
        net.transitions.push_back(TransitionOrbit{
            t.source, freeze_vector(t.effect, to), t.target});
        return;
      }
      self(self, i + 1);
      for (int si = 0; si < ns; ++si) {
        if (used[si]) continue;
        used[si] = true;
        slot[i] = si;
        self(self, i + 1);
        slot[i] = -1;
        used[si] = false;
      }
    };
    rec(rec, 0);
  }

  std::map<Atom, int> all;
  for (int si = 0; si < ns; ++si) all[frozen[si]] = si;
  inst.source.marking = freeze_vector(inst.source.marking, all);
  inst.target.marking = freeze_vector(inst.target.marking, all);
  inst.net = std::move(net);
}

// Step 3: load a nonzero (now atom-free) marking through a fresh location
// with a pair of bracket moves, one in each direction, so the endpoint
// becomes the fresh location with zero marking.
void bracket_side(Instance& inst, Configuration& side, const char* tail,
                  bool fresh_to_loc_is_forward) {
  if (side.marking.is_zero() && side.state.all_empty()) return;
  LocId fresh = (LocId)inst.net.locations.size();
  inst.net.locations.push_back(aux(tail));
  State at = inst.net.empty_state(side.state.location);
  State brk = inst.net.empty_state(fresh);
  DataVector u = side.marking;
  if (fresh_to_loc_is_forward) {
    inst.net.transitions.push_back(TransitionOrbit{brk, u, at});
    inst.net.transitions.push_back(TransitionOrbit{at, u.negated(), brk});
  } else {
    inst.net.transitions.push_back(TransitionOrbit{at, u.negated(), brk});
    inst.net.transitions.push_back(TransitionOrbit{brk, u, at});
  }
  side = Configuration{brk, DataVector{}};
}

}  // namespace

bool is_normal(const Instance& in) {
  return in.source.state.all_empty() && in.source.marking.is_zero() &&
         in.target.state.all_empty() && in.target.marking.is_zero();
}

Instance normalize(const Instance& in) {
  if (is_normal(in)) return in;
  Instance inst = in;
  bool marking_atoms = !support(inst.source.marking).empty() ||
                       !support(inst.target.marking).empty();
  bool regs_used =
      !inst.source.state.all_empty() || !inst.target.state.all_empty();
  if (regs_used || (marking_atoms && !inst.net.registers.empty()))
    eliminate_registers(inst);
  freeze_marking_atoms(inst);
  bracket_side(inst, inst.source, "src", true);
  bracket_side(inst, inst.target, "tgt", false);
  inst.net.canonicalize_transitions();
  return inst;
}

}  // namespace birch
