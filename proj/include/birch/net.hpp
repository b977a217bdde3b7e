#pragma once

#include <functional>
#include <optional>
#include <string>

#include "birch/vectors.hpp"

namespace birch {

using LocId = int32_t;
using RegId = int32_t;

// Control state: a location plus a register valuation. EMPTY registers hold
// nullopt. Distinct registers may hold the same atom.
struct State {
  LocId location = 0;
  std::vector<std::optional<Atom>> regs;

  friend auto operator<=>(const State&, const State&) = default;

  bool all_empty() const {
    return std::ranges::all_of(regs, [](const auto& r) { return !r.has_value(); });
  }

  State renamed(const Renaming& r) const {
    State out = *this;
    for (auto& reg : out.regs)
      if (reg) reg = r(*reg);
    return out;
  }
  void collect_atoms(std::vector<Atom>& acc) const {
    for (const auto& reg : regs)
      if (reg) acc.push_back(*reg);
  }
  void atom_signature(Atom a, AtomSignature& sig) const {
    for (size_t i = 0; i < regs.size(); ++i)
      if (regs[i] == a) sig.push_back((int64_t)i);
  }
};

// One orbit of transitions, stored as a canonical representative
// (source state, effect vector, target state). The orbit is the closure of the
// representative under all renamings.
struct TransitionOrbit {
  State source;
  DataVector effect;
  State target;

  friend auto operator<=>(const TransitionOrbit&, const TransitionOrbit&) = default;

  TransitionOrbit renamed(const Renaming& r) const {
    return {source.renamed(r), effect.renamed(r), target.renamed(r)};
  }
  void collect_atoms(std::vector<Atom>& acc) const {
    source.collect_atoms(acc);
    effect.collect_atoms(acc);
    target.collect_atoms(acc);
  }
  void atom_signature(Atom a, AtomSignature& sig) const {
    signature_section(source, a, sig);
    signature_section(effect, a, sig);
    signature_section(target, a, sig);
  }
};

// A state with a concrete marking. Markings are nonnegative in actual runs;
// pseudo-runs may pass through negative values, which DataVector permits.
struct Configuration {
  State state;
  DataVector marking;

  friend auto operator<=>(const Configuration&, const Configuration&) = default;

  Configuration renamed(const Renaming& r) const {
    return {state.renamed(r), marking.renamed(r)};
  }
  void collect_atoms(std::vector<Atom>& acc) const {
    state.collect_atoms(acc);
    marking.collect_atoms(acc);
  }
  void atom_signature(Atom a, AtomSignature& sig) const {
    signature_section(state, a, sig);
    signature_section(marking, a, sig);
  }
};

// A state with an omega valuation; its downward closure is a simple ideal.
struct OmegaConfiguration {
  State state;
  OmegaValuation valuation;

  friend auto operator<=>(const OmegaConfiguration&, const OmegaConfiguration&) = default;

  OmegaConfiguration renamed(const Renaming& r) const {
    return {state.renamed(r), valuation.renamed(r)};
  }
  void collect_atoms(std::vector<Atom>& acc) const {
    state.collect_atoms(acc);
    valuation.collect_atoms(acc);
  }
  void atom_signature(Atom a, AtomSignature& sig) const {
    signature_section(state, a, sig);
    signature_section(valuation, a, sig);
  }
};

using PseudoRun = std::vector<Configuration>;

// A vector addition system with states, registers and equality data: locations
// and registers form the control states, plain places count indistinguishable
// tokens, atom places hold data tokens, and the transition table lists one
// canonical representative per orbit.
struct Dvass {
  std::string name;
  std::vector<std::string> locations;
  std::vector<std::string> registers;
  std::vector<std::string> plain_places;
  std::vector<std::string> atom_places;
  std::vector<TransitionOrbit> transitions;

  State empty_state(LocId loc) const {
    return State{loc, std::vector<std::optional<Atom>>(registers.size(), std::nullopt)};
  }

  std::optional<int32_t> find(const std::vector<std::string>& names,
                              const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return (int32_t)i;
    return std::nullopt;
  }

  // Canonicalizes, sorts and dedups the transition table.
  void canonicalize_transitions();
};

// A Petri net with equality data: every place holds data tokens, transitions
// consume and produce tokens bound to variables under a partial constraint of
// variable equalities and disequalities.
struct PetriTransition {
  std::string name;
  std::vector<std::pair<PlaceId, std::string>> inputs;   // (place, variable)
  std::vector<std::pair<PlaceId, std::string>> outputs;
  std::vector<std::pair<std::string, std::string>> equalities;
  std::vector<std::pair<std::string, std::string>> disequalities;
};

struct PetriNet {
  std::string name;
  std::vector<std::string> places;
  std::vector<PetriTransition> transitions;
};

// A decision instance: a net plus source and target configurations. The two
// configurations share atom scope (an atom occurring in both means the same
// data value on both sides).
struct Instance {
  Dvass net;
  Configuration source;
  Configuration target;
};

// Swaps sources with targets and negates effects; an answer for the reversed
// net is an answer for backward reachability in the original.
Dvass reverse(const Dvass& net);

// Enumerates instantiations of transition orbits enabled at `state`: renamings
// of a representative whose source matches `state` exactly, with the remaining
// atoms drawn injectively from `pool` or taken fresh (fresh atoms are used in
// a fixed order, so each choice appears once). Calls fn(orbit index, renaming).
void for_each_instantiation(
    const Dvass& net, const State& state, std::span<const Atom> pool,
    const std::function<void(size_t, const Renaming&)>& fn);

// Concrete one-step successors of a configuration, as (orbit index, successor)
// pairs, sorted and deduplicated. Successors share the input's atoms; fresh
// atoms get the smallest unused ids.
std::vector<std::pair<size_t, Configuration>> enumerate_successors(
    const Dvass& net, const Configuration& c);

// Same, with extra atoms offered to the instantiation pool besides the
// configuration's own (used by searches that must be able to hit named
// target atoms exactly).
std::vector<std::pair<size_t, Configuration>> enumerate_successors(
    const Dvass& net, const Configuration& c, std::span<const Atom> extra_pool);

// Rewrites an instance into an equivalent one whose source and target have
// all-EMPTY registers and zero markings, by moving register contents onto
// auxiliary atom places, freezing marking atoms into plain places, and loading
// the markings through bracket transitions from two fresh locations.
Instance normalize(const Instance& in);
bool is_normal(const Instance& in);

// Expands each Petri transition into transition orbits, one per total
// equality type consistent with its constraint. Transitions that input and
// output the same atom at the same place are split into an input half and an
// output half through a fresh location, with the type's atoms pinned in
// fresh registers across the two halves.
Dvass compile_petri(const PetriNet& petri);

// Name prefix for generated locations/registers/places; rejected in input.
inline constexpr char kAuxSigil = '@';

}  // namespace birch
