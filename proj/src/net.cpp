#include "birch/net.hpp"

namespace birch {

void Dvass::canonicalize_transitions() {
  for (auto& t : transitions) t = canonicalize(t).value;
  std::sort(transitions.begin(), transitions.end());
  transitions.erase(std::unique(transitions.begin(), transitions.end()),
                    transitions.end());
}

Dvass reverse(const Dvass& net) {
  Dvass out = net;
  for (auto& t : out.transitions) t = {t.target, t.effect.negated(), t.source};
  out.canonicalize_transitions();
  return out;
}

void for_each_instantiation(
    const Dvass& net, const State& state, std::span<const Atom> pool,
    const std::function<void(size_t, const Renaming&)>& fn) {
  for (size_t idx = 0; idx < net.transitions.size(); ++idx) {
    const TransitionOrbit& rep = net.transitions[idx];
    if (rep.source.location != state.location) continue;
    if (rep.source.regs.size() != state.regs.size()) continue;

    // The source state pins the renaming on the representative's source atoms.
    // It must be consistent (same rep atom, same concrete atom) and injective
    // (distinct rep atoms denote distinct data).
    std::vector<std::pair<Atom, Atom>> forced;
    bool ok = true;
    for (size_t r = 0; ok && r < state.regs.size(); ++r) {
      const auto &want = rep.source.regs[r], &have = state.regs[r];
      if (want.has_value() != have.has_value()) ok = false;
      else if (want) forced.emplace_back(*want, *have);
    }
    if (!ok) continue;
    std::sort(forced.begin(), forced.end());
    forced.erase(std::unique(forced.begin(), forced.end()), forced.end());
    std::vector<Atom> used;
    for (size_t i = 0; ok && i < forced.size(); ++i) {
      if (i > 0 && forced[i].first == forced[i - 1].first) ok = false;
      used.push_back(forced[i].second);
    }
    std::sort(used.begin(), used.end());
    if (!ok || std::adjacent_find(used.begin(), used.end()) != used.end()) continue;

    std::vector<Atom> rest;
    for (Atom a : support(rep))
      if (!std::ranges::any_of(forced, [&](const auto& p) { return p.first == a; }))
        rest.push_back(a);

    std::vector<Atom> fresh_pool;
    {
      std::vector<Atom> avoid(pool.begin(), pool.end());
      avoid.insert(avoid.end(), used.begin(), used.end());
      fresh_pool = fresh_atoms(avoid, rest.size());
    }

    // Assign the remaining atoms injectively to pool atoms or to fresh atoms
    // taken in order, so each instantiation appears once.
    std::vector<std::pair<Atom, Atom>> chosen = forced;
    auto dfs = [&](auto&& self, size_t i, size_t fresh_used) -> void {
      if (i == rest.size()) {
        fn(idx, Renaming::from_pairs(chosen));
        return;
      }
      auto try_atom = [&](Atom target) {
        chosen.emplace_back(rest[i], target);
        used.push_back(target);
        self(self, i + 1, fresh_used + (target == fresh_pool[fresh_used] ? 1 : 0));
        used.pop_back();
        chosen.pop_back();
      };
      for (Atom a : pool)
        if (std::ranges::find(used, a) == used.end()) try_atom(a);
      try_atom(fresh_pool[fresh_used]);
    };
    dfs(dfs, 0, 0);
  }
}

std::vector<std::pair<size_t, Configuration>> enumerate_successors(
    const Dvass& net, const Configuration& c) {
  return enumerate_successors(net, c, {});
}

std::vector<std::pair<size_t, Configuration>> enumerate_successors(
    const Dvass& net, const Configuration& c, std::span<const Atom> extra_pool) {
  std::vector<std::pair<size_t, Configuration>> out;
  std::vector<Atom> pool = support(c);
  pool.insert(pool.end(), extra_pool.begin(), extra_pool.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  for_each_instantiation(net, c.state, pool, [&](size_t idx, const Renaming& sigma) {
    TransitionOrbit t = net.transitions[idx].renamed(sigma);
    DataVector m = c.marking + t.effect;
    if (!m.nonnegative()) return;
    out.push_back({idx, Configuration{t.target, std::move(m)}});
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace birch
