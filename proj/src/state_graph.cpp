#include "birch/state_graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

namespace birch {

namespace {

// States with every register EMPTY or holding a block atom, one per equality
// type: assignments are EMPTY or a block id in restricted-growth order.
std::vector<State> identity_type_states(size_t num_registers, LocId loc) {
  std::vector<State> out;
  std::vector<int> assign(num_registers, -1);
  auto rec = [&](auto&& self, size_t r, int blocks) -> void {
    if (r == num_registers) {
      State s;
      s.location = loc;
      s.regs.assign(num_registers, std::nullopt);
      for (size_t i = 0; i < num_registers; ++i)
        if (assign[i] >= 0) s.regs[i] = Atom{(uint32_t)assign[i]};
      out.push_back(s);
      return;
    }
    assign[r] = -1;
    self(self, r + 1, blocks);
    for (int b = 0; b <= blocks; ++b) {
      assign[r] = b;
      self(self, r + 1, std::max(blocks, b + 1));
    }
  };
  rec(rec, 0, 0);
  return out;
}

bool contains_atom(const std::vector<Atom>& xs, Atom a) {
  return std::find(xs.begin(), xs.end(), a) != xs.end();
}

}  // namespace

EdgeOrbit make_edge_orbit(const State& s, const State& t) {
  return canonicalize(EdgeOrbit{s, t}).value;
}

std::vector<EdgeOrbit> edge_orbits(const Dvass& net) {
  std::vector<EdgeOrbit> out;
  for (const auto& t : net.transitions) out.push_back(make_edge_orbit(t.source, t.target));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<EdgeOrbit> compose(const EdgeOrbit& a, const EdgeOrbit& b) {
  const State& ma = a.target;
  const State& mb = b.source;
  if (ma.location != mb.location || ma.regs.size() != mb.regs.size()) return {};
  const size_t nregs = ma.regs.size();
  for (size_t r = 0; r < nregs; ++r)
    if (ma.regs[r].has_value() != mb.regs[r].has_value()) return {};
  for (size_t r = 0; r < nregs; ++r)
    for (size_t r2 = r + 1; r2 < nregs; ++r2) {
      if (!ma.regs[r] || !ma.regs[r2]) continue;
      if ((ma.regs[r] == ma.regs[r2]) != (mb.regs[r] == mb.regs[r2])) return {};
    }

  // The middle forces b's visible atoms onto a's; the equality-type check
  // above makes the forced map well defined and injective.
  std::vector<std::pair<Atom, Atom>> forced;
  for (size_t r = 0; r < nregs; ++r)
    if (ma.regs[r]) forced.push_back({*mb.regs[r], *ma.regs[r]});
  std::sort(forced.begin(), forced.end());
  forced.erase(std::unique(forced.begin(), forced.end()), forced.end());

  std::vector<Atom> priv;  // atoms of b's target the middle does not bind
  for (Atom x : support(b.target)) {
    bool bound = false;
    for (const auto& [from, to] : forced) bound |= from == x;
    if (!bound) priv.push_back(x);
  }
  const std::vector<Atom> src_support = support(a.source);
  const std::vector<Atom> mid_support = support(a.target);
  std::vector<Atom> cands;  // a-source atoms a private atom may merge with
  for (Atom x : src_support)
    if (!contains_atom(mid_support, x)) cands.push_back(x);

  std::vector<EdgeOrbit> out;
  std::vector<std::pair<Atom, Atom>> chosen = forced;
  std::vector<Atom> deferred;
  auto rec = [&](auto&& self, size_t i) -> void {
    if (i == priv.size()) {
      auto pairs = chosen;
      std::vector<Atom> used = src_support;
      used.insert(used.end(), mid_support.begin(), mid_support.end());
      for (const auto& [from, to] : pairs) used.push_back(to);
      const std::vector<Atom> fresh = fresh_atoms(used, deferred.size());
      for (size_t j = 0; j < deferred.size(); ++j) pairs.push_back({deferred[j], fresh[j]});
      const Renaming sigma = Renaming::from_pairs(std::move(pairs));
      out.push_back(make_edge_orbit(a.source, b.target.renamed(sigma)));
      return;
    }
    deferred.push_back(priv[i]);
    self(self, i + 1);
    deferred.pop_back();
    for (Atom c : cands) {
      bool taken = false;
      for (const auto& [from, to] : chosen) taken |= to == c;
      if (taken) continue;
      chosen.push_back({priv[i], c});
      self(self, i + 1);
      chosen.pop_back();
    }
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ClosureTable saturate(size_t num_locations, size_t num_registers,
                      const std::vector<EdgeOrbit>& edges) {
  std::map<EdgeOrbit, int64_t> best;
  std::deque<EdgeOrbit> work;
  auto offer = [&](const EdgeOrbit& o, int64_t w) {
    auto it = best.find(o);
    if (it != best.end() && it->second <= w) return;
    best[o] = w;
    work.push_back(o);
  };

  for (LocId loc = 0; loc < (LocId)num_locations; ++loc)
    for (const State& s : identity_type_states(num_registers, loc))
      offer(make_edge_orbit(s, s), 0);
  for (const EdgeOrbit& e : edges) offer(make_edge_orbit(e.source, e.target), 1);

  while (!work.empty()) {
    const EdgeOrbit o = work.front();
    work.pop_front();
    const int64_t w = best.at(o);
    const std::vector<std::pair<EdgeOrbit, int64_t>> snapshot(best.begin(), best.end());
    for (const auto& [p, wp] : snapshot) {
      for (const EdgeOrbit& c : compose(o, p)) offer(c, w + wp);
      for (const EdgeOrbit& c : compose(p, o)) offer(c, wp + w);
    }
  }

  ClosureTable table;
  table.num_locations = num_locations;
  table.num_registers = num_registers;
  for (const auto& [o, w] : best) {
    table.orbits.push_back(o);
    table.witness.push_back(w);
  }
  return table;
}

ClosureTable saturate(const Dvass& net) {
  return saturate(net.locations.size(), net.registers.size(), edge_orbits(net));
}

std::optional<int64_t> ClosureTable::witness_of(const EdgeOrbit& o) const {
  const auto it = std::lower_bound(orbits.begin(), orbits.end(), o);
  if (it == orbits.end() || !(*it == o)) return std::nullopt;
  return witness[(size_t)(it - orbits.begin())];
}

bool path_exists(const ClosureTable& closure, const State& s, const State& sp) {
  return closure.contains(make_edge_orbit(s, sp));
}

int64_t path_bound(const ClosureTable& closure) {
  int64_t max_witness = 0;
  for (int64_t w : closure.witness) max_witness = std::max(max_witness, w);
  return (max_witness + 2) * (int64_t)closure.num_registers;
}

Dvass restrict_to_scc(const Dvass& net, const State& q, const State& qp) {
  if (!q.all_empty() || !qp.all_empty())
    throw std::invalid_argument("restrict_to_scc: endpoints must have all-EMPTY registers");
  const ClosureTable closure = saturate(net);
  Dvass out = net;
  out.transitions.clear();
  for (const auto& t : net.transitions) {
    const bool keep = path_exists(closure, q, t.source) && path_exists(closure, t.target, q) &&
                      path_exists(closure, qp, t.source) && path_exists(closure, t.target, qp);
    if (keep) out.transitions.push_back(t);
  }
  return out;
}

}  // namespace birch
