#include "birch/cover.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <functional>
#include <set>
#include <utility>

namespace birch {

namespace {

// Partitions of {0..n-1} as restricted-growth strings: out[i] is the class of
// element i, classes numbered by first appearance. n = 0 gives one empty
// partition.
std::vector<std::vector<int>> set_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> rgs((size_t)n, 0);
  auto rec = [&](auto&& self, int i, int used) -> void {
    if (i == n) {
      out.push_back(rgs);
      return;
    }
    for (int c = 0; c <= used; ++c) {
      rgs[(size_t)i] = c;
      self(self, i + 1, std::max(used, c + 1));
    }
  };
  if (n == 0)
    out.push_back({});
  else
    rec(rec, 0, 0);
  return out;
}

// Partitions of n into unordered positive parts, parts descending.
std::vector<std::vector<int64_t>> int_partitions(int64_t n) {
  std::vector<std::vector<int64_t>> out;
  std::vector<int64_t> cur;
  auto rec = [&](auto&& self, int64_t rest, int64_t maxp) -> void {
    if (rest == 0) {
      out.push_back(cur);
      return;
    }
    for (int64_t p = std::min(rest, maxp); p >= 1; --p) {
      cur.push_back(p);
      self(self, rest - p, p);
      cur.pop_back();
    }
  };
  rec(rec, n, n);
  return out;
}

uint32_t empty_mask(const State& s) {
  uint32_t m = 0;
  for (size_t r = 0; r < s.regs.size(); ++r)
    if (!s.regs[r]) m |= 1u << r;
  return m;
}

}  // namespace

size_t DvasReduction::loc1_index(LocId location, uint32_t empty, bool barred) const {
  if (!step1()) return (size_t)location;
  const uint32_t nmask = 1u << reg_count();
  return ((size_t)location * nmask + empty) * 2 + (barred ? 1 : 0);
}

DvasReduction to_dvas(const Dvass& net) {
  DvasReduction red;
  const size_t R = net.registers.size();

  // Step 1: registers become paired atom places. An unbarred location
  // remembers which registers are EMPTY; the register contents sit one token
  // each on the held places. A transition fires in two halves: the main half
  // consumes the held tokens of its source registers, produces the target
  // contents on the incoming places and moves to the barred copy; a flash-back
  // moves every incoming token onto its held place and returns. There is one
  // flash-back per partition of the non-empty registers into equal-content
  // classes, and injectivity of instantiation makes exactly the matching
  // partition fireable.
  Dvass v1;
  if (R > 0) {
    v1.name = net.name;
    const uint32_t nmask = 1u << R;
    for (LocId l = 0; l < (LocId)net.locations.size(); ++l)
      for (uint32_t m = 0; m < nmask; ++m)
        for (int half = 0; half < 2; ++half) {
          v1.locations.push_back("@" + net.locations[(size_t)l] + "_" + std::to_string(m) +
                                 (half ? "b" : ""));
          red.loc1.push_back({l, m, half == 1});
        }
    v1.plain_places = net.plain_places;
    v1.atom_places = net.atom_places;
    for (const auto& r : net.registers) v1.atom_places.push_back("@r_" + r);
    for (const auto& r : net.registers) v1.atom_places.push_back("@rw_" + r);
    red.held_base = net.atom_places.size();
    red.inc_base = red.held_base + R;
    red.p1_count = v1.atom_places.size();
    red.h1_count = net.plain_places.size();

    for (const TransitionOrbit& t : net.transitions) {
      TransitionOrbit u;
      u.source = State{(LocId)red.loc1_index(t.source.location, empty_mask(t.source), false), {}};
      u.target = State{(LocId)red.loc1_index(t.target.location, empty_mask(t.target), true), {}};
      u.effect = t.effect;
      for (size_t r = 0; r < R; ++r) {
        if (t.source.regs[r]) u.effect.add_data((PlaceId)(red.held_base + r), *t.source.regs[r], -1);
        if (t.target.regs[r]) u.effect.add_data((PlaceId)(red.inc_base + r), *t.target.regs[r], +1);
      }
      v1.transitions.push_back(std::move(u));
    }
    for (LocId l = 0; l < (LocId)net.locations.size(); ++l)
      for (uint32_t m = 0; m < nmask; ++m) {
        std::vector<size_t> full;
        for (size_t r = 0; r < R; ++r)
          if (!(m >> r & 1)) full.push_back(r);
        for (const std::vector<int>& rgs : set_partitions((int)full.size())) {
          TransitionOrbit u;
          u.source = State{(LocId)red.loc1_index(l, m, true), {}};
          u.target = State{(LocId)red.loc1_index(l, m, false), {}};
          int classes = full.empty() ? 0 : *std::max_element(rgs.begin(), rgs.end()) + 1;
          std::vector<Atom> reps = fresh_atoms({}, (size_t)classes);
          for (size_t i = 0; i < full.size(); ++i) {
            Atom a = reps[(size_t)rgs[i]];
            u.effect.add_data((PlaceId)(red.inc_base + full[i]), a, -1);
            u.effect.add_data((PlaceId)(red.held_base + full[i]), a, +1);
          }
          v1.transitions.push_back(std::move(u));
        }
      }
  } else {
    v1 = net;
    for (LocId l = 0; l < (LocId)net.locations.size(); ++l) red.loc1.push_back({l, 0, false});
    red.held_base = red.inc_base = net.atom_places.size();
    red.p1_count = net.atom_places.size();
    red.h1_count = net.plain_places.size();
  }

  // Step 2: locations become plain places. A single token marks the current
  // location; a transition consumes it and deposits the target's token on a
  // shadow place, from where a separate mover transition releases it. The
  // detour keeps self-loops from cancelling their own location effect.
  Dvass v2;
  if (red.loc1.size() > 1) {
    v2.name = v1.name;
    v2.locations = {"@all"};
    v2.plain_places = v1.plain_places;
    for (size_t i = 0; i < red.loc1.size(); ++i) {
      v2.plain_places.push_back("@at_" + v1.locations[i]);
      v2.plain_places.push_back("@sh_" + v1.locations[i]);
    }
    v2.atom_places = v1.atom_places;
    for (const TransitionOrbit& t : v1.transitions) {
      TransitionOrbit u;
      u.source = State{0, {}};
      u.target = State{0, {}};
      u.effect = t.effect;
      u.effect.add_plain((PlaceId)red.loc_place((size_t)t.source.location), -1);
      u.effect.add_plain((PlaceId)red.loc_shadow_place((size_t)t.target.location), +1);
      v2.transitions.push_back(std::move(u));
    }
    for (size_t i = 0; i < red.loc1.size(); ++i) {
      TransitionOrbit u;
      u.source = State{0, {}};
      u.target = State{0, {}};
      u.effect.add_plain((PlaceId)red.loc_shadow_place(i), -1);
      u.effect.add_plain((PlaceId)red.loc_place(i), +1);
      v2.transitions.push_back(std::move(u));
    }
  } else {
    v2 = std::move(v1);
  }

  // Step 3: plain places lift to atom places. A count of n tokens becomes n
  // data tokens split over anonymous atoms in every possible way, so each
  // transition expands to the orbits of all same-sign splittings of its plain
  // effects, with block atoms drawn from the data part's atoms or from fresh
  // classes shared in every pattern (distinct blocks of one place use
  // distinct atoms).
  Dvass v3;
  if (!v2.plain_places.empty()) {
    v3.name = v2.name;
    v3.locations = v2.locations;
    v3.atom_places = v2.atom_places;
    for (const auto& h : v2.plain_places) v3.atom_places.push_back("@h_" + h);
    std::set<TransitionOrbit> orbs;
    for (const TransitionOrbit& t : v2.transitions) {
      DataVector base;
      base.data = t.effect.data;
      const std::vector<Atom> named = support(base);
      struct Entry {
        PlaceId lifted;
        int64_t total;
        int sign;
      };
      std::vector<Entry> entries;
      for (const auto& [h, m] : t.effect.plain)
        entries.push_back({(PlaceId)red.lifted_place((size_t)h), std::llabs(m), m < 0 ? -1 : 1});

      struct Block {
        PlaceId place;
        int64_t count;
        int sign;
      };
      std::vector<Block> blocks;
      std::vector<int> choice;
      auto emit = [&]() {
        TransitionOrbit u{t.source, base, t.target};
        int classes = 0;
        for (int c : choice) classes = std::max(classes, c - (int)named.size() + 1);
        std::vector<Atom> reps = fresh_atoms(named, (size_t)classes);
        for (size_t j = 0; j < blocks.size(); ++j) {
          int c = choice[j];
          Atom a = c < (int)named.size() ? named[(size_t)c] : reps[(size_t)(c - (int)named.size())];
          u.effect.add_data(blocks[j].place, a, blocks[j].sign * blocks[j].count);
        }
        orbs.insert(canonicalize(u).value);
      };
      auto assign = [&](auto&& self, size_t bi, int classes) -> void {
        if (bi == blocks.size()) {
          emit();
          return;
        }
        for (int c = 0; c <= (int)named.size() + classes; ++c) {
          bool clash = false;
          for (size_t j = 0; j < bi; ++j)
            if (blocks[j].place == blocks[bi].place && choice[j] == c) clash = true;
          if (clash) continue;
          choice[bi] = c;
          self(self, bi + 1, classes + (c == (int)named.size() + classes ? 1 : 0));
        }
      };
      auto split = [&](auto&& self, size_t ei) -> void {
        if (ei == entries.size()) {
          choice.assign(blocks.size(), 0);
          assign(assign, 0, 0);
          return;
        }
        for (const std::vector<int64_t>& parts : int_partitions(entries[ei].total)) {
          size_t mark = blocks.size();
          for (int64_t p : parts) blocks.push_back({entries[ei].lifted, p, entries[ei].sign});
          self(self, ei + 1);
          blocks.resize(mark);
        }
      };
      split(split, 0);
    }
    v3.transitions.assign(orbs.begin(), orbs.end());
  } else {
    v3 = std::move(v2);
  }

  red.reduced = std::move(v3);
  red.reduced.canonicalize_transitions();
  return red;
}

Configuration reduce_configuration(const DvasReduction& red, const Configuration& c) {
  DataVector m = c.marking;
  size_t idx;
  if (red.step1()) {
    for (size_t r = 0; r < c.state.regs.size(); ++r)
      if (c.state.regs[r]) m.add_data((PlaceId)(red.held_base + r), *c.state.regs[r], +1);
    idx = red.loc1_index(c.state.location, empty_mask(c.state), false);
  } else {
    idx = (size_t)c.state.location;
  }
  if (red.step2()) m.add_plain((PlaceId)red.loc_place(idx), +1);
  if (red.step3()) {
    DataVector lifted;
    lifted.data = m.data;
    std::vector<Atom> used = support(c);
    std::vector<Atom> fresh = fresh_atoms(used, m.plain.size());
    for (size_t j = 0; j < m.plain.size(); ++j)
      lifted.add_data((PlaceId)red.lifted_place((size_t)m.plain[j].first), fresh[j],
                      m.plain[j].second);
    m = std::move(lifted);
  }
  return {red.reduced.empty_state(0), std::move(m)};
}

namespace {

// Cheap necessary conditions for embeds(lo, hi), all renaming-invariant:
// matching location and register pattern, pointwise plain counts, per-place
// token counts, and omega defaults. Filters out most pairs before the
// renaming search.
bool may_embed(const OmegaConfiguration& lo, const OmegaConfiguration& hi) {
  if (lo.state.location != hi.state.location) return false;
  if (lo.state.regs.size() != hi.state.regs.size()) return false;
  for (size_t r = 0; r < lo.state.regs.size(); ++r)
    if (lo.state.regs[r].has_value() != hi.state.regs[r].has_value()) return false;
  for (const auto& [h, v] : lo.valuation.plain)
    if (hi.valuation.at_plain(h) < v) return false;
  for (const auto& row : lo.valuation.atom) {
    if (row.default_omega && !hi.valuation.default_of(row.place).is_omega()) return false;
    if (hi.valuation.place_size(row.place) < lo.valuation.place_size(row.place)) return false;
  }
  return true;
}

// One acceleration pass of `node` against an embedded ancestor: strictly
// grown plain counts and named-atom counts jump to omega, and growth on atoms
// outside the embedding's image raises the place default to omega. Returns
// whether anything changed.
bool accelerate(const OmegaConfiguration& anc, OmegaConfiguration& node) {
  if (!may_embed(anc, node)) return false;
  auto sigma = embeds(anc, node);
  if (!sigma) return false;
  bool changed = false;
  for (auto& [h, val] : node.valuation.plain) {
    if (val.is_omega()) continue;
    if (anc.valuation.at_plain(h) < val) {
      val = NatOmega::omega();
      changed = true;
    }
  }
  const std::vector<Atom> asup = support(anc);
  const Renaming inv = sigma->inverse();
  std::vector<PlaceId> raise_default;
  for (auto& row : node.valuation.atom) {
    for (auto& [b, val] : row.exceptions) {
      if (val.is_omega()) continue;
      Atom a = inv(b);
      if (std::binary_search(asup.begin(), asup.end(), a)) {
        if (anc.valuation.at(row.place, a) < val) {
          val = NatOmega::omega();
          changed = true;
        }
      } else if (!row.default_omega && anc.valuation.default_of(row.place) < val) {
        raise_default.push_back(row.place);
      }
    }
  }
  for (PlaceId p : raise_default) {
    node.valuation.set_default_omega(p);
    changed = true;
  }
  if (changed) node.valuation.prune();
  return changed;
}

struct KmNode {
  OmegaConfiguration cfg;
  int64_t parent = -1;
  size_t depth = 0;
};

// Tree construction shared by the direct and the reduced cover: breadth
// first, accelerating each successor against its chain of ancestors to a
// fixpoint, dropping it if it embeds into any node admitted so far. Admitted
// nodes are never deleted, so the final union over-approximates nothing and
// misses nothing up to the caps.
CoverResult run_km(const Dvass& net, const Configuration& c0, const CoverCaps& caps) {
  CoverResult res;
  std::vector<KmNode> nodes;  // every node stays admitted once created
  std::deque<size_t> frontier;

  auto dominated = [&](const OmegaConfiguration& cfg, size_t skip) {
    for (size_t i = nodes.size(); i-- > 0;) {
      if (i == skip) continue;
      if (may_embed(cfg, nodes[i].cfg) && embeds(cfg, nodes[i].cfg)) return true;
    }
    return false;
  };

  nodes.push_back({canonicalize(to_omega(c0)).value, -1, 0});
  frontier.push_back(0);

  while (!frontier.empty() && res.complete) {
    size_t cur = frontier.front();
    frontier.pop_front();
    if (nodes[cur].depth >= caps.max_depth) {
      res.complete = false;
      res.diagnostic = "depth cap " + std::to_string(caps.max_depth) + " reached";
      break;
    }
    // A node dominated by a later admission is already simulated from there;
    // expanding it would only regenerate covered successors.
    if (dominated(nodes[cur].cfg, cur)) continue;
    std::vector<Atom> pool = support(nodes[cur].cfg);
    std::set<OmegaConfiguration> succs;
    for_each_instantiation(net, nodes[cur].cfg.state, pool, [&](size_t oi, const Renaming& re) {
      const TransitionOrbit& t = net.transitions[oi];
      DataVector eff = t.effect.renamed(re);
      const OmegaValuation& val = nodes[cur].cfg.valuation;
      for (const auto& [h, c] : eff.plain)
        if (c < 0 && val.at_plain(h).plus(c) < NatOmega{0}) return;
      for (const auto& [k, c] : eff.data)
        if (c < 0 && val.at(k.first, k.second).plus(c) < NatOmega{0}) return;
      OmegaConfiguration s{t.target.renamed(re), val};
      s.valuation.add(eff);
      succs.insert(std::move(s));
    });
    for (const OmegaConfiguration& raw : succs) {
      OmegaConfiguration s = raw;
      bool again = true;
      while (again) {
        again = false;
        for (int64_t a = (int64_t)cur; a >= 0; a = nodes[(size_t)a].parent)
          if (accelerate(nodes[(size_t)a].cfg, s)) again = true;
      }
      s = canonicalize(s).value;
      if (dominated(s, nodes.size())) continue;
      nodes.push_back({std::move(s), (int64_t)cur, nodes[cur].depth + 1});
      frontier.push_back(nodes.size() - 1);
      if (nodes.size() > caps.max_nodes) {
        res.complete = false;
        res.diagnostic = "node cap " + std::to_string(caps.max_nodes) + " reached";
        break;
      }
    }
  }

  std::vector<OmegaConfiguration> raw;
  raw.reserve(nodes.size());
  for (KmNode& n : nodes) raw.push_back(std::move(n.cfg));
  res.ideals = cover_antichain(std::move(raw));
  return res;
}

}  // namespace

std::vector<OmegaConfiguration> pull_back_cover(const DvasReduction& red,
                                                const std::vector<OmegaConfiguration>& ideals) {
  std::vector<OmegaConfiguration> out;
  const size_t R = red.reg_count();
  for (const OmegaConfiguration& f : ideals) {
    // Step 3 inverse: a lifted place's atoms sum back into the plain count.
    OmegaValuation g;
    if (red.step3()) {
      for (const auto& row : f.valuation.atom) {
        if (row.place < (PlaceId)red.p1_count)
          g.atom.push_back(row);
        else
          g.set_plain((PlaceId)((size_t)row.place - red.p1_count),
                      f.valuation.place_size(row.place));
      }
      g.prune();
    } else {
      g = f.valuation;
    }

    // Step 2 inverse: each location place holding a token yields a candidate
    // control location; the location and shadow places are then dropped.
    std::vector<std::pair<size_t, OmegaValuation>> at_loc1;
    if (red.step2()) {
      for (size_t i = 0; i < red.loc1.size(); ++i) {
        if (g.at_plain((PlaceId)red.loc_place(i)) < NatOmega{1}) continue;
        OmegaValuation v = g;
        std::erase_if(v.plain, [&](const auto& e) { return e.first >= (PlaceId)red.h1_count; });
        at_loc1.emplace_back(i, std::move(v));
      }
    } else {
      at_loc1.emplace_back(0, std::move(g));
    }

    // Step 1 inverse: only unbarred locations are observable. Every non-empty
    // register draws its content from its held place: a named atom with a
    // token there, or when the place holds omega by default, a fresh atom in
    // every sharing pattern across such registers. Held and incoming rows are
    // then dropped.
    for (auto& [i, val] : at_loc1) {
      const DvasReduction::Loc1& l1 = red.loc1[i];
      if (!red.step1()) {
        out.push_back(canonicalize(OmegaConfiguration{State{l1.location, {}}, std::move(val)}).value);
        continue;
      }
      if (l1.barred) continue;
      std::vector<size_t> active;
      for (size_t r = 0; r < R; ++r)
        if (!(l1.empty >> r & 1)) active.push_back(r);
      const std::vector<Atom> named = support(val);
      const OmegaValuation& v = val;
      std::vector<int> choice(active.size(), 0);
      auto rec = [&](auto&& self, size_t ai, int classes) -> void {
        if (ai == active.size()) {
          std::vector<Atom> reps = fresh_atoms(named, (size_t)classes);
          State st{l1.location, std::vector<std::optional<Atom>>(R, std::nullopt)};
          for (size_t k = 0; k < active.size(); ++k) {
            int c = choice[k];
            st.regs[active[k]] =
                c < (int)named.size() ? named[(size_t)c] : reps[(size_t)(c - (int)named.size())];
          }
          OmegaValuation fin = v;
          std::erase_if(fin.atom,
                        [&](const auto& row) { return row.place >= (PlaceId)red.held_base; });
          fin.prune();
          out.push_back(canonicalize(OmegaConfiguration{std::move(st), std::move(fin)}).value);
          return;
        }
        PlaceId held = (PlaceId)(red.held_base + active[ai]);
        for (int c = 0; c < (int)named.size(); ++c) {
          if (v.at(held, named[(size_t)c]) < NatOmega{1}) continue;
          choice[ai] = c;
          self(self, ai + 1, classes);
        }
        if (v.default_of(held).is_omega()) {
          for (int c = 0; c <= classes; ++c) {
            choice[ai] = (int)named.size() + c;
            self(self, ai + 1, classes + (c == classes ? 1 : 0));
          }
        }
      };
      rec(rec, 0, 0);
    }
  }
  return out;
}

CoverResult compute_cover(const Dvass& net, const Configuration& c0, const CoverCaps& caps) {
  DvasReduction red = to_dvas(net);
  CoverResult inner = run_km(red.reduced, reduce_configuration(red, c0), caps);
  CoverResult out;
  out.complete = inner.complete;
  out.diagnostic = inner.diagnostic;
  out.ideals = cover_antichain(pull_back_cover(red, inner.ideals));
  return out;
}

CoverResult compute_cover_direct(const Dvass& net, const Configuration& c0,
                                 const CoverCaps& caps) {
  return run_km(net, c0, caps);
}

bool ideal_member(const CoverResult& cover, const Configuration& c) {
  for (const auto& ideal : cover.ideals)
    if (embeds(c, ideal)) return true;
  return false;
}

std::vector<OmegaConfiguration> cover_antichain(std::vector<OmegaConfiguration> ideals) {
  for (auto& f : ideals) f = canonicalize(f).value;
  std::sort(ideals.begin(), ideals.end());
  ideals.erase(std::unique(ideals.begin(), ideals.end()), ideals.end());
  std::vector<bool> drop(ideals.size(), false);
  for (size_t i = 0; i < ideals.size(); ++i)
    for (size_t j = 0; j < ideals.size(); ++j) {
      if (i == j || drop[j]) continue;
      if (may_embed(ideals[i], ideals[j]) && embeds(ideals[i], ideals[j])) {
        drop[i] = true;
        break;
      }
    }
  std::vector<OmegaConfiguration> out;
  for (size_t i = 0; i < ideals.size(); ++i)
    if (!drop[i]) out.push_back(std::move(ideals[i]));
  return out;
}

}  // namespace birch
