#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "birch/net.hpp"
#include "birch/oracle.hpp"
#include "birch/state_graph.hpp"
#include "doctest.h"

using namespace birch;

namespace {

// regs entries: -1 for EMPTY, otherwise an atom id.
State mk(LocId loc, const std::vector<int>& regs = {}) {
  State s;
  s.location = loc;
  for (int r : regs)
    s.regs.push_back(r < 0 ? std::nullopt : std::optional<Atom>{Atom{(uint32_t)r}});
  return s;
}

// Register-free two-location net: two differently-weighted self-loops at l,
// a bridge to lp and a return edge.
Dvass vprime_shape() {
  Dvass net;
  net.name = "vprime-shape";
  net.locations = {"l", "lp"};
  net.plain_places = {"h"};
  net.transitions.push_back({mk(0), DataVector::unit_plain(0, 1), mk(0)});
  net.transitions.push_back({mk(0), DataVector::unit_plain(0, 2), mk(0)});
  net.transitions.push_back({mk(0), {}, mk(1)});
  net.transitions.push_back({mk(1), {}, mk(0)});
  net.canonicalize_transitions();
  return net;
}

// One register bouncing between empty and loaded at a single location.
Dvass loader_net() {
  Dvass net;
  net.name = "loader";
  net.locations = {"m"};
  net.registers = {"r"};
  net.atom_places = {"p"};
  const Atom a{0};
  net.transitions.push_back({mk(0, {-1}), {}, mk(0, {0})});
  net.transitions.push_back({mk(0, {0}), DataVector::unit_data(0, a, 1), mk(0, {-1})});
  net.canonicalize_transitions();
  return net;
}

void for_each_injection(const std::vector<Atom>& dom, const std::vector<Atom>& pool,
                        const std::function<void(const Renaming&)>& fn) {
  std::vector<std::pair<Atom, Atom>> pairs(dom.size());
  std::vector<bool> used(pool.size(), false);
  auto rec = [&](auto&& self, size_t i) -> void {
    if (i == dom.size()) {
      fn(Renaming::from_pairs(pairs));
      return;
    }
    for (size_t j = 0; j < pool.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      pairs[i] = {dom[i], pool[j]};
      self(self, i + 1);
      used[j] = false;
    }
  };
  rec(rec, 0);
}

std::vector<State> states_over_pool(size_t num_locations, size_t num_registers,
                                    const std::vector<Atom>& pool) {
  std::vector<State> out;
  std::vector<int> regs(num_registers, -1);
  auto rec = [&](auto&& self, size_t r) -> void {
    if (r == num_registers) {
      for (LocId loc = 0; loc < (LocId)num_locations; ++loc) out.push_back(mk(loc, regs));
      return;
    }
    regs[r] = -1;
    self(self, r + 1);
    for (Atom a : pool) {
      regs[r] = (int)a.id;
      self(self, r + 1);
    }
  };
  rec(rec, 0);
  return out;
}

// Reachability over the concrete instantiation of the edge orbits inside an
// atom pool: the ground truth the closure must reproduce.
std::map<State, std::set<State>> concrete_reachability(const Dvass& net,
                                                       const std::vector<Atom>& pool) {
  const std::vector<State> states =
      states_over_pool(net.locations.size(), net.registers.size(), pool);
  std::map<State, std::vector<State>> adj;
  for (const EdgeOrbit& o : edge_orbits(net)) {
    std::vector<Atom> dom;
    o.collect_atoms(dom);
    std::sort(dom.begin(), dom.end());
    dom.erase(std::unique(dom.begin(), dom.end()), dom.end());
    for_each_injection(dom, pool, [&](const Renaming& sigma) {
      adj[o.source.renamed(sigma)].push_back(o.target.renamed(sigma));
    });
  }
  std::map<State, std::set<State>> reach;
  for (const State& src : states) {
    std::set<State>& seen = reach[src];
    std::vector<State> queue = {src};
    seen.insert(src);
    while (!queue.empty()) {
      State u = queue.back();
      queue.pop_back();
      auto it = adj.find(u);
      if (it == adj.end()) continue;
      for (const State& v : it->second)
        if (seen.insert(v).second) queue.push_back(v);
    }
  }
  return reach;
}

void check_closure_against_concrete(const Dvass& net) {
  const ClosureTable closure = saturate(net);
  const int64_t bound = path_bound(closure);
  REQUIRE(bound <= 16);
  std::vector<Atom> pool;
  for (int64_t i = 0; i < bound; ++i) pool.push_back(Atom{(uint32_t)i});
  const auto reach = concrete_reachability(net, pool);
  for (const auto& [src, reachable] : reach)
    for (const auto& [dst, ignored] : reach) {
      const bool concrete = reachable.count(dst) > 0;
      CAPTURE(src.location);
      CAPTURE(dst.location);
      CHECK(path_exists(closure, src, dst) == concrete);
    }
}

}  // namespace

TEST_CASE("edge orbits are effect-blind projections") {
  const Dvass net = vprime_shape();
  const std::vector<EdgeOrbit> edges = edge_orbits(net);
  // The two self-loops at l collapse into one orbit.
  const std::vector<EdgeOrbit> expected = {make_edge_orbit(mk(0), mk(0)),
                                           make_edge_orbit(mk(0), mk(1)),
                                           make_edge_orbit(mk(1), mk(0))};
  std::vector<EdgeOrbit> sorted = expected;
  std::sort(sorted.begin(), sorted.end());
  CHECK(edges == sorted);

  Dvass empty;
  empty.locations = {"only"};
  CHECK(edge_orbits(empty).empty());
}

TEST_CASE("composition unifies the middle states") {
  // Register-free: location chaining.
  CHECK(compose(make_edge_orbit(mk(0), mk(1)), make_edge_orbit(mk(1), mk(0))) ==
        std::vector<EdgeOrbit>{make_edge_orbit(mk(0), mk(0))});
  CHECK(compose(make_edge_orbit(mk(0), mk(1)), make_edge_orbit(mk(0), mk(1))).empty());

  // Identity composes to the orbit itself.
  const EdgeOrbit carry = make_edge_orbit(mk(0, {5}), mk(1, {5}));
  const EdgeOrbit id_l = make_edge_orbit(mk(0, {5}), mk(0, {5}));
  CHECK(compose(id_l, carry) == std::vector<EdgeOrbit>{carry});
  CHECK(compose(carry, make_edge_orbit(mk(1, {5}), mk(1, {5}))) ==
        std::vector<EdgeOrbit>{carry});

  // The middle forces the two carried atoms to be equal.
  const EdgeOrbit hop = make_edge_orbit(mk(1, {7}), mk(2, {7}));
  CHECK(compose(carry, hop) == std::vector<EdgeOrbit>{make_edge_orbit(mk(0, {5}), mk(2, {5}))});

  // EMPTY only unifies with EMPTY.
  CHECK(compose(make_edge_orbit(mk(0, {5}), mk(1, {-1})), hop).empty());

  // A private target atom either merges with a source-only atom or stays
  // fresh; merging with the middle atom is impossible since the second orbit
  // keeps them distinct.
  const EdgeOrbit into = make_edge_orbit(mk(0, {5, 6}), mk(1, {5, -1}));
  const EdgeOrbit swap = make_edge_orbit(mk(1, {7, -1}), mk(2, {8, -1}));
  std::vector<EdgeOrbit> expected = {make_edge_orbit(mk(0, {5, 6}), mk(2, {6, -1})),
                                     make_edge_orbit(mk(0, {5, 6}), mk(2, {9, -1}))};
  std::sort(expected.begin(), expected.end());
  CHECK(compose(into, swap) == expected);
}

TEST_CASE("composition differential against concrete two-step pairs") {
  std::mt19937 rng(5150);
  std::uniform_int_distribution<int> reg(-1, 2);
  std::uniform_int_distribution<int> loc(0, 1);
  std::uniform_int_distribution<int> nregs(1, 2);
  std::vector<Atom> pool;
  for (uint32_t i = 0; i < 8; ++i) pool.push_back(Atom{i});

  for (int iter = 0; iter < 25; ++iter) {
    const size_t r = (size_t)nregs(rng);
    auto random_state = [&](LocId at) {
      std::vector<int> regs;
      for (size_t i = 0; i < r; ++i) regs.push_back(reg(rng));
      return mk(at, regs);
    };
    const LocId mid = loc(rng);
    const EdgeOrbit a = make_edge_orbit(random_state(loc(rng)), random_state(mid));
    const EdgeOrbit b = make_edge_orbit(random_state(mid), random_state(loc(rng)));

    std::set<EdgeOrbit> expected;
    std::vector<Atom> dom_a, dom_b;
    a.collect_atoms(dom_a);
    b.collect_atoms(dom_b);
    std::sort(dom_a.begin(), dom_a.end());
    dom_a.erase(std::unique(dom_a.begin(), dom_a.end()), dom_a.end());
    std::sort(dom_b.begin(), dom_b.end());
    dom_b.erase(std::unique(dom_b.begin(), dom_b.end()), dom_b.end());
    for_each_injection(dom_a, pool, [&](const Renaming& sa) {
      const State mid_a = a.target.renamed(sa);
      for_each_injection(dom_b, pool, [&](const Renaming& sb) {
        if (!(b.source.renamed(sb) == mid_a)) return;
        expected.insert(make_edge_orbit(a.source.renamed(sa), b.target.renamed(sb)));
      });
    });

    const std::vector<EdgeOrbit> got = compose(a, b);
    CAPTURE(iter);
    CHECK(got == std::vector<EdgeOrbit>(expected.begin(), expected.end()));

    // Equivariance: renaming the raw pairs leaves the canonical sets fixed.
    const Renaming sigma = Renaming::from_pairs({{Atom{0}, Atom{11}}, {Atom{1}, Atom{13}}});
    const EdgeOrbit ra = make_edge_orbit(a.source.renamed(sigma), a.target.renamed(sigma));
    const EdgeOrbit rb = make_edge_orbit(b.source.renamed(sigma), b.target.renamed(sigma));
    CHECK(compose(ra, rb) == got);
  }
}

TEST_CASE("saturation of the register-free bridge graph") {
  const Dvass net = vprime_shape();
  const ClosureTable closure = saturate(net);
  for (LocId i = 0; i < 2; ++i)
    for (LocId j = 0; j < 2; ++j) CHECK(path_exists(closure, mk(i), mk(j)));
  CHECK(closure.witness_of(make_edge_orbit(mk(0), mk(1))) == 1);
  CHECK(closure.witness_of(make_edge_orbit(mk(1), mk(0))) == 1);
  CHECK(closure.witness_of(make_edge_orbit(mk(0), mk(0))) == 0);
  CHECK(closure.orbits.size() == 4);

  // No edges: identities only.
  const ClosureTable none = saturate(2, 0, {});
  CHECK(none.orbits.size() == 2);
  CHECK(path_exists(none, mk(0), mk(0)));
  CHECK(!path_exists(none, mk(0), mk(1)));
  CHECK(path_bound(none) == 0);

  // Idempotence on the orbit set.
  const ClosureTable again = saturate(closure.num_locations, closure.num_registers,
                                      closure.orbits);
  CHECK(again.orbits == closure.orbits);
}

TEST_CASE("saturation tracks register identity through round trips") {
  const Dvass net = loader_net();
  const ClosureTable closure = saturate(net);
  // Unloading and reloading may change the atom, so distinct-atom pairs are
  // connected through the empty state.
  CHECK(path_exists(closure, mk(0, {7}), mk(0, {9})));
  CHECK(closure.witness_of(make_edge_orbit(mk(0, {7}), mk(0, {9}))) == 2);
  CHECK(closure.witness_of(make_edge_orbit(mk(0, {7}), mk(0, {7}))) == 0);
  CHECK(path_exists(closure, mk(0, {-1}), mk(0, {3})));

  for (int64_t w : closure.witness) CHECK(w <= (int64_t)closure.orbits.size());
}

TEST_CASE("closure agrees with concrete search inside the derived pool") {
  check_closure_against_concrete(vprime_shape());
  check_closure_against_concrete(loader_net());

  std::mt19937 rng(31337);
  std::uniform_int_distribution<int> reg(-1, 2);
  std::uniform_int_distribution<int> loc(0, 1);
  std::uniform_int_distribution<int> count(2, 5);
  int exercised = 0;
  for (int iter = 0; iter < 12; ++iter) {
    const size_t r = 1 + (size_t)(iter % 2);
    Dvass net;
    net.name = "rand";
    net.locations = {"q", "qp"};
    net.registers.assign(r, "r");
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      std::vector<int> rs, rt;
      for (size_t k = 0; k < r; ++k) rs.push_back(reg(rng));
      for (size_t k = 0; k < r; ++k) rt.push_back(reg(rng));
      net.transitions.push_back({mk(loc(rng), rs), {}, mk(loc(rng), rt)});
    }
    net.canonicalize_transitions();
    const ClosureTable closure = saturate(net);
    if (path_bound(closure) > 10) continue;  // keep the ground truth small
    ++exercised;
    check_closure_against_concrete(net);
  }
  CHECK(exercised >= 6);
}

TEST_CASE("scc restriction drops exactly the off-cycle orbits") {
  // A strongly connected net is unchanged.
  const Dvass loader = loader_net();
  const Dvass kept = restrict_to_scc(loader, mk(0, {-1}), mk(0, {-1}));
  CHECK(kept.transitions == loader.transitions);

  // A one-way appendix disappears.
  Dvass net;
  net.name = "appendix";
  net.locations = {"q", "qp", "dead"};
  net.transitions.push_back({mk(0), {}, mk(1)});
  net.transitions.push_back({mk(1), {}, mk(0)});
  net.transitions.push_back({mk(1), {}, mk(2)});
  net.canonicalize_transitions();
  const Dvass cut = restrict_to_scc(net, mk(0), mk(1));
  CHECK(cut.transitions.size() == 2);
  for (const auto& t : cut.transitions) CHECK(t.target.location != 2);

  // The removal preserves bi-reachability of the endpoints.
  const Configuration q0{mk(0), {}};
  const Configuration q1{mk(1), {}};
  CHECK(bireach_verdict(oracle_bireach(net, q0, q1)) == OracleVerdict::kYes);
  CHECK(bireach_verdict(oracle_bireach(cut, q0, q1)) == OracleVerdict::kYes);

  CHECK_THROWS_AS(restrict_to_scc(loader, mk(0, {4}), mk(0, {-1})), std::invalid_argument);
}
