#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "birch/conditions.hpp"
#include "birch/decide.hpp"
#include "birch/net.hpp"
#include "birch/oracle.hpp"
#include "doctest.h"

using namespace birch;

namespace {

// Effect-free two-way bridge between q and qp plus counter loops at q:
// +h always, -h only when balanced.
Dvass bridge_counter(bool balanced) {
  Dvass net;
  net.name = balanced ? "counter" : "oneway";
  net.locations = {"q", "qp"};
  net.plain_places = {"h"};
  net.transitions.push_back({net.empty_state(0), DataVector::unit_plain(0, 1), net.empty_state(0)});
  if (balanced)
    net.transitions.push_back(
        {net.empty_state(0), DataVector::unit_plain(0, -1), net.empty_state(0)});
  net.transitions.push_back({net.empty_state(0), {}, net.empty_state(1)});
  net.transitions.push_back({net.empty_state(1), {}, net.empty_state(0)});
  return net;
}

// Two-way bridge only, with places declared but never touched.
Dvass inert_net() {
  Dvass net;
  net.name = "inert";
  net.locations = {"q", "qp"};
  net.plain_places = {"h"};
  net.atom_places = {"p"};
  net.transitions.push_back({net.empty_state(0), {}, net.empty_state(1)});
  net.transitions.push_back({net.empty_state(1), {}, net.empty_state(0)});
  return net;
}

// One register and one atom place: load a fresh atom, drop it on p, and
// optionally pick it back up and forget it.
Dvass loader_net(bool with_unload) {
  Dvass net;
  net.name = "loader";
  net.locations = {"m"};
  net.registers = {"r"};
  net.atom_places = {"p"};
  const Atom a{0};
  State empty = net.empty_state(0);
  State full = empty;
  full.regs[0] = a;
  net.transitions.push_back({empty, {}, full});
  net.transitions.push_back({full, DataVector::unit_data(0, a, 1), empty});
  if (with_unload) {
    net.transitions.push_back({empty, DataVector::unit_data(0, a, -1), full});
    net.transitions.push_back({full, {}, empty});
  }
  net.canonicalize_transitions();
  return net;
}

// Same two-location random plain nets as the oracle differential: a two-way
// bridge, noise edges, and a +1/-1 loop pair.
Dvass random_plain_net(std::mt19937& rng) {
  std::uniform_int_distribution<int> loc(0, 1);
  std::uniform_int_distribution<int> eff(-1, 1);
  std::uniform_int_distribution<int> ntrans(1, 4);
  Dvass net;
  net.name = "rand";
  net.locations = {"q", "qp"};
  net.plain_places = {"h0", "h1"};
  auto random_edge = [&](LocId from, LocId to) {
    TransitionOrbit t;
    t.source = net.empty_state(from);
    t.target = net.empty_state(to);
    for (PlaceId h = 0; h < 2; ++h) {
      int e = eff(rng);
      if (e != 0) t.effect.add_plain(h, e);
    }
    net.transitions.push_back(t);
  };
  random_edge(0, 1);
  random_edge(1, 0);
  int n = ntrans(rng);
  for (int i = 0; i < n; ++i) random_edge(loc(rng), loc(rng));
  TransitionOrbit up, dn;
  up.source = up.target = net.empty_state(loc(rng));
  up.effect.add_plain((PlaceId)loc(rng), 1);
  dn.source = dn.target = up.source;
  dn.effect.add_plain(up.effect.plain.begin()->first, -1);
  net.transitions.push_back(up);
  net.transitions.push_back(dn);
  net.canonicalize_transitions();
  return net;
}

void check_trace_shape(const Verdict& v) {
  for (size_t i = 0; i < v.trace.size(); ++i) {
    CAPTURE(i);
    CHECK(v.trace[i].after < v.trace[i].before);
    if (i + 1 < v.trace.size()) CHECK(v.trace[i].after == v.trace[i + 1].before);
  }
  if (!v.trace.empty()) {
    const Rank r0 = v.trace.front().before;
    CHECK(v.trace.size() <= (r0.atom_places + 1) * (r0.plain_places + 1) * (r0.orbits + 1));
  }
}

}  // namespace

TEST_CASE("ranks compare lexicographically") {
  CHECK(Rank{1, 0, 0} > Rank{0, 5, 7});
  CHECK(Rank{0, 1, 0} > Rank{0, 0, 9});
  CHECK(Rank{0, 0, 2} > Rank{0, 0, 1});
  CHECK(Rank{1, 2, 3} == Rank{1, 2, 3});
  Dvass net = inert_net();
  CHECK(rank_of(net) == Rank{1, 1, 2});
}

TEST_CASE("remove orbit removes exactly the given orbit") {
  Dvass net = bridge_counter(false);
  Dvass less = remove_orbit(net, net.transitions[0]);
  CHECK(less.transitions.size() == 2);
  CHECK(std::find(less.transitions.begin(), less.transitions.end(), net.transitions[0]) ==
        less.transitions.end());
  CHECK_THROWS_AS(remove_orbit(less, net.transitions[0]), std::invalid_argument);

  Dvass only;
  only.locations = {"q"};
  only.transitions.push_back({only.empty_state(0), {}, only.empty_state(0)});
  CHECK(remove_orbit(only, only.transitions[0]).transitions.empty());
}

TEST_CASE("dead growth orbits can be removed without changing the verdict") {
  Dvass net = bridge_counter(false);
  State q = net.empty_state(0), qp = net.empty_state(1);
  Configuration q0{q, {}}, qp0{qp, {}};

  CHECK(bireach_verdict(oracle_bireach(net, q0, qp0)) == OracleVerdict::kYes);
  Phi1Report before = check_phi1(net, q, qp);
  REQUIRE(before.first_useless().has_value());
  CHECK(*before.first_useless() == 0);

  Dvass less = remove_orbit(net, net.transitions[0]);
  CHECK(bireach_verdict(oracle_bireach(less, q0, qp0)) == OracleVerdict::kYes);
  // the survivors were useful before and stay useful after
  CHECK(check_phi1(less, q, qp).all_useful());
}

TEST_CASE("plain fold at bound zero relabels the bands") {
  Dvass net = inert_net();
  State q = net.empty_state(0), qp = net.empty_state(1);
  FoldResult f = fold_plain_place(net, 0, 0, q, qp);
  CHECK(f.net.plain_places.empty());
  CHECK(f.net.atom_places == net.atom_places);
  REQUIRE(f.net.locations.size() == 2);
  CHECK(f.net.locations[0] == "q@0");
  CHECK(f.net.locations[1] == "qp@0");
  CHECK(f.net.transitions.size() == 2);
  CHECK(f.q.location == 0);
  CHECK(f.qp.location == 1);
  CHECK(bireach_verdict(oracle_bireach(net, {q, {}}, {qp, {}})) == OracleVerdict::kYes);
  CHECK(bireach_verdict(oracle_bireach(f.net, {f.q, {}}, {f.qp, {}})) == OracleVerdict::kYes);
}

TEST_CASE("plain fold tracks counter bands") {
  Dvass net = bridge_counter(true);
  State q = net.empty_state(0), qp = net.empty_state(1);
  FoldResult f = fold_plain_place(net, 0, 1, q, qp);
  REQUIRE(f.net.locations.size() == 4);
  // +h climbs a band, -h descends one, and each bridge copies per band
  CHECK(f.net.transitions.size() == 6);
  for (const TransitionOrbit& t : f.net.transitions) CHECK(t.effect.is_zero());
  CHECK(bireach_verdict(oracle_bireach(f.net, {f.q, {}}, {f.qp, {}})) == OracleVerdict::kYes);

  // an effect overshooting every band leaves no surviving copy
  Dvass big = net;
  big.transitions.push_back({big.empty_state(0), DataVector::unit_plain(0, 2), big.empty_state(0)});
  FoldResult g = fold_plain_place(big, 0, 1, q, qp);
  CHECK(g.net.transitions.size() == 6);
}

TEST_CASE("atom fold at bound zero deletes the place") {
  Dvass net = inert_net();
  State q = net.empty_state(0), qp = net.empty_state(1);
  FoldResult f = fold_atom_place(net, 0, 0, q, qp);
  CHECK(f.net.atom_places.empty());
  CHECK(f.net.registers == net.registers);
  CHECK(f.net.plain_places == net.plain_places);
  CHECK(f.net.transitions.size() == 2);
  CHECK(f.q.regs.size() == q.regs.size());
  CHECK(bireach_verdict(oracle_bireach(f.net, {f.q, {}}, {f.qp, {}})) == OracleVerdict::kYes);
}

TEST_CASE("atom fold stores the token in a register") {
  Dvass net;
  net.name = "token-loop";
  net.locations = {"m", "mp"};
  net.atom_places = {"p"};
  const Atom a{0};
  net.transitions.push_back({net.empty_state(0), DataVector::unit_data(0, a, 1), net.empty_state(0)});
  net.transitions.push_back(
      {net.empty_state(0), DataVector::unit_data(0, a, -1), net.empty_state(0)});
  net.transitions.push_back({net.empty_state(0), {}, net.empty_state(1)});
  net.transitions.push_back({net.empty_state(1), {}, net.empty_state(0)});
  State q = net.empty_state(0), qp = net.empty_state(1);

  FoldResult f = fold_atom_place(net, 0, 1, q, qp);
  CHECK(f.net.atom_places.empty());
  REQUIRE(f.net.registers.size() == 1);
  CHECK(f.net.registers[0][0] == kAuxSigil);

  // the token loop becomes a register cycling EMPTY -> atom -> EMPTY
  State empty1 = f.net.empty_state(0);
  State held1 = empty1;
  held1.regs[0] = Atom{0};
  TransitionOrbit store{empty1, {}, held1};
  TransitionOrbit drop{held1, {}, empty1};
  CHECK(std::find(f.net.transitions.begin(), f.net.transitions.end(), store) !=
        f.net.transitions.end());
  CHECK(std::find(f.net.transitions.begin(), f.net.transitions.end(), drop) !=
        f.net.transitions.end());
  CHECK(bireach_verdict(oracle_bireach(net, {q, {}}, {qp, {}})) == OracleVerdict::kYes);
  CHECK(bireach_verdict(oracle_bireach(f.net, {f.q, {}}, {f.qp, {}})) == OracleVerdict::kYes);

  // two tokens at once cannot fit the single register
  Dvass wide = net;
  DataVector two;
  two.add_data(0, Atom{0}, 1);
  two.add_data(0, Atom{1}, 1);
  wide.transitions.push_back({wide.empty_state(0), two, wide.empty_state(0)});
  FoldResult g = fold_atom_place(wide, 0, 1, q, qp);
  CHECK(g.net.transitions.size() == f.net.transitions.size());

  Dvass twice = net;
  twice.transitions.push_back(
      {twice.empty_state(0), DataVector::unit_data(0, Atom{0}, 2), twice.empty_state(0)});
  FoldResult h = fold_atom_place(twice, 0, 1, q, qp);
  CHECK(h.net.transitions.size() == f.net.transitions.size());
}

TEST_CASE("decide answers the trivial instances") {
  Dvass net = inert_net();
  Configuration c{net.empty_state(0), {}};
  Verdict same = decide(net, c, c);
  CHECK(same.decision == Decision::kBireachable);
  CHECK(same.trace.empty());

  Dvass bare;
  bare.locations = {"q", "qp"};
  Verdict apart = decide(bare, {bare.empty_state(0), {}}, {bare.empty_state(1), {}});
  CHECK(apart.decision == Decision::kNotBireachable);
  CHECK(apart.trace.empty());
}

TEST_CASE("decide climbs the reduction ladder on the one-way counter") {
  Dvass net = bridge_counter(false);
  Configuration q0{net.empty_state(0), {}}, qp0{net.empty_state(1), {}};

  Verdict v = decide(net, q0, qp0);
  CHECK(v.decision == Decision::kBireachable);
  REQUIRE(v.trace.size() == 2);
  CHECK(v.trace[0].kind == ReductionRecord::Kind::kRemoveOrbit);
  CHECK(v.trace[1].kind == ReductionRecord::Kind::kFoldPlain);
  CHECK(v.trace[1].bound == 0);
  check_trace_shape(v);
  CHECK(bireach_verdict(oracle_bireach(net, q0, qp0)) == OracleVerdict::kYes);
}

TEST_CASE("decide folds seeded markings through normalization") {
  // the token exists only mid-trip; the seeded target makes the bracket
  // transitions of normalization do real work
  Dvass net;
  net.name = "transient";
  net.locations = {"q", "m"};
  net.plain_places = {"h"};
  net.transitions.push_back({net.empty_state(0), DataVector::unit_plain(0, 1), net.empty_state(1)});
  net.transitions.push_back(
      {net.empty_state(1), DataVector::unit_plain(0, -1), net.empty_state(0)});
  Configuration q0{net.empty_state(0), {}};
  Configuration m1{net.empty_state(1), DataVector::unit_plain(0, 1)};

  Verdict v = decide(net, q0, m1);
  CHECK(v.decision == Decision::kBireachable);
  CHECK(!v.trace.empty());
  check_trace_shape(v);
  CHECK(bireach_verdict(oracle_bireach(net, q0, m1)) == OracleVerdict::kYes);
}

TEST_CASE("starved budgets surface as unknown unless trusted") {
  Dvass net;
  net.name = "swap";
  net.locations = {"q", "qp"};
  net.atom_places = {"p"};
  DataVector swap_eff;
  swap_eff.add_data(0, Atom{0}, 1);
  swap_eff.add_data(0, Atom{1}, -1);
  net.transitions.push_back({net.empty_state(0), swap_eff, net.empty_state(0)});
  net.transitions.push_back({net.empty_state(0), {}, net.empty_state(1)});
  net.transitions.push_back({net.empty_state(1), {}, net.empty_state(0)});
  Configuration q0{net.empty_state(0), {}}, qp0{net.empty_state(1), {}};

  Verdict roomy = decide(net, q0, qp0);
  CHECK(roomy.decision == Decision::kBireachable);
  check_trace_shape(roomy);

  DecideConfig starved;
  starved.msum.max_budget = 0;
  Verdict blocked = decide(net, q0, qp0, starved);
  CHECK(blocked.decision == Decision::kUnknown);

  DecideConfig trusting = starved;
  trusting.assume_complete = true;
  Verdict pushed = decide(net, q0, qp0, trusting);
  CHECK(pushed.decision == Decision::kBireachable);
  CHECK(!pushed.trace.empty());
  CHECK(pushed.trace[0].kind == ReductionRecord::Kind::kRemoveOrbit);
  check_trace_shape(pushed);
}

TEST_CASE("decide handles register nets end to end") {
  Dvass keep = loader_net(true);
  State full = keep.empty_state(0);
  full.regs[0] = Atom{0};
  Configuration e0{keep.empty_state(0), {}}, f0{full, {}};

  CHECK(bireach_verdict(oracle_bireach(keep, e0, f0)) == OracleVerdict::kYes);
  Verdict v = decide(keep, e0, f0);
  CHECK(v.decision == Decision::kBireachable);
  check_trace_shape(v);

  Dvass lossy = loader_net(false);
  CHECK(bireach_verdict(oracle_bireach(lossy, e0, f0)) == OracleVerdict::kNo);
  Verdict w = decide(lossy, e0, f0);
  CHECK(w.decision == Decision::kNotBireachable);
  check_trace_shape(w);
}

TEST_CASE("decide agrees with the oracle on random plain nets") {
  std::mt19937 rng(90210);
  const OracleBudget budget{20, 4, 2000, 200000};
  int conclusive = 0, sound_steps = 0;
  for (int iter = 0; iter < 60; ++iter) {
    Dvass net = random_plain_net(rng);
    Configuration q0{net.empty_state(0), {}}, qp0{net.empty_state(1), {}};
    CAPTURE(iter);

    // every applied reduction must preserve the oracle verdict
    DecideConfig cfg;
    cfg.observer = [&](const ReductionRecord&, const Instance& before, const Instance& after) {
      OracleVerdict vb = bireach_verdict(oracle_bireach(before.net, before.source,
                                                        before.target, budget));
      OracleVerdict va =
          bireach_verdict(oracle_bireach(after.net, after.source, after.target, budget));
      if (vb == OracleVerdict::kUnknown || va == OracleVerdict::kUnknown) return;
      CHECK(vb == va);
      ++sound_steps;
    };

    Verdict v = decide(net, q0, qp0, cfg);
    check_trace_shape(v);

    OracleVerdict o = bireach_verdict(oracle_bireach(net, q0, qp0, budget));
    if (o == OracleVerdict::kUnknown || v.decision == Decision::kUnknown) continue;
    ++conclusive;
    CHECK((v.decision == Decision::kBireachable) == (o == OracleVerdict::kYes));
  }
  CHECK(conclusive >= 40);
  CHECK(sound_steps >= 20);
}
