#include <random>
#include <vector>

#include "birch/net.hpp"
#include "birch/oracle.hpp"
#include "doctest.h"

using namespace birch;

namespace {

// Two places; t1 emits two distinct atoms onto p1, t2 trades a common atom of
// p1 and p2 for two fresh-constrained copies on p1 and one on p2.
PetriNet two_place_net() {
  PetriNet pn;
  pn.name = "two-place";
  pn.places = {"p1", "p2"};
  PetriTransition t1;
  t1.name = "t1";
  t1.outputs = {{0, "x1"}, {0, "x2"}};
  t1.disequalities = {{"x1", "x2"}};
  PetriTransition t2;
  t2.name = "t2";
  t2.inputs = {{0, "y1"}, {1, "y2"}};
  t2.outputs = {{0, "z1"}, {1, "z2"}, {0, "z3"}};
  t2.equalities = {{"z1", "z2"}, {"y1", "y2"}};
  t2.disequalities = {{"z2", "y1"}, {"y2", "z3"}};
  pn.transitions = {t1, t2};
  return pn;
}

// One register and one atom place, with all four moves between them.
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
  net.transitions.push_back({empty, {}, full});                            // load
  net.transitions.push_back({full, DataVector::unit_data(0, a, 1), empty});  // store
  if (with_unload) {
    net.transitions.push_back({empty, DataVector::unit_data(0, a, -1), full});  // unload
    net.transitions.push_back({full, {}, empty});                               // forget
  }
  net.canonicalize_transitions();
  return net;
}

Dvass grow_net() {
  Dvass net;
  net.name = "grow";
  net.locations = {"g"};
  net.plain_places = {"h"};
  net.transitions.push_back({net.empty_state(0), DataVector::unit_plain(0, 1), net.empty_state(0)});
  return net;
}

// Effect-free bridge between q and qp plus a +h/-h loop pair at q.
Dvass bridge_vass() {
  Dvass net;
  net.name = "bridge-vass";
  net.locations = {"q", "qp"};
  net.plain_places = {"h"};
  net.transitions.push_back({net.empty_state(0), DataVector::unit_plain(0, 1), net.empty_state(0)});
  net.transitions.push_back({net.empty_state(0), DataVector::unit_plain(0, -1), net.empty_state(0)});
  net.transitions.push_back({net.empty_state(0), {}, net.empty_state(1)});
  net.transitions.push_back({net.empty_state(1), {}, net.empty_state(0)});
  return net;
}

}  // namespace

TEST_CASE("equal endpoints give the empty run") {
  Dvass net = loader_net(true);
  Configuration c{net.empty_state(0), DataVector::unit_data(0, Atom{5}, 2)};
  OracleAnswer ans = bfs_reach(net, c, c);
  REQUIRE(ans.found);
  CHECK(ans.run == PseudoRun{c});
  CHECK(validate_pseudo_run(net, ans.run, true));
}

TEST_CASE("two-place net: the pictured two-step run is found") {
  Dvass net = compile_petri(two_place_net());
  const Atom black{0}, red{1}, blue{2}, c3{3}, d4{4};
  Configuration src{net.empty_state(0), {}};
  src.marking.add_data(0, black, 1);
  src.marking.add_data(0, red, 2);
  src.marking.add_data(1, blue, 1);
  src.marking.add_data(1, black, 1);

  // t2 with y1 = y2 = black and z1 = z2 = z3 = a fresh atom, then t1 emitting
  // black and another fresh atom.
  Configuration tgt{net.empty_state(0), {}};
  tgt.marking.add_data(0, red, 2);
  tgt.marking.add_data(0, c3, 2);
  tgt.marking.add_data(1, blue, 1);
  tgt.marking.add_data(1, c3, 1);
  tgt.marking.add_data(0, black, 1);
  tgt.marking.add_data(0, d4, 1);

  OracleAnswer ans = bfs_reach(net, src, tgt);
  REQUIRE(ans.found);
  CHECK(ans.run.size() == 3);
  CHECK(ans.run.front() == src);
  CHECK(ans.run.back() == tgt);
  CHECK(validate_pseudo_run(net, ans.run, true));
}

TEST_CASE("budget semantics: exhaustion vs cut") {
  Dvass net = grow_net();
  Configuration src{net.empty_state(0), {}};
  Configuration tgt{net.empty_state(0), DataVector::unit_plain(0, 10)};

  OracleBudget five;
  five.max_tokens_per_place = 5;
  OracleAnswer pruned = bfs_reach(net, src, tgt, five);
  CHECK(!pruned.found);
  CHECK(pruned.frontier_empty);  // token prune keeps the region exhausted

  OracleBudget shallow;
  shallow.max_depth = 4;
  OracleAnswer cut = bfs_reach(net, src, tgt, shallow);
  CHECK(!cut.found);
  CHECK(!cut.frontier_empty);

  OracleBudget tiny;
  tiny.max_states = 3;
  OracleAnswer capped = bfs_reach(net, src, tgt, tiny);
  CHECK(!capped.found);
  CHECK(!capped.frontier_empty);

  OracleAnswer enough = bfs_reach(net, src, tgt, OracleBudget{12, 4, 64, 100000});
  REQUIRE(enough.found);
  CHECK(enough.run.size() == 11);
}

TEST_CASE("validator accepts pseudo-runs and gates nonnegativity") {
  Dvass net = bridge_vass();
  CHECK(validate_pseudo_run(net, {}, true));
  Configuration at{net.empty_state(0), {}};
  CHECK(validate_pseudo_run(net, {at}, true));

  Configuration dip = at;
  dip.marking.add_plain(0, -1);
  PseudoRun down_up = {at, dip, at};
  CHECK(validate_pseudo_run(net, down_up, false));
  CHECK(!validate_pseudo_run(net, down_up, true));

  PseudoRun bogus = {at, Configuration{net.empty_state(1), DataVector::unit_plain(0, 2)}};
  CHECK(!validate_pseudo_run(net, bogus, false));
}

TEST_CASE("target atoms outside the source are still reachable by name") {
  Dvass net = loader_net(false);
  const Atom a{9};
  Configuration src{net.empty_state(0), {}};
  Configuration tgt{net.empty_state(0), DataVector::unit_data(0, a, 2)};
  OracleAnswer ans = bfs_reach(net, src, tgt);
  REQUIRE(ans.found);
  CHECK(ans.run.size() == 5);
  CHECK(ans.run.back() == tgt);
  CHECK(validate_pseudo_run(net, ans.run, true));

  // Orbit soundness: renaming both endpoints does not change the answer.
  Renaming sigma = Renaming::from_pairs({{Atom{9}, Atom{77}}});
  OracleAnswer moved = bfs_reach(net, src.renamed(sigma), tgt.renamed(sigma));
  REQUIRE(moved.found);
  CHECK(moved.run.size() == ans.run.size());
  CHECK(validate_pseudo_run(net, moved.run, true));
}

TEST_CASE("bireach verdicts and mirrors") {
  const Atom a{0};
  Configuration src{loader_net(true).empty_state(0), {}};
  Configuration tgt{loader_net(true).empty_state(0), DataVector::unit_data(0, a, 1)};

  Dvass full = loader_net(true);
  BireachAnswer both = oracle_bireach(full, src, tgt);
  CHECK(bireach_verdict(both) == OracleVerdict::kYes);
  CHECK(validate_pseudo_run(full, both.forward.run, true));
  CHECK(validate_pseudo_run(full, both.backward.run, true));

  Dvass half = loader_net(false);
  BireachAnswer oneway = oracle_bireach(half, src, tgt);
  CHECK(bireach_verdict(oneway) == OracleVerdict::kNo);
  CHECK(oneway.forward.found);
  CHECK(!oneway.backward.found);
  CHECK(oneway.backward.frontier_empty);

  OracleBudget strangled;
  strangled.max_states = 1;
  CHECK(bireach_verdict(oracle_bireach(half, tgt, src, strangled)) == OracleVerdict::kUnknown);

  // Forward search in the net mirrors backward search in the reversed net.
  CHECK(bfs_reach(half, src, tgt).found == bfs_reach(reverse(half), tgt, src).found);
  CHECK(bfs_reach(half, tgt, src).found == bfs_reach(reverse(half), src, tgt).found);
}

TEST_CASE("normalization preserves the oracle verdict") {
  const Atom a{0};
  for (bool with_unload : {true, false}) {
    Dvass net = loader_net(with_unload);
    Instance inst{net, Configuration{net.empty_state(0), {}},
                  Configuration{net.empty_state(0), DataVector::unit_data(0, a, 1)}};
    Instance norm = normalize(inst);
    OracleBudget roomy{10, 10, 80, 200000};
    OracleVerdict before = bireach_verdict(oracle_bireach(inst.net, inst.source, inst.target, roomy));
    OracleVerdict after =
        bireach_verdict(oracle_bireach(norm.net, norm.source, norm.target, roomy));
    CHECK(before == after);
    CHECK(before == (with_unload ? OracleVerdict::kYes : OracleVerdict::kNo));
  }
}

TEST_CASE("euler assembly arranges instances into a pseudo-run") {
  Dvass net = bridge_vass();
  std::vector<TransitionOrbit> steps = {net.transitions[0], net.transitions[1],
                                        net.transitions[2]};
  auto run = assemble_euler_run(net.empty_state(0), {}, steps);
  REQUIRE(run.has_value());
  CHECK(run->size() == 4);
  CHECK(run->front().state == net.empty_state(0));
  CHECK(run->back().state == net.empty_state(1));
  CHECK(validate_pseudo_run(net, *run, false));

  // An edge not reachable from the start leaves the assembly impossible.
  CHECK(!assemble_euler_run(net.empty_state(0), {}, {net.transitions[3]}).has_value());
}

TEST_CASE("theta checker on the crafted nets") {
  Dvass counter;
  counter.locations = {"c"};
  counter.plain_places = {"h"};
  counter.transitions.push_back(
      {counter.empty_state(0), DataVector::unit_plain(0, 1), counter.empty_state(0)});
  counter.transitions.push_back(
      {counter.empty_state(0), DataVector::unit_plain(0, -1), counter.empty_state(0)});
  ThetaAnswer yes = vass_theta_check(counter, 0, 0);
  CHECK(yes.ok());
  CHECK(bfs_reach(counter, {counter.empty_state(0), {}}, {counter.empty_state(0), {}}).found);

  ThetaAnswer no = vass_theta_check(grow_net(), 0, 0);
  CHECK(!no.ok());
  CHECK(!no.theta1);
  CHECK(!no.pump_bwd_q);

  Dvass bridge = bridge_vass();
  ThetaAnswer both = vass_theta_check(bridge, 0, 1);
  CHECK(both.ok());
  Configuration q0{bridge.empty_state(0), {}};
  Configuration q1{bridge.empty_state(1), {}};
  CHECK(bfs_reach(bridge, q0, q1).found);
  CHECK(bfs_reach(bridge, q1, q0).found);

  CHECK_THROWS_AS(vass_theta_check(loader_net(false), 0, 0), std::invalid_argument);
}

TEST_CASE("theta positives always yield both runs on random plain nets") {
  std::mt19937 rng(987654);
  std::uniform_int_distribution<int> loc(0, 1);
  std::uniform_int_distribution<int> eff(-1, 1);
  std::uniform_int_distribution<int> ntrans(1, 4);

  int positives = 0;
  for (int iter = 0; iter < 200; ++iter) {
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
    // A two-way bridge keeps the control graph connected and a +1/-1 loop
    // pair gives the flows a place to balance; the extra edges are noise.
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
    ThetaAnswer th = vass_theta_check(net, 0, 1);
    if (!th.ok()) continue;
    ++positives;
    OracleBudget roomy{40, 4, 5000, 400000};
    Configuration q0{net.empty_state(0), {}};
    Configuration q1{net.empty_state(1), {}};
    CAPTURE(iter);
    REQUIRE(bfs_reach(net, q0, q1, roomy).found);
    REQUIRE(bfs_reach(net, q1, q0, roomy).found);
  }
  CHECK(positives >= 20);
}
