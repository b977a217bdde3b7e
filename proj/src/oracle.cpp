#include "birch/oracle.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "birch/cover.hpp"
#include "birch/msum.hpp"

namespace birch {

namespace {

bool within_budget(const Configuration& c, const OracleBudget& b) {
  for (const auto& [h, n] : c.marking.plain)
    if (n > b.max_tokens_per_place) return false;
  PlaceId last = -1;
  for (const auto& [k, n] : c.marking.data) {
    if (k.first == last) continue;
    last = k.first;
    if (c.marking.place_size(k.first) > b.max_tokens_per_place) return false;
  }
  return (int64_t)support(c).size() <= b.max_total_atoms;
}

}  // namespace

OracleAnswer bfs_reach(const Dvass& net, const Configuration& src, const Configuration& tgt,
                       const OracleBudget& b) {
  OracleAnswer ans;
  std::vector<Atom> pinned = support(src);
  {
    std::vector<Atom> ts = support(tgt);
    pinned.insert(pinned.end(), ts.begin(), ts.end());
    std::sort(pinned.begin(), pinned.end());
    pinned.erase(std::unique(pinned.begin(), pinned.end()), pinned.end());
  }
  // All endpoint atoms are pinned, so the endpoints are their own canonical
  // forms and the target test is plain equality.
  if (src == tgt) {
    ans.found = true;
    ans.run = {src};
    return ans;
  }

  struct Node {
    Configuration canon;
    int64_t parent = -1;
    Configuration raw;  // pre-canonical successor of the parent's canon
    size_t depth = 0;
  };
  std::vector<Node> nodes;
  std::set<Configuration> seen;
  std::deque<size_t> queue;
  bool cut = false;

  nodes.push_back({src, -1, {}, 0});
  seen.insert(src);
  queue.push_back(0);

  auto reconstruct = [&](size_t id) {
    std::vector<size_t> path;
    for (int64_t i = (int64_t)id; i >= 0; i = nodes[(size_t)i].parent) path.push_back((size_t)i);
    std::reverse(path.begin(), path.end());
    PseudoRun run = {src};
    Renaming mu;
    for (size_t k = 1; k < path.size(); ++k) {
      const Configuration& raw = nodes[path[k]].raw;
      run.push_back(raw.renamed(mu));
      mu = canonicalize(raw, pinned).renaming.inverse().then(mu);
    }
    return run;
  };

  while (!queue.empty()) {
    size_t cur = queue.front();
    queue.pop_front();
    if (nodes[cur].depth >= b.max_depth) {
      cut = true;
      continue;
    }
    for (const auto& [oi, succ] : enumerate_successors(net, nodes[cur].canon, pinned)) {
      (void)oi;
      if (!within_budget(succ, b)) continue;  // prune, region stays exhausted
      Configuration canon = canonicalize(succ, pinned).value;
      if (!seen.insert(canon).second) continue;
      nodes.push_back({canon, (int64_t)cur, succ, nodes[cur].depth + 1});
      if (canon == tgt) {
        ans.found = true;
        ans.run = reconstruct(nodes.size() - 1);
        return ans;
      }
      if (nodes.size() > b.max_states) {
        cut = true;
        queue.clear();
        break;
      }
      queue.push_back(nodes.size() - 1);
    }
  }
  ans.frontier_empty = !cut;
  return ans;
}

BireachAnswer oracle_bireach(const Dvass& net, const Configuration& src, const Configuration& tgt,
                             const OracleBudget& b) {
  return {bfs_reach(net, src, tgt, b), bfs_reach(net, tgt, src, b)};
}

OracleVerdict bireach_verdict(const BireachAnswer& a) {
  if (a.forward.found && a.backward.found) return OracleVerdict::kYes;
  if ((!a.forward.found && a.forward.frontier_empty) ||
      (!a.backward.found && a.backward.frontier_empty))
    return OracleVerdict::kNo;
  return OracleVerdict::kUnknown;
}

bool validate_pseudo_run(const Dvass& net, const PseudoRun& run, bool require_nonneg) {
  if (require_nonneg)
    for (const Configuration& c : run)
      if (!c.marking.nonnegative()) return false;
  if (run.size() < 2) return true;
  std::vector<TransitionOrbit> canon;
  canon.reserve(net.transitions.size());
  for (const TransitionOrbit& t : net.transitions) canon.push_back(canonicalize(t).value);
  for (size_t i = 0; i + 1 < run.size(); ++i) {
    TransitionOrbit step{run[i].state, run[i + 1].marking - run[i].marking, run[i + 1].state};
    TransitionOrbit key = canonicalize(step).value;
    if (std::find(canon.begin(), canon.end(), key) == canon.end()) return false;
  }
  return true;
}

std::optional<PseudoRun> assemble_euler_run(const State& start, const DataVector& start_marking,
                                            const std::vector<TransitionOrbit>& steps) {
  std::map<State, std::vector<size_t>> adj;
  for (size_t i = 0; i < steps.size(); ++i) adj[steps[i].source].push_back(i);
  std::map<State, size_t> used;
  std::vector<State> vstack = {start};
  std::vector<size_t> estack;
  std::vector<size_t> epath;
  while (!vstack.empty()) {
    const State v = vstack.back();
    size_t& k = used[v];
    auto it = adj.find(v);
    if (it != adj.end() && k < it->second.size()) {
      size_t e = it->second[k++];
      vstack.push_back(steps[e].target);
      estack.push_back(e);
    } else {
      vstack.pop_back();
      if (!estack.empty()) {
        if (vstack.empty()) return std::nullopt;
        epath.push_back(estack.back());
        estack.pop_back();
      }
    }
  }
  std::reverse(epath.begin(), epath.end());
  if (epath.size() != steps.size()) return std::nullopt;  // disconnected or stuck

  PseudoRun run;
  run.push_back({start, start_marking});
  for (size_t e : epath) {
    if (!(run.back().state == steps[e].source)) return std::nullopt;
    Configuration next{steps[e].target, run.back().marking + steps[e].effect};
    run.push_back(std::move(next));
  }
  return run;
}

namespace {

// Feasibility of an integer flow f >= 1 with A f = rhs, where columns are the
// per-transition place effects stacked with location imbalances. Substitutes
// f = 1 + x and asks for x >= 0.
bool flow_at_least_one(const Dvass& net, const std::vector<int64_t>& rhs_loc) {
  const size_t nh = net.plain_places.size();
  const size_t nl = net.locations.size();
  std::vector<std::vector<int64_t>> cols;
  std::vector<int64_t> target(nh + nl, 0);
  for (const TransitionOrbit& t : net.transitions) {
    std::vector<int64_t> col(nh + nl, 0);
    for (const auto& [h, c] : t.effect.plain) col[(size_t)h] = c;
    col[nh + (size_t)t.source.location] -= 1;
    col[nh + (size_t)t.target.location] += 1;
    for (size_t i = 0; i < col.size(); ++i) target[i] -= col[i];
    cols.push_back(std::move(col));
  }
  for (size_t l = 0; l < nl; ++l) target[nh + l] += rhs_loc[l];
  return integer_feasibility(cols, target, nullptr, 200000) == IntFeas::kSat;
}

bool connected_with(const Dvass& net, LocId q, LocId qp) {
  std::vector<int32_t> parent((size_t)std::max((LocId)net.locations.size(), (LocId)1));
  for (size_t i = 0; i < parent.size(); ++i) parent[i] = (int32_t)i;
  auto find = [&](int32_t x) {
    while (parent[(size_t)x] != x) x = parent[(size_t)x] = parent[(size_t)parent[(size_t)x]];
    return x;
  };
  for (const TransitionOrbit& t : net.transitions)
    parent[(size_t)find(t.source.location)] = find(t.target.location);
  int32_t root = find(q);
  if (find(qp) != root) return false;
  for (const TransitionOrbit& t : net.transitions)
    if (find(t.source.location) != root) return false;
  return true;
}

bool all_omega_ideal_at(const Dvass& net, LocId from, LocId at) {
  CoverResult cover = compute_cover(net, Configuration{net.empty_state(from), {}});
  if (!cover.complete) return false;
  for (const OmegaConfiguration& f : cover.ideals) {
    if (f.state.location != at) continue;
    bool all = true;
    for (size_t h = 0; h < net.plain_places.size(); ++h)
      if (!f.valuation.at_plain((PlaceId)h).is_omega()) all = false;
    if (all) return true;
  }
  return false;
}

}  // namespace

ThetaAnswer vass_theta_check(const Dvass& net, LocId q, LocId qp) {
  if (!net.registers.empty() || !net.atom_places.empty())
    throw std::invalid_argument("theta check needs a plain net");
  ThetaAnswer out;

  std::vector<int64_t> path_rhs(net.locations.size(), 0);
  path_rhs[(size_t)q] -= 1;
  path_rhs[(size_t)qp] += 1;
  const std::vector<int64_t> circ_rhs(net.locations.size(), 0);
  out.theta1 = flow_at_least_one(net, path_rhs) && flow_at_least_one(net, circ_rhs) &&
               connected_with(net, q, qp);

  const Dvass rev = reverse(net);
  out.pump_fwd_q = all_omega_ideal_at(net, q, q);
  out.pump_fwd_qp = all_omega_ideal_at(net, qp, qp);
  out.pump_bwd_q = all_omega_ideal_at(rev, q, q);
  out.pump_bwd_qp = all_omega_ideal_at(rev, qp, qp);
  return out;
}

}  // namespace birch
