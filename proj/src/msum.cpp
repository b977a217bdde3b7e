#include "birch/msum.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace birch {

int64_t YVector::state_coord(const State& s) const {
  auto it = std::lower_bound(
      states.begin(), states.end(), s,
      [](const std::pair<State, int64_t>& e, const State& key) { return e.first < key; });
  return it != states.end() && it->first == s ? it->second : 0;
}

void YVector::add_state(const State& s, int64_t delta) {
  if (delta == 0) return;
  auto it = std::lower_bound(
      states.begin(), states.end(), s,
      [](const std::pair<State, int64_t>& e, const State& key) { return e.first < key; });
  if (it != states.end() && it->first == s) {
    it->second += delta;
    if (it->second == 0) states.erase(it);
  } else {
    states.insert(it, {s, delta});
  }
}

YVector& YVector::operator+=(const YVector& other) {
  vec += other.vec;
  for (const auto& [s, n] : other.states) add_state(s, n);
  star += other.star;
  return *this;
}

YVector YVector::renamed(const Renaming& r) const {
  YVector out;
  out.vec = vec.renamed(r);
  out.states.reserve(states.size());
  for (const auto& [s, n] : states) out.states.emplace_back(s.renamed(r), n);
  std::sort(out.states.begin(), out.states.end());
  out.star = star;
  return out;
}

void YVector::collect_atoms(std::vector<Atom>& acc) const {
  vec.collect_atoms(acc);
  for (const auto& [s, n] : states) s.collect_atoms(acc);
}

YVector canonicalize_yvector(const YVector& y) {
  std::vector<Atom> supp = support(y);
  const size_t k = supp.size();
  if (k == 0) return y;
  std::vector<size_t> perm(k);
  std::iota(perm.begin(), perm.end(), size_t{0});
  std::optional<YVector> best;
  do {
    std::vector<std::pair<Atom, Atom>> pairs;
    pairs.reserve(k);
    for (size_t i = 0; i < k; ++i)
      pairs.emplace_back(supp[i], Atom{static_cast<uint32_t>(perm[i])});
    YVector cand = y.renamed(Renaming::from_pairs(std::move(pairs)));
    if (!best || cand < *best) best = std::move(cand);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return *best;
}

namespace {

bool all_zero(const std::vector<int64_t>& v) {
  return std::all_of(v.begin(), v.end(), [](int64_t x) { return x == 0; });
}

int64_t dot(const std::vector<int64_t>& a, const std::vector<int64_t>& b) {
  int64_t s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

IntFeas integer_feasibility(const std::vector<std::vector<int64_t>>& columns,
                            const std::vector<int64_t>& target,
                            std::vector<int64_t>* solution, size_t node_cap) {
  const size_t m = columns.size();
  if (all_zero(target)) {
    if (solution) solution->assign(m, 0);
    return IntFeas::kSat;
  }
  for (const auto& c : columns)
    if (c.size() != target.size())
      throw std::invalid_argument("integer_feasibility: column dimension mismatch");

  // Search over residuals target - (partial sum), extending by a column only
  // when it shrinks the residual in scalar product. Two partial combinations
  // with equal residuals have interchangeable completions, so residuals are
  // deduplicated globally; parent links recover one witness. Frontier
  // exhaustion without reaching zero refutes feasibility.
  struct Node {
    std::vector<int64_t> d;  // residual: chosen columns minus target
    int32_t col;
    int32_t parent;
  };
  auto norm2 = [](const std::vector<int64_t>& v) {
    int64_t s = 0;
    for (int64_t x : v) s += x * x;
    return s;
  };

  std::vector<Node> arena;
  std::set<std::vector<int64_t>> visited;
  // Min-heap on the residual norm: zero is a global minimum, so promising
  // nodes surface early; order does not affect completeness.
  std::priority_queue<std::pair<int64_t, int32_t>, std::vector<std::pair<int64_t, int32_t>>,
                      std::greater<>>
      queue;

  std::vector<int64_t> root(target.size());
  for (size_t j = 0; j < target.size(); ++j) root[j] = -target[j];
  queue.push({norm2(root), 0});
  visited.insert(root);
  arena.push_back({std::move(root), -1, -1});

  while (!queue.empty()) {
    const int32_t id = queue.top().second;
    queue.pop();
    const std::vector<int64_t> d = arena[id].d;
    for (size_t i = 0; i < m; ++i) {
      if (dot(d, columns[i]) >= 0) continue;
      std::vector<int64_t> nd = d;
      for (size_t j = 0; j < nd.size(); ++j) nd[j] += columns[i][j];
      if (all_zero(nd)) {
        if (solution) {
          solution->assign(m, 0);
          ++(*solution)[i];
          for (int32_t cur = id; cur >= 0; cur = arena[cur].parent)
            if (arena[cur].col >= 0) ++(*solution)[arena[cur].col];
        }
        return IntFeas::kSat;
      }
      if (visited.count(nd)) continue;
      if (visited.size() >= node_cap) return IntFeas::kInconclusive;
      visited.insert(nd);
      queue.push({norm2(nd), static_cast<int32_t>(arena.size())});
      arena.push_back({std::move(nd), static_cast<int32_t>(i), id});
    }
  }
  return IntFeas::kUnsat;
}

namespace {

// Dense coordinate layout shared by the target and the columns of one stage.
struct CoordSpace {
  std::vector<PlaceId> plain;
  std::vector<std::pair<PlaceId, Atom>> data;
  std::vector<State> states;

  static CoordSpace over(const YVector& target, const std::vector<YVector>& cols) {
    std::set<PlaceId> hs;
    std::set<std::pair<PlaceId, Atom>> ds;
    std::set<State> ss;
    auto add = [&](const YVector& y) {
      for (const auto& [h, n] : y.vec.plain) hs.insert(h);
      for (const auto& [key, n] : y.vec.data) ds.insert(key);
      for (const auto& [s, n] : y.states) ss.insert(s);
    };
    add(target);
    for (const auto& c : cols) add(c);
    CoordSpace cs;
    cs.plain.assign(hs.begin(), hs.end());
    cs.data.assign(ds.begin(), ds.end());
    cs.states.assign(ss.begin(), ss.end());
    return cs;
  }

  std::vector<int64_t> densify(const YVector& y) const {
    std::vector<int64_t> v(plain.size() + data.size() + states.size() + 1, 0);
    size_t off = 0;
    for (size_t i = 0; i < plain.size(); ++i) v[off + i] = y.vec.at_plain(plain[i]);
    off += plain.size();
    for (size_t i = 0; i < data.size(); ++i) v[off + i] = y.vec.at(data[i].first, data[i].second);
    off += data.size();
    for (size_t i = 0; i < states.size(); ++i) v[off + i] = y.state_coord(states[i]);
    v.back() = y.star;
    return v;
  }
};

void instantiations_into(const YVector& gen, const std::vector<Atom>& pool,
                         std::set<YVector>& out) {
  std::vector<Atom> gs = support(gen);
  if (gs.size() > pool.size()) return;
  std::vector<Atom> chosen(gs.size());
  std::vector<bool> used(pool.size(), false);
  auto rec = [&](auto&& self, size_t pos) -> void {
    if (pos == gs.size()) {
      std::vector<std::pair<Atom, Atom>> pairs;
      pairs.reserve(gs.size());
      for (size_t i = 0; i < gs.size(); ++i) pairs.emplace_back(gs[i], chosen[i]);
      out.insert(gen.renamed(Renaming::from_pairs(std::move(pairs))));
      return;
    }
    for (size_t s = 0; s < pool.size(); ++s) {
      if (used[s]) continue;
      used[s] = true;
      chosen[pos] = pool[s];
      self(self, pos + 1);
      used[s] = false;
    }
  };
  rec(rec, 0);
}

}  // namespace

namespace {

// Forgets atom identities: every (p, a) entry collapses into a single
// per-place count, encoded as the pseudo-atom 0 so place id spaces stay
// separate. A solution of the instance maps to a solution of the aggregate by
// linearity, so aggregate infeasibility refutes every atom budget at once.
YVector aggregate_counts(const YVector& y) {
  YVector out;
  out.vec.plain = y.vec.plain;
  for (const auto& [key, n] : y.vec.data) out.vec.add_data(key.first, Atom{0}, n);
  for (const auto& [s, n] : y.states) {
    State pattern = s;
    for (auto& reg : pattern.regs)
      if (reg) reg = Atom{0};
    out.add_state(pattern, n);
  }
  out.star = y.star;
  return out;
}

bool aggregate_refutes(const MsumInstance& inst, size_t node_cap) {
  std::vector<YVector> cols;
  cols.reserve(inst.generators.size());
  for (const auto& g : inst.generators) cols.push_back(aggregate_counts(g));
  const YVector target = aggregate_counts(inst.target);
  const CoordSpace cs = CoordSpace::over(target, cols);
  std::vector<std::vector<int64_t>> dcols;
  dcols.reserve(cols.size());
  for (const auto& c : cols) dcols.push_back(cs.densify(c));
  return integer_feasibility(dcols, cs.densify(target), nullptr, node_cap) == IntFeas::kUnsat;
}

}  // namespace

int default_msum_budget(const MsumInstance& inst) {
  size_t k = 0;
  for (const auto& g : inst.generators) k = std::max(k, support(g).size());
  return static_cast<int>(support(inst.target).size() +
                          2 * k * inst.generators.size());
}

MsumOutcome solve_msum(const MsumInstance& inst, const MsumConfig& cfg) {
  const std::vector<Atom> supp_b = support(inst.target);
  size_t k = 0;
  for (const auto& g : inst.generators) k = std::max(k, support(g).size());
  const int budget = cfg.max_budget >= 0 ? cfg.max_budget : default_msum_budget(inst);
  if (budget < static_cast<int>(supp_b.size()))
    throw std::invalid_argument("msum: atom budget " + std::to_string(budget) +
                                " is below the target support size " +
                                std::to_string(supp_b.size()));
  if (inst.target.is_zero())
    return {MsumOutcome::Kind::kSat, {}, static_cast<int>(supp_b.size())};
  if (inst.generators.empty()) return {MsumOutcome::Kind::kUnsatCertified, {}, budget};
  if (aggregate_refutes(inst, cfg.node_cap))
    return {MsumOutcome::Kind::kUnsatCertified, {}, budget};

  std::vector<size_t> stages;
  if (k == 0) {
    stages.push_back(0);  // atom-free generators: the pool plays no role
  } else {
    for (size_t n = k; static_cast<int>(n) <= budget; ++n) stages.push_back(n);
    // A budget below the largest generator support still buys a pool; smaller
    // generators may well suffice.
    if (stages.empty()) stages.push_back(static_cast<size_t>(budget));
  }

  bool capped = false;
  for (size_t n : stages) {
    std::vector<Atom> pool = supp_b;
    for (Atom a : fresh_atoms(supp_b, n)) pool.push_back(a);

    std::set<YVector> colset;
    for (const auto& g : inst.generators) instantiations_into(g, pool, colset);
    const std::vector<YVector> colv(colset.begin(), colset.end());

    const CoordSpace cs = CoordSpace::over(inst.target, colv);
    std::vector<std::vector<int64_t>> dcols;
    dcols.reserve(colv.size());
    for (const auto& c : colv) dcols.push_back(cs.densify(c));
    const std::vector<int64_t> dtarget = cs.densify(inst.target);

    std::vector<int64_t> x;
    switch (integer_feasibility(dcols, dtarget, &x, cfg.node_cap)) {
      case IntFeas::kSat: {
        MsumOutcome out;
        out.kind = MsumOutcome::Kind::kSat;
        out.atom_budget = static_cast<int>(supp_b.size() + n);
        for (size_t i = 0; i < colv.size(); ++i)
          for (int64_t c = 0; c < x[i]; ++c) out.witness.push_back(colv[i]);
        return out;
      }
      case IntFeas::kInconclusive:
        capped = true;
        break;
      case IntFeas::kUnsat:
        break;
    }
  }

  MsumOutcome out;
  const bool complete = !capped && !stages.empty() && (cfg.certified || k == 0);
  out.kind = complete ? MsumOutcome::Kind::kUnsatCertified : MsumOutcome::Kind::kUnsatWithin;
  out.atom_budget = budget;
  return out;
}

std::pair<MsumInstance, MsumInstance> build_usefulness_instances(
    const Dvass& net, const State& q, const State& qp, size_t orbit_index) {
  if (orbit_index >= net.transitions.size())
    throw std::out_of_range("usefulness: orbit index " + std::to_string(orbit_index) +
                            " is not a transition of the net");
  MsumInstance fwd;
  for (const TransitionOrbit& t : net.transitions) {
    YVector y;
    y.vec = t.effect;
    y.add_state(t.source, -1);
    y.add_state(t.target, +1);
    fwd.generators.push_back(canonicalize_yvector(y));
  }
  {
    const TransitionOrbit& t = net.transitions[orbit_index];
    YVector x;
    x.vec = t.effect;
    x.add_state(t.source, -1);
    x.add_state(t.target, +1);
    x.star = 1;
    fwd.generators.push_back(canonicalize_yvector(x));
  }
  MsumInstance bwd = fwd;
  YVector b;
  b.add_state(q, -1);
  b.add_state(qp, +1);
  b.star = 1;
  YVector bp;
  bp.add_state(qp, -1);
  bp.add_state(q, +1);
  bp.star = 1;
  fwd.target = std::move(b);
  bwd.target = std::move(bp);
  return {std::move(fwd), std::move(bwd)};
}

}  // namespace birch
