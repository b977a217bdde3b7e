#include "birch/decide.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

#include "birch/state_graph.hpp"

namespace birch {

Rank rank_of(const Dvass& net) {
  return {net.atom_places.size(), net.plain_places.size(), net.transitions.size()};
}

Dvass remove_orbit(const Dvass& net, const TransitionOrbit& o) {
  Dvass out = net;
  auto it = std::find(out.transitions.begin(), out.transitions.end(), o);
  if (it == out.transitions.end())
    throw std::invalid_argument("remove_orbit: orbit is not a transition of the net");
  out.transitions.erase(it);
  return out;
}

namespace {

std::string banded_name(const std::string& base, int64_t n) {
  return base + std::string(1, kAuxSigil) + std::to_string(n);
}

}  // namespace

FoldResult fold_plain_place(const Dvass& net, PlaceId h, int64_t bound,
                            const State& q, const State& qp) {
  if (h < 0 || static_cast<size_t>(h) >= net.plain_places.size())
    throw std::invalid_argument("fold_plain_place: no such plain place");
  if (bound < 0) throw std::invalid_argument("fold_plain_place: negative bound");

  const int64_t bands = bound + 1;
  FoldResult out;
  out.net.name = net.name;
  out.net.registers = net.registers;
  out.net.atom_places = net.atom_places;
  for (size_t j = 0; j < net.plain_places.size(); ++j)
    if (static_cast<PlaceId>(j) != h) out.net.plain_places.push_back(net.plain_places[j]);
  for (const std::string& name : net.locations)
    for (int64_t n = 0; n < bands; ++n) out.net.locations.push_back(banded_name(name, n));
  auto banded = [bands](LocId l, int64_t n) {
    return static_cast<LocId>(static_cast<int64_t>(l) * bands + n);
  };

  auto strip = [h](const DataVector& v) {
    DataVector w;
    for (const auto& [place, count] : v.plain)
      if (place != h) w.add_plain(place > h ? place - 1 : place, count);
    for (const auto& [key, count] : v.data) w.add_data(key.first, key.second, count);
    return w;
  };

  for (const TransitionOrbit& t : net.transitions) {
    const int64_t delta = t.effect.at_plain(h);
    const DataVector w = strip(t.effect);
    for (int64_t n = 0; n < bands; ++n) {
      const int64_t m = n + delta;
      if (m < 0 || m >= bands) continue;
      TransitionOrbit nt;
      nt.source = t.source;
      nt.source.location = banded(t.source.location, n);
      nt.target = t.target;
      nt.target.location = banded(t.target.location, m);
      nt.effect = w;
      out.net.transitions.push_back(nt);
    }
  }
  out.net.canonicalize_transitions();

  out.q = q;
  out.q.location = banded(q.location, 0);
  out.qp = qp;
  out.qp.location = banded(qp.location, 0);
  return out;
}

namespace {

// Every way to fill `slots` registers from the pool, empties allowed.
void all_fills(const std::vector<Atom>& pool, size_t slots,
               std::vector<std::optional<Atom>>& acc,
               const std::function<void(const std::vector<std::optional<Atom>>&)>& fn) {
  if (slots == 0) {
    fn(acc);
    return;
  }
  acc.push_back(std::nullopt);
  all_fills(pool, slots - 1, acc, fn);
  acc.pop_back();
  for (Atom a : pool) {
    acc.push_back(a);
    all_fills(pool, slots - 1, acc, fn);
    acc.pop_back();
  }
}

// Every way to place exactly the given token multiset into `slots` registers,
// each produced once: slots are filled in order and equal tokens are drawn
// from one entry.
void placements(const std::vector<std::pair<Atom, int64_t>>& want, size_t slots,
                std::vector<std::optional<Atom>>& acc,
                const std::function<void(const std::vector<std::optional<Atom>>&)>& fn) {
  int64_t remaining = 0;
  for (const auto& [a, c] : want) remaining += c;
  if (remaining > static_cast<int64_t>(slots)) return;
  if (slots == 0) {
    fn(acc);
    return;
  }
  acc.push_back(std::nullopt);
  placements(want, slots - 1, acc, fn);
  acc.pop_back();
  for (size_t i = 0; i < want.size(); ++i) {
    if (want[i].second == 0) continue;
    auto rest = want;
    --rest[i].second;
    acc.push_back(want[i].first);
    placements(rest, slots - 1, acc, fn);
    acc.pop_back();
  }
}

}  // namespace

FoldResult fold_atom_place(const Dvass& net, PlaceId p, int64_t bound,
                           const State& q, const State& qp) {
  if (p < 0 || static_cast<size_t>(p) >= net.atom_places.size())
    throw std::invalid_argument("fold_atom_place: no such atom place");
  if (bound < 0) throw std::invalid_argument("fold_atom_place: negative bound");

  const size_t slots = static_cast<size_t>(bound);
  FoldResult out;
  out.net.name = net.name;
  out.net.locations = net.locations;
  out.net.plain_places = net.plain_places;
  out.net.registers = net.registers;
  for (size_t i = 1; i <= slots; ++i)
    out.net.registers.push_back(std::string(1, kAuxSigil) + net.atom_places[p] +
                                std::to_string(i));
  for (size_t j = 0; j < net.atom_places.size(); ++j)
    if (static_cast<PlaceId>(j) != p) out.net.atom_places.push_back(net.atom_places[j]);

  auto strip = [p](const DataVector& v) {
    DataVector w;
    for (const auto& [place, count] : v.plain) w.add_plain(place, count);
    for (const auto& [key, count] : v.data)
      if (key.first != p)
        w.add_data(key.first > p ? key.first - 1 : key.first, key.second, count);
    return w;
  };

  for (const TransitionOrbit& t : net.transitions) {
    std::map<Atom, int64_t> delta;  // signed token traffic of the effect on p
    for (const auto& [key, count] : t.effect.data)
      if (key.first == p) delta[key.second] += count;
    const DataVector w = strip(t.effect);

    std::vector<Atom> own;
    t.collect_atoms(own);
    std::sort(own.begin(), own.end());
    own.erase(std::unique(own.begin(), own.end()), own.end());
    // Unrelated tokens can also sit in the new registers; up to renaming,
    // `slots` fresh atoms exhaust their sharing patterns.
    std::vector<Atom> pool = own;
    for (Atom f : fresh_atoms(own, slots)) pool.push_back(f);

    // Source contents mu run over all pool fillings; target contents must
    // realise mu plus the effect's traffic.
    std::vector<std::optional<Atom>> mu;
    all_fills(pool, slots, mu, [&](const std::vector<std::optional<Atom>>& src_fill) {
      std::map<Atom, int64_t> want = delta;
      for (const auto& r : src_fill)
        if (r) ++want[*r];
      std::vector<std::pair<Atom, int64_t>> target_tokens;
      for (const auto& [a, c] : want) {
        if (c < 0) return;  // the effect consumes tokens mu does not hold
        if (c > 0) target_tokens.push_back({a, c});
      }
      std::vector<std::optional<Atom>> nu;
      placements(target_tokens, slots, nu, [&](const std::vector<std::optional<Atom>>& tgt_fill) {
        TransitionOrbit nt;
        nt.source = t.source;
        nt.source.regs.insert(nt.source.regs.end(), src_fill.begin(), src_fill.end());
        nt.target = t.target;
        nt.target.regs.insert(nt.target.regs.end(), tgt_fill.begin(), tgt_fill.end());
        nt.effect = w;
        out.net.transitions.push_back(nt);
      });
    });
  }
  out.net.canonicalize_transitions();

  out.q = q;
  out.q.regs.resize(q.regs.size() + slots);
  out.qp = qp;
  out.qp.regs.resize(qp.regs.size() + slots);
  return out;
}

Verdict decide(const Dvass& net, const Configuration& src, const Configuration& tgt,
               const DecideConfig& cfg) {
  Verdict verdict;
  if (src == tgt) {
    verdict.decision = Decision::kBireachable;
    verdict.reason = "source equals target";
    return verdict;
  }

  Instance cur = normalize({net, src, tgt});
  const Rank initial = rank_of(cur.net);
  const size_t max_iters =
      (initial.atom_places + 1) * (initial.plain_places + 1) * (initial.orbits + 1);

  for (size_t iter = 0;; ++iter) {
    if (iter > max_iters) throw std::logic_error("decide: iteration bound exceeded");
    const Rank before = rank_of(cur.net);
    const State q = cur.source.state;
    const State qp = cur.target.state;

    ClosureTable closure = saturate(cur.net);
    if (!path_exists(closure, q, qp) || !path_exists(closure, qp, q)) {
      verdict.decision = Decision::kNotBireachable;
      verdict.reason = "the state graph separates the endpoints";
      return verdict;
    }
    if (cur.net.atom_places.empty() && cur.net.plain_places.empty()) {
      verdict.decision = Decision::kBireachable;
      verdict.reason = "base case: state-graph paths both ways";
      return verdict;
    }

    auto apply = [&](ReductionRecord rec, Instance next) {
      rec.before = before;
      rec.after = rank_of(next.net);
      if (!(rec.after < rec.before))
        throw std::logic_error("decide: a reduction failed to decrease the rank");
      if (cfg.observer) cfg.observer(rec, cur, next);
      verdict.trace.push_back(rec);
      cur = std::move(next);
    };

    Dvass restricted = restrict_to_scc(cur.net, q, qp);
    if (restricted.transitions.size() < cur.net.transitions.size()) {
      ReductionRecord rec;
      rec.kind = ReductionRecord::Kind::kSccRestrict;
      rec.item = "dropped " +
                 std::to_string(cur.net.transitions.size() - restricted.transitions.size()) +
                 " orbit(s) outside the endpoint component";
      apply(std::move(rec), Instance{std::move(restricted), cur.source, cur.target});
      continue;
    }

    Phi1Report phi1 = check_phi1(cur.net, q, qp, cfg.msum);
    std::optional<size_t> useless = phi1.first_useless();
    if (!useless && cfg.assume_complete) {
      for (size_t i = 0; i < phi1.orbits.size() && !useless; ++i)
        if (phi1.orbits[i].verdict == Usefulness::kUnknown) useless = i;
    }
    if (useless) {
      ReductionRecord rec;
      rec.kind = ReductionRecord::Kind::kRemoveOrbit;
      rec.item = "useless orbit #" + std::to_string(*useless);
      apply(std::move(rec), Instance{remove_orbit(cur.net, cur.net.transitions[*useless]),
                                     cur.source, cur.target});
      continue;
    }
    if (!phi1.all_useful()) {
      verdict.decision = Decision::kUnknown;
      verdict.reason = "usefulness budget exhausted without certification";
      return verdict;
    }

    Phi2Report phi2 = check_phi2(cur.net, q, qp, cfg.cover);
    if (!phi2.all_pumpable()) {
      if (phi2.complete() || cfg.assume_complete) {
        ReductionRecord rec;
        rec.bound = phi2.bound_b;
        // plain folds first: they only multiply locations, not register types
        if (auto h = phi2.first_unpumpable_plain()) {
          FoldResult f = fold_plain_place(cur.net, *h, phi2.bound_b, q, qp);
          rec.kind = ReductionRecord::Kind::kFoldPlain;
          rec.item = "plain place " + cur.net.plain_places[static_cast<size_t>(*h)];
          apply(std::move(rec),
                Instance{std::move(f.net), {std::move(f.q), {}}, {std::move(f.qp), {}}});
          continue;
        }
        const PlaceId p = *phi2.first_unpumpable_atom();
        FoldResult f = fold_atom_place(cur.net, p, phi2.bound_b, q, qp);
        rec.kind = ReductionRecord::Kind::kFoldAtom;
        rec.item = "atom place " + cur.net.atom_places[static_cast<size_t>(p)];
        apply(std::move(rec),
              Instance{std::move(f.net), {std::move(f.q), {}}, {std::move(f.qp), {}}});
        continue;
      }
      std::string diag = !phi2.fwd_q.complete    ? phi2.fwd_q.diagnostic
                         : !phi2.fwd_qp.complete ? phi2.fwd_qp.diagnostic
                         : !phi2.bwd_q.complete  ? phi2.bwd_q.diagnostic
                                                 : phi2.bwd_qp.diagnostic;
      verdict.decision = Decision::kUnknown;
      verdict.reason = "coverability analysis capped: " + diag;
      return verdict;
    }

    verdict.decision = Decision::kBireachable;
    verdict.reason = "all orbits useful and all places pumpable";
    return verdict;
  }
}

}  // namespace birch
