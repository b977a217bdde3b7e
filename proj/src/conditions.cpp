#include "birch/conditions.hpp"

#include <algorithm>
#include <stdexcept>

namespace birch {

bool Phi1Report::all_useful() const {
  return std::all_of(orbits.begin(), orbits.end(), [](const OrbitUsefulness& o) {
    return o.verdict == Usefulness::kUseful;
  });
}

bool Phi1Report::any_unknown() const {
  return std::any_of(orbits.begin(), orbits.end(), [](const OrbitUsefulness& o) {
    return o.verdict == Usefulness::kUnknown;
  });
}

std::optional<size_t> Phi1Report::first_useless() const {
  for (size_t i = 0; i < orbits.size(); ++i)
    if (orbits[i].verdict == Usefulness::kUseless) return i;
  return std::nullopt;
}

namespace {

void require_empty_endpoints(const Dvass& net, const State& q, const State& qp) {
  if (q.location >= net.locations.size() || qp.location >= net.locations.size() ||
      q.regs.size() != net.registers.size() || qp.regs.size() != net.registers.size())
    throw std::invalid_argument("endpoint state does not fit the net");
  if (!q.all_empty() || !qp.all_empty())
    throw std::invalid_argument("endpoint states must be all-EMPTY");
}

}  // namespace

Phi1Report check_phi1(const Dvass& net, const State& q, const State& qp,
                      const MsumConfig& cfg) {
  require_empty_endpoints(net, q, qp);
  Phi1Report report;
  report.orbits.resize(net.transitions.size());
  for (size_t i = 0; i < net.transitions.size(); ++i) {
    auto [toward, back] = build_usefulness_instances(net, q, qp, i);
    OrbitUsefulness& o = report.orbits[i];
    o.toward = solve_msum(toward, cfg);
    o.back = solve_msum(back, cfg);
    const auto sat = MsumOutcome::Kind::kSat;
    const auto certified = MsumOutcome::Kind::kUnsatCertified;
    if (o.toward.kind == sat && o.back.kind == sat)
      o.verdict = Usefulness::kUseful;
    else if (o.toward.kind == certified || o.back.kind == certified)
      o.verdict = Usefulness::kUseless;
    else
      o.verdict = Usefulness::kUnknown;
  }
  return report;
}

bool Phi2Report::complete() const {
  return fwd_q.complete && fwd_qp.complete && bwd_q.complete && bwd_qp.complete;
}

bool Phi2Report::all_pumpable() const {
  auto ok = [](const std::vector<PlacePumpability>& places) {
    return std::all_of(places.begin(), places.end(),
                       [](const PlacePumpability& p) { return p.pumpable(); });
  };
  return ok(plain) && ok(atoms);
}

std::optional<PlaceId> Phi2Report::first_unpumpable_plain() const {
  for (size_t h = 0; h < plain.size(); ++h)
    if (!plain[h].pumpable()) return (PlaceId)h;
  return std::nullopt;
}

std::optional<PlaceId> Phi2Report::first_unpumpable_atom() const {
  for (size_t p = 0; p < atoms.size(); ++p)
    if (!atoms[p].pumpable()) return (PlaceId)p;
  return std::nullopt;
}

NatOmega ideal_measure(const OmegaValuation& val, bool atom_place, PlaceId place) {
  return atom_place ? val.place_size(place) : val.at_plain(place);
}

Phi2Report check_phi2(const Dvass& net, const State& q, const State& qp,
                      const CoverCaps& caps) {
  require_empty_endpoints(net, q, qp);
  Phi2Report report;
  report.plain.resize(net.plain_places.size());
  report.atoms.resize(net.atom_places.size());

  const Dvass rev = reverse(net);
  report.fwd_q = compute_cover(net, {q, {}}, caps);
  report.fwd_qp = compute_cover(net, {qp, {}}, caps);
  report.bwd_q = compute_cover(rev, {q, {}}, caps);
  report.bwd_qp = compute_cover(rev, {qp, {}}, caps);

  // A place is pumpable in one direction from one endpoint when that
  // analysis has an ideal at the endpoint state with positive measure.
  auto mark = [&report](const CoverResult& cover, const State& at,
                        bool PlacePumpability::*field) {
    for (const OmegaConfiguration& ideal : cover.ideals) {
      if (ideal.state != at) continue;
      for (size_t h = 0; h < report.plain.size(); ++h)
        if (ideal.valuation.at_plain((PlaceId)h).v > 0)
          report.plain[h].*field = true;
      for (size_t p = 0; p < report.atoms.size(); ++p)
        if (ideal.valuation.place_size((PlaceId)p).v > 0)
          report.atoms[p].*field = true;
    }
  };
  mark(report.fwd_q, q, &PlacePumpability::fwd_q);
  mark(report.fwd_qp, qp, &PlacePumpability::fwd_qp);
  mark(report.bwd_q, q, &PlacePumpability::bwd_q);
  mark(report.bwd_qp, qp, &PlacePumpability::bwd_qp);

  // Every place failing an analysis contributes the finite measures it takes
  // across all ideals of that analysis; the bound is their maximum.
  int64_t bound = 0;
  auto contribute = [&](const CoverResult& cover, bool PlacePumpability::*field) {
    for (const OmegaConfiguration& ideal : cover.ideals) {
      for (size_t h = 0; h < report.plain.size(); ++h) {
        if (report.plain[h].*field) continue;
        const NatOmega m = ideal.valuation.at_plain((PlaceId)h);
        if (!m.is_omega()) bound = std::max(bound, m.v);
      }
      for (size_t p = 0; p < report.atoms.size(); ++p) {
        if (report.atoms[p].*field) continue;
        const NatOmega m = ideal.valuation.place_size((PlaceId)p);
        if (!m.is_omega()) bound = std::max(bound, m.v);
      }
    }
  };
  contribute(report.fwd_q, &PlacePumpability::fwd_q);
  contribute(report.fwd_qp, &PlacePumpability::fwd_qp);
  contribute(report.bwd_q, &PlacePumpability::bwd_q);
  contribute(report.bwd_qp, &PlacePumpability::bwd_qp);
  report.bound_b = bound;

  return report;
}

}  // namespace birch
