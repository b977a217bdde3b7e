#include "birch/json_io.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace birch {

namespace {

Json nat_omega_json(NatOmega n) {
  if (n.is_omega()) return Json("omega");
  return Json(n.v);
}

Json atom_json(const std::optional<Atom>& a) {
  if (!a) return Json(nullptr);
  return Json(a->id);
}

const char* usefulness_name(Usefulness u) {
  switch (u) {
    case Usefulness::kUseful:
      return "useful";
    case Usefulness::kUseless:
      return "useless";
    case Usefulness::kUnknown:
      return "unknown";
  }
  return "unknown";
}

const char* outcome_name(MsumOutcome::Kind k) {
  switch (k) {
    case MsumOutcome::Kind::kSat:
      return "sat";
    case MsumOutcome::Kind::kUnsatWithin:
      return "unsat_within";
    case MsumOutcome::Kind::kUnsatCertified:
      return "unsat_certified";
  }
  return "unsat_within";
}

const char* record_kind_name(ReductionRecord::Kind k) {
  switch (k) {
    case ReductionRecord::Kind::kSccRestrict:
      return "scc_restrict";
    case ReductionRecord::Kind::kRemoveOrbit:
      return "remove_orbit";
    case ReductionRecord::Kind::kFoldPlain:
      return "fold_plain";
    case ReductionRecord::Kind::kFoldAtom:
      return "fold_atom";
  }
  return "scc_restrict";
}

// Summary of one direction's outcome for condition reports: kinds and sizes,
// not the full witness vectors.
Json outcome_summary_json(const MsumOutcome& out) {
  Json j;
  j["result"] = outcome_name(out.kind);
  j["atom_budget"] = out.atom_budget;
  j["witness_size"] = out.witness.size();
  return j;
}

Json pumpability_json(const std::string& place, const PlacePumpability& f) {
  Json j;
  j["place"] = place;
  j["fwd_q"] = f.fwd_q;
  j["fwd_qp"] = f.fwd_qp;
  j["bwd_q"] = f.bwd_q;
  j["bwd_qp"] = f.bwd_qp;
  j["pumpable"] = f.pumpable();
  return j;
}

Json bare_state_json(const State& s) {
  Json j;
  j["location"] = s.location;
  Json regs = Json::array();
  for (const auto& r : s.regs) regs.push_back(atom_json(r));
  j["regs"] = std::move(regs);
  return j;
}

State bare_state_from_json(const Json& j) {
  State s;
  s.location = j.at("location").get<LocId>();
  for (const auto& r : j.at("regs")) {
    if (r.is_null())
      s.regs.push_back(std::nullopt);
    else
      s.regs.push_back(Atom{r.get<uint32_t>()});
  }
  return s;
}

Json doc(const char* kind) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = kind;
  return j;
}

}  // namespace

Json state_json(const Dvass& net, const State& s) {
  Json j;
  j["location"] = net.locations.at(s.location);
  Json regs;
  for (size_t r = 0; r < s.regs.size(); ++r) regs[net.registers.at(r)] = atom_json(s.regs[r]);
  j["regs"] = regs.is_null() ? Json::object() : std::move(regs);
  return j;
}

Json vector_json(const Dvass& net, const DataVector& v) {
  Json j;
  Json plain = Json::object();
  for (const auto& [h, n] : v.plain) plain[net.plain_places.at(h)] = n;
  j["plain"] = std::move(plain);
  Json data = Json::array();
  for (const auto& [key, n] : v.data) {
    Json e;
    e["place"] = net.atom_places.at(key.first);
    e["atom"] = key.second.id;
    e["count"] = n;
    data.push_back(std::move(e));
  }
  j["data"] = std::move(data);
  return j;
}

Json config_json(const Dvass& net, const Configuration& c) {
  Json j;
  j["state"] = state_json(net, c.state);
  j["marking"] = vector_json(net, c.marking);
  return j;
}

Json omega_config_json(const Dvass& net, const OmegaConfiguration& oc) {
  Json j;
  j["state"] = state_json(net, oc.state);
  Json plain = Json::object();
  for (const auto& [h, n] : oc.valuation.plain) plain[net.plain_places.at(h)] = nat_omega_json(n);
  j["plain"] = std::move(plain);
  Json atoms = Json::array();
  for (const auto& row : oc.valuation.atom) {
    Json e;
    e["place"] = net.atom_places.at(row.place);
    e["default"] = row.default_omega ? Json("omega") : Json(0);
    Json exc = Json::array();
    for (const auto& [a, n] : row.exceptions) {
      Json x;
      x["atom"] = a.id;
      x["value"] = nat_omega_json(n);
      exc.push_back(std::move(x));
    }
    e["exceptions"] = std::move(exc);
    atoms.push_back(std::move(e));
  }
  j["atom"] = std::move(atoms);
  return j;
}

Json net_json(const Dvass& net) {
  Json j = doc("dvass");
  j["name"] = net.name;
  j["locations"] = net.locations;
  j["registers"] = net.registers;
  j["plain"] = net.plain_places;
  j["atom"] = net.atom_places;
  Json trans = Json::array();
  for (const auto& t : net.transitions) {
    Json e;
    e["source"] = state_json(net, t.source);
    e["effect"] = vector_json(net, t.effect);
    e["target"] = state_json(net, t.target);
    trans.push_back(std::move(e));
  }
  j["transitions"] = std::move(trans);
  return j;
}

Json cover_json(const Dvass& net, const CoverResult& cover) {
  Json j = doc("cover");
  j["complete"] = cover.complete;
  j["diagnostic"] = cover.diagnostic;
  Json ideals = Json::array();
  for (const auto& oc : cover.ideals) ideals.push_back(omega_config_json(net, oc));
  j["ideals"] = std::move(ideals);
  return j;
}

Json closure_json(const Dvass& net, const ClosureTable& table) {
  Json j = doc("closure");
  j["locations"] = table.num_locations;
  j["registers"] = table.num_registers;
  Json orbits = Json::array();
  for (size_t i = 0; i < table.orbits.size(); ++i) {
    Json e;
    e["source"] = state_json(net, table.orbits[i].source);
    e["target"] = state_json(net, table.orbits[i].target);
    e["witness"] = table.witness[i];
    orbits.push_back(std::move(e));
  }
  j["orbits"] = std::move(orbits);
  return j;
}

Json run_json(const Dvass& net, const PseudoRun& run) {
  Json j = doc("run");
  Json steps = Json::array();
  for (const auto& c : run) steps.push_back(config_json(net, c));
  j["steps"] = std::move(steps);
  return j;
}

Json phi1_json(const Dvass& net, const Phi1Report& rep) {
  Json j = doc("phi1");
  j["all_useful"] = rep.all_useful();
  Json orbits = Json::array();
  for (size_t i = 0; i < rep.orbits.size(); ++i) {
    const OrbitUsefulness& o = rep.orbits[i];
    Json e;
    e["orbit"] = i;
    e["source"] = state_json(net, net.transitions.at(i).source);
    e["effect"] = vector_json(net, net.transitions.at(i).effect);
    e["target"] = state_json(net, net.transitions.at(i).target);
    e["verdict"] = usefulness_name(o.verdict);
    e["toward"] = outcome_summary_json(o.toward);
    e["back"] = outcome_summary_json(o.back);
    orbits.push_back(std::move(e));
  }
  j["orbits"] = std::move(orbits);
  return j;
}

Json phi2_json(const Dvass& net, const Phi2Report& rep) {
  Json j = doc("phi2");
  j["complete"] = rep.complete();
  j["all_pumpable"] = rep.all_pumpable();
  j["bound_b"] = rep.bound_b;
  Json plain = Json::array();
  for (size_t h = 0; h < rep.plain.size(); ++h)
    plain.push_back(pumpability_json(net.plain_places.at(h), rep.plain[h]));
  j["plain"] = std::move(plain);
  Json atoms = Json::array();
  for (size_t p = 0; p < rep.atoms.size(); ++p)
    atoms.push_back(pumpability_json(net.atom_places.at(p), rep.atoms[p]));
  j["atoms"] = std::move(atoms);
  Json covers;
  covers["fwd_q"] = cover_json(net, rep.fwd_q);
  covers["fwd_qp"] = cover_json(net, rep.fwd_qp);
  covers["bwd_q"] = cover_json(net, rep.bwd_q);
  covers["bwd_qp"] = cover_json(net, rep.bwd_qp);
  j["covers"] = std::move(covers);
  return j;
}

Json oracle_json(const Dvass& net, const BireachAnswer& answer) {
  Json j = doc("oracle");
  auto one = [&](const OracleAnswer& a) {
    Json e;
    e["found"] = a.found;
    e["frontier_empty"] = a.frontier_empty;
    e["run"] = run_json(net, a.run)["steps"];
    return e;
  };
  j["forward"] = one(answer.forward);
  j["backward"] = one(answer.backward);
  switch (bireach_verdict(answer)) {
    case OracleVerdict::kYes:
      j["verdict"] = "yes";
      break;
    case OracleVerdict::kNo:
      j["verdict"] = "no";
      break;
    case OracleVerdict::kUnknown:
      j["verdict"] = "unknown";
      break;
  }
  return j;
}

Json rank_json(const Rank& r) {
  Json j;
  j["atom_places"] = r.atom_places;
  j["plain_places"] = r.plain_places;
  j["orbits"] = r.orbits;
  return j;
}

std::string decision_name(Decision d) {
  switch (d) {
    case Decision::kBireachable:
      return "BIREACHABLE";
    case Decision::kNotBireachable:
      return "NOT_BIREACHABLE";
    case Decision::kUnknown:
      return "UNKNOWN";
  }
  return "UNKNOWN";
}

Json verdict_json(const Verdict& v) {
  Json j = doc("verdict");
  j["decision"] = decision_name(v.decision);
  j["reason"] = v.reason;
  Json trace = Json::array();
  for (const auto& r : v.trace) {
    Json e;
    e["step"] = record_kind_name(r.kind);
    e["item"] = r.item;
    e["bound"] = r.bound;
    e["before"] = rank_json(r.before);
    e["after"] = rank_json(r.after);
    trace.push_back(std::move(e));
  }
  j["trace"] = std::move(trace);
  return j;
}

Json yvector_json(const YVector& y) {
  Json j;
  Json plain = Json::array();
  for (const auto& [h, n] : y.vec.plain) plain.push_back(Json::array({h, n}));
  j["plain"] = std::move(plain);
  Json data = Json::array();
  for (const auto& [key, n] : y.vec.data)
    data.push_back(Json::array({key.first, key.second.id, n}));
  j["data"] = std::move(data);
  Json states = Json::array();
  for (const auto& [s, n] : y.states) states.push_back(Json::array({bare_state_json(s), n}));
  j["states"] = std::move(states);
  j["star"] = y.star;
  return j;
}

namespace {

YVector yvector_from_json(const Json& j) {
  YVector y;
  for (const auto& e : j.at("plain")) y.vec.add_plain(e.at(0).get<PlaceId>(), e.at(1).get<int64_t>());
  for (const auto& e : j.at("data"))
    y.vec.add_data(e.at(0).get<PlaceId>(), Atom{e.at(1).get<uint32_t>()}, e.at(2).get<int64_t>());
  for (const auto& e : j.at("states"))
    y.add_state(bare_state_from_json(e.at(0)), e.at(1).get<int64_t>());
  y.star = j.at("star").get<int64_t>();
  return y;
}

}  // namespace

Json msum_instance_json(const MsumInstance& inst) {
  Json j = doc("msum-instance");
  Json gens = Json::array();
  for (const auto& g : inst.generators) gens.push_back(yvector_json(g));
  j["generators"] = std::move(gens);
  j["target"] = yvector_json(inst.target);
  return j;
}

Json msum_outcome_json(const MsumOutcome& out) {
  Json j = doc("msum-outcome");
  j["result"] = outcome_name(out.kind);
  j["atom_budget"] = out.atom_budget;
  Json wit = Json::array();
  for (const auto& y : out.witness) wit.push_back(yvector_json(y));
  j["witness"] = std::move(wit);
  return j;
}

MsumInstance msum_instance_from_json(const Json& j) {
  try {
    if (j.at("kind").get<std::string>() != "msum-instance")
      throw std::invalid_argument("msum instance: kind is not msum-instance");
    MsumInstance inst;
    for (const auto& g : j.at("generators"))
      inst.generators.push_back(canonicalize_yvector(yvector_from_json(g)));
    inst.target = yvector_from_json(j.at("target"));
    return inst;
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("msum instance: ") + e.what());
  }
}

Json manifest_json(const RunManifest& m) {
  Json j = doc("manifest");
  j["tool"] = m.tool;
  j["input_digest"] = m.input_digest;
  j["config"] = m.config;
  j["verdict"] = m.verdict;
  j["trace"] = m.trace;
  j["wall_ms"] = m.wall_ms;
  return j;
}

std::string fnv1a_hex(std::string_view bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string("fnv1a:") + buf;
}

}  // namespace birch
