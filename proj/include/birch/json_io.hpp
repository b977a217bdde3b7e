#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "birch/conditions.hpp"
#include "birch/cover.hpp"
#include "birch/decide.hpp"
#include "birch/msum.hpp"
#include "birch/net.hpp"
#include "birch/oracle.hpp"
#include "birch/state_graph.hpp"

namespace birch {

// Insertion-ordered documents: every emitter writes keys in a fixed order, so
// equal values serialize to equal bytes and outputs can be golden-filed.
using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "birch/1";
inline constexpr const char* kToolVersion = "birch 0.1.0";

// Net-attached emitters resolve ids to declared names; atoms stay numeric.
Json state_json(const Dvass& net, const State& s);
Json vector_json(const Dvass& net, const DataVector& v);
Json config_json(const Dvass& net, const Configuration& c);
Json omega_config_json(const Dvass& net, const OmegaConfiguration& oc);
Json net_json(const Dvass& net);
Json cover_json(const Dvass& net, const CoverResult& cover);
Json closure_json(const Dvass& net, const ClosureTable& table);
Json run_json(const Dvass& net, const PseudoRun& run);
Json phi1_json(const Dvass& net, const Phi1Report& rep);
Json phi2_json(const Dvass& net, const Phi2Report& rep);
Json oracle_json(const Dvass& net, const BireachAnswer& answer);

Json rank_json(const Rank& r);
Json verdict_json(const Verdict& v);
std::string decision_name(Decision d);

// Multiset Sum documents are net-independent; states and places are numeric.
// The instance reader accepts exactly what the writer emits and throws
// std::invalid_argument on malformed documents.
Json yvector_json(const YVector& y);
Json msum_instance_json(const MsumInstance& inst);
Json msum_outcome_json(const MsumOutcome& out);
MsumInstance msum_instance_from_json(const Json& j);

// Reproducibility record of one CLI invocation. Wall time is informative;
// the reproducibility contract covers verdict and trace only.
struct RunManifest {
  std::string tool = kToolVersion;
  std::string input_digest;
  Json config;
  std::string verdict;
  Json trace;
  double wall_ms = 0;
};
Json manifest_json(const RunManifest& m);

// FNV-1a of the raw input bytes, as "fnv1a:<16 hex digits>".
std::string fnv1a_hex(std::string_view bytes);

}  // namespace birch
