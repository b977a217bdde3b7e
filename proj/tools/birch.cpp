#include <chrono>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "birch/conditions.hpp"
#include "birch/corpus.hpp"
#include "birch/cover.hpp"
#include "birch/decide.hpp"
#include "birch/json_io.hpp"
#include "birch/msum.hpp"
#include "birch/net.hpp"
#include "birch/oracle.hpp"
#include "birch/parser.hpp"
#include "birch/state_graph.hpp"

namespace {

using namespace birch;

constexpr int kExitError = 3;  // IO / input errors; usage errors exit higher

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << bytes;
}

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

// Replaces the configuration lines of a DSL text: every line whose head is in
// `heads` is dropped, and `head: payload` is appended. The DSL is
// line-oriented, so this is a faithful override.
std::string override_config_line(const std::string& text, const std::vector<std::string>& heads,
                                 const std::string& head, const std::string& payload) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    ls >> first;
    bool drop = false;
    for (const auto& h : heads)
      if (first == h + ":") drop = true;
    if (!drop) out << line << "\n";
  }
  out << head << ": " << payload << "\n";
  return out.str();
}

struct NetOptions {
  std::string net_file;
  std::string src;
  std::string tgt;
};

struct LoadedInput {
  std::string raw;  // bytes as read, the digest input
  ParsedInput in;
};

LoadedInput load_input(const NetOptions& no) {
  LoadedInput li;
  li.raw = read_text_file(no.net_file);
  std::string text = li.raw;
  if (!no.src.empty())
    text = override_config_line(text, {"source", "marking"}, "source", no.src);
  if (!no.tgt.empty()) text = override_config_line(text, {"target"}, "target", no.tgt);
  li.in = parse_input(text);
  for (const auto& w : li.in.warnings) std::cerr << no.net_file << ": " << w << "\n";
  return li;
}

void require_endpoints(const ParsedInput& in) {
  if (!in.has_source || !in.has_target)
    throw std::runtime_error(
        "the instance needs a source and a target (file lines or --src/--tgt)");
}

struct DecideFlags {
  int64_t msum_budget = -1;
  int64_t msum_nodes = 200000;
  int64_t cover_cap = 50000;
  int64_t cover_depth = 10000;
  bool assume_complete = false;
};

DecideConfig decide_config(const DecideFlags& f) {
  DecideConfig cfg;
  cfg.msum.max_budget = (int)f.msum_budget;
  cfg.msum.node_cap = (size_t)f.msum_nodes;
  cfg.cover.max_nodes = (size_t)f.cover_cap;
  cfg.cover.max_depth = (size_t)f.cover_depth;
  cfg.assume_complete = f.assume_complete;
  return cfg;
}

Json decide_config_json(const DecideFlags& f) {
  Json j;
  j["msum_budget"] = f.msum_budget;
  j["msum_nodes"] = f.msum_nodes;
  j["cover_cap"] = f.cover_cap;
  j["cover_depth"] = f.cover_depth;
  j["assume_complete"] = f.assume_complete;
  return j;
}

void add_decide_flags(CLI::App* cmd, DecideFlags& f) {
  cmd->add_option("--msum-budget", f.msum_budget,
                  "atom budget of the multiset-sum solver (-1 = per-instance default)")
      ->envname("BIRCH_MSUM_BUDGET");
  cmd->add_option("--msum-nodes", f.msum_nodes, "node cap of the feasibility search");
  cmd->add_option("--cover-cap", f.cover_cap, "node cap of the coverability tree")
      ->envname("BIRCH_COVER_CAP");
  cmd->add_option("--cover-depth", f.cover_depth, "depth cap of the coverability tree");
  cmd->add_flag("--assume-complete", f.assume_complete,
                "trust budget-qualified refutations and capped covers");
}

int exit_code(Decision d) {
  switch (d) {
    case Decision::kBireachable:
      return 0;
    case Decision::kNotBireachable:
      return 1;
    case Decision::kUnknown:
      return 2;
  }
  return 2;
}

// ---- decide ---------------------------------------------------------------

int run_decide(const NetOptions& no, const DecideFlags& flags, bool json,
               const std::string& trace_file, const std::string& manifest_file) {
  LoadedInput li = load_input(no);
  require_endpoints(li.in);
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v = decide(li.in.instance.net, li.in.instance.source, li.in.instance.target,
                     decide_config(flags));
  const double wall = ms_since(t0);

  if (json) {
    emit(verdict_json(v));
  } else {
    std::cout << decision_name(v.decision) << " — " << v.reason << "\n";
    for (size_t i = 0; i < v.trace.size(); ++i) {
      const ReductionRecord& r = v.trace[i];
      std::printf("  %2zu. %-13s %s", i + 1, verdict_json(v)["trace"][i]["step"]
                                                 .get<std::string>()
                                                 .c_str(),
                  r.item.c_str());
      if (r.bound > 0) std::printf(" (bound %lld)", (long long)r.bound);
      std::printf("  rank (%zu,%zu,%zu) -> (%zu,%zu,%zu)\n", r.before.atom_places,
                  r.before.plain_places, r.before.orbits, r.after.atom_places,
                  r.after.plain_places, r.after.orbits);
    }
  }
  if (!trace_file.empty()) write_file(trace_file, verdict_json(v).dump(2) + "\n");
  if (!manifest_file.empty()) {
    RunManifest m;
    m.input_digest = fnv1a_hex(li.raw);
    m.config = decide_config_json(flags);
    m.verdict = decision_name(v.decision);
    m.trace = verdict_json(v)["trace"];
    m.wall_ms = wall;
    write_file(manifest_file, manifest_json(m).dump(2) + "\n");
  }
  return exit_code(v.decision);
}

// ---- compile / normalize --------------------------------------------------

int run_compile(const NetOptions& no, bool json) {
  LoadedInput li = load_input(no);
  if (json) {
    Json j = net_json(li.in.instance.net);
    if (li.in.has_source) j["source"] = config_json(li.in.instance.net, li.in.instance.source);
    if (li.in.has_target) j["target"] = config_json(li.in.instance.net, li.in.instance.target);
    emit(j);
  } else {
    std::cout << render_instance(li.in.instance, li.in.has_source, li.in.has_target);
  }
  return 0;
}

int run_normalize(const NetOptions& no, bool json) {
  LoadedInput li = load_input(no);
  require_endpoints(li.in);
  Instance norm = normalize(li.in.instance);
  if (json) {
    Json j = net_json(norm.net);
    j["source"] = config_json(norm.net, norm.source);
    j["target"] = config_json(norm.net, norm.target);
    emit(j);
  } else {
    std::cout << render_instance(norm);
  }
  return 0;
}

// ---- saturate -------------------------------------------------------------

int run_saturate(const NetOptions& no, bool json) {
  LoadedInput li = load_input(no);
  const Dvass& net = li.in.instance.net;
  ClosureTable closure = saturate(net);
  if (json) {
    emit(closure_json(net, closure));
    return 0;
  }
  std::cout << closure.orbits.size() << " path orbit(s), pool bound " << path_bound(closure)
            << "\n";
  for (size_t i = 0; i < closure.orbits.size(); ++i) {
    Json s = state_json(net, closure.orbits[i].source);
    Json t = state_json(net, closure.orbits[i].target);
    std::cout << "  " << s.dump() << " -> " << t.dump() << "  witness " << closure.witness[i]
              << "\n";
  }
  return 0;
}

// ---- cover ----------------------------------------------------------------

int run_cover(const NetOptions& no, const std::string& from, const DecideFlags& flags,
              bool json) {
  NetOptions with_from = no;
  if (!from.empty()) with_from.src = from;
  LoadedInput li = load_input(with_from);
  if (!li.in.has_source)
    throw std::runtime_error("cover needs a start configuration (source line or --from)");
  const Dvass& net = li.in.instance.net;
  CoverCaps caps{(size_t)flags.cover_cap, (size_t)flags.cover_depth};
  CoverResult cover = compute_cover(net, li.in.instance.source, caps);
  if (json) {
    emit(cover_json(net, cover));
    return 0;
  }
  std::cout << cover.ideals.size() << " ideal(s), "
            << (cover.complete ? "complete" : "incomplete: " + cover.diagnostic) << "\n";
  for (const auto& oc : cover.ideals) std::cout << "  " << omega_config_json(net, oc).dump()
                                                << "\n";
  return 0;
}

// ---- conditions -----------------------------------------------------------

int run_conditions(const NetOptions& no, const DecideFlags& flags, bool json) {
  LoadedInput li = load_input(no);
  require_endpoints(li.in);
  Instance norm = normalize(li.in.instance);
  Dvass net = restrict_to_scc(norm.net, norm.source.state, norm.target.state);
  DecideConfig cfg = decide_config(flags);
  Phi1Report phi1 = check_phi1(net, norm.source.state, norm.target.state, cfg.msum);
  Phi2Report phi2 = check_phi2(net, norm.source.state, norm.target.state, cfg.cover);
  if (json) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "conditions";
    j["net"] = net_json(net);
    j["phi1"] = phi1_json(net, phi1);
    j["phi2"] = phi2_json(net, phi2);
    emit(j);
    return 0;
  }
  std::cout << "analyzed net (normalized, endpoint component): " << net.transitions.size()
            << " orbit(s)\n";
  Json p1 = phi1_json(net, phi1);
  for (const auto& o : p1["orbits"])
    std::cout << "  orbit " << o["orbit"] << " " << o["verdict"].get<std::string>()
              << " (toward " << o["toward"]["result"].get<std::string>() << ", back "
              << o["back"]["result"].get<std::string>() << ")\n";
  std::cout << (phi1.all_useful() ? "phi1: all orbits useful" : "phi1: not all orbits useful")
            << "\n";
  Json p2 = phi2_json(net, phi2);
  for (const auto& f : p2["plain"])
    std::cout << "  plain " << f["place"].get<std::string>() << " "
              << (f["pumpable"].get<bool>() ? "pumpable" : "unpumpable") << "\n";
  for (const auto& f : p2["atoms"])
    std::cout << "  atom  " << f["place"].get<std::string>() << " "
              << (f["pumpable"].get<bool>() ? "pumpable" : "unpumpable") << "\n";
  std::cout << "phi2: " << (phi2.all_pumpable() ? "all places pumpable" : "unpumpable places")
            << ", bound " << phi2.bound_b << (phi2.complete() ? "" : " (covers capped)")
            << "\n";
  return 0;
}

// ---- msum -----------------------------------------------------------------

int run_msum(const std::string& instance_file, int64_t budget, int64_t nodes, bool certified,
             bool json) {
  const std::string raw = read_text_file(instance_file);
  MsumInstance inst = msum_instance_from_json(Json::parse(raw));
  MsumConfig cfg;
  cfg.max_budget = (int)budget;
  cfg.node_cap = (size_t)nodes;
  cfg.certified = certified;
  MsumOutcome out = solve_msum(inst, cfg);
  if (json) {
    emit(msum_outcome_json(out));
    return 0;
  }
  Json j = msum_outcome_json(out);
  std::cout << j["result"].get<std::string>() << " (atom budget " << out.atom_budget << ")\n";
  if (!out.witness.empty()) {
    std::cout << out.witness.size() << " generator use(s):\n";
    for (const auto& y : out.witness) std::cout << "  " << yvector_json(y).dump() << "\n";
  }
  return 0;
}

// ---- oracle ---------------------------------------------------------------

int run_oracle(const NetOptions& no, const OracleBudget& budget, bool json) {
  LoadedInput li = load_input(no);
  require_endpoints(li.in);
  const Dvass& net = li.in.instance.net;
  BireachAnswer ans =
      oracle_bireach(net, li.in.instance.source, li.in.instance.target, budget);
  if (json) {
    emit(oracle_json(net, ans));
  } else {
    Json j = oracle_json(net, ans);
    std::cout << j["verdict"].get<std::string>() << " (forward "
              << (ans.forward.found ? "found, " + std::to_string(ans.forward.run.size() - 1) +
                                          " step(s)"
                                    : "not found")
              << "; backward "
              << (ans.backward.found ? "found, " + std::to_string(ans.backward.run.size() - 1) +
                                           " step(s)"
                                     : "not found")
              << ")\n";
  }
  switch (bireach_verdict(ans)) {
    case OracleVerdict::kYes:
      return 0;
    case OracleVerdict::kNo:
      return 1;
    case OracleVerdict::kUnknown:
      return 2;
  }
  return 2;
}

// ---- corpus ---------------------------------------------------------------

struct CorpusOutcome {
  std::string decide_verdict;
  std::string oracle_verdict;  // "yes"/"no"/"unknown"/"skipped"
  std::string problem;         // empty when the entry agrees
  double ms = 0;
};

CorpusOutcome run_corpus_entry(const CorpusEntry& e, const DecideFlags& base) {
  CorpusOutcome out;
  const auto t0 = std::chrono::steady_clock::now();
  ParsedInput in = parse_input(e.text);
  if (!in.has_source || !in.has_target) {
    out.problem = "missing source/target";
    return out;
  }
  DecideConfig cfg = decide_config(base);
  if (std::string err = apply_corpus_args(e.args, cfg); !err.empty()) {
    out.problem = err;
    return out;
  }
  Verdict v = decide(in.instance.net, in.instance.source, in.instance.target, cfg);
  out.decide_verdict = decision_name(v.decision);

  OracleVerdict ov = OracleVerdict::kUnknown;
  if (e.oracle_skip) {
    out.oracle_verdict = "skipped";
  } else {
    BireachAnswer ans = oracle_bireach(in.instance.net, in.instance.source,
                                       in.instance.target, e.oracle_budget);
    ov = bireach_verdict(ans);
    out.oracle_verdict = ov == OracleVerdict::kYes  ? "yes"
                         : ov == OracleVerdict::kNo ? "no"
                                                    : "unknown";
  }
  out.ms = ms_since(t0);

  // A decide/oracle contradiction is always fatal; an expectation mismatch is
  // fatal unless decide merely ran out of budget (UNKNOWN).
  if (v.decision == Decision::kBireachable && ov == OracleVerdict::kNo)
    out.problem = "decide says BIREACHABLE but the oracle refutes it";
  else if (v.decision == Decision::kNotBireachable && ov == OracleVerdict::kYes)
    out.problem = "decide says NOT_BIREACHABLE but the oracle finds both runs";
  else if (!e.expect.empty()) {
    const std::string got = v.decision == Decision::kBireachable      ? "bireachable"
                            : v.decision == Decision::kNotBireachable ? "not-bireachable"
                                                                      : "unknown";
    if (got != e.expect && got != "unknown")
      out.problem = "expected " + e.expect + ", decided " + got;
    else if (e.expect != "unknown" && ov != OracleVerdict::kUnknown && !e.oracle_skip) {
      const std::string want = e.expect == "bireachable" ? "yes" : "no";
      if (out.oracle_verdict != want)
        out.problem = "expected " + e.expect + ", oracle says " + out.oracle_verdict;
    }
  }
  return out;
}

int run_corpus(const std::string& dir, const DecideFlags& base, int64_t jobs, bool json) {
  std::vector<CorpusEntry> entries = load_corpus_dir(dir);
  std::vector<CorpusOutcome> outcomes(entries.size());

  const size_t nthreads =
      std::max<size_t>(1, jobs > 0 ? (size_t)jobs : std::thread::hardware_concurrency());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < entries.size(); i = next.fetch_add(1)) {
      try {
        outcomes[i] = run_corpus_entry(entries[i], base);
      } catch (const std::exception& ex) {
        outcomes[i].problem = ex.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  size_t agree = 0, unknown = 0, disagree = 0;
  Json rows = Json::array();
  for (size_t i = 0; i < entries.size(); ++i) {
    const CorpusEntry& e = entries[i];
    const CorpusOutcome& o = outcomes[i];
    if (!o.problem.empty())
      ++disagree;
    else if (o.decide_verdict == "UNKNOWN")
      ++unknown;
    else
      ++agree;
    if (json) {
      Json r;
      r["file"] = e.name;
      r["expect"] = e.expect;
      r["decide"] = o.decide_verdict;
      r["oracle"] = o.oracle_verdict;
      r["problem"] = o.problem;
      rows.push_back(std::move(r));
    } else {
      std::printf("%-28s expect %-16s decide %-16s oracle %-8s %8.1f ms%s%s\n", e.name.c_str(),
                  e.expect.empty() ? "-" : e.expect.c_str(),
                  o.decide_verdict.empty() ? "-" : o.decide_verdict.c_str(),
                  o.oracle_verdict.empty() ? "-" : o.oracle_verdict.c_str(), o.ms,
                  o.problem.empty() ? "" : "  !! ", o.problem.c_str());
    }
  }
  if (json) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "corpus";
    j["entries"] = std::move(rows);
    j["agree"] = agree;
    j["unknown"] = unknown;
    j["disagree"] = disagree;
    emit(j);
  } else {
    std::printf("%zu entr%s: %zu agree, %zu unknown, %zu disagree\n", entries.size(),
                entries.size() == 1 ? "y" : "ies", agree, unknown, disagree);
  }
  return disagree == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bi-reachability of Petri nets with equality data, via data VASS reduction"};
  app.require_subcommand(1);
  bool json = false;
  app.add_flag("--json", json, "machine-readable JSON output");

  NetOptions no;
  DecideFlags flags;
  std::string trace_file, manifest_file, from, instance_file, dir;
  int64_t msum_budget = -1, msum_nodes = 200000, jobs = 0;
  bool certified = false;
  OracleBudget oracle_budget;

  auto add_net = [&](CLI::App* cmd, bool with_endpoints) {
    cmd->add_option("--net", no.net_file, "instance file (.dvass or .petri)")
        ->required()
        ->check(CLI::ExistingFile);
    if (with_endpoints) {
      cmd->add_option("--src", no.src, "override the source line (DSL payload)");
      cmd->add_option("--tgt", no.tgt, "override the target line (DSL payload)");
    }
  };

  CLI::App* cmd_decide = app.add_subcommand("decide", "decide bi-reachability");
  add_net(cmd_decide, true);
  add_decide_flags(cmd_decide, flags);
  cmd_decide->add_option("--trace", trace_file, "write the verdict + trace JSON to a file");
  cmd_decide->add_option("--manifest", manifest_file, "write a reproducibility manifest");

  CLI::App* cmd_compile = app.add_subcommand("compile", "compile to canonical DVASS DSL");
  add_net(cmd_compile, true);

  CLI::App* cmd_normalize =
      app.add_subcommand("normalize", "rewrite so both endpoints are zero configurations");
  add_net(cmd_normalize, true);

  CLI::App* cmd_saturate = app.add_subcommand("saturate", "state-graph closure table");
  add_net(cmd_saturate, false);

  CLI::App* cmd_cover = app.add_subcommand("cover", "coverability set as simple ideals");
  add_net(cmd_cover, false);
  cmd_cover->add_option("--from", from, "start configuration (DSL payload)");
  cmd_cover->add_option("--cover-cap", flags.cover_cap, "node cap of the coverability tree")
      ->envname("BIRCH_COVER_CAP");
  cmd_cover->add_option("--cover-depth", flags.cover_depth, "depth cap");

  CLI::App* cmd_conditions =
      app.add_subcommand("conditions", "orbit usefulness and place pumpability reports");
  add_net(cmd_conditions, true);
  add_decide_flags(cmd_conditions, flags);

  CLI::App* cmd_msum = app.add_subcommand("msum", "solve a multiset-sum instance");
  cmd_msum->add_option("--instance", instance_file, "instance JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_msum->add_option("--budget", msum_budget, "atom budget (-1 = per-instance default)")
      ->envname("BIRCH_MSUM_BUDGET");
  cmd_msum->add_option("--nodes", msum_nodes, "node cap of the feasibility search");
  cmd_msum->add_flag("--certified", certified, "assert the budget is complete");

  CLI::App* cmd_oracle = app.add_subcommand("oracle", "bounded brute-force ground truth");
  add_net(cmd_oracle, true);
  cmd_oracle->add_option("--max-tokens", oracle_budget.max_tokens_per_place,
                         "per-place token cap");
  cmd_oracle->add_option("--max-atoms", oracle_budget.max_total_atoms, "distinct-atom cap");
  cmd_oracle->add_option("--max-depth", oracle_budget.max_depth, "run length cap");
  cmd_oracle->add_option("--max-states", oracle_budget.max_states, "canonical state cap");

  CLI::App* cmd_corpus = app.add_subcommand("corpus", "run an annotated instance directory");
  cmd_corpus->add_option("--dir", dir, "corpus directory")->required();
  add_decide_flags(cmd_corpus, flags);
  cmd_corpus->add_option("--jobs", jobs, "worker threads (0 = hardware)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_decide->parsed())
      return run_decide(no, flags, json, trace_file, manifest_file);
    if (cmd_compile->parsed()) return run_compile(no, json);
    if (cmd_normalize->parsed()) return run_normalize(no, json);
    if (cmd_saturate->parsed()) return run_saturate(no, json);
    if (cmd_cover->parsed()) return run_cover(no, from, flags, json);
    if (cmd_conditions->parsed()) return run_conditions(no, flags, json);
    if (cmd_msum->parsed())
      return run_msum(instance_file, msum_budget, msum_nodes, certified, json);
    if (cmd_oracle->parsed()) return run_oracle(no, oracle_budget, json);
    if (cmd_corpus->parsed()) return run_corpus(dir, flags, jobs, json);
  } catch (const std::exception& e) {
    std::cerr << "birch: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
