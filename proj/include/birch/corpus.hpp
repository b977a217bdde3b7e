#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "birch/decide.hpp"
#include "birch/oracle.hpp"

namespace birch {

// One annotated instance file. Annotations ride in '#' comment lines the
// parser already ignores:
//   # expect: bireachable | not-bireachable | unknown
//   # args: --msum-budget 0 --assume-complete   (per-file decide overrides)
//   # oracle: skip                               (no ground-truth cross-check)
//   # oracle: tokens=6 atoms=6 depth=48 states=100000
struct CorpusEntry {
  std::string path;
  std::string name;
  std::string text;
  std::string expect;  // empty when unannotated
  bool oracle_skip = false;
  OracleBudget oracle_budget;
  std::vector<std::string> args;
};

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void parse_corpus_annotations(CorpusEntry& e) {
  std::istringstream lines(e.text);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream ls(line);
    std::string hash, key;
    ls >> hash;
    if (hash != "#") continue;
    ls >> key;
    if (key == "expect:") {
      ls >> e.expect;
      if (e.expect != "bireachable" && e.expect != "not-bireachable" && e.expect != "unknown")
        throw std::runtime_error(e.name + ": bad expect annotation '" + e.expect + "'");
    } else if (key == "args:") {
      std::string tok;
      while (ls >> tok) e.args.push_back(tok);
    } else if (key == "oracle:") {
      std::string tok;
      while (ls >> tok) {
        if (tok == "skip") {
          e.oracle_skip = true;
        } else if (auto eq = tok.find('='); eq != std::string::npos) {
          const std::string k = tok.substr(0, eq);
          const int64_t v = std::stoll(tok.substr(eq + 1));
          if (k == "tokens")
            e.oracle_budget.max_tokens_per_place = v;
          else if (k == "atoms")
            e.oracle_budget.max_total_atoms = v;
          else if (k == "depth")
            e.oracle_budget.max_depth = (size_t)v;
          else if (k == "states")
            e.oracle_budget.max_states = (size_t)v;
          else
            throw std::runtime_error(e.name + ": bad oracle annotation key '" + k + "'");
        } else {
          throw std::runtime_error(e.name + ": bad oracle annotation '" + tok + "'");
        }
      }
    }
  }
}

// Instance files of a directory in filename order, annotations parsed.
// Throws std::runtime_error on IO problems or malformed annotations.
inline std::vector<CorpusEntry> load_corpus_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<CorpusEntry> out;
  if (!fs::exists(dir)) throw std::runtime_error("no such directory: " + dir);
  for (const auto& de : fs::directory_iterator(dir)) {
    if (!de.is_regular_file()) continue;
    const std::string ext = de.path().extension().string();
    if (ext != ".petri" && ext != ".dvass") continue;
    CorpusEntry e;
    e.path = de.path().string();
    e.name = de.path().filename().string();
    e.text = read_text_file(e.path);
    parse_corpus_annotations(e);
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(),
            [](const CorpusEntry& a, const CorpusEntry& b) { return a.name < b.name; });
  return out;
}

// Applies "# args:" tokens to a decide configuration. Returns an error
// message for an unrecognized token, empty on success.
inline std::string apply_corpus_args(const std::vector<std::string>& args, DecideConfig& cfg) {
  for (size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    auto next_int = [&](int64_t& into) -> bool {
      if (i + 1 >= args.size()) return false;
      into = std::stoll(args[++i]);
      return true;
    };
    int64_t v = 0;
    if (a == "--msum-budget" && next_int(v))
      cfg.msum.max_budget = (int)v;
    else if (a == "--msum-nodes" && next_int(v))
      cfg.msum.node_cap = (size_t)v;
    else if (a == "--cover-cap" && next_int(v))
      cfg.cover.max_nodes = (size_t)v;
    else if (a == "--cover-depth" && next_int(v))
      cfg.cover.max_depth = (size_t)v;
    else if (a == "--assume-complete")
      cfg.assume_complete = true;
    else
      return "bad args annotation token '" + a + "'";
  }
  return "";
}

}  // namespace birch
