#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "birch/net.hpp"

namespace birch {

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line(line) {}
};

struct ParseOptions {
  // Accept names starting with the reserved sigil (used when re-reading
  // rendered output of normalize/compile; user input keeps the default).
  bool allow_reserved = false;
};

// A parsed input file: either a data Petri net (compiled on the spot, with
// the original kept for inspection) or a direct net description. Source and
// target configurations are optional; variables in the two lines share scope,
// so the same name means the same atom on both sides.
struct ParsedInput {
  bool is_petri = false;
  PetriNet petri;
  Instance instance;
  bool has_source = false;
  bool has_target = false;
  // Non-fatal notes, e.g. a transition line that was not in canonical form
  // and got canonicalized.
  std::vector<std::string> warnings;
};

ParsedInput parse_input(const std::string& text, const ParseOptions& opts = {});
ParsedInput parse_input_file(const std::string& path, const ParseOptions& opts = {});

// Renderers; parse_input(render_*(x)) reconstructs x (with allow_reserved set
// when x contains generated names).
std::string render_dvass(const Dvass& net);
std::string render_instance(const Instance& inst, bool with_source = true,
                            bool with_target = true);
std::string render_petri(const PetriNet& net);

// Variable name used for an atom in rendered output: a, b, ..., z, v26, ...
std::string atom_var_name(size_t index);

}  // namespace birch
