#include "birch/parser.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace birch {

namespace {

// Per-line tokenizer: identifiers, integers and single punctuation marks,
// with "!=" and "->" as two-character tokens.
struct Lexer {
  std::string text;
  size_t pos = 0;
  int line;

  explicit Lexer(std::string t, int line) : text(std::move(t)), line(line) {}

  void skip_space() {
    while (pos < text.size() && std::isspace((unsigned char)text[pos])) ++pos;
  }
  bool done() {
    skip_space();
    return pos >= text.size();
  }
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(line, msg); }

  std::string peek() {
    skip_space();
    if (pos >= text.size()) return "";
    char c = text[pos];
    if (std::isalpha((unsigned char)c) || c == '_' || c == '@') {
      size_t end = pos + 1;
      while (end < text.size() && (std::isalnum((unsigned char)text[end]) ||
                                   text[end] == '_' || text[end] == '@'))
        ++end;
      return text.substr(pos, end - pos);
    }
    if (std::isdigit((unsigned char)c) ||
        (c == '-' && pos + 1 < text.size() && std::isdigit((unsigned char)text[pos + 1]))) {
      size_t end = pos + 1;
      while (end < text.size() && std::isdigit((unsigned char)text[end])) ++end;
      return text.substr(pos, end - pos);
    }
    if (text.compare(pos, 2, "!=") == 0 || text.compare(pos, 2, "->") == 0)
      return text.substr(pos, 2);
    return text.substr(pos, 1);
  }
  std::string next() {
    std::string tok = peek();
    pos += tok.size();
    return tok;
  }
  bool try_eat(const std::string& tok) {
    if (peek() != tok) return false;
    next();
    return true;
  }
  void expect(const std::string& tok) {
    if (!try_eat(tok)) fail("expected '" + tok + "', found '" + peek() + "'");
  }
  std::string ident() {
    std::string tok = next();
    if (tok.empty() || !(std::isalpha((unsigned char)tok[0]) || tok[0] == '_' || tok[0] == '@'))
      fail("expected a name, found '" + tok + "'");
    return tok;
  }
  int64_t integer() {
    std::string tok = next();
    try {
      size_t used = 0;
      int64_t v = std::stoll(tok, &used);
      if (used == tok.size()) return v;
    } catch (...) {
    }
    fail("expected a number, found '" + tok + "'");
  }
};

struct Parser {
  ParseOptions opts;
  ParsedInput out;
  std::map<std::string, Atom> config_vars;  // shared between source and target

  Dvass& net() { return out.instance.net; }

  void check_name(Lexer& lx, const std::string& name) {
    if (!opts.allow_reserved && name.find(kAuxSigil) != std::string::npos)
      lx.fail("name '" + name + "' uses the reserved character '@'");
  }

  int32_t resolve(Lexer& lx, const std::vector<std::string>& names,
                  const std::string& name, const char* kind) {
    auto id = net().find(names, name);
    if (!id) lx.fail(std::string("unknown ") + kind + " '" + name + "'");
    return *id;
  }

  Atom config_var(const std::string& name) {
    auto it = config_vars.find(name);
    if (it != config_vars.end()) return it->second;
    Atom a{(uint32_t)config_vars.size()};
    config_vars.emplace(name, a);
    return a;
  }

  void parse_names(Lexer& lx, std::vector<std::string>& into) {
    while (!lx.done()) {
      std::string name = lx.ident();
      check_name(lx, name);
      if (net().find(into, name)) lx.fail("duplicate name '" + name + "'");
      into.push_back(name);
    }
  }

  // l0[r1=a, r2=-]; unmentioned registers are EMPTY. Brackets may be omitted
  // when the net has no registers.
  State parse_state(Lexer& lx, std::map<std::string, Atom>& vars) {
    std::string loc = lx.ident();
    State s = net().empty_state(resolve(lx, net().locations, loc, "location"));
    if (!lx.try_eat("[")) return s;
    if (lx.try_eat("]")) return s;
    do {
      std::string reg = lx.ident();
      RegId r = resolve(lx, net().registers, reg, "register");
      lx.expect("=");
      if (!lx.try_eat("-")) {
        std::string var = lx.ident();
        auto [it, fresh] = vars.try_emplace(var, Atom{(uint32_t)vars.size()});
        (void)fresh;
        s.regs[r] = it->second;
      }
    } while (lx.try_eat(","));
    lx.expect("]");
    return s;
  }

  // trans NAME: STATE -> STATE eff: +p1(c) -p2(a) +h1 ...
  void parse_trans(Lexer& lx) {
    std::string name = lx.ident();
    check_name(lx, name);
    lx.expect(":");
    std::map<std::string, Atom> vars;
    State src = parse_state(lx, vars);
    lx.expect("->");
    State tgt = parse_state(lx, vars);
    DataVector eff;
    if (lx.try_eat("eff")) {
      lx.expect(":");
      while (!lx.done()) {
        int64_t sign;
        if (lx.try_eat("+")) sign = 1;
        else if (lx.try_eat("-")) sign = -1;
        else lx.fail("expected '+' or '-' in effect");
        std::string place = lx.ident();
        if (lx.try_eat("(")) {
          PlaceId p = resolve(lx, net().atom_places, place, "atom place");
          std::string var = lx.ident();
          auto [it, fresh] = vars.try_emplace(var, Atom{(uint32_t)vars.size()});
          (void)fresh;
          lx.expect(")");
          eff.add_data(p, it->second, sign);
        } else {
          PlaceId h = resolve(lx, net().plain_places, place, "plain place");
          eff.add_plain(h, sign);
        }
      }
    }
    TransitionOrbit orbit{std::move(src), std::move(eff), std::move(tgt)};
    TransitionOrbit canon = canonicalize(orbit).value;
    if (canon != orbit)
      out.warnings.push_back("line " + std::to_string(lx.line) +
                             ": transition '" + name +
                             "' was not in canonical form; canonicalized");
    net().transitions.push_back(std::move(canon));
  }

  // STATE plain{h1:2} tokens{p1:[a, a], p2:[b]}
  Configuration parse_config(Lexer& lx) {
    Configuration c;
    c.state = parse_state_shared(lx);
    while (!lx.done()) {
      std::string section = lx.ident();
      lx.expect("{");
      if (section == "plain") {
        if (!lx.try_eat("}")) {
          do {
            std::string place = lx.ident();
            PlaceId h = resolve(lx, net().plain_places, place, "plain place");
            lx.expect(":");
            int64_t n = lx.integer();
            if (n < 0) lx.fail("negative marking");
            c.marking.add_plain(h, n);
          } while (lx.try_eat(","));
          lx.expect("}");
        }
      } else if (section == "tokens") {
        if (!lx.try_eat("}")) {
          do {
            std::string place = lx.ident();
            PlaceId p = resolve(lx, net().atom_places, place, "atom place");
            lx.expect(":");
            parse_atom_list(lx, p, c.marking);
          } while (lx.try_eat(","));
          lx.expect("}");
        }
      } else {
        lx.fail("expected 'plain' or 'tokens', found '" + section + "'");
      }
    }
    return c;
  }

  State parse_state_shared(Lexer& lx) {
    // Like parse_state but using the file-level variable scope shared by
    // source and target.
    std::string loc = lx.ident();
    State s = net().empty_state(resolve(lx, net().locations, loc, "location"));
    if (!lx.try_eat("[")) return s;
    if (lx.try_eat("]")) return s;
    do {
      std::string reg = lx.ident();
      RegId r = resolve(lx, net().registers, reg, "register");
      lx.expect("=");
      if (!lx.try_eat("-")) s.regs[r] = config_var(lx.ident());
    } while (lx.try_eat(","));
    lx.expect("]");
    return s;
  }

  void parse_atom_list(Lexer& lx, PlaceId p, DataVector& into) {
    lx.expect("[");
    if (lx.try_eat("]")) return;
    do {
      into.add_data(p, config_var(lx.ident()), 1);
    } while (lx.try_eat(","));
    lx.expect("]");
  }

  // trans NAME: in p1(x) p2(y) out p1(z) where z=x, x!=y
  void parse_petri_trans(Lexer& lx) {
    PetriTransition t;
    t.name = lx.ident();
    check_name(lx, t.name);
    lx.expect(":");
    auto place_id = [&](const std::string& name) -> PlaceId {
      auto id = net().find(out.petri.places, name);
      if (!id) lx.fail("unknown place '" + name + "'");
      return *id;
    };
    auto parse_terms = [&](std::vector<std::pair<PlaceId, std::string>>& into) {
      while (!lx.done()) {
        std::string tok = lx.peek();
        if (tok == "in" || tok == "out" || tok == "where") break;
        std::string place = lx.ident();
        PlaceId p = place_id(place);
        lx.expect("(");
        into.emplace_back(p, lx.ident());
        lx.expect(")");
      }
    };
    if (lx.try_eat("in")) parse_terms(t.inputs);
    if (lx.try_eat("out")) parse_terms(t.outputs);
    if (lx.try_eat("where")) {
      do {
        std::string a = lx.ident();
        if (lx.try_eat("=")) t.equalities.emplace_back(a, lx.ident());
        else if (lx.try_eat("!=")) t.disequalities.emplace_back(a, lx.ident());
        else lx.fail("expected '=' or '!=' in constraint");
      } while (lx.try_eat(","));
    }
    if (!lx.done()) lx.fail("trailing input after transition");
    auto known = [&](const std::string& v) {
      auto in = [&](const auto& terms) {
        return std::ranges::any_of(terms, [&](const auto& t2) { return t2.second == v; });
      };
      return in(t.inputs) || in(t.outputs);
    };
    for (const auto& [a, b] : t.equalities)
      if (!known(a) || !known(b)) lx.fail("constraint mentions an unused variable");
    for (const auto& [a, b] : t.disequalities)
      if (!known(a) || !known(b)) lx.fail("constraint mentions an unused variable");
    out.petri.transitions.push_back(std::move(t));
  }

  // marking/target line: p1:[a, b] p2:[c]
  DataVector parse_petri_marking(Lexer& lx) {
    DataVector m;
    while (!lx.done()) {
      std::string place = lx.ident();
      auto id = net().find(out.petri.places, place);
      if (!id) lx.fail("unknown place '" + place + "'");
      lx.expect(":");
      parse_atom_list(lx, *id, m);
    }
    return m;
  }
};

}  // namespace

ParsedInput parse_input(const std::string& text, const ParseOptions& opts) {
  Parser ps;
  ps.opts = opts;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool have_header = false;
  // Petri markings are parsed before the net is compiled; resolved afterwards.
  std::optional<DataVector> petri_source, petri_target;

  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    Lexer lx(raw, lineno);
    if (lx.done()) continue;
    std::string head = lx.next();

    if (!have_header) {
      if (head == "dvass" || head == "petri") {
        ps.out.is_petri = (head == "petri");
        std::string name = lx.ident();
        ps.check_name(lx, name);
        (ps.out.is_petri ? ps.out.petri.name : ps.net().name) = name;
        have_header = true;
        continue;
      }
      lx.fail("input must start with 'dvass NAME' or 'petri NAME'");
    }

    if (!ps.out.is_petri) {
      if (head == "locations") {
        lx.expect(":");
        ps.parse_names(lx, ps.net().locations);
      } else if (head == "registers") {
        lx.expect(":");
        ps.parse_names(lx, ps.net().registers);
      } else if (head == "plain") {
        lx.expect(":");
        ps.parse_names(lx, ps.net().plain_places);
      } else if (head == "atom") {
        lx.expect(":");
        ps.parse_names(lx, ps.net().atom_places);
      } else if (head == "trans") {
        ps.parse_trans(lx);
      } else if (head == "source") {
        lx.expect(":");
        ps.out.instance.source = ps.parse_config(lx);
        ps.out.has_source = true;
      } else if (head == "target") {
        lx.expect(":");
        ps.out.instance.target = ps.parse_config(lx);
        ps.out.has_target = true;
      } else {
        lx.fail("unknown directive '" + head + "'");
      }
    } else {
      if (head == "places") {
        lx.expect(":");
        ps.parse_names(lx, ps.out.petri.places);
      } else if (head == "trans") {
        ps.parse_petri_trans(lx);
      } else if (head == "marking" || head == "source") {
        lx.expect(":");
        petri_source = ps.parse_petri_marking(lx);
      } else if (head == "target") {
        lx.expect(":");
        petri_target = ps.parse_petri_marking(lx);
      } else {
        lx.fail("unknown directive '" + head + "'");
      }
    }
    if (!lx.done()) lx.fail("trailing input: '" + lx.peek() + "'");
  }
  if (!have_header) throw ParseError(lineno, "empty input");

  if (ps.out.is_petri) {
    ps.out.instance.net = compile_petri(ps.out.petri);
    State start = ps.out.instance.net.empty_state(0);
    if (petri_source) {
      ps.out.instance.source = {start, std::move(*petri_source)};
      ps.out.has_source = true;
    }
    if (petri_target) {
      ps.out.instance.target = {start, std::move(*petri_target)};
      ps.out.has_target = true;
    }
  } else {
    ps.net().canonicalize_transitions();
  }
  return ps.out;
}

ParsedInput parse_input_file(const std::string& path, const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_input(buf.str(), opts);
}

std::string atom_var_name(size_t index) {
  if (index < 26) return std::string(1, (char)('a' + index));
  return "v" + std::to_string(index);
}

namespace {

// Shared rendering of states and configurations. `names` maps atoms to
// variable names, extended on demand.
struct VarNames {
  std::map<Atom, std::string> names;
  std::string of(Atom a) {
    auto it = names.find(a);
    if (it != names.end()) return it->second;
    std::string n = atom_var_name(names.size());
    names.emplace(a, n);
    return n;
  }
};

void render_state(std::ostream& os, const Dvass& net, const State& s, VarNames& vars) {
  os << net.locations[s.location];
  if (net.registers.empty()) return;
  os << "[";
  for (size_t r = 0; r < s.regs.size(); ++r) {
    if (r) os << ", ";
    os << net.registers[r] << "=";
    if (s.regs[r]) os << vars.of(*s.regs[r]);
    else os << "-";
  }
  os << "]";
}

void render_config(std::ostream& os, const Dvass& net, const Configuration& c,
                   VarNames& vars) {
  render_state(os, net, c.state, vars);
  if (!c.marking.plain.empty()) {
    os << " plain{";
    for (size_t i = 0; i < c.marking.plain.size(); ++i) {
      if (i) os << ", ";
      os << net.plain_places[c.marking.plain[i].first] << ":"
         << c.marking.plain[i].second;
    }
    os << "}";
  }
  if (!c.marking.data.empty()) {
    os << " tokens{";
    std::map<PlaceId, std::vector<std::string>> per_place;
    for (const auto& [key, count] : c.marking.data)
      for (int64_t i = 0; i < count; ++i)
        per_place[key.first].push_back(vars.of(key.second));
    bool first = true;
    for (const auto& [p, atoms] : per_place) {
      if (!first) os << ", ";
      first = false;
      os << net.atom_places[p] << ":[";
      for (size_t i = 0; i < atoms.size(); ++i) os << (i ? ", " : "") << atoms[i];
      os << "]";
    }
    os << "}";
  }
}

void render_net_body(std::ostream& os, const Dvass& net) {
  os << "dvass " << net.name << "\n";
  auto list = [&](const char* label, const std::vector<std::string>& names) {
    if (names.empty()) return;
    os << label << ":";
    for (const auto& n : names) os << " " << n;
    os << "\n";
  };
  list("locations", net.locations);
  list("registers", net.registers);
  list("plain", net.plain_places);
  list("atom", net.atom_places);
  for (size_t i = 0; i < net.transitions.size(); ++i) {
    const TransitionOrbit& t = net.transitions[i];
    VarNames vars;
    os << "trans t" << i << ": ";
    render_state(os, net, t.source, vars);
    os << " -> ";
    render_state(os, net, t.target, vars);
    if (!t.effect.is_zero()) {
      os << " eff:";
      for (const auto& [h, c] : t.effect.plain)
        for (int64_t k = 0; k < std::abs(c); ++k)
          os << " " << (c > 0 ? "+" : "-") << net.plain_places[h];
      for (const auto& [key, c] : t.effect.data)
        for (int64_t k = 0; k < std::abs(c); ++k)
          os << " " << (c > 0 ? "+" : "-") << net.atom_places[key.first] << "("
             << vars.of(key.second) << ")";
    }
    os << "\n";
  }
}

}  // namespace

std::string render_dvass(const Dvass& net) {
  std::ostringstream os;
  render_net_body(os, net);
  return os.str();
}

std::string render_instance(const Instance& inst, bool with_source, bool with_target) {
  std::ostringstream os;
  render_net_body(os, inst.net);
  VarNames vars;  // shared scope across the two lines
  if (with_source) {
    os << "source: ";
    render_config(os, inst.net, inst.source, vars);
    os << "\n";
  }
  if (with_target) {
    os << "target: ";
    render_config(os, inst.net, inst.target, vars);
    os << "\n";
  }
  return os.str();
}

std::string render_petri(const PetriNet& net) {
  std::ostringstream os;
  os << "petri " << net.name << "\n";
  os << "places:";
  for (const auto& p : net.places) os << " " << p;
  os << "\n";
  for (const auto& t : net.transitions) {
    os << "trans " << t.name << ":";
    if (!t.inputs.empty()) {
      os << " in";
      for (const auto& [p, v] : t.inputs) os << " " << net.places[p] << "(" << v << ")";
    }
    if (!t.outputs.empty()) {
      os << " out";
      for (const auto& [p, v] : t.outputs) os << " " << net.places[p] << "(" << v << ")";
    }
    if (!t.equalities.empty() || !t.disequalities.empty()) {
      os << " where ";
      bool first = true;
      for (const auto& [a, b] : t.equalities) {
        if (!first) os << ", ";
        first = false;
        os << a << "=" << b;
      }
      for (const auto& [a, b] : t.disequalities) {
        if (!first) os << ", ";
        first = false;
        os << a << "!=" << b;
      }
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace birch
