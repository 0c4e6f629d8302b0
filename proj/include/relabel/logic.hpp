#pragma once

// First-order expressions: terms, atoms, schemas, mode declarations and
// lifted clauses. Everything here is an immutable value; parsing is
// reentrant and safe to call from multiple threads.

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "relabel/errors.hpp"

namespace relabel {

// ---------------------------------------------------------------------------
// Terms and atoms

struct Term {
  enum class Kind { Constant, Variable, Function };

  Kind kind = Kind::Constant;
  std::string symbol;
  std::vector<Term> args;  // non-empty only for Kind::Function

  bool operator==(const Term&) const = default;

  static Term constant(std::string s) { return {Kind::Constant, std::move(s), {}}; }
  static Term variable(std::string s) { return {Kind::Variable, std::move(s), {}}; }
  static Term function(std::string s, std::vector<Term> a) {
    return {Kind::Function, std::move(s), std::move(a)};
  }
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;
  bool negated = false;

  bool operator==(const Atom&) const = default;
};

inline void render_term(const Term& t, std::string& out) {
  out += t.symbol;
  if (t.kind == Term::Kind::Function) {
    out += '(';
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      if (i) out += ',';
      render_term(t.args[i], out);
    }
    out += ')';
  }
}

inline std::string render(const Term& t) {
  std::string s;
  render_term(t, s);
  return s;
}

inline std::string render(const Atom& a) {
  std::string s;
  if (a.negated) s += '!';
  s += a.predicate;
  if (!a.args.empty()) {
    s += '(';
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (i) s += ',';
      render_term(a.args[i], s);
    }
    s += ')';
  }
  return s;
}

inline bool is_ground(const Term& t) {
  if (t.kind == Term::Kind::Variable) return false;
  for (const auto& a : t.args)
    if (!is_ground(a)) return false;
  return true;
}

inline bool is_ground(const Atom& a) {
  for (const auto& t : a.args)
    if (!is_ground(t)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Schema: one signature per predicate / function symbol.

struct Schema {
  struct FunctionSig {
    std::vector<std::string> args;
    std::string result;
  };

  std::set<std::string> types;
  std::map<std::string, std::vector<std::string>> predicates;
  std::map<std::string, FunctionSig> functions;

  const std::vector<std::string>& predicate_sig(const std::string& p) const {
    auto it = predicates.find(p);
    if (it == predicates.end()) throw ParseError("unknown predicate symbol: " + p);
    return it->second;
  }

  const FunctionSig& function_sig(const std::string& f) const {
    auto it = functions.find(f);
    if (it == functions.end()) throw ParseError("unknown function symbol: " + f);
    return it->second;
  }
};

// ---------------------------------------------------------------------------
// Atom parser. External syntax: [!|?]Pred(term,...) with nested function
// terms; a bare token is a constant. '?' is handled by the stream reader,
// not here. Variables (V0, V1, ...) are only accepted when requested --
// ground input never contains them.

namespace detail {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("unexpected end of input", pos);
    return text[pos];
  }
  void expect(char c) {
    if (eof() || text[pos] != c)
      throw ParseError(std::string("expected '") + c + "'", pos);
    ++pos;
  }
  std::string token() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size()) {
      char c = text[pos];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')
        ++pos;
      else
        break;
    }
    if (pos == start) throw ParseError("expected a symbol", pos);
    return text.substr(start, pos - start);
  }
};

inline bool is_variable_token(const std::string& s) {
  if (s.size() < 2 || s[0] != 'V') return false;
  return std::all_of(s.begin() + 1, s.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

// Parses a term whose expected type is `type`; checks function return types
// against the position they fill.
inline Term parse_term(Cursor& cur, const Schema& schema, const std::string& type,
                       bool allow_variables) {
  std::size_t at = cur.pos;
  std::string sym = cur.token();
  if (!cur.eof() && cur.text[cur.pos] == '(') {
    const auto& sig = schema.function_sig(sym);
    if (sig.result != type)
      throw ParseError("function '" + sym + "' returns " + sig.result +
                           " where " + type + " is expected", at);
    cur.expect('(');
    std::vector<Term> args;
    for (std::size_t i = 0; i < sig.args.size(); ++i) {
      if (i) cur.expect(',');
      args.push_back(parse_term(cur, schema, sig.args[i], allow_variables));
    }
    cur.expect(')');
    return Term::function(sym, std::move(args));
  }
  if (allow_variables && is_variable_token(sym)) return Term::variable(sym);
  return Term::constant(sym);
}

inline Atom parse_atom_impl(Cursor& cur, const Schema& schema, bool allow_variables) {
  Atom atom;
  if (cur.peek() == '!') {
    cur.expect('!');
    atom.negated = true;
  }
  atom.predicate = cur.token();
  const auto& sig = schema.predicate_sig(atom.predicate);
  if (!sig.empty()) {
    cur.expect('(');
    for (std::size_t i = 0; i < sig.size(); ++i) {
      if (i) cur.expect(',');
      atom.args.push_back(parse_term(cur, schema, sig[i], allow_variables));
    }
    cur.expect(')');
  }
  return atom;
}

}  // namespace detail

inline Atom parse_atom(const std::string& text, const Schema& schema,
                       bool allow_variables = false) {
  detail::Cursor cur{text};
  Atom a = detail::parse_atom_impl(cur, schema, allow_variables);
  if (!cur.eof())
    throw ParseError("trailing input after atom", cur.pos);
  return a;
}

// ---------------------------------------------------------------------------
// Typed constant enumeration. A "leaf position" is an argument slot filled by
// a constant (or variable), reached recursively through function terms.

namespace detail {

inline void collect_typed_leaves(const Term& t, const Schema& schema, const std::string& type,
                                 std::vector<std::pair<std::string, std::string>>& out) {
  if (t.kind == Term::Kind::Function) {
    const auto& sig = schema.function_sig(t.symbol);
    if (sig.args.size() != t.args.size())
      throw ParseError("arity mismatch for function: " + t.symbol);
    for (std::size_t i = 0; i < t.args.size(); ++i)
      collect_typed_leaves(t.args[i], schema, sig.args[i], out);
  } else {
    out.emplace_back(t.symbol, type);
  }
}

}  // namespace detail

// Every leaf constant of `a` with the type of its position; duplicates kept.
inline std::vector<std::pair<std::string, std::string>> typed_constants(
    const Atom& a, const Schema& schema) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto& sig = schema.predicate_sig(a.predicate);
  if (sig.size() != a.args.size())
    throw ParseError("arity mismatch for predicate: " + a.predicate);
  for (std::size_t i = 0; i < a.args.size(); ++i)
    detail::collect_typed_leaves(a.args[i], schema, sig[i], out);
  return out;
}

inline std::set<std::string> types_of(const Atom& a, const Schema& schema) {
  std::set<std::string> out;
  for (const auto& [c, t] : typed_constants(a, schema)) out.insert(t);
  return out;
}

// ---------------------------------------------------------------------------
// Mode declarations. Placemarkers mark leaf positions: '+' input variable,
// '-' output variable, '#' constant. The mode term tree mirrors the atom
// structure down to its leaves.

enum class Placemarker { InputVar, OutputVar, Constant };

struct ModeTerm {
  enum class Kind { Placemarker, Function };
  Kind kind = Kind::Placemarker;
  Placemarker marker = Placemarker::InputVar;
  std::string symbol;           // function symbol
  std::vector<ModeTerm> args;   // function arguments

  static ModeTerm leaf(Placemarker m) { return {Kind::Placemarker, m, {}, {}}; }
  static ModeTerm function(std::string s, std::vector<ModeTerm> a) {
    return {Kind::Function, Placemarker::InputVar, std::move(s), std::move(a)};
  }
};

struct ModeDeclaration {
  std::string predicate;
  int recall = 0;  // recall 0 excludes the predicate from partitioning
  std::vector<ModeTerm> args;
};

namespace detail {

inline bool mode_term_matches(const ModeTerm& m, const Term& t) {
  if (m.kind == ModeTerm::Kind::Placemarker) return t.kind != Term::Kind::Function;
  if (t.kind != Term::Kind::Function || t.symbol != m.symbol ||
      t.args.size() != m.args.size())
    return false;
  for (std::size_t i = 0; i < t.args.size(); ++i)
    if (!mode_term_matches(m.args[i], t.args[i])) return false;
  return true;
}

}  // namespace detail

inline bool mode_matches(const ModeDeclaration& m, const Atom& a) {
  if (m.predicate != a.predicate || m.args.size() != a.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!detail::mode_term_matches(m.args[i], a.args[i])) return false;
  return true;
}

// First mode structurally matching the atom, or null.
inline const ModeDeclaration* find_mode(const std::vector<ModeDeclaration>& modes,
                                        const Atom& a) {
  for (const auto& m : modes)
    if (mode_matches(m, a)) return &m;
  return nullptr;
}

inline int max_recall(const std::vector<ModeDeclaration>& modes, const std::string& pred) {
  int r = -1;
  for (const auto& m : modes)
    if (m.predicate == pred) r = std::max(r, m.recall);
  return r;  // -1: no declaration at all
}

// ---------------------------------------------------------------------------
// Lifted clauses in canonical form. Variables are numbered V0, V1, ... by
// first occurrence (head first, then body atoms in canonical order), so
// alpha-equivalent clauses render identically.

struct Clause {
  Atom head;
  std::vector<Atom> body;
  std::string rendering;  // canonical string, the identity of the clause

  bool operator==(const Clause& other) const { return rendering == other.rendering; }
};

inline std::string render(const Clause& c) { return c.rendering; }

namespace detail {

inline void renumber_term(Term& t, std::map<std::string, std::string>& names, int& next) {
  if (t.kind == Term::Kind::Variable) {
    auto it = names.find(t.symbol);
    if (it == names.end())
      it = names.emplace(t.symbol, "V" + std::to_string(next++)).first;
    t.symbol = it->second;
  }
  for (auto& a : t.args) renumber_term(a, names, next);
}

inline void renumber_atom(Atom& a, std::map<std::string, std::string>& names, int& next) {
  for (auto& t : a.args) renumber_term(t, names, next);
}

// Rename-invariant key: variables collapse to "_".
inline std::string structure_key(const Atom& a) {
  Atom copy = a;
  std::map<std::string, std::string> names;
  std::function<void(Term&)> blank = [&](Term& t) {
    if (t.kind == Term::Kind::Variable) t.symbol = "_";
    for (auto& x : t.args) blank(x);
  };
  for (auto& t : copy.args) blank(t);
  return render(copy);
}

inline std::string render_clause_text(const Atom& head, const std::vector<Atom>& body) {
  std::string s = render(head);
  if (!body.empty()) {
    s += " :- ";
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (i) s += ", ";
      s += render(body[i]);
    }
  }
  return s;
}

inline std::pair<std::vector<Atom>, std::string> renumber_ordering(
    const Atom& head, const std::vector<Atom>& body) {
  std::map<std::string, std::string> names;
  int next = 0;
  Atom h = head;
  renumber_atom(h, names, next);
  std::vector<Atom> b = body;
  for (auto& a : b) renumber_atom(a, names, next);
  std::string text = render_clause_text(h, b);
  b.insert(b.begin(), std::move(h));  // slot 0 holds the head
  return {std::move(b), std::move(text)};
}

}  // namespace detail

// Canonicalize: sort body atoms by a rename-invariant structure key; within
// groups of structurally identical atoms the order that yields the
// lexicographically smallest rendering is chosen (group sizes are tiny in
// practice, capped to avoid factorial blowups on degenerate input).
inline Clause canonicalize(Atom head, std::vector<Atom> body) {
  std::stable_sort(body.begin(), body.end(), [](const Atom& a, const Atom& b) {
    return detail::structure_key(a) < detail::structure_key(b);
  });

  // Identify tie groups of equal structure keys.
  std::vector<std::pair<std::size_t, std::size_t>> groups;  // [begin, end)
  for (std::size_t i = 0; i < body.size();) {
    std::size_t j = i + 1;
    const std::string key = detail::structure_key(body[i]);
    while (j < body.size() && detail::structure_key(body[j]) == key) ++j;
    if (j - i > 1) groups.emplace_back(i, j);
    i = j;
  }

  auto [best_atoms, best_text] = detail::renumber_ordering(head, body);

  // Explore permutations within tie groups, one group at a time.
  constexpr std::size_t kMaxGroup = 6;
  for (const auto& [gb, ge] : groups) {
    if (ge - gb > kMaxGroup) continue;  // deterministic fallback: keep stable order
    std::vector<Atom> current = body;
    std::vector<std::size_t> idx(ge - gb);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<Atom> group(body.begin() + gb, body.begin() + ge);
    do {
      for (std::size_t i = 0; i < idx.size(); ++i) current[gb + i] = group[idx[i]];
      auto [atoms, text] = detail::renumber_ordering(head, current);
      if (text < best_text) {
        best_text = std::move(text);
        best_atoms = std::move(atoms);
      }
    } while (std::next_permutation(idx.begin(), idx.end()));
    // Freeze the winning order before moving to the next group; canonical
    // variable names are valid input to subsequent renumbering passes.
    body.assign(best_atoms.begin() + 1, best_atoms.end());
    head = best_atoms.front();
  }

  Clause c;
  c.head = best_atoms.front();
  c.body.assign(best_atoms.begin() + 1, best_atoms.end());
  c.rendering = std::move(best_text);
  return c;
}

inline bool alpha_equivalent(const Clause& c1, const Clause& c2) {
  return c1.rendering == c2.rendering;
}

inline Clause opposite(const Clause& c) {
  Atom head = c.head;
  head.negated = !head.negated;
  return canonicalize(std::move(head), c.body);
}

// ---------------------------------------------------------------------------
// Lifting: variabilize a labelled example into its clause view. Equal
// constants at variable-marked positions share one variable, preserving
// co-reference across the head and body.

namespace detail {

inline void lift_term(const Term& t, const ModeTerm& m,
                      std::map<std::string, std::string>& vars, int& next, Term& out) {
  if (m.kind == ModeTerm::Kind::Function) {
    std::vector<Term> args(t.args.size());
    for (std::size_t i = 0; i < t.args.size(); ++i)
      lift_term(t.args[i], m.args[i], vars, next, args[i]);
    out = Term::function(t.symbol, std::move(args));
    return;
  }
  if (m.marker == Placemarker::Constant) {
    out = t;
    return;
  }
  auto it = vars.find(t.symbol);
  if (it == vars.end())
    it = vars.emplace(t.symbol, "X" + std::to_string(next++)).first;
  out = Term::variable(it->second);
}

inline Atom lift_atom(const Atom& a, const ModeDeclaration& mode,
                      std::map<std::string, std::string>& vars, int& next) {
  Atom out;
  out.predicate = a.predicate;
  out.negated = a.negated;
  out.args.resize(a.args.size());
  for (std::size_t i = 0; i < a.args.size(); ++i)
    lift_term(a.args[i], mode.args[i], vars, next, out.args[i]);
  return out;
}

}  // namespace detail

// `positive` gives the head polarity: a negative label negates the head.
inline Clause lift(const Atom& query, bool positive, const std::vector<Atom>& evidence,
                   const std::vector<ModeDeclaration>& modes, const Schema& schema) {
  std::map<std::string, std::string> vars;
  int next = 0;

  const ModeDeclaration* head_mode = find_mode(modes, query);
  if (!head_mode)
    throw ConfigError("no mode declaration matches query atom: " + render(query));
  Atom head = detail::lift_atom(query, *head_mode, vars, next);
  head.negated = !positive;

  std::vector<Atom> body;
  body.reserve(evidence.size());
  for (const Atom& e : evidence) {
    const ModeDeclaration* m = find_mode(modes, e);
    if (!m) throw ConfigError("no mode declaration matches evidence atom: " + render(e));
    body.push_back(detail::lift_atom(e, *m, vars, next));
  }
  return canonicalize(std::move(head), std::move(body));
}

}  // namespace relabel
