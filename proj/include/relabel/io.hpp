#pragma once

// File formats: the combined schema/modes declarations file, the line
// oriented atom stream (batches split by "---" or one file per batch), the
// completed-stream writer and the cache snapshot.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "relabel/supervision.hpp"

namespace relabel {

struct Declarations {
  Schema schema;
  std::vector<ModeDeclaration> modes;
};

// ---------------------------------------------------------------------------
// Declarations file:
//   type id.
//   pred HappensAt(event, time).
//   func walking(id): event.
//   mode 2 HappensAt(walking(+id), +time).
// Placemarkers: '+' input variable, '-' output variable, '#' constant.
// Lines starting with '#' are comments ('#' also marks constants, so only
// line-initial comments are recognized here).

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline ModeTerm parse_mode_term(Cursor& cur, const Schema& schema, const std::string& type) {
  char c = cur.peek();
  if (c == '+' || c == '-' || c == '#') {
    ++cur.pos;
    std::string tname = cur.token();
    if (tname != type)
      throw ParseError("placemarker type '" + tname + "' does not match position type '" +
                           type + "'", cur.pos);
    Placemarker m = c == '+'   ? Placemarker::InputVar
                    : c == '-' ? Placemarker::OutputVar
                               : Placemarker::Constant;
    return ModeTerm::leaf(m);
  }
  std::size_t at = cur.pos;
  std::string sym = cur.token();
  const auto& sig = schema.function_sig(sym);
  if (sig.result != type)
    throw ParseError("function '" + sym + "' returns " + sig.result + " where " + type +
                         " is expected", at);
  cur.expect('(');
  std::vector<ModeTerm> args;
  for (std::size_t i = 0; i < sig.args.size(); ++i) {
    if (i) cur.expect(',');
    args.push_back(parse_mode_term(cur, schema, sig.args[i]));
  }
  cur.expect(')');
  return ModeTerm::function(sym, std::move(args));
}

}  // namespace detail

inline Declarations parse_declarations(std::istream& in, const std::string& origin = "") {
  Declarations d;
  std::string line;
  long lineno = 0;
  auto fail = [&](const std::string& msg) -> ParseError {
    return ParseError(origin + (origin.empty() ? "" : ":") + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = detail::trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.back() != '.') throw fail("declaration must end with '.'");
    s.pop_back();
    std::istringstream ls(s);
    std::string kind;
    ls >> kind;
    std::string rest;
    std::getline(ls, rest);
    rest = detail::trim(rest);
    try {
      if (kind == "type") {
        if (rest.empty()) throw ParseError("missing type name");
        d.schema.types.insert(rest);
      } else if (kind == "pred") {
        detail::Cursor cur{rest};
        std::string name = cur.token();
        std::vector<std::string> sig;
        if (!cur.eof()) {
          cur.expect('(');
          while (true) {
            sig.push_back(cur.token());
            if (cur.peek() == ')') break;
            cur.expect(',');
          }
          cur.expect(')');
        }
        for (const auto& t : sig)
          if (!d.schema.types.count(t)) throw ParseError("unknown type: " + t);
        if (!d.schema.predicates.emplace(name, std::move(sig)).second)
          throw ParseError("duplicate predicate signature: " + name);
      } else if (kind == "func") {
        detail::Cursor cur{rest};
        std::string name = cur.token();
        Schema::FunctionSig sig;
        cur.expect('(');
        while (true) {
          sig.args.push_back(cur.token());
          if (cur.peek() == ')') break;
          cur.expect(',');
        }
        cur.expect(')');
        cur.expect(':');
        sig.result = cur.token();
        for (const auto& t : sig.args)
          if (!d.schema.types.count(t)) throw ParseError("unknown type: " + t);
        if (!d.schema.types.count(sig.result))
          throw ParseError("unknown type: " + sig.result);
        if (sig.args.empty()) throw ParseError("function arity must be >= 1: " + name);
        if (!d.schema.functions.emplace(name, std::move(sig)).second)
          throw ParseError("duplicate function signature: " + name);
      } else if (kind == "mode") {
        detail::Cursor cur{rest};
        std::string recall_tok = cur.token();
        int recall = 0;
        try {
          recall = std::stoi(recall_tok);
        } catch (...) {
          throw ParseError("mode recall must be a non-negative integer");
        }
        if (recall < 0) throw ParseError("mode recall must be a non-negative integer");
        ModeDeclaration md;
        md.recall = recall;
        md.predicate = cur.token();
        const auto& sig = d.schema.predicate_sig(md.predicate);
        if (!sig.empty()) {
          cur.expect('(');
          for (std::size_t i = 0; i < sig.size(); ++i) {
            if (i) cur.expect(',');
            md.args.push_back(detail::parse_mode_term(cur, d.schema, sig[i]));
          }
          cur.expect(')');
        }
        d.modes.push_back(std::move(md));
      } else {
        throw ParseError("unknown declaration keyword: " + kind);
      }
    } catch (const ParseError& e) {
      throw fail(e.what());
    }
  }
  return d;
}

inline Declarations load_declarations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open declarations file: " + path);
  return parse_declarations(in, path);
}

// ---------------------------------------------------------------------------
// Atom streams. One atom per line; '#' comments; blank lines ignored; '---'
// separates batches. Query atoms carry the designated predicate and may be
// prefixed '!' (negative) or '?' (unlabelled); evidence atoms are positive.

inline void ingest_lines(std::istream& in, const Declarations& decls,
                         const std::string& query_predicate,
                         std::vector<MicroBatch>& out, const std::string& origin = "") {
  MicroBatch current;
  current.batch_index = static_cast<long>(out.size());
  long lineno = 0;
  auto flush = [&] {
    if (!current.query_atoms.empty() || !current.evidence_atoms.empty()) {
      out.push_back(std::move(current));
      current = MicroBatch{};
    }
    current.batch_index = static_cast<long>(out.size());
  };
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::string s = detail::trim(line);
    if (s.empty()) continue;
    if (s == "---") {
      flush();
      continue;
    }
    try {
      bool unknown = false;
      if (s[0] == '?') {
        unknown = true;
        s = detail::trim(s.substr(1));
      }
      Atom a = parse_atom(s, decls.schema);
      if (a.predicate == query_predicate) {
        Label l = unknown ? Label::Unknown : (a.negated ? Label::Negative : Label::Positive);
        a.negated = false;
        current.query_atoms.emplace_back(std::move(a), l);
      } else {
        if (unknown)
          throw ParseError("'?' prefix is only valid on query atoms");
        if (a.negated)
          throw ParseError("negation is only permitted on query atoms");
        current.evidence_atoms.emplace_back(std::move(a), true);
      }
    } catch (const ParseError& e) {
      throw ParseError(origin + (origin.empty() ? "" : ":") + std::to_string(lineno) +
                           ": " + e.what(), e.offset);
    }
  }
  flush();
}

// A path may be a stream file or a directory of one-file-per-batch streams
// (files taken in name order).
inline std::vector<MicroBatch> ingest(const std::vector<std::string>& paths,
                                      const Declarations& decls,
                                      const std::string& query_predicate) {
  namespace fs = std::filesystem;
  std::vector<MicroBatch> out;
  for (const std::string& path : paths) {
    if (fs::is_directory(path)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(path))
        if (entry.is_regular_file()) files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw ConfigError("cannot open input file: " + f.string());
        ingest_lines(in, decls, query_predicate, out, f.string());
      }
    } else {
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open input file: " + path);
      ingest_lines(in, decls, query_predicate, out, path);
    }
  }
  return out;
}

// Completed query atoms, one per line, '!'-prefixed when negative; batches
// separated by '---'. Order: batch order, then query-atom input order.
inline void emit_completed(const std::vector<std::vector<CompletedAtom>>& stream,
                           std::ostream& os) {
  for (std::size_t b = 0; b < stream.size(); ++b) {
    if (b) os << "---\n";
    for (const CompletedAtom& c : stream[b]) {
      Atom a = c.atom;
      a.negated = c.label < 0;
      os << render(a) << '\n';
    }
  }
}

inline void emit_completed(const std::vector<std::vector<CompletedAtom>>& stream,
                           const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open output file: " + path);
  emit_completed(stream, os);
}

// ---------------------------------------------------------------------------
// Cache snapshots: one line per entry, canonical clause rendering, tab,
// count. On import the representative vertex is rebuilt by grounding the
// clause's variables with constants named after them, which preserves the
// co-reference pattern the distance function sees.

inline void save_cache(const LabelCache& cache, std::ostream& os) {
  for (const CacheEntry& e : cache.entries) os << e.clause.rendering << '\t' << e.count << '\n';
}

namespace detail {

// Splits "A(x,y), B(z)" at top-level commas.
inline std::vector<std::string> split_atoms(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

inline Term ground_term(const Term& t) {
  if (t.kind == Term::Kind::Variable) return Term::constant(t.symbol);
  Term out = t;
  for (auto& a : out.args) a = ground_term(a);
  return out;
}

inline Atom ground_atom(const Atom& a) {
  Atom out = a;
  for (auto& t : out.args) t = ground_term(t);
  return out;
}

}  // namespace detail

inline Clause parse_clause(const std::string& text, const Schema& schema) {
  std::string head_text = text;
  std::string body_text;
  if (auto sep = text.find(" :- "); sep != std::string::npos) {
    head_text = text.substr(0, sep);
    body_text = text.substr(sep + 4);
  }
  Atom head = parse_atom(detail::trim(head_text), schema, /*allow_variables=*/true);
  std::vector<Atom> body;
  for (const std::string& s : detail::split_atoms(body_text))
    body.push_back(parse_atom(s, schema, /*allow_variables=*/true));
  return canonicalize(std::move(head), std::move(body));
}

inline LabelCache load_cache(std::istream& in, const Schema& schema,
                             const std::string& origin = "") {
  LabelCache cache;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(origin + ":" + std::to_string(lineno) + ": missing tab separator");
    Clause c = parse_clause(line.substr(0, tab), schema);
    long count = 0;
    try {
      count = std::stol(line.substr(tab + 1));
    } catch (...) {
      throw ParseError(origin + ":" + std::to_string(lineno) + ": bad count");
    }
    if (count < 1)
      throw ParseError(origin + ":" + std::to_string(lineno) + ": count must be positive");
    if (cache.find(c.rendering))
      throw ParseError(origin + ":" + std::to_string(lineno) + ": duplicate clause");

    Vertex rep;
    rep.query = detail::ground_atom(c.head);
    rep.query.negated = false;
    rep.label = c.head.negated ? Label::Negative : Label::Positive;
    for (const Atom& b : c.body) rep.evidence.push_back(detail::ground_atom(b));
    cache.insert(std::move(c), std::move(rep));
    cache.entries.back().count = count;
  }
  return cache;
}

}  // namespace relabel
