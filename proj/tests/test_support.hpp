#pragma once

// Shared fixtures for the unit suites: an activity-recognition style schema
// plus small random generators for atoms and terms.

#include <random>
#include <sstream>
#include <string>

#include "relabel/relabel.hpp"

inline const char* kTestDecls = R"(# test declarations
type id.
type time.
type dist.
type event.
type fluent.
pred HoldsAt(fluent, time).
pred HappensAt(event, time).
pred Close(id, id, dist, time).
pred Person(id).
pred Tick.
pred Ignored(id).
func move(id, id): fluent.
func walking(id): event.
func exit(id): event.
func running(id): event.
func active(id): event.
func inactive(id): event.
mode 1 HoldsAt(move(+id, +id), +time).
mode 2 HappensAt(walking(+id), +time).
mode 2 HappensAt(exit(+id), +time).
mode 2 HappensAt(running(+id), +time).
mode 2 HappensAt(active(+id), +time).
mode 2 HappensAt(inactive(+id), +time).
mode 3 Close(+id, +id, #dist, +time).
mode 1 Person(+id).
mode 0 Ignored(+id).
)";

inline const relabel::Declarations& test_decls() {
  static relabel::Declarations d = [] {
    std::istringstream in(kTestDecls);
    return relabel::parse_declarations(in, "test-decls");
  }();
  return d;
}

inline relabel::Atom A(const std::string& text) {
  return relabel::parse_atom(text, test_decls().schema);
}

// Random ground expressions over a tiny signature, nesting depth <= 3.
// Schema-free: the structural distance never consults a schema.
struct RandomAtoms {
  std::mt19937 rng;

  explicit RandomAtoms(unsigned seed) : rng(seed) {}

  relabel::Term term(int depth) {
    std::uniform_int_distribution<int> coin(0, 9);
    std::uniform_int_distribution<int> cname(0, 4);
    if (depth <= 0 || coin(rng) < 5)
      return relabel::Term::constant(std::string(1, static_cast<char>('a' + cname(rng))));
    std::uniform_int_distribution<int> fsym(0, 1);
    std::uniform_int_distribution<int> farity(1, 2);
    int n = farity(rng);
    std::vector<relabel::Term> args;
    for (int i = 0; i < n; ++i) args.push_back(term(depth - 1));
    return relabel::Term::function(fsym(rng) ? "f" : "g", std::move(args));
  }

  relabel::Atom atom() {
    std::uniform_int_distribution<int> psym(0, 2);
    std::uniform_int_distribution<int> parity(1, 3);
    relabel::Atom a;
    a.predicate = std::string(1, static_cast<char>('P' + psym(rng)));
    int n = parity(rng);
    for (int i = 0; i < n; ++i) a.args.push_back(term(2));
    return a;
  }
};
