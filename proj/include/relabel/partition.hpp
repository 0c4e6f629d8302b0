#pragma once

// Splits a micro-batch into example vertices: one per ground query atom,
// carrying the true evidence atoms that share typed constants with it.

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "relabel/logic.hpp"

namespace relabel {

enum class Label { Positive, Negative, Unknown };

struct MicroBatch {
  std::vector<std::pair<Atom, Label>> query_atoms;
  std::vector<std::pair<Atom, bool>> evidence_atoms;  // atom, truth value
  long batch_index = 0;
};

struct Vertex {
  Atom query;
  Label label = Label::Unknown;
  std::vector<Atom> evidence;  // deduplicated, in first-seen order
};

// Evidence atom e joins the vertex of query q iff e is true, its predicate
// has positive recall, and every constant of e whose position type also
// occurs in q appears in q at a position of the same type.
inline std::vector<Vertex> partition(const MicroBatch& batch,
                                     const std::vector<ModeDeclaration>& modes,
                                     const Schema& schema) {
  struct EvidenceInfo {
    const Atom* atom;
    std::vector<std::pair<std::string, std::string>> typed;  // (constant, type)
    std::string key;
  };
  std::vector<EvidenceInfo> usable;
  std::set<std::string> seen;
  for (const auto& [e, truth] : batch.evidence_atoms) {
    if (!truth) continue;
    if (max_recall(modes, e.predicate) <= 0) continue;  // recall 0 or undeclared
    std::string key = render(e);
    if (!seen.insert(key).second) continue;  // set semantics
    usable.push_back({&e, typed_constants(e, schema), std::move(key)});
  }

  std::vector<Vertex> out;
  out.reserve(batch.query_atoms.size());
  for (const auto& [q, label] : batch.query_atoms) {
    auto q_typed = typed_constants(q, schema);  // throws on unknown signature
    std::set<std::string> q_types;
    std::set<std::pair<std::string, std::string>> q_pairs;
    for (const auto& ct : q_typed) {
      q_types.insert(ct.second);
      q_pairs.insert(ct);
    }

    Vertex v;
    v.query = q;
    v.label = label;
    for (const auto& e : usable) {
      bool ok = true;
      for (const auto& ct : e.typed) {
        if (!q_types.count(ct.second)) continue;  // type irrelevant to q
        if (!q_pairs.count(ct)) {
          ok = false;
          break;
        }
      }
      if (ok) v.evidence.push_back(*e.atom);
    }
    out.push_back(std::move(v));
  }
  return out;
}

inline std::pair<std::vector<Vertex>, std::vector<Vertex>> split_by_label(
    const std::vector<Vertex>& vs) {
  std::pair<std::vector<Vertex>, std::vector<Vertex>> out;
  for (const auto& v : vs)
    (v.label == Label::Unknown ? out.second : out.first).push_back(v);
  return out;
}

}  // namespace relabel
