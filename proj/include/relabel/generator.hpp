#pragma once

// Synthetic stream generator for testing: query labels follow a known
// conjunctive rule over generated evidence, and labels are hidden either
// uniformly inside every batch or by leaving whole batches unlabelled.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "relabel/io.hpp"

namespace relabel {

enum class Placement { PerBatch, WholeBatch };

struct GeneratorParams {
  unsigned long seed = 1;
  int batches = 20;
  int batch_size = 10;
  int entities = 6;           // pool of entity symbols ID1..IDn
  double label_fraction = 0.5;
  Placement placement = Placement::WholeBatch;
  double positive_rate = 0.4;
  std::string rule = "move";  // "move" or "meet"
};

struct SyntheticStream {
  std::string declarations;          // declarations file content
  std::vector<MicroBatch> batches;   // labels hidden per the placement regime
  std::map<std::string, int> truth;  // query rendering -> +/-1
  std::string stream_text;
  std::string truth_text;
};

namespace detail {

inline const char* kSyntheticDeclarations =
    "type id.\n"
    "type time.\n"
    "type dist.\n"
    "type event.\n"
    "type fluent.\n"
    "pred HoldsAt(fluent, time).\n"
    "pred HappensAt(event, time).\n"
    "pred Close(id, id, dist, time).\n"
    "func move(id, id): fluent.\n"
    "func meet(id, id): fluent.\n"
    "func walking(id): event.\n"
    "func exit(id): event.\n"
    "func active(id): event.\n"
    "func inactive(id): event.\n"
    "mode 1 HoldsAt(move(+id, +id), +time).\n"
    "mode 1 HoldsAt(meet(+id, +id), +time).\n"
    "mode 2 HappensAt(walking(+id), +time).\n"
    "mode 2 HappensAt(exit(+id), +time).\n"
    "mode 2 HappensAt(active(+id), +time).\n"
    "mode 2 HappensAt(inactive(+id), +time).\n"
    "mode 3 Close(+id, +id, #dist, +time).\n";

}  // namespace detail

inline SyntheticStream synth_gen(const GeneratorParams& p) {
  if (p.batches < 0 || p.batch_size < 1 || p.entities < 2 ||
      p.label_fraction < 0.0 || p.label_fraction > 1.0 ||
      (p.rule != "move" && p.rule != "meet"))
    throw ConfigError("invalid generator parameters");

  SyntheticStream out;
  out.declarations = detail::kSyntheticDeclarations;
  Declarations decls;
  {
    std::istringstream in(out.declarations);
    decls = parse_declarations(in);
  }

  std::mt19937_64 rng(p.seed);
  auto entity = [&](int i) { return "ID" + std::to_string(i + 1); };
  std::uniform_int_distribution<int> pick_entity(0, p.entities - 1);
  std::bernoulli_distribution pick_positive(p.positive_rate);

  // Whole-batch regime: choose which batches keep their labels.
  std::set<int> labelled_batches;
  if (p.placement == Placement::WholeBatch) {
    int want = static_cast<int>(std::lround(p.label_fraction * p.batches));
    std::vector<int> ids(p.batches);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    labelled_batches.insert(ids.begin(), ids.begin() + want);
  }

  std::ostringstream stream_os, truth_os;
  long t = 0;
  for (int b = 0; b < p.batches; ++b) {
    if (b) {
      stream_os << "---\n";
      truth_os << "---\n";
    }
    MicroBatch batch;
    batch.batch_index = b;

    // Per-batch regime: hide all but round(fraction * size) labels.
    std::set<int> keep;
    if (p.placement == Placement::PerBatch) {
      int want = static_cast<int>(std::lround(p.label_fraction * p.batch_size));
      std::vector<int> ids(p.batch_size);
      std::iota(ids.begin(), ids.end(), 0);
      std::shuffle(ids.begin(), ids.end(), rng);
      keep.insert(ids.begin(), ids.begin() + want);
    }

    for (int i = 0; i < p.batch_size; ++i, ++t) {
      int a = pick_entity(rng);
      int c = pick_entity(rng);
      while (c == a) c = pick_entity(rng);
      bool positive = pick_positive(rng);

      Term time = Term::constant(std::to_string(t));
      Term ta = Term::constant(entity(a));
      Term tb = Term::constant(entity(c));
      Atom query{"HoldsAt", {Term::function(p.rule, {ta, tb}), time}, false};

      std::vector<Atom> evidence;
      auto happens = [&](const std::string& f, const Term& id) {
        evidence.push_back(Atom{"HappensAt", {Term::function(f, {id}), time}, false});
      };
      if (p.rule == "move") {
        if (positive) {
          happens("walking", ta);
          happens("walking", tb);
          evidence.push_back(Atom{"Close", {ta, tb, Term::constant("24"), time}, false});
        } else {
          happens("exit", ta);
          happens("walking", tb);
        }
      } else {  // meet
        if (positive) {
          happens("active", ta);
          happens("inactive", tb);
          evidence.push_back(Atom{"Close", {ta, tb, Term::constant("25"), time}, false});
        } else {
          happens("walking", ta);
          happens("active", tb);
        }
      }

      bool hidden = p.placement == Placement::WholeBatch ? !labelled_batches.count(b)
                                                         : !keep.count(i);
      Label label = hidden ? Label::Unknown : (positive ? Label::Positive : Label::Negative);

      out.truth[render(query)] = positive ? 1 : -1;
      for (const Atom& e : evidence) {
        batch.evidence_atoms.emplace_back(e, true);
        stream_os << render(e) << '\n';
        truth_os << render(e) << '\n';
      }
      Atom q_neg = query;
      q_neg.negated = true;
      stream_os << (hidden ? "?" + render(query)
                           : (positive ? render(query) : render(q_neg)))
                << '\n';
      truth_os << (positive ? render(query) : render(q_neg)) << '\n';
      batch.query_atoms.emplace_back(query, label);
    }
    out.batches.push_back(std::move(batch));
  }
  out.stream_text = stream_os.str();
  out.truth_text = truth_os.str();
  return out;
}

}  // namespace relabel
