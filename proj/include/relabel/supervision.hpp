#pragma once

// The online completion loop: cache unique lifted labelled examples, filter
// contradictions with the Hoeffding bound, and complete each micro-batch by
// a harmonic solve over cached labelled plus current unlabelled vertices.

#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "relabel/harmonic.hpp"

namespace relabel {

inline double hoeffding_epsilon(long n, double delta) {
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

struct CacheEntry {
  Clause clause;
  Vertex representative;  // first ground occurrence of the clause class
  long count = 0;
};

struct LabelCache {
  std::vector<CacheEntry> entries;            // insertion order
  std::map<std::string, std::size_t> index;   // clause rendering -> entry slot

  CacheEntry* find(const std::string& rendering) {
    auto it = index.find(rendering);
    return it == index.end() ? nullptr : &entries[it->second];
  }
  const CacheEntry* find(const std::string& rendering) const {
    auto it = index.find(rendering);
    return it == index.end() ? nullptr : &entries[it->second];
  }
  void insert(Clause c, Vertex rep) {
    index.emplace(c.rendering, entries.size());
    entries.push_back({std::move(c), std::move(rep), 1});
  }
  std::size_t size() const { return entries.size(); }
};

enum class Connector { Knn, Enn };

struct CompletionConfig {
  Connector connector = Connector::Knn;
  int k = 2;              // kNN neighbourhood size
  double epsilon = 0.75;  // eNN similarity threshold
  double delta = 0.0001;  // Hoeffding confidence
  std::string query_predicate;
  Schema schema;
  std::vector<ModeDeclaration> modes;
  // Diagnostics: called with each batch's sparsified weight matrix.
  std::function<void(const WeightMatrix&)> on_weights;
};

struct StreamSummary {
  long batches = 0;
  long query_atoms = 0;
  long labelled_given = 0;
  long completed = 0;
  long evidence_atoms = 0;   // evidence atoms ingested; single-pass counter
  long filtered_out = 0;     // cache entries suppressed in the last batch
  std::size_t cache_entries = 0;
  std::size_t peak_cache_entries = 0;
  long empty_labelled_batches = 0;  // batches defaulted to all-negative
};

struct StreamState {
  CompletionConfig config;
  LabelCache cache;
  long batch_counter = 0;
  StreamSummary summary;
};

// Alg. update-and-filter: bump or insert each incoming labelled vertex by its
// lifted clause, then emit every cached entry not dominated by its opposite.
// An entry is suppressed only while the opposite clause leads by more than
// the Hoeffding margin; both sides survive a tie, and new observations can
// reverse the decision in later batches.
inline std::vector<Vertex> cache_update_and_filter(const std::vector<Vertex>& labelled,
                                                   StreamState& state) {
  for (const Vertex& v : labelled) {
    Clause c = lift(v.query, v.label == Label::Positive, v.evidence,
                    state.config.modes, state.config.schema);
    if (CacheEntry* e = state.cache.find(c.rendering))
      ++e->count;
    else
      state.cache.insert(std::move(c), v);
  }

  std::vector<Vertex> filtered;
  long suppressed = 0;
  for (const CacheEntry& e : state.cache.entries) {
    const CacheEntry* opp = state.cache.find(opposite(e.clause).rendering);
    if (opp) {
      const double n = static_cast<double>(e.count + opp->count);
      const double p = static_cast<double>(e.count) / n;
      const double p_opp = static_cast<double>(opp->count) / n;
      const double eps = hoeffding_epsilon(e.count + opp->count, state.config.delta);
      if (p_opp - p > eps) {  // the opposite dominates: drop this side
        ++suppressed;
        continue;
      }
    }
    filtered.push_back(e.representative);
  }
  state.summary.filtered_out = suppressed;
  return filtered;
}

struct CompletedAtom {
  Atom atom;       // query atom, negation cleared
  int label = 0;   // +/-1
  bool given = false;
};

// Completes one micro-batch. Given labels pass through verbatim; unlabelled
// query atoms receive the thresholded harmonic values, or -1 when no labelled
// side exists (closed-world fallback, reported through `warnings`).
inline std::vector<CompletedAtom> process_batch(const MicroBatch& batch, StreamState& state,
                                                std::ostream* warnings = nullptr) {
  ++state.batch_counter;
  ++state.summary.batches;
  for (const auto& [e, truth] : batch.evidence_atoms) {
    (void)e;
    (void)truth;
    ++state.summary.evidence_atoms;
  }

  std::vector<Vertex> vertices = partition(batch, state.config.modes, state.config.schema);
  auto [labelled, unlabelled] = split_by_label(vertices);
  state.summary.query_atoms += static_cast<long>(vertices.size());
  state.summary.labelled_given += static_cast<long>(labelled.size());

  std::vector<Vertex> cached = cache_update_and_filter(labelled, state);
  state.summary.cache_entries = state.cache.size();
  state.summary.peak_cache_entries =
      std::max(state.summary.peak_cache_entries, state.cache.size());

  // Inferred labels for unlabelled vertices, keyed by query rendering.
  std::map<std::string, int> inferred;
  if (!unlabelled.empty()) {
    state.summary.completed += static_cast<long>(unlabelled.size());
    if (cached.empty()) {
      ++state.summary.empty_labelled_batches;
      if (warnings)
        *warnings << "warning: batch " << batch.batch_index
                  << " has no labelled examples to draw from; defaulting "
                  << unlabelled.size() << " completions to negative\n";
      for (const Vertex& v : unlabelled) inferred[render(v.query)] = -1;
    } else {
      std::vector<Vertex> graph_vertices = cached;
      graph_vertices.insert(graph_vertices.end(), unlabelled.begin(), unlabelled.end());
      std::vector<double> y_l;
      y_l.reserve(cached.size());
      for (const Vertex& v : cached) y_l.push_back(v.label == Label::Positive ? 1.0 : -1.0);

      WeightMatrix w = build_weights(graph_vertices, cached.size());
      WeightMatrix wp = state.config.connector == Connector::Knn
                            ? connect_knn(w, state.config.k)
                            : connect_enn(w, state.config.epsilon);
      if (state.config.on_weights) state.config.on_weights(wp);
      HarmonicSolution sol = solve(wp, y_l);
      for (std::size_t i = 0; i < unlabelled.size(); ++i)
        inferred[render(unlabelled[i].query)] = sol.labels_u[i];
    }
  }

  std::vector<CompletedAtom> out;
  out.reserve(batch.query_atoms.size());
  for (const auto& [q, label] : batch.query_atoms) {
    CompletedAtom c;
    c.atom = q;
    c.atom.negated = false;
    if (label == Label::Unknown) {
      c.label = inferred.at(render(c.atom));
      c.given = false;
    } else {
      c.label = label == Label::Positive ? 1 : -1;
      c.given = true;
    }
    out.push_back(std::move(c));
  }
  return out;
}

// Strictly sequential fold over the stream; per-batch failures are rethrown
// with the offending batch index attached.
inline std::vector<std::vector<CompletedAtom>> run_stream(
    const std::vector<MicroBatch>& batches, StreamState& state,
    std::ostream* warnings = nullptr) {
  std::vector<std::vector<CompletedAtom>> out;
  out.reserve(batches.size());
  for (const MicroBatch& b : batches) {
    try {
      out.push_back(process_batch(b, state, warnings));
    } catch (const NumericalError& e) {
      throw NumericalError("batch " + std::to_string(b.batch_index) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("batch " + std::to_string(b.batch_index) + ": " + e.what(), e.offset);
    }
  }
  return out;
}

}  // namespace relabel
