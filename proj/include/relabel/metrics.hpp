#pragma once

// Micro-averaged precision / recall / F1 over completed query atoms.

#include <map>
#include <set>
#include <string>

#include "relabel/errors.hpp"

namespace relabel {

struct Metrics {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;

  long evaluated() const { return tp + fp + tn + fn; }
};

// `evaluated` restricts scoring to the atoms that were unknown in the input:
// completion quality only, given labels are never counted. Keys are atom
// renderings with negation stripped; labels are +/-1.
inline Metrics evaluate(const std::map<std::string, int>& predicted,
                        const std::map<std::string, int>& truth,
                        const std::set<std::string>& evaluated) {
  Metrics m;
  for (const std::string& key : evaluated) {
    auto p = predicted.find(key);
    if (p == predicted.end()) continue;  // not completed (e.g. other predicate)
    auto t = truth.find(key);
    if (t == truth.end())
      throw ConfigError("predicted atom missing from ground truth: " + key);
    if (p->second > 0)
      (t->second > 0 ? m.tp : m.fp)++;
    else
      (t->second > 0 ? m.fn : m.tn)++;
  }
  m.precision = (m.tp + m.fp) ? static_cast<double>(m.tp) / (m.tp + m.fp) : 0.0;
  m.recall = (m.tp + m.fn) ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0.0;
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

}  // namespace relabel
