#pragma once

// Structural distance between ground expressions, minimum-cost assignment
// over atom sets, and the vertex similarity derived from it.

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "relabel/partition.hpp"

namespace relabel {

// d(e,e) = 0; differing symbols, arities or polarities give 1; otherwise the
// distance recurses over the argument pairs scaled by 1/(2k).
inline double atom_distance(const Term& a, const Term& b) {
  if (a.symbol != b.symbol || a.args.size() != b.args.size()) return 1.0;
  if (a.args.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.args.size(); ++i) sum += atom_distance(a.args[i], b.args[i]);
  return sum / (2.0 * static_cast<double>(a.args.size()));
}

inline double atom_distance(const Atom& a, const Atom& b) {
  // A negated predicate is a distinct symbol: distance 1 to its positive form.
  if (a.predicate != b.predicate || a.negated != b.negated ||
      a.args.size() != b.args.size())
    return 1.0;
  if (a.args.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.args.size(); ++i) sum += atom_distance(a.args[i], b.args[i]);
  return sum / (2.0 * static_cast<double>(a.args.size()));
}

// ---------------------------------------------------------------------------
// Minimum-cost perfect assignment (Kuhn-Munkres), O(n^3).

struct CostMatrix {
  std::size_t size = 0;     // square dimension after padding
  std::size_t rows = 0;     // original set sizes
  std::size_t cols = 0;
  std::vector<double> entries;  // size x size, row-major; padded cells are 0

  double at(std::size_t i, std::size_t j) const { return entries[i * size + j]; }
  double& at(std::size_t i, std::size_t j) { return entries[i * size + j]; }

  static CostMatrix square(std::size_t n) {
    return {n, n, n, std::vector<double>(n * n, 0.0)};
  }
};

struct Assignment {
  std::vector<std::pair<int, int>> mapping;  // (row, column), a permutation
  double total_cost = 0.0;
};

inline Assignment hungarian(const CostMatrix& c) {
  const int n = static_cast<int>(c.size);
  Assignment result;
  if (n == 0) return result;

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = c.at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  result.mapping.resize(n);
  for (int j = 1; j <= n; ++j) result.mapping[p[j] - 1] = {p[j] - 1, j - 1};
  for (const auto& [i, j] : result.mapping) result.total_cost += c.at(i, j);
  return result;
}

// ---------------------------------------------------------------------------
// Set distance: pad the pairwise-distance matrix square with zeros, take the
// optimal assignment and charge each unmatched atom the maximal distance 1.

inline CostMatrix pairwise_costs(const std::vector<Atom>& e1, const std::vector<Atom>& e2) {
  const std::size_t m = std::max(e1.size(), e2.size());
  CostMatrix c = CostMatrix::square(m);
  c.rows = e1.size();
  c.cols = e2.size();
  for (std::size_t i = 0; i < e1.size(); ++i)
    for (std::size_t j = 0; j < e2.size(); ++j) c.at(i, j) = atom_distance(e1[i], e2[j]);
  return c;
}

inline double set_distance(const std::vector<Atom>& e1, const std::vector<Atom>& e2) {
  const std::size_t m = std::max(e1.size(), e2.size());
  const std::size_t k = std::min(e1.size(), e2.size());
  if (m == 0) return 0.0;  // two empty structures are identical
  Assignment a = hungarian(pairwise_costs(e1, e2));
  return (static_cast<double>(m - k) + a.total_cost) / static_cast<double>(m);
}

// Similarity of two vertices over their evidence context; the query atoms
// themselves take no part, so labels never leak into the geometry.
inline double similarity(const Vertex& v1, const Vertex& v2) {
  return 1.0 - set_distance(v1.evidence, v2.evidence);
}

}  // namespace relabel
