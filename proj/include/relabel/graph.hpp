#pragma once

// Pairwise similarity matrix over example vertices and the two connection
// heuristics (epsilon-threshold and modified kNN) that sparsify it.

#include <algorithm>
#include <ostream>
#include <set>
#include <vector>

#include "relabel/distance.hpp"

namespace relabel {

struct WeightMatrix {
  std::size_t n = 0;
  std::size_t labelled = 0;  // vertex order: labelled first, then unlabelled
  std::vector<double> w;     // n x n, symmetric, zero diagonal

  double at(std::size_t i, std::size_t j) const { return w[i * n + j]; }
  double& at(std::size_t i, std::size_t j) { return w[i * n + j]; }

  static WeightMatrix zero(std::size_t n, std::size_t labelled) {
    return {n, labelled, std::vector<double>(n * n, 0.0)};
  }
};

// Vertices must already be ordered labelled-first; `labelled` records the cut.
inline WeightMatrix build_weights(const std::vector<Vertex>& vs, std::size_t labelled) {
  WeightMatrix m = WeightMatrix::zero(vs.size(), labelled);
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      double z = similarity(vs[i], vs[j]);
      m.at(i, j) = z;
      m.at(j, i) = z;
    }
  return m;
}

// Keep only edges with similarity >= epsilon.
inline WeightMatrix connect_enn(const WeightMatrix& m, double epsilon) {
  WeightMatrix out = m;
  for (double& x : out.w)
    if (x < epsilon) x = 0.0;
  for (std::size_t i = 0; i < out.n; ++i) out.at(i, i) = 0.0;
  return out;
}

// Modified kNN: each vertex selects every edge whose weight is among the top
// k distinct nonzero values in its row; an edge survives if either endpoint
// selects it, which keeps the result symmetric.
inline WeightMatrix connect_knn(const WeightMatrix& m, int k) {
  std::vector<double> cutoff(m.n, 0.0);
  for (std::size_t i = 0; i < m.n; ++i) {
    std::set<double, std::greater<double>> values;
    for (std::size_t j = 0; j < m.n; ++j)
      if (j != i && m.at(i, j) > 0.0) values.insert(m.at(i, j));
    double c = 0.0;
    int taken = 0;
    for (double v : values) {
      c = v;
      if (++taken == k) break;
    }
    // No nonzero weights: cutoff stays 0 and selects nothing below.
    cutoff[i] = values.empty() ? 2.0 : c;
  }

  WeightMatrix out = WeightMatrix::zero(m.n, m.labelled);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = i + 1; j < m.n; ++j) {
      double w = m.at(i, j);
      if (w > 0.0 && (w >= cutoff[i] || w >= cutoff[j])) {
        out.at(i, j) = w;
        out.at(j, i) = w;
      }
    }
  return out;
}

// Debug dump: one row per line, space-separated.
inline void dump_weights(const WeightMatrix& m, std::ostream& os) {
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) {
      if (j) os << ' ';
      os << m.at(i, j);
    }
    os << '\n';
  }
}

}  // namespace relabel
