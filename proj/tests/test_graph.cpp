#include <catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace relabel;

namespace {

Vertex V(std::vector<std::string> evidence) {
  Vertex v;
  v.query = A("HoldsAt(move(ID1,ID2),1)");
  for (const auto& e : evidence) v.evidence.push_back(A(e));
  return v;
}

WeightMatrix from_rows(const std::vector<std::vector<double>>& rows) {
  WeightMatrix m = WeightMatrix::zero(rows.size(), 1);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j) m.at(i, j) = rows[i][j];
  return m;
}

}  // namespace

TEST_CASE("build_weights: symmetric, zero diagonal, pairwise similarity") {
  std::vector<Vertex> vs = {
      V({"HappensAt(walking(ID1),1)"}),
      V({"HappensAt(walking(ID1),1)"}),
      V({"Person(ID1)"}),
  };
  WeightMatrix m = build_weights(vs, 1);
  REQUIRE(m.n == 3);
  REQUIRE(m.labelled == 1);
  REQUIRE(m.at(0, 0) == 0.0);
  REQUIRE(m.at(0, 1) == 1.0);  // identical evidence
  REQUIRE(m.at(0, 2) == 0.0);  // fully mismatched singletons
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) REQUIRE(m.at(i, j) == m.at(j, i));
}

TEST_CASE("connect_enn thresholds entries") {
  WeightMatrix m = from_rows({{0, 0.9, 0.5}, {0.9, 0, 0.2}, {0.5, 0.2, 0}});
  WeightMatrix keep_all = connect_enn(m, 0.0);
  REQUIRE(keep_all.w == m.w);

  WeightMatrix half = connect_enn(m, 0.5);
  REQUIRE(half.at(0, 1) == 0.9);
  REQUIRE(half.at(0, 2) == 0.5);
  REQUIRE(half.at(1, 2) == 0.0);

  WeightMatrix exact = connect_enn(m, 1.0);
  for (double x : exact.w) REQUIRE(x == 0.0);
}

TEST_CASE("connect_knn keeps top-k distinct weight values per vertex") {
  // Vertex 0's neighbourhood: weights 0.9, 0.9, 0.8, 0.5. Top-2 distinct
  // values are {0.9, 0.8}, so three edges survive by vertex 0's selection.
  WeightMatrix m = from_rows({{0, 0.9, 0.9, 0.8, 0.5},
                              {0.9, 0, 0, 0, 0},
                              {0.9, 0, 0, 0, 0},
                              {0.8, 0, 0, 0, 0},
                              {0.5, 0, 0, 0, 0}});
  WeightMatrix out = connect_knn(m, 2);
  REQUIRE(out.at(0, 1) == 0.9);
  REQUIRE(out.at(0, 2) == 0.9);
  REQUIRE(out.at(0, 3) == 0.8);
  // 0.5 edge survives anyway: it is vertex 4's only (hence top) weight.
  REQUIRE(out.at(0, 4) == 0.5);
}

TEST_CASE("knn selection is unioned over endpoints") {
  // Edge (1,2): weight 0.1 is not in vertex 1's top-1, but it is vertex 2's
  // best edge, so it must survive.
  WeightMatrix m = from_rows({{0, 0.9, 0}, {0.9, 0, 0.1}, {0, 0.1, 0}});
  WeightMatrix out = connect_knn(m, 1);
  REQUIRE(out.at(1, 2) == 0.1);
  REQUIRE(out.at(0, 1) == 0.9);
}

TEST_CASE("knn edge cases") {
  WeightMatrix m = from_rows({{0, 0.9, 0.5}, {0.9, 0, 0.2}, {0.5, 0.2, 0}});
  REQUIRE(connect_knn(m, 10).w == m.w);  // k beyond distinct count keeps all

  WeightMatrix equal = from_rows({{0, 0.4, 0.4}, {0.4, 0, 0.4}, {0.4, 0.4, 0}});
  REQUIRE(connect_knn(equal, 1).w == equal.w);  // single distinct value, all kept

  WeightMatrix zero = WeightMatrix::zero(3, 1);
  REQUIRE(connect_knn(zero, 1).w == zero.w);  // zero weights are never selected
}

TEST_CASE("sparsification invariants on random matrices") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int iter = 0; iter < 50; ++iter) {
    std::size_t n = 2 + iter % 7;
    WeightMatrix m = WeightMatrix::zero(n, 1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double w = uni(rng) < 0.3 ? 0.0 : uni(rng);
        m.at(i, j) = w;
        m.at(j, i) = w;
      }

    for (const WeightMatrix& s : {connect_knn(m, 2), connect_enn(m, 0.4)}) {
      for (std::size_t i = 0; i < n; ++i) {
        REQUIRE(s.at(i, i) == 0.0);
        for (std::size_t j = 0; j < n; ++j) {
          REQUIRE(s.at(i, j) == s.at(j, i));
          if (s.at(i, j) != 0.0) REQUIRE(s.at(i, j) == m.at(i, j));
        }
      }
    }

    // Monotonicity: larger k / smaller epsilon never removes an edge.
    WeightMatrix k2 = connect_knn(m, 2), k3 = connect_knn(m, 3);
    WeightMatrix e6 = connect_enn(m, 0.6), e4 = connect_enn(m, 0.4);
    for (std::size_t x = 0; x < n * n; ++x) {
      if (k2.w[x] != 0.0) REQUIRE(k3.w[x] == k2.w[x]);
      if (e6.w[x] != 0.0) REQUIRE(e4.w[x] == e6.w[x]);
    }
  }
}
