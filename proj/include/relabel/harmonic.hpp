#pragma once

// Closed-form harmonic labelling: clamp the given labels, solve
// L_uu f_u = -L_ul y_l on the sparsified graph, threshold to +/-1.

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <vector>

#include "relabel/errors.hpp"
#include "relabel/graph.hpp"

namespace relabel {

// Diagonal jitter keeping L_uu positive definite for any nonnegative graph;
// also the label threshold, so f = 0 maps to the negative class.
inline constexpr double kJitter = 1e-9;
inline constexpr double kTau = 1e-9;

struct HarmonicSolution {
  std::vector<double> f_l;   // clamped labelled values (+/-1)
  std::vector<double> f_u;   // relaxed values for unlabelled vertices
  std::vector<int> labels_u; // thresholded +/-1
};

inline Eigen::MatrixXd laplacian(const WeightMatrix& wp) {
  const auto n = static_cast<Eigen::Index>(wp.n);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double degree = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      double w = wp.at(i, j);
      degree += w;
      l(i, j) = -w;
    }
    l(i, i) = degree;
  }
  return l;
}

inline std::vector<int> threshold(const std::vector<double>& f_u) {
  std::vector<int> out(f_u.size());
  for (std::size_t i = 0; i < f_u.size(); ++i) out[i] = f_u[i] < kTau ? -1 : 1;
  return out;
}

inline HarmonicSolution solve(const WeightMatrix& wp, const std::vector<double>& y_l) {
  const auto n = static_cast<Eigen::Index>(wp.n);
  const auto l = static_cast<Eigen::Index>(y_l.size());
  const auto u = n - l;
  if (l < 1 || u < 1)
    throw ConfigError("harmonic solve needs at least one labelled and one unlabelled vertex");

  Eigen::MatrixXd lap = laplacian(wp);
  Eigen::MatrixXd l_uu = lap.block(l, l, u, u);
  Eigen::MatrixXd l_ul = lap.block(l, 0, u, l);
  l_uu.diagonal().array() += kJitter;

  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(y_l.data(), l);
  Eigen::VectorXd b = -l_ul * y;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(l_uu);
  Eigen::VectorXd f = lu.solve(b);

  double residual = (l_uu * f - b).norm();
  double scale = b.norm() + 1.0;
  if (!f.allFinite() || residual / scale > 1e-6) {
    std::ostringstream msg;
    msg << "harmonic system unsolvable after regularization; relative residual "
        << residual / scale << ", rcond estimate " << lu.rcond();
    throw NumericalError(msg.str());
  }

  HarmonicSolution sol;
  sol.f_l = y_l;
  sol.f_u.assign(f.data(), f.data() + u);
  sol.labels_u = threshold(sol.f_u);
  return sol;
}

}  // namespace relabel
