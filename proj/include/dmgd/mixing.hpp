#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmgd/graph.hpp"

namespace dmgd {

// Symmetric doubly stochastic weight matrix on a communication graph,
// together with its (real) spectrum. Immutable after construction.
template <typename Scalar>
struct MixingMatrixT {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix W;
  Vector eigenvalues;  // sorted nonincreasing, eigenvalues(0) == 1
  Scalar lambda2 = 0;  // max |eigenvalue| over the non-principal spectrum

  int size() const { return static_cast<int>(W.rows()); }

  // Averaging projector P = 11^T / m.
  Matrix consensus_projector() const {
    const int m = size();
    return Matrix::Constant(m, m, Scalar(1) / Scalar(m));
  }
};

using MixingMatrix = MixingMatrixT<double>;

namespace detail {

template <typename Scalar>
void populate_spectrum(MixingMatrixT<Scalar>& mm) {
  Eigen::SelfAdjointEigenSolver<typename MixingMatrixT<Scalar>::Matrix> es(
      mm.W);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("mixing: eigen-decomposition failed");
  auto ev = es.eigenvalues();  // ascending
  const int m = static_cast<int>(ev.size());
  mm.eigenvalues.resize(m);
  for (int i = 0; i < m; ++i) mm.eigenvalues(i) = ev(m - 1 - i);
  mm.lambda2 = 0;
  for (int i = 1; i < m; ++i)
    mm.lambda2 = std::max(mm.lambda2, std::abs(mm.eigenvalues(i)));
}

}  // namespace detail

// Metropolis-Hastings weights: w_il = 1/(1 + max(deg_i, deg_l)) on edges,
// diagonal takes the slack. Satisfies all four mixing-matrix properties on
// any connected graph.
template <typename Scalar = double>
MixingMatrixT<Scalar> metropolis_weights(const CommGraph& g) {
  if (!g.connected())
    throw std::invalid_argument("metropolis_weights: graph must be connected");
  const int m = g.m;
  std::vector<int> deg(m);
  for (int i = 0; i < m; ++i) deg[i] = g.degree(i);
  MixingMatrixT<Scalar> mm;
  mm.W.setZero(m, m);
  for (const auto& [i, l] : g.edges) {
    const Scalar w = Scalar(1) / Scalar(1 + std::max(deg[i], deg[l]));
    mm.W(i, l) = w;
    mm.W(l, i) = w;
  }
  for (int i = 0; i < m; ++i) mm.W(i, i) = Scalar(1) - mm.W.row(i).sum();
  detail::populate_spectrum(mm);
  return mm;
}

// Wraps an externally supplied matrix (e.g. loaded from file); computes the
// spectrum but performs no validation beyond symmetry of storage.
template <typename Scalar = double>
MixingMatrixT<Scalar> wrap_mixing_matrix(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& W) {
  if (W.rows() != W.cols())
    throw std::invalid_argument("wrap_mixing_matrix: matrix must be square");
  MixingMatrixT<Scalar> mm;
  mm.W = (W + W.transpose()) / Scalar(2);  // symmetrize storage noise only
  detail::populate_spectrum(mm);
  return mm;
}

// One line per mixing-matrix property, with the measured violation.
struct MixingCheck {
  std::string name;
  bool pass = false;
  double violation = 0.0;
};

struct MixingReport {
  std::vector<MixingCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

inline constexpr double kMixingTol = 1e-10;

template <typename Scalar>
bool mixing_size_ok(const MixingMatrixT<Scalar>& mm) {
  return mm.size() > 1 && mm.eigenvalues.size() == mm.size();
}

// Checks the four defining properties of a mixing matrix against its graph:
// graph sparsity/positivity, symmetry, null-space (rows sum to one and the
// unit eigenvalue is simple), and the spectral band (-1, 1].
template <typename Scalar>
MixingReport validate_mixing(const MixingMatrixT<Scalar>& mm,
                             const CommGraph& g, double tol = kMixingTol) {
  if (mm.size() != g.m)
    throw std::invalid_argument("validate_mixing: dimension mismatch");
  const auto& W = mm.W;
  const int m = g.m;
  MixingReport rep;

  MixingCheck graph{"graph", true, 0.0};
  for (int i = 0; i < m; ++i)
    for (int l = 0; l < m; ++l) {
      if (i == l) continue;
      if (g.has_edge(i, l)) {
        if (!(W(i, l) > tol)) {
          graph.pass = false;
          graph.violation = std::max(graph.violation,
                                     std::abs(static_cast<double>(W(i, l))));
        }
      } else if (std::abs(W(i, l)) > tol) {
        graph.pass = false;
        graph.violation =
            std::max(graph.violation, std::abs(static_cast<double>(W(i, l))));
      }
    }
  rep.checks.push_back(graph);

  MixingCheck sym{"symmetry", true, 0.0};
  sym.violation = static_cast<double>(
      (W - W.transpose()).template lpNorm<Eigen::Infinity>());
  sym.pass = sym.violation <= tol;
  rep.checks.push_back(sym);

  // null{I - W} = span{1}: rows sum to one and eigenvalue 1 is simple.
  MixingCheck null_space{"null_space", true, 0.0};
  const double row_sum_err = static_cast<double>(
      (W.rowwise().sum().array() - Scalar(1)).abs().maxCoeff());
  double second = 0.0;
  if (mixing_size_ok(mm)) second = static_cast<double>(mm.eigenvalues(1));
  const double gap_err = m > 1 ? std::max(0.0, second - (1.0 - tol)) : 0.0;
  null_space.violation = std::max(row_sum_err, gap_err);
  null_space.pass =
      row_sum_err <= tol && (m == 1 || second < 1.0 - tol);
  rep.checks.push_back(null_space);

  MixingCheck spectral{"spectral", true, 0.0};
  const double top = static_cast<double>(mm.eigenvalues(0));
  const double bottom = static_cast<double>(mm.eigenvalues(mm.size() - 1));
  spectral.violation = std::max(top - 1.0, -1.0 - bottom);
  spectral.pass = top <= 1.0 + tol && bottom > -1.0 + tol;
  rep.checks.push_back(spectral);

  return rep;
}

// Spectral norm of W^k - P. By the contraction lemma this never exceeds
// lambda2^k (plus roundoff).
template <typename Scalar>
double power_deviation(const MixingMatrixT<Scalar>& mm, int k) {
  if (k < 0) throw std::invalid_argument("power_deviation: k must be >= 0");
  using Matrix = typename MixingMatrixT<Scalar>::Matrix;
  const int m = mm.size();
  Matrix Wk = Matrix::Identity(m, m);
  for (int j = 0; j < k; ++j) Wk = (Wk * mm.W).eval();
  const Matrix D = Wk - mm.consensus_projector();
  // D is symmetric, so the operator-2 norm is the largest |eigenvalue|.
  Eigen::SelfAdjointEigenSolver<Matrix> es((D + D.transpose()) / Scalar(2));
  return static_cast<double>(
      es.eigenvalues().array().abs().maxCoeff());
}

}  // namespace dmgd
