#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "dmgd/rng.hpp"

namespace dmgd {

// Continuous-state chain state for the autoregressive workload: the process
// vector xi1, its noisy binary label xi2, the node's subdiagonal matrix A
// (stored as the subdiagonal coefficients) and the ground-truth direction u.
struct ArChainState {
  Eigen::VectorXd xi1;      // process state, dimension n
  double xi2 = 0.0;         // noisy label in {0, 1}
  Eigen::VectorXd subdiag;  // A_{l,l-1}, length n-1, entries in [0.8, 0.99]
  Eigen::VectorXd u;        // unit ground truth

  int dim() const { return static_cast<int>(xi1.size()); }
};

inline constexpr double kSubdiagLo = 0.8;
inline constexpr double kSubdiagHi = 0.99;
inline constexpr double kLabelFlipProb = 0.2;

// Draws the per-node AR coefficients; u is shared across nodes and drawn
// separately by the workload.
inline ArChainState make_ar_state(int n, const Eigen::VectorXd& u, Rng& rng) {
  if (n < 1) throw std::invalid_argument("make_ar_state: n must be >= 1");
  if (std::abs(u.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("make_ar_state: u must have unit norm");
  ArChainState s;
  s.xi1 = Eigen::VectorXd::Zero(n);
  s.subdiag.resize(std::max(0, n - 1));
  for (int l = 0; l + 1 < n; ++l)
    s.subdiag(l) = rng.uniform(kSubdiagLo, kSubdiagHi);
  s.u = u;
  return s;
}

// One chain transition: xi1 <- A xi1 + e1 w with w ~ N(0,1); the clean label
// is 1 iff <u, xi1> is strictly positive, then flipped with probability 0.2.
// The same rng drives both the Gaussian noise and the label flip so a single
// stream reproduces the whole trajectory.
inline void ar_step(ArChainState& s, Rng& rng) {
  const int n = s.dim();
  // Subdiagonal multiply, in place from the bottom up.
  for (int l = n - 1; l >= 1; --l) s.xi1(l) = s.subdiag(l - 1) * s.xi1(l - 1);
  s.xi1(0) = rng.normal();
  const double clean = s.u.dot(s.xi1) > 0.0 ? 1.0 : 0.0;
  s.xi2 = rng.bernoulli(kLabelFlipProb) ? 1.0 - clean : clean;
}

inline void ar_reset(ArChainState& s) {
  s.xi1.setZero();
  s.xi2 = 0.0;
}

}  // namespace dmgd
