#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmgd/graph.hpp"
#include "dmgd/rng.hpp"

namespace dmgd {

inline constexpr double kChainTol = 1e-10;

struct ChainCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ChainReport {
  std::vector<ChainCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Validation of a row-stochastic matrix as an irreducible aperiodic chain.
// Irreducibility: strong connectivity of the positive-entry digraph.
// Aperiodicity: entrywise positivity of H^w at the Wielandt exponent
// w = (M-1)^2 + 1, computed over booleans.
template <typename Scalar>
ChainReport validate_chain(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& H) {
  const int M = static_cast<int>(H.rows());
  if (H.cols() != M)
    throw std::invalid_argument("validate_chain: matrix must be square");
  ChainReport rep;

  ChainCheck stoch{"row_stochastic", true, ""};
  double worst = 0.0;
  for (int i = 0; i < M; ++i) {
    worst = std::max(worst,
                     std::abs(static_cast<double>(H.row(i).sum()) - 1.0));
    for (int j = 0; j < M; ++j)
      if (H(i, j) < -kChainTol) stoch.pass = false;
  }
  if (worst > kChainTol) stoch.pass = false;
  stoch.detail = "max row-sum deviation " + std::to_string(worst);
  rep.checks.push_back(stoch);

  std::vector<std::vector<char>> pos(M, std::vector<char>(M, 0));
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) pos[i][j] = H(i, j) > 0 ? 1 : 0;

  // Strong connectivity via forward and backward reachability from state 0.
  auto reachable = [&](bool forward) {
    std::vector<char> seen(M, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < M; ++w) {
        const bool edge = forward ? pos[v][w] : pos[w][v];
        if (edge && !seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    for (int i = 0; i < M; ++i)
      if (!seen[i]) return false;
    return true;
  };
  ChainCheck irr{"irreducible", reachable(true) && reachable(false), ""};
  rep.checks.push_back(irr);

  ChainCheck aper{"aperiodic", true, ""};
  if (irr.pass) {
    const long long w = static_cast<long long>(M - 1) * (M - 1) + 1;
    // Boolean matrix power via binary exponentiation.
    auto mul = [&](const std::vector<std::vector<char>>& a,
                   const std::vector<std::vector<char>>& b) {
      std::vector<std::vector<char>> c(M, std::vector<char>(M, 0));
      for (int i = 0; i < M; ++i)
        for (int k2 = 0; k2 < M; ++k2)
          if (a[i][k2])
            for (int j = 0; j < M; ++j)
              if (b[k2][j]) c[i][j] = 1;
      return c;
    };
    std::vector<std::vector<char>> acc(M, std::vector<char>(M, 0));
    for (int i = 0; i < M; ++i) acc[i][i] = 1;
    auto base = pos;
    long long e = w;
    while (e > 0) {
      if (e & 1) acc = mul(acc, base);
      base = mul(base, base);
      e >>= 1;
    }
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j)
        if (!acc[i][j]) aper.pass = false;
    aper.detail = "primitivity at Wielandt exponent " + std::to_string(w);
  } else {
    aper.pass = false;
    aper.detail = "skipped: chain is reducible";
  }
  rep.checks.push_back(aper);

  return rep;
}

// Finite-state time-homogeneous Markov chain with its stationary law and
// spectral summary. Immutable after construction.
template <typename Scalar>
struct FiniteMarkovChainT {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  Matrix H;
  RowVector pi_star;
  Scalar lambda2_abs = 0;  // second-largest eigenvalue modulus
  Scalar lambda_min = 0;   // smallest real part among eigenvalues (reporting)
  Scalar lambda_hat = 0;   // (max{|lambda2|, |lambda_min|} + 1) / 2

  int states() const { return static_cast<int>(H.rows()); }

  Matrix stationary_matrix() const {
    const int M = states();
    Matrix Pi(M, M);
    for (int i = 0; i < M; ++i) Pi.row(i) = pi_star;
    return Pi;
  }
};

using FiniteMarkovChain = FiniteMarkovChainT<double>;

namespace detail {

template <typename Scalar>
void populate_chain_fields(FiniteMarkovChainT<Scalar>& chain) {
  using Matrix = typename FiniteMarkovChainT<Scalar>::Matrix;
  const int M = chain.states();

  // Stationary law: solve pi (H - I) = 0 with the normalization sum(pi) = 1,
  // by replacing one column of (H - I)^T with ones.
  Matrix A = (chain.H - Matrix::Identity(M, M)).transpose();
  A.row(M - 1).setOnes();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rhs =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(M);
  rhs(M - 1) = 1;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> pi =
      A.colPivHouseholderQr().solve(rhs);
  chain.pi_star = pi.transpose();

  // Spectral summary from the full (possibly complex) spectrum: drop one
  // unit eigenvalue, then take moduli.
  Eigen::EigenSolver<Matrix> es(chain.H);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("markov: eigen-decomposition failed");
  std::vector<double> moduli;
  double min_real = 1.0;
  int unit_dropped = 0;
  for (int i = 0; i < M; ++i) {
    const std::complex<double> ev(
        static_cast<double>(es.eigenvalues()(i).real()),
        static_cast<double>(es.eigenvalues()(i).imag()));
    min_real = std::min(min_real, ev.real());
    if (!unit_dropped && std::abs(ev - std::complex<double>(1.0, 0.0)) < 1e-8) {
      ++unit_dropped;
      continue;
    }
    moduli.push_back(std::abs(ev));
  }
  double second = 0.0;
  for (double v : moduli) second = std::max(second, v);
  chain.lambda2_abs = Scalar(second);
  chain.lambda_min = Scalar(min_real);
  chain.lambda_hat =
      Scalar((std::max(second, std::abs(min_real)) + 1.0) / 2.0);
}

}  // namespace detail

// Wraps an explicit row-stochastic matrix; rejects chains that are not
// irreducible and aperiodic, naming the failed property.
template <typename Scalar = double>
FiniteMarkovChainT<Scalar> build_explicit_chain(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& H) {
  const ChainReport rep = validate_chain(H);
  for (const auto& c : rep.checks)
    if (!c.pass)
      throw std::invalid_argument("build_explicit_chain: chain fails '" +
                                  c.name + "' check");
  FiniteMarkovChainT<Scalar> chain;
  chain.H = H;
  detail::populate_chain_fields(chain);
  return chain;
}

// Lazy random walk on a connected state graph: H_ii = 1/2 and
// H_ij = 1/(2 deg_i) for neighbors. Laziness makes the chain aperiodic.
template <typename Scalar = double>
FiniteMarkovChainT<Scalar> build_random_walk_chain(const CommGraph& g) {
  if (!g.connected())
    throw std::invalid_argument(
        "build_random_walk_chain: state graph must be connected");
  const int M = g.m;
  typename FiniteMarkovChainT<Scalar>::Matrix H;
  H.setZero(M, M);
  const auto adj = g.adjacency();
  for (int i = 0; i < M; ++i) {
    H(i, i) = Scalar(1) / Scalar(2);
    for (int j : adj[i]) H(i, j) = Scalar(1) / Scalar(2 * adj[i].size());
  }
  return build_explicit_chain<Scalar>(H);
}

// Chain whose every row equals the uniform law: sampling is i.i.d. uniform.
template <typename Scalar = double>
FiniteMarkovChainT<Scalar> build_uniform_chain(int M) {
  if (M < 1) throw std::invalid_argument("build_uniform_chain: M >= 1");
  typename FiniteMarkovChainT<Scalar>::Matrix H =
      FiniteMarkovChainT<Scalar>::Matrix::Constant(M, M,
                                                   Scalar(1) / Scalar(M));
  FiniteMarkovChainT<Scalar> chain;
  chain.H = H;
  detail::populate_chain_fields(chain);
  return chain;
}

// Max entrywise |Pi* - H^k|. The deviation is propagated directly
// (delta^{k+1} = delta^k H) with the invariant component projected out each
// step, which keeps the tiny late-k values accurate in double precision.
template <typename Scalar>
double deviation_sup(const FiniteMarkovChainT<Scalar>& chain, int k) {
  if (k < 0) throw std::invalid_argument("deviation_sup: k must be >= 0");
  using Matrix = typename FiniteMarkovChainT<Scalar>::Matrix;
  const int M = chain.states();
  Matrix delta = chain.stationary_matrix() - Matrix::Identity(M, M);
  auto project = [&](Matrix& d) {
    for (int i = 0; i < M; ++i)
      d.row(i) -= d.row(i).sum() * chain.pi_star;
  };
  project(delta);
  for (int j = 0; j < k; ++j) {
    delta = (delta * chain.H).eval();
    project(delta);
  }
  return static_cast<double>(delta.array().abs().maxCoeff());
}

// Fits the deviation-decay constant C as max_k deviation_sup(k)/lambda_hat^k
// over k in 0..fit_horizon. Diagnostic for the geometric mixing bound.
template <typename Scalar>
double fit_deviation_constant(const FiniteMarkovChainT<Scalar>& chain,
                              int fit_horizon = 50) {
  double c = 0.0;
  double pw = 1.0;
  for (int k = 0; k <= fit_horizon; ++k) {
    c = std::max(c, deviation_sup(chain, k) / pw);
    pw *= static_cast<double>(chain.lambda_hat);
  }
  return c;
}

// Mixing-index horizon: min{ max{ ceil(ln(k/(2 C_H B^2)) / ln(1/lambda)),
// K_H }, k }. Diagnostic only; never consumed by the optimizers.
inline long long mixing_index(long long k, double c_h, double grad_bound,
                              double lambda_hat, long long k_h) {
  if (k < 1) throw std::invalid_argument("mixing_index: k must be >= 1");
  if (!(c_h > 0.0)) throw std::invalid_argument("mixing_index: C_H > 0");
  if (!(grad_bound > 0.0)) throw std::invalid_argument("mixing_index: B > 0");
  if (!(lambda_hat > 0.0 && lambda_hat < 1.0))
    throw std::invalid_argument("mixing_index: lambda must be in (0, 1)");
  const double ratio =
      std::log(static_cast<double>(k) / (2.0 * c_h * grad_bound * grad_bound)) /
      std::log(1.0 / lambda_hat);
  const long long ceiling = static_cast<long long>(std::ceil(ratio));
  return std::min(std::max(ceiling, k_h), k);
}

// Single-owner sampling cursor along a chain trajectory.
class TrajectoryCursor {
 public:
  TrajectoryCursor(int initial_state, std::uint64_t master_seed,
                   std::uint64_t node)
      : state_(initial_state),
        initial_state_(initial_state),
        rng_(master_seed, node, StreamPurpose::chain),
        steps_(0) {}

  int state() const { return state_; }
  std::uint64_t steps() const { return steps_; }

  template <typename Scalar>
  int step(const FiniteMarkovChainT<Scalar>& chain) {
    Eigen::RowVectorXd row = chain.H.row(state_).template cast<double>();
    state_ = rng_.discrete(row);
    ++steps_;
    return state_;
  }

  // Fresh trajectory restart from the configured initial state. The RNG
  // stream continues, so successive trajectories are independent.
  void restart() { state_ = initial_state_; }

 private:
  int state_;
  int initial_state_;
  Rng rng_;
  std::uint64_t steps_;
};

}  // namespace dmgd
