#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmgd/mixing.hpp"
#include "dmgd/rng.hpp"
#include "dmgd/workload.hpp"

namespace dmgd {

// Stack of per-node iterates: row i is node i's local copy.
struct NodeStateMatrix {
  Eigen::MatrixXd x;  // m x n
  long long k = 0;

  int nodes() const { return static_cast<int>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }

  Eigen::VectorXd row_mean() const {
    return x.colwise().mean().transpose();
  }

  // Identical rows x0 on every node.
  static NodeStateMatrix initialize(int m, const VecRef& x0) {
    NodeStateMatrix s;
    s.x.resize(m, x0.size());
    for (int i = 0; i < m; ++i) s.x.row(i) = x0.transpose();
    s.k = 0;
    return s;
  }
};

// Diminishing stepsizes gamma_k = 1/(k+1)^theta with 1/2 < theta < 1; the
// zeroth-order smoothing follows delta_k = delta0/(k+1)^rho with
// theta + rho > 1 so that sum gamma_k delta_k converges.
struct StepSchedule {
  double theta = 0.51;
  double rho = 0.6;
  double delta0 = 1.0;

  StepSchedule() = default;
  StepSchedule(double theta_, double rho_, double delta0_ = 1.0)
      : theta(theta_), rho(rho_), delta0(delta0_) {
    validate(true);
  }

  void validate(bool zeroth_order) const {
    if (!(theta > 0.5 && theta < 1.0))
      throw std::invalid_argument(
          "schedule: theta must lie in the open interval (1/2, 1), got " +
          std::to_string(theta));
    if (zeroth_order) {
      if (!(rho > 0.0) || !(theta + rho > 1.0))
        throw std::invalid_argument(
            "schedule: zeroth-order runs need rho > 0 and theta + rho > 1");
      if (!(delta0 > 0.0))
        throw std::invalid_argument("schedule: delta0 must be positive");
    }
  }

  double gamma(long long k) const {
    return 1.0 / std::pow(static_cast<double>(k + 1), theta);
  }
  double delta(long long k) const {
    return delta0 / std::pow(static_cast<double>(k + 1), rho);
  }
};

namespace detail {
inline void check_finite(const Eigen::MatrixXd& g, long long k) {
  if (!g.allFinite())
    throw std::runtime_error("optimizer: non-finite gradient at iteration " +
                             std::to_string(k));
}
}  // namespace detail

// One synchronous DMGD round: every node samples one chain transition,
// evaluates its gradient at its own pre-mixing iterate, and the new stack is
// W x - gamma u. Returns the gradient stack u^k.
inline Eigen::MatrixXd dmgd_step(NodeStateMatrix& s, const MixingMatrix& W,
                                 Workload& w, double gamma) {
  const int m = s.nodes();
  if (W.size() != m)
    throw std::invalid_argument("dmgd_step: mixing matrix dimension mismatch");
  Eigen::MatrixXd u(m, s.dim());
  for (int i = 0; i < m; ++i) {
    w.advance(i);
    u.row(i) = w.sample_grad(i, s.x.row(i).transpose()).transpose();
  }
  detail::check_finite(u, s.k);
  s.x = (W.W * s.x - gamma * u).eval();
  ++s.k;
  return u;
}

// Two-point gradient estimator n (f(x + delta h) - f(x)) / delta * h for a
// unit direction h. Exactly two function evaluations.
template <typename ValueFn>
Eigen::VectorXd zo_estimate(ValueFn&& value, const VecRef& x, double delta,
                            const VecRef& h) {
  if (!(delta > 0.0))
    throw std::invalid_argument("zo_estimate: delta must be positive");
  if (std::abs(h.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("zo_estimate: h must be a unit vector");
  const double n = static_cast<double>(x.size());
  const double f_plus = value(Eigen::VectorXd(x + delta * h));
  const double f_base = value(Eigen::VectorXd(x));
  return (n * (f_plus - f_base) / delta) * h;
}

// Zeroth-order DMGD round: as dmgd_step with the sampled gradient replaced
// by the two-point estimate along a per-node uniform sphere direction.
inline Eigen::MatrixXd zo_dmgd_step(NodeStateMatrix& s, const MixingMatrix& W,
                                    Workload& w, double gamma, double delta,
                                    std::vector<Rng>& sphere_rngs) {
  const int m = s.nodes();
  if (W.size() != m)
    throw std::invalid_argument("zo_dmgd_step: mixing matrix mismatch");
  if (static_cast<int>(sphere_rngs.size()) != m)
    throw std::invalid_argument("zo_dmgd_step: one sphere stream per node");
  Eigen::MatrixXd u(m, s.dim());
  for (int i = 0; i < m; ++i) {
    w.advance(i);
    const Eigen::VectorXd h = sphere_rngs[i].unit_sphere(s.dim());
    const Eigen::VectorXd xi = s.x.row(i).transpose();
    u.row(i) = zo_estimate(
                   [&](const Eigen::VectorXd& p) {
                     return w.sample_value(i, p);
                   },
                   xi, delta, h)
                   .transpose();
  }
  detail::check_finite(u, s.k);
  s.x = (W.W * s.x - gamma * u).eval();
  ++s.k;
  return u;
}

// DSGD-T round: every node resamples a fresh length-T trajectory from the
// configured initial state and uses only its last sample. The caller charges
// T samples per node.
inline Eigen::MatrixXd dsgd_t_step(NodeStateMatrix& s, const MixingMatrix& W,
                                   Workload& w, double gamma, int T) {
  if (T < 1) throw std::invalid_argument("dsgd_t_step: T must be >= 1");
  const int m = s.nodes();
  if (W.size() != m)
    throw std::invalid_argument("dsgd_t_step: mixing matrix mismatch");
  Eigen::MatrixXd u(m, s.dim());
  for (int i = 0; i < m; ++i) {
    w.restart(i);
    for (int t = 0; t < T; ++t) w.advance(i);
    u.row(i) = w.sample_grad(i, s.x.row(i).transpose()).transpose();
  }
  detail::check_finite(u, s.k);
  s.x = (W.W * s.x - gamma * u).eval();
  ++s.k;
  return u;
}

// Centralized MCGD round on a single shared parameter vector: every node
// advances its chain once and the update uses the mean of the node
// gradients, keeping stepsizes comparable with the decentralized schemes.
inline Eigen::VectorXd mcgd_step(Eigen::VectorXd& x, Workload& w,
                                 double gamma) {
  const int m = w.nodes();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
  for (int i = 0; i < m; ++i) {
    w.advance(i);
    g += w.sample_grad(i, x);
  }
  g /= static_cast<double>(m);
  if (!g.allFinite())
    throw std::runtime_error("mcgd_step: non-finite gradient");
  x -= gamma * g;
  return g;
}

}  // namespace dmgd
