#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dmgd/rng.hpp"

namespace dmgd {

using VecRef = Eigen::Ref<const Eigen::VectorXd>;

// Finite-sum objective family over m nodes with M components per node:
//   f(x) = (1/m) sum_j f_j(x),   f_j(x) = (1/M) sum_i f_j^i(x).
// Each registered component carries the chain's stationary weight baked in,
//   f_j^i(x) = M * w_i * F_{j,i}(x),
// so the uniform component mean equals the stationary expectation of the
// underlying raw family F. Samplers consume the raw gradient (what a node
// evaluates at a drawn chain state); with a uniform-stationary chain the two
// coincide. Immutable; oracle calls are pure.
class FiniteSumObjective {
 public:
  FiniteSumObjective(int nodes, int components, int dim,
                     Eigen::VectorXd weights)
      : nodes_(nodes), components_(components), dim_(dim),
        weights_(std::move(weights)) {
    if (weights_.size() != components_)
      throw std::invalid_argument("objective: weight count != components");
    if (std::abs(weights_.sum() - 1.0) > 1e-10)
      throw std::invalid_argument("objective: weights must sum to 1");
  }
  virtual ~FiniteSumObjective() = default;

  int nodes() const { return nodes_; }
  int components() const { return components_; }
  int dim() const { return dim_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  // Raw family oracles F_{j,i}.
  virtual double raw_value(int node, int component, const VecRef& x) const = 0;
  virtual Eigen::VectorXd raw_grad(int node, int component,
                                   const VecRef& x) const = 0;

  double component_value(int node, int component, const VecRef& x) const {
    check_args(node, component, x);
    return components_ * weights_(component) * raw_value(node, component, x);
  }

  // Exact analytic gradient of the registered component f_j^i.
  Eigen::VectorXd grad_component(int node, int component,
                                 const VecRef& x) const {
    check_args(node, component, x);
    return components_ * weights_(component) * raw_grad(node, component, x);
  }

  // Full gradient of f at x: (1/(mM)) sum of all registered component grads.
  Eigen::VectorXd mean_gradient(const VecRef& x) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
    for (int j = 0; j < nodes_; ++j)
      for (int i = 0; i < components_; ++i)
        g += grad_component(j, i, x);
    return g / (static_cast<double>(nodes_) * components_);
  }

  double value(const VecRef& x) const {
    double v = 0.0;
    for (int j = 0; j < nodes_; ++j)
      for (int i = 0; i < components_; ++i) v += component_value(j, i, x);
    return v / (static_cast<double>(nodes_) * components_);
  }

 private:
  void check_args(int node, int component, const VecRef& x) const {
    if (node < 0 || node >= nodes_ || component < 0 ||
        component >= components_)
      throw std::invalid_argument("objective: index out of range");
    if (x.size() != dim_ || !x.allFinite())
      throw std::invalid_argument("objective: x must be finite of dim n");
  }

  int nodes_;
  int components_;
  int dim_;
  Eigen::VectorXd weights_;
};

// Per-component quadratics F_{j,i}(x) = 1/2 (x - c_{j,i})^T Q_{j,i}
// (x - c_{j,i}) with PSD Q. The global minimizer is closed-form.
class QuadraticSum : public FiniteSumObjective {
 public:
  QuadraticSum(std::vector<std::vector<Eigen::MatrixXd>> hessians,
               std::vector<std::vector<Eigen::VectorXd>> centers,
               Eigen::VectorXd weights)
      : FiniteSumObjective(static_cast<int>(hessians.size()),
                           static_cast<int>(hessians.front().size()),
                           static_cast<int>(centers.front().front().size()),
                           std::move(weights)),
        hessians_(std::move(hessians)),
        centers_(std::move(centers)) {}

  double raw_value(int j, int i, const VecRef& x) const override {
    const Eigen::VectorXd d = x - centers_[j][i];
    return 0.5 * d.dot(hessians_[j][i] * d);
  }

  Eigen::VectorXd raw_grad(int j, int i, const VecRef& x) const override {
    return hessians_[j][i] * (x - centers_[j][i]);
  }

  // Solves sum_{j,i} w_i Q_{j,i} (x - c_{j,i}) = 0.
  Eigen::VectorXd minimizer() const {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim(), dim());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim());
    for (int j = 0; j < nodes(); ++j)
      for (int i = 0; i < components(); ++i) {
        A += weights()(i) * hessians_[j][i];
        b += weights()(i) * (hessians_[j][i] * centers_[j][i]);
      }
    return A.ldlt().solve(b);
  }

  double optimum_value() const { return value(minimizer()); }

  const Eigen::MatrixXd& hessian(int j, int i) const { return hessians_[j][i]; }
  const Eigen::VectorXd& center(int j, int i) const { return centers_[j][i]; }

 private:
  std::vector<std::vector<Eigen::MatrixXd>> hessians_;
  std::vector<std::vector<Eigen::VectorXd>> centers_;
};

// Seeded random instance: per-component Hessians A^T A / n + ridge I and
// centers with configurable dispersion.
inline std::shared_ptr<QuadraticSum> make_random_quadratic(
    int nodes, int components, int dim, std::uint64_t seed,
    const Eigen::VectorXd& weights, double center_scale = 0.1,
    double ridge = 0.5) {
  Rng rng(seed, 0, StreamPurpose::workload);
  std::vector<std::vector<Eigen::MatrixXd>> hess(nodes);
  std::vector<std::vector<Eigen::VectorXd>> cent(nodes);
  for (int j = 0; j < nodes; ++j) {
    hess[j].resize(components);
    cent[j].resize(components);
    for (int i = 0; i < components; ++i) {
      Eigen::MatrixXd A(dim, dim);
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) A(r, c) = rng.normal();
      A /= std::sqrt(static_cast<double>(dim));
      hess[j][i] = A.transpose() * A +
                   ridge * Eigen::MatrixXd::Identity(dim, dim);
      cent[j][i] = center_scale * rng.normal_vector(dim);
    }
  }
  return std::make_shared<QuadraticSum>(std::move(hess), std::move(cent),
                                        weights);
}

// Numerically stable logistic loss and its gradient for a labeled sample.
//   loss = log(1 + e^{-|t|}) + max(t, 0) - label * t,  t = <x, xi1>
//   grad = (sigma(t) - label) * xi1
inline double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

inline double logistic_loss(const VecRef& x, const VecRef& xi1, double label) {
  const double t = x.dot(xi1);
  return std::log1p(std::exp(-std::abs(t))) + std::max(t, 0.0) - label * t;
}

inline Eigen::VectorXd logistic_grad(const VecRef& x, const VecRef& xi1,
                                     double label) {
  return (sigmoid(x.dot(xi1)) - label) * xi1;
}

// Radial clip to a ball; preserves the sign of every inner product.
inline Eigen::VectorXd clip_to_ball(const VecRef& v, double radius) {
  const double n = v.norm();
  if (n <= radius) return v;
  return v * (radius / n);
}

struct BoundEstimate {
  double grad_bound = 0.0;  // B_hat: max probed gradient norm
  double lipschitz = 0.0;   // L_hat: max probed difference quotient
};

// Probes registered components at random points in a ball. When raw is set,
// probes the raw family instead (the gradients the samplers consume).
inline BoundEstimate estimate_bounds(const FiniteSumObjective& obj,
                                     int probe_count, double radius,
                                     std::uint64_t seed, bool raw = false) {
  if (probe_count < 2)
    throw std::invalid_argument("estimate_bounds: probe_count >= 2");
  Rng rng(seed, 0, StreamPurpose::probe);
  BoundEstimate est;
  auto grad_at = [&](int j, int i, const Eigen::VectorXd& x) {
    return raw ? obj.raw_grad(j, i, x) : obj.grad_component(j, i, x);
  };
  for (int j = 0; j < obj.nodes(); ++j)
    for (int i = 0; i < obj.components(); ++i) {
      Eigen::VectorXd prev_x;
      Eigen::VectorXd prev_g;
      for (int p = 0; p < probe_count; ++p) {
        // Uniform direction, radius scaled by u^{1/n} for a ball draw.
        Eigen::VectorXd x =
            rng.unit_sphere(obj.dim()) *
            (radius * std::pow(rng.uniform(), 1.0 / obj.dim()));
        const Eigen::VectorXd g = grad_at(j, i, x);
        est.grad_bound = std::max(est.grad_bound, g.norm());
        if (p > 0) {
          const double dx = (x - prev_x).norm();
          if (dx > 1e-12)
            est.lipschitz = std::max(est.lipschitz, (g - prev_g).norm() / dx);
        }
        prev_x = x;
        prev_g = g;
      }
    }
  return est;
}

struct GradCheckResult {
  int probes = 0;
  double worst_rel = 0.0;
  bool pass = false;
};

// Compares analytic component gradients against central finite differences
// at random (node, component, point) probes, dimension-wise relative.
inline GradCheckResult gradient_check(const FiniteSumObjective& obj,
                                      int probes, std::uint64_t seed,
                                      double radius = 1.0, double step = 1e-6,
                                      double tol = 1e-5) {
  if (probes < 1) throw std::invalid_argument("gradient_check: probes >= 1");
  Rng rng(seed, 0, StreamPurpose::probe);
  GradCheckResult res;
  res.probes = probes;
  for (int p = 0; p < probes; ++p) {
    const int j = static_cast<int>(rng.next_u64() %
                                   static_cast<std::uint64_t>(obj.nodes()));
    const int i = static_cast<int>(
        rng.next_u64() % static_cast<std::uint64_t>(obj.components()));
    Eigen::VectorXd x =
        rng.unit_sphere(obj.dim()) *
        (radius * std::pow(rng.uniform(), 1.0 / obj.dim()));
    const Eigen::VectorXd g = obj.grad_component(j, i, x);
    for (int d = 0; d < obj.dim(); ++d) {
      Eigen::VectorXd xp = x, xm = x;
      xp(d) += step;
      xm(d) -= step;
      const double fd = (obj.component_value(j, i, xp) -
                         obj.component_value(j, i, xm)) /
                        (2.0 * step);
      const double rel = std::abs(fd - g(d)) / std::max(1.0, std::abs(g(d)));
      res.worst_rel = std::max(res.worst_rel, rel);
    }
  }
  res.pass = res.worst_rel <= tol;
  return res;
}

// Same check for the logistic loss at random (x, xi1, label) probes.
inline GradCheckResult logistic_gradient_check(int probes, int dim,
                                               std::uint64_t seed,
                                               double step = 1e-6,
                                               double tol = 1e-5) {
  if (probes < 1) throw std::invalid_argument("gradient_check: probes >= 1");
  Rng rng(seed, 0, StreamPurpose::probe);
  GradCheckResult res;
  res.probes = probes;
  for (int p = 0; p < probes; ++p) {
    const Eigen::VectorXd x = rng.normal_vector(dim);
    const Eigen::VectorXd xi1 = rng.normal_vector(dim);
    const double label = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const Eigen::VectorXd g = logistic_grad(x, xi1, label);
    for (int d = 0; d < dim; ++d) {
      Eigen::VectorXd xp = x, xm = x;
      xp(d) += step;
      xm(d) -= step;
      const double fd =
          (logistic_loss(xp, xi1, label) - logistic_loss(xm, xi1, label)) /
          (2.0 * step);
      const double rel = std::abs(fd - g(d)) / std::max(1.0, std::abs(g(d)));
      res.worst_rel = std::max(res.worst_rel, rel);
    }
  }
  res.pass = res.worst_rel <= tol;
  return res;
}

}  // namespace dmgd
