#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dmgd/ar_process.hpp"
#include "dmgd/markov.hpp"
#include "dmgd/objective.hpp"
#include "dmgd/rng.hpp"

namespace dmgd {

// Bridges an objective and its per-node sample source for the optimizers.
// Each node owns its cursor; advance/restart for different nodes may run
// concurrently. Oracle calls at the current sample are pure.
class Workload {
 public:
  virtual ~Workload() = default;
  virtual int nodes() const = 0;
  virtual int dim() const = 0;

  // One chain transition for the node's sampler.
  virtual void advance(int node) = 0;
  // Fresh trajectory from the configured initial state (DSGD-T resampling).
  virtual void restart(int node) = 0;

  // Oracles at the node's current sample.
  virtual double sample_value(int node, const VecRef& x) const = 0;
  virtual Eigen::VectorXd sample_grad(int node, const VecRef& x) const = 0;

  // Full objective at a point (exact for finite sums, frozen-batch estimate
  // for streaming) and the reference optimum used for objective error.
  virtual Eigen::VectorXd mean_gradient(const VecRef& x) const = 0;
  virtual double objective_value(const VecRef& x) const = 0;
  virtual double reference_value() const = 0;

  // Sample count charged by mean_gradient / objective_value (streaming
  // budget reporting; zero for exact finite sums).
  virtual std::uint64_t evaluation_budget() const { return 0; }
};

// Finite-sum objective sampled along per-node copies of a shared finite
// chain. Nodes sample raw component gradients at their chain state.
class FiniteChainWorkload : public Workload {
 public:
  FiniteChainWorkload(std::shared_ptr<const FiniteSumObjective> objective,
                      FiniteMarkovChain chain, std::uint64_t master_seed,
                      int initial_state = 0)
      : objective_(std::move(objective)), chain_(std::move(chain)) {
    if (objective_->components() != chain_.states())
      throw std::invalid_argument(
          "workload: component count must match chain states");
    cursors_.reserve(objective_->nodes());
    for (int i = 0; i < objective_->nodes(); ++i)
      cursors_.emplace_back(initial_state, master_seed,
                            static_cast<std::uint64_t>(i));
  }

  int nodes() const override { return objective_->nodes(); }
  int dim() const override { return objective_->dim(); }

  void advance(int node) override { cursors_[node].step(chain_); }
  void restart(int node) override { cursors_[node].restart(); }

  int state(int node) const { return cursors_[node].state(); }
  std::uint64_t cursor_steps(int node) const { return cursors_[node].steps(); }

  double sample_value(int node, const VecRef& x) const override {
    return objective_->raw_value(node, cursors_[node].state(), x);
  }
  Eigen::VectorXd sample_grad(int node, const VecRef& x) const override {
    return objective_->raw_grad(node, cursors_[node].state(), x);
  }

  Eigen::VectorXd mean_gradient(const VecRef& x) const override {
    return objective_->mean_gradient(x);
  }
  double objective_value(const VecRef& x) const override {
    return objective_->value(x);
  }
  double reference_value() const override { return reference_value_; }
  void set_reference_value(double v) { reference_value_ = v; }

  const FiniteSumObjective& objective() const { return *objective_; }
  const FiniteMarkovChain& chain() const { return chain_; }

 private:
  std::shared_ptr<const FiniteSumObjective> objective_;
  FiniteMarkovChain chain_;
  std::vector<TrajectoryCursor> cursors_;
  double reference_value_ = 0.0;
};

// Streaming logistic regression on per-node autoregressive chains. The
// sample feature is the radially clipped process state; labels come from the
// chain. Objective value/gradient are evaluated on a frozen per-node batch
// drawn once from a dedicated reference stream, and the reference optimum is
// the batch minimizer found by Newton's method.
class ArLogisticWorkload : public Workload {
 public:
  struct Options {
    int nodes = 5;
    int dim = 10;
    std::uint64_t seed = 1;
    double clip_radius_factor = 10.0;  // clip at factor * sqrt(n)
    int reference_samples_per_node = 4000;
    int reference_burnin = 100;
  };

  explicit ArLogisticWorkload(const Options& opt) : opt_(opt) {
    if (opt.nodes < 1 || opt.dim < 1)
      throw std::invalid_argument("ar workload: nodes and dim must be >= 1");
    clip_radius_ = opt.clip_radius_factor * std::sqrt(opt.dim);

    Rng setup(opt.seed, 0, StreamPurpose::workload);
    Eigen::VectorXd u = setup.normal_vector(opt.dim);
    u.normalize();
    for (int i = 0; i < opt.nodes; ++i) {
      states_.push_back(make_ar_state(opt.dim, u, setup));
      rngs_.emplace_back(opt.seed, static_cast<std::uint64_t>(i),
                         StreamPurpose::data_noise);
    }
    u_ = u;
    build_reference();
  }

  int nodes() const override { return opt_.nodes; }
  int dim() const override { return opt_.dim; }
  double clip_radius() const { return clip_radius_; }
  const Eigen::VectorXd& ground_truth() const { return u_; }
  const Eigen::VectorXd& reference_point() const { return reference_point_; }

  void advance(int node) override { ar_step(states_[node], rngs_[node]); }
  void restart(int node) override { ar_reset(states_[node]); }

  const ArChainState& state(int node) const { return states_[node]; }

  double sample_value(int node, const VecRef& x) const override {
    const auto& s = states_[node];
    return logistic_loss(x, clip_to_ball(s.xi1, clip_radius_), s.xi2);
  }
  Eigen::VectorXd sample_grad(int node, const VecRef& x) const override {
    const auto& s = states_[node];
    return logistic_grad(x, clip_to_ball(s.xi1, clip_radius_), s.xi2);
  }

  Eigen::VectorXd mean_gradient(const VecRef& x) const override {
    const Eigen::VectorXd t = features_ * x;
    Eigen::VectorXd r(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i)
      r(i) = sigmoid(t(i)) - labels_(i);
    return features_.transpose() * r / static_cast<double>(t.size());
  }

  double objective_value(const VecRef& x) const override {
    const Eigen::VectorXd t = features_ * x;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i)
      acc += std::log1p(std::exp(-std::abs(t(i)))) + std::max(t(i), 0.0) -
             labels_(i) * t(i);
    return acc / static_cast<double>(t.size());
  }

  double reference_value() const override { return reference_value_; }
  std::uint64_t evaluation_budget() const override {
    return static_cast<std::uint64_t>(features_.rows());
  }

  const Eigen::MatrixXd& reference_features() const { return features_; }
  const Eigen::VectorXd& reference_labels() const { return labels_; }

 private:
  void build_reference() {
    const int n = opt_.dim;
    const Eigen::Index total = static_cast<Eigen::Index>(opt_.nodes) *
                               opt_.reference_samples_per_node;
    features_.resize(total, n);
    labels_.resize(total);
    Eigen::Index row = 0;
    for (int i = 0; i < opt_.nodes; ++i) {
      ArChainState s = states_[i];  // copy; the live cursor is untouched
      Rng ref_rng(opt_.seed, static_cast<std::uint64_t>(i),
                  StreamPurpose::reference);
      for (int t = 0; t < opt_.reference_burnin; ++t) ar_step(s, ref_rng);
      for (int t = 0; t < opt_.reference_samples_per_node; ++t) {
        ar_step(s, ref_rng);
        features_.row(row) = clip_to_ball(s.xi1, clip_radius_).transpose();
        labels_(row) = s.xi2;
        ++row;
      }
    }

    // Newton with a tiny ridge; the noisy labels keep the MLE finite.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int it = 0; it < 200; ++it) {
      const Eigen::VectorXd t = features_ * x;
      Eigen::VectorXd p(t.size());
      for (Eigen::Index i = 0; i < t.size(); ++i) p(i) = sigmoid(t(i));
      const Eigen::VectorXd g =
          features_.transpose() * (p - labels_) / static_cast<double>(total);
      if (g.norm() < 1e-10) break;
      const Eigen::VectorXd wdiag =
          (p.array() * (1.0 - p.array())).matrix() / static_cast<double>(total);
      Eigen::MatrixXd Hm =
          features_.transpose() * wdiag.asDiagonal() * features_ +
          1e-12 * Eigen::MatrixXd::Identity(n, n);
      x -= Hm.ldlt().solve(g);
    }
    reference_point_ = x;
    reference_value_ = objective_value(x);
  }

  Options opt_;
  double clip_radius_ = 0.0;
  Eigen::VectorXd u_;
  std::vector<ArChainState> states_;
  std::vector<Rng> rngs_;
  Eigen::MatrixXd features_;
  Eigen::VectorXd labels_;
  Eigen::VectorXd reference_point_;
  double reference_value_ = 0.0;
};

}  // namespace dmgd
