#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dmgd/matrix_io.hpp"
#include "dmgd/objective.hpp"
#include "dmgd/workload.hpp"

using namespace dmgd;

namespace {

// Single-node pair f1 = 1/2 (x-1)^2, f2 = 1/2 (x+1)^2 in one dimension.
std::shared_ptr<QuadraticSum> scalar_pair() {
  std::vector<std::vector<Eigen::MatrixXd>> hess(1);
  std::vector<std::vector<Eigen::VectorXd>> cent(1);
  hess[0] = {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)};
  cent[0] = {Eigen::VectorXd::Constant(1, 1.0),
             Eigen::VectorXd::Constant(1, -1.0)};
  return std::make_shared<QuadraticSum>(std::move(hess), std::move(cent),
                                        Eigen::Vector2d(0.5, 0.5));
}

}  // namespace

TEST_CASE("quadratic oracles: identity Hessian gradient and mean") {
  const auto pair = scalar_pair();
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
  CHECK(pair->mean_gradient(x0).norm() < 1e-15);  // symmetry
  Eigen::VectorXd x2 = Eigen::VectorXd::Constant(1, 2.0);
  CHECK(pair->mean_gradient(x2)(0) ==
        doctest::Approx(2.0).epsilon(1e-14));  // mean of 1 and 3
  CHECK(pair->minimizer()(0) == doctest::Approx(0.0).epsilon(1e-12));

  // f = 1/2 ||x||^2 at (1,2) has gradient (1,2).
  std::vector<std::vector<Eigen::MatrixXd>> hess(1);
  std::vector<std::vector<Eigen::VectorXd>> cent(1);
  hess[0] = {Eigen::MatrixXd::Identity(2, 2)};
  cent[0] = {Eigen::VectorXd::Zero(2)};
  QuadraticSum sq(std::move(hess), std::move(cent),
                  Eigen::VectorXd::Constant(1, 1.0));
  Eigen::Vector2d p(1.0, 2.0);
  CHECK((sq.grad_component(0, 0, p) - p).norm() < 1e-15);
}

TEST_CASE("random quadratic: minimizer is stationary and valued") {
  const FiniteMarkovChain chain =
      build_random_walk_chain(build_graph(GraphKind::path, 4, 1));
  const auto q = make_random_quadratic(5, 4, 10, 3, chain.pi_star.transpose());
  const Eigen::VectorXd xstar = q->minimizer();
  CHECK(q->mean_gradient(xstar).norm() < 1e-10);
  Eigen::VectorXd off = xstar;
  off(0) += 0.1;
  CHECK(q->value(off) > q->optimum_value());
}

TEST_CASE("finite-sum consistency and argument checking") {
  const auto q = make_random_quadratic(
      3, 4, 6, 9, Eigen::VectorXd::Constant(4, 0.25));
  Rng rng(4, 0, StreamPurpose::probe);
  const Eigen::VectorXd x = rng.normal_vector(6);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(6);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 4; ++i) acc += q->grad_component(j, i, x);
  CHECK((q->mean_gradient(x) - acc / 12.0).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS(q->grad_component(3, 0, x));
  CHECK_THROWS(q->grad_component(0, 4, x));
  Eigen::VectorXd bad = x;
  bad(0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(q->grad_component(0, 0, bad));
  CHECK_THROWS(q->grad_component(0, 0, Eigen::VectorXd::Zero(5)));
}

TEST_CASE("stationary weighting preserves the raw mean") {
  // Registered components carry M * pi_i, so the uniform component mean
  // equals the stationary-weighted expectation of the raw family.
  const FiniteMarkovChain chain =
      build_random_walk_chain(build_graph(GraphKind::path, 4, 1));
  const auto q = make_random_quadratic(2, 4, 5, 6, chain.pi_star.transpose());
  Rng rng(5, 0, StreamPurpose::probe);
  const Eigen::VectorXd x = rng.normal_vector(5);
  Eigen::VectorXd weighted = Eigen::VectorXd::Zero(5);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 4; ++i)
      weighted += chain.pi_star(i) * q->raw_grad(j, i, x);
  CHECK((q->mean_gradient(x) - weighted / 2.0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gradient check: quadratic and logistic families") {
  const auto q = make_random_quadratic(
      3, 4, 10, 21, Eigen::VectorXd::Constant(4, 0.25));
  const GradCheckResult qres = gradient_check(*q, 100, 21);
  CHECK(qres.pass);
  CHECK(qres.worst_rel <= 1e-5);

  const GradCheckResult lres = logistic_gradient_check(100, 10, 22);
  CHECK(lres.pass);
  CHECK(lres.worst_rel <= 1e-5);
}

TEST_CASE("logistic loss basics") {
  Rng rng(8, 0, StreamPurpose::probe);
  const Eigen::VectorXd x = rng.normal_vector(6);
  const Eigen::VectorXd xi1 = rng.normal_vector(6);

  // Residual sigma(<x,xi1>) - xi2 vanishes for the synthetic exact label.
  const double exact = sigmoid(x.dot(xi1));
  CHECK(logistic_grad(x, xi1, exact).norm() < 1e-14);

  // Bounded below by zero.
  for (int t = 0; t < 50; ++t) {
    const Eigen::VectorXd y = rng.normal_vector(6);
    CHECK(logistic_loss(y, xi1, rng.bernoulli(0.5) ? 1.0 : 0.0) >= 0.0);
  }

  // Clipping projects onto the ball and fixes points inside it.
  Eigen::VectorXd big = Eigen::VectorXd::Constant(4, 100.0);
  CHECK(std::abs(clip_to_ball(big, 3.0).norm() - 3.0) < 1e-12);
  Eigen::VectorXd small = Eigen::VectorXd::Constant(4, 0.1);
  CHECK((clip_to_ball(small, 3.0) - small).norm() == 0.0);
}

TEST_CASE("estimate_bounds on hand-solvable objectives") {
  // f = 1/2 ||x||^2 probed in a ball of radius 2.
  std::vector<std::vector<Eigen::MatrixXd>> hess(1);
  std::vector<std::vector<Eigen::VectorXd>> cent(1);
  hess[0] = {Eigen::MatrixXd::Identity(3, 3)};
  cent[0] = {Eigen::VectorXd::Zero(3)};
  QuadraticSum sq(std::move(hess), std::move(cent),
                  Eigen::VectorXd::Constant(1, 1.0));
  const BoundEstimate est = estimate_bounds(sq, 200, 2.0, 31);
  CHECK(est.grad_bound <= 2.0 + 1e-12);
  CHECK(est.grad_bound > 1.5);                 // probes reach near the rim
  CHECK(est.lipschitz == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS(estimate_bounds(sq, 1, 2.0, 31));

  // Deterministic under the seed.
  const BoundEstimate again = estimate_bounds(sq, 200, 2.0, 31);
  CHECK(est.grad_bound == again.grad_bound);
  CHECK(est.lipschitz == again.lipschitz);
}

TEST_CASE("ar-logistic workload reference is self-consistent") {
  ArLogisticWorkload::Options opt;
  opt.nodes = 3;
  opt.dim = 6;
  opt.seed = 2;
  opt.reference_samples_per_node = 500;
  ArLogisticWorkload wl(opt);
  // The reference point is a stationary point of the frozen-batch objective.
  CHECK(wl.mean_gradient(wl.reference_point()).norm() < 1e-8);
  // Objective error at the reference is zero by construction.
  CHECK(wl.objective_value(wl.reference_point()) ==
        doctest::Approx(wl.reference_value()).epsilon(1e-14));
  // Sampled gradients move along the trajectory deterministically.
  ArLogisticWorkload wl2(opt);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(6);
  for (int k = 0; k < 20; ++k) {
    wl.advance(0);
    wl2.advance(0);
    CHECK((wl.sample_grad(0, x) - wl2.sample_grad(0, x)).norm() == 0.0);
  }
}

TEST_CASE("frozen batch round-trips through the binary format") {
  Eigen::MatrixXd batch(3, 4);
  Rng rng(6, 0, StreamPurpose::probe);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) batch(r, c) = rng.normal();
  const std::string path = "/tmp/dmgd_test_batch.bin";
  save_batch(path, batch);
  const Eigen::MatrixXd back = load_batch(path);
  REQUIRE(back.rows() == 3);
  REQUIRE(back.cols() == 4);
  CHECK((back - batch).cwiseAbs().maxCoeff() == 0.0);
}
