#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dmgd/optimizer.hpp"
#include "dmgd/workload.hpp"

using namespace dmgd;

namespace {

// m nodes sharing the single component F = 1/2 ||x||^2 in one dimension,
// sampled through a one-state chain (the trajectory is trivial).
std::unique_ptr<FiniteChainWorkload> norm_square_workload(int m,
                                                          std::uint64_t seed) {
  std::vector<std::vector<Eigen::MatrixXd>> hess(m);
  std::vector<std::vector<Eigen::VectorXd>> cent(m);
  for (int j = 0; j < m; ++j) {
    hess[j] = {Eigen::MatrixXd::Identity(1, 1)};
    cent[j] = {Eigen::VectorXd::Zero(1)};
  }
  auto obj = std::make_shared<QuadraticSum>(
      std::move(hess), std::move(cent), Eigen::VectorXd::Constant(1, 1.0));
  Eigen::MatrixXd H = Eigen::MatrixXd::Constant(1, 1, 1.0);
  return std::make_unique<FiniteChainWorkload>(obj, build_explicit_chain(H),
                                               seed);
}

}  // namespace

TEST_CASE("schedule validation and values") {
  CHECK_THROWS(StepSchedule(0.4, 0.6));   // theta below 1/2
  CHECK_THROWS(StepSchedule(1.0, 0.6));   // theta at 1
  CHECK_THROWS(StepSchedule(0.51, 0.3));  // theta + rho <= 1
  CHECK_THROWS(StepSchedule(0.51, 0.6, 0.0));
  const StepSchedule s(0.51, 0.6, 1.0);
  CHECK(s.gamma(0) == 1.0);
  CHECK(s.gamma(99) == doctest::Approx(std::pow(100.0, -0.51)).epsilon(1e-15));
  CHECK(s.delta(99) == doctest::Approx(std::pow(100.0, -0.6)).epsilon(1e-15));
}

TEST_CASE("stepsize partial sums behave as Eq. 15 requires") {
  const StepSchedule slow(0.51, 0.6);
  double gamma_sum = 0.0;
  for (long long k = 1; k <= 1000000; ++k) gamma_sum += slow.gamma(k);
  CHECK(gamma_sum > 100.0);  // divergent partial sums keep growing
  // Individual squared-log terms vanish even at the slow end of the range.
  const double lk = std::log(1.0e6);
  CHECK(lk * lk * slow.gamma(1000000) * slow.gamma(1000000) < 1e-3);
  // At a faster stepsize the squared-log series visibly converges:
  // the last decade adds little.
  const StepSchedule fast(0.75, 0.6);
  double log_sq_sum = 0.0, prev_tail = 0.0;
  for (long long k = 1; k <= 1000000; ++k) {
    const double lg = std::log(static_cast<double>(k));
    log_sq_sum += lg * lg * fast.gamma(k) * fast.gamma(k);
    if (k == 100000) prev_tail = log_sq_sum;
  }
  CHECK(log_sq_sum - prev_tail < 0.05 * log_sq_sum);
}

TEST_CASE("dmgd_step: zero stepsize is pure mixing") {
  auto wl = norm_square_workload(3, 1);
  const MixingMatrix W =
      metropolis_weights(build_graph(GraphKind::path, 3, 1));
  NodeStateMatrix s = NodeStateMatrix::initialize(
      3, Eigen::VectorXd::Constant(1, 1.0));
  s.x << 3.0, 0.0, -3.0;
  const Eigen::MatrixXd before = s.x;
  dmgd_step(s, W, *wl, 0.0);
  CHECK((s.x - W.W * before).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(s.k == 1);
}

TEST_CASE("dmgd_step: gradient at the pre-mixing iterate (hand example)") {
  auto wl = norm_square_workload(2, 1);
  const MixingMatrix W =
      metropolis_weights(build_graph(GraphKind::complete, 2, 1));
  NodeStateMatrix s =
      NodeStateMatrix::initialize(2, Eigen::VectorXd::Zero(1));
  s.x << 2.0, 0.0;
  dmgd_step(s, W, *wl, 0.5);
  // Both rows mix to 1; each subtracts 1/2 of its own pre-mixing value.
  CHECK(s.x(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(s.x(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("m=1 dmgd reduces to the centralized step") {
  auto wl = norm_square_workload(1, 1);
  Eigen::MatrixXd one = Eigen::MatrixXd::Constant(1, 1, 1.0);
  const MixingMatrix W = wrap_mixing_matrix(one);
  NodeStateMatrix s =
      NodeStateMatrix::initialize(1, Eigen::VectorXd::Constant(1, 4.0));
  dmgd_step(s, W, *wl, 0.25);
  CHECK(s.x(0, 0) == doctest::Approx(4.0 - 0.25 * 4.0).epsilon(1e-15));
}

TEST_CASE("mean-dynamics identity along a dmgd run") {
  auto wl = norm_square_workload(3, 2);
  const MixingMatrix W =
      metropolis_weights(build_graph(GraphKind::ring, 3, 1));
  NodeStateMatrix s = NodeStateMatrix::initialize(
      3, Eigen::VectorXd::Constant(1, 2.0));
  s.x << 2.0, -1.0, 0.5;
  const StepSchedule sched(0.51, 0.6);
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd mean_before = s.row_mean();
    const double gamma = sched.gamma(k);
    const Eigen::MatrixXd u = dmgd_step(s, W, *wl, gamma);
    const Eigen::VectorXd expect =
        mean_before - (gamma / 3.0) * u.colwise().sum().transpose();
    CHECK((s.row_mean() - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("zo_estimate formula and guards") {
  // Linear f: exact for any delta.
  Eigen::Vector3d a(1.0, -2.0, 0.5);
  auto lin = [&](const Eigen::VectorXd& x) { return a.dot(x); };
  Eigen::VectorXd h = Eigen::Vector3d(1.0, 0.0, 0.0);
  Eigen::VectorXd x = Eigen::Vector3d(0.3, 0.1, -0.2);
  const Eigen::VectorXd est = zo_estimate(lin, x, 0.7, h);
  CHECK((est - 3.0 * a.dot(h) * h).cwiseAbs().maxCoeff() < 1e-12);

  // f = 1/2 ||x||^2 at 0 with h = e1, delta = 0.1, n = 2 -> 0.1 e1.
  auto sq = [](const Eigen::VectorXd& y) { return 0.5 * y.squaredNorm(); };
  Eigen::VectorXd z = Eigen::Vector2d::Zero();
  Eigen::VectorXd e1 = Eigen::Vector2d(1.0, 0.0);
  const Eigen::VectorXd est2 = zo_estimate(sq, z, 0.1, e1);
  CHECK(est2(0) == doctest::Approx(0.1).epsilon(1e-12));

  // Exactly two evaluations.
  int evals = 0;
  auto counted = [&](const Eigen::VectorXd& y) {
    ++evals;
    return sq(y);
  };
  zo_estimate(counted, z, 0.1, e1);
  CHECK(evals == 2);

  CHECK_THROWS(zo_estimate(sq, z, 0.0, e1));
  CHECK_THROWS(zo_estimate(sq, z, 0.1, Eigen::Vector2d(2.0, 0.0)));
}

TEST_CASE("zo_dmgd_step composes estimator and mixing") {
  auto wl = norm_square_workload(2, 3);
  auto wl2 = norm_square_workload(2, 3);
  const MixingMatrix W =
      metropolis_weights(build_graph(GraphKind::complete, 2, 1));
  NodeStateMatrix s =
      NodeStateMatrix::initialize(2, Eigen::VectorXd::Constant(1, 1.0));
  s.x << 1.0, -2.0;
  const Eigen::MatrixXd before = s.x;

  std::vector<Rng> rngs, rngs2;
  for (int i = 0; i < 2; ++i) {
    rngs.emplace_back(9, i, StreamPurpose::sphere);
    rngs2.emplace_back(9, i, StreamPurpose::sphere);
  }
  zo_dmgd_step(s, W, *wl, 0.3, 0.05, rngs);

  // Hand-compose with identically seeded sphere draws.
  Eigen::MatrixXd u(2, 1);
  for (int i = 0; i < 2; ++i) {
    wl2->advance(i);
    const Eigen::VectorXd h = rngs2[i].unit_sphere(1);
    auto f = [&](const Eigen::VectorXd& y) { return wl2->sample_value(i, y); };
    u.row(i) =
        zo_estimate(f, before.row(i).transpose(), 0.05, h).transpose();
  }
  const Eigen::MatrixXd expect = W.W * before - 0.3 * u;
  CHECK((s.x - expect).cwiseAbs().maxCoeff() < 1e-14);

  // gamma = 0 leaves pure mixing.
  NodeStateMatrix t =
      NodeStateMatrix::initialize(2, Eigen::VectorXd::Zero(1));
  t.x << 1.0, 3.0;
  const Eigen::MatrixXd tb = t.x;
  zo_dmgd_step(t, W, *wl, 0.0, 0.05, rngs);
  CHECK((t.x - W.W * tb).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("dsgd_t_step restarts and charges T samples") {
  // Two-state chain; cursor must sit on a fresh T-step trajectory each call.
  std::vector<std::vector<Eigen::MatrixXd>> hess(1);
  std::vector<std::vector<Eigen::VectorXd>> cent(1);
  hess[0] = {Eigen::MatrixXd::Identity(1, 1),
             Eigen::MatrixXd::Identity(1, 1)};
  cent[0] = {Eigen::VectorXd::Constant(1, 1.0),
             Eigen::VectorXd::Constant(1, -1.0)};
  auto obj = std::make_shared<QuadraticSum>(
      std::move(hess), std::move(cent), Eigen::Vector2d(0.5, 0.5));
  Eigen::MatrixXd H(2, 2);
  H << 0.5, 0.5, 0.5, 0.5;
  FiniteChainWorkload wl(obj, build_explicit_chain(H), 4);

  Eigen::MatrixXd one = Eigen::MatrixXd::Constant(1, 1, 1.0);
  const MixingMatrix W = wrap_mixing_matrix(one);
  NodeStateMatrix s =
      NodeStateMatrix::initialize(1, Eigen::VectorXd::Zero(1));

  const std::uint64_t steps_before = wl.cursor_steps(0);
  dsgd_t_step(s, W, wl, 0.1, 8);
  CHECK(wl.cursor_steps(0) - steps_before == 8);
  CHECK_THROWS(dsgd_t_step(s, W, wl, 0.1, 0));
}

TEST_CASE("mcgd_step: mean of node gradients, gamma zero fixed point") {
  auto wl = norm_square_workload(4, 5);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 2.0);
  mcgd_step(x, *wl, 0.0);
  CHECK(x(0) == 2.0);
  // All nodes share F = 1/2 ||x||^2, so the mean gradient is x itself.
  mcgd_step(x, *wl, 0.25);
  CHECK(x(0) == doctest::Approx(2.0 - 0.25 * 2.0).epsilon(1e-15));
}

TEST_CASE("sphere-averaged zo estimate approximates a quadratic gradient") {
  // Fitted-constant check of the O(delta n^{3/2}) bias shape: fit c on one
  // configuration, require the bound on another.
  auto bias = [](int n, double delta, std::uint64_t seed) {
    Rng rng(seed, 0, StreamPurpose::sphere);
    Rng point(seed, 1, StreamPurpose::probe);
    const Eigen::VectorXd x0 = point.normal_vector(n);
    auto f = [](const Eigen::VectorXd& y) { return 0.5 * y.squaredNorm(); };
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    const int reps = 50000;
    for (int r = 0; r < reps; ++r)
      acc += zo_estimate(f, x0, delta, rng.unit_sphere(n));
    return ((acc / reps) - x0).norm();
  };
  const double c = bias(4, 0.2, 1) / (0.2 * std::pow(4.0, 1.5));
  CHECK(bias(8, 0.1, 2) <= 3.0 * (c + 0.05) * 0.1 * std::pow(8.0, 1.5));
}
