#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dmgd/graph.hpp"
#include "dmgd/matrix_io.hpp"
#include "dmgd/mixing.hpp"

using namespace dmgd;

TEST_CASE("standard families produce the expected edge sets") {
  const CommGraph complete3 = build_graph(GraphKind::complete, 3, 1);
  CHECK(complete3.edges ==
        std::set<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});

  const CommGraph path3 = build_graph(GraphKind::path, 3, 1);
  CHECK(path3.edges == std::set<std::pair<int, int>>{{0, 1}, {1, 2}});

  const CommGraph ring2 = build_graph(GraphKind::ring, 2, 1);
  CHECK(ring2.edges == std::set<std::pair<int, int>>{{0, 1}});

  const CommGraph star4 = build_graph(GraphKind::star, 4, 1);
  CHECK(star4.edges ==
        std::set<std::pair<int, int>>{{0, 1}, {0, 2}, {0, 3}});
}

TEST_CASE("degenerate and invalid graph requests") {
  CHECK_THROWS(build_graph(GraphKind::path, 0, 1));
  CHECK_THROWS(build_graph(GraphKind::erdos_renyi, 5, 1, 0.0));
  const CommGraph single = build_graph(GraphKind::complete, 1, 1);
  CHECK(single.edges.empty());
  CHECK(single.connected());
}

TEST_CASE("erdos-renyi is connected and seed-deterministic") {
  const CommGraph a = build_graph(GraphKind::erdos_renyi, 8, 4, 0.4);
  const CommGraph b = build_graph(GraphKind::erdos_renyi, 8, 4, 0.4);
  CHECK(a.edges == b.edges);
  CHECK(a.connected());
  const CommGraph c = build_graph(GraphKind::erdos_renyi, 8, 5, 0.4);
  CHECK(c.connected());
}

TEST_CASE("metropolis weights on path-3 match the hand computation") {
  const MixingMatrix mm =
      metropolis_weights(build_graph(GraphKind::path, 3, 1));
  Eigen::Matrix3d expect;
  expect << 2.0 / 3, 1.0 / 3, 0, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0, 1.0 / 3,
      2.0 / 3;
  CHECK((mm.W - expect).cwiseAbs().maxCoeff() < 1e-15);

  // Eigenvalues {1, 2/3, 0} sorted nonincreasing.
  REQUIRE(mm.eigenvalues.size() == 3);
  CHECK(mm.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mm.eigenvalues(1) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(mm.eigenvalues(2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mm.lambda2 == doctest::Approx(2.0 / 3).epsilon(1e-12));
}

TEST_CASE("metropolis weights on complete-2") {
  const MixingMatrix mm =
      metropolis_weights(build_graph(GraphKind::complete, 2, 1));
  CHECK(mm.W(0, 0) == doctest::Approx(0.5));
  CHECK(mm.W(0, 1) == doctest::Approx(0.5));
  CHECK(mm.lambda2 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("validate_mixing passes metropolis and names failures") {
  const CommGraph path3 = build_graph(GraphKind::path, 3, 1);
  const MixingReport good = validate_mixing(metropolis_weights(path3), path3);
  CHECK(good.checks.size() == 4);
  CHECK(good.all_pass());

  // Swap matrix on complete-2: eigenvalue -1 violates the spectral band.
  const CommGraph k2 = build_graph(GraphKind::complete, 2, 1);
  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  const MixingReport r1 = validate_mixing(wrap_mixing_matrix(swap), k2);
  CHECK(!r1.all_pass());
  for (const auto& c : r1.checks)
    if (c.name == "spectral") CHECK(!c.pass);

  // Identity on path-3: zero weight on edges and full null space of I - W.
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
  const MixingReport r2 = validate_mixing(wrap_mixing_matrix(eye), path3);
  bool graph_fail = false, null_fail = false;
  for (const auto& c : r2.checks) {
    if (c.name == "graph" && !c.pass) graph_fail = true;
    if (c.name == "null_space" && !c.pass) null_fail = true;
  }
  CHECK(graph_fail);
  CHECK(null_fail);

  // Dimension mismatch is an error, not a failed report.
  CHECK_THROWS(validate_mixing(wrap_mixing_matrix(swap), path3));
}

TEST_CASE("power_deviation examples") {
  const MixingMatrix k2 =
      metropolis_weights(build_graph(GraphKind::complete, 2, 1));
  CHECK(power_deviation(k2, 1) < 1e-14);  // W equals P for the 2-node case

  const MixingMatrix p3 =
      metropolis_weights(build_graph(GraphKind::path, 3, 1));
  CHECK(power_deviation(p3, 1) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(power_deviation(p3, 10) <= std::pow(2.0 / 3, 10) + 1e-10);
  CHECK_THROWS(power_deviation(p3, -1));
}

TEST_CASE("structural invariants across generated matrices") {
  const std::vector<CommGraph> graphs = {
      build_graph(GraphKind::path, 5, 1), build_graph(GraphKind::ring, 6, 1),
      build_graph(GraphKind::star, 5, 1),
      build_graph(GraphKind::erdos_renyi, 8, 4, 0.4)};
  for (const CommGraph& g : graphs) {
    const MixingMatrix mm = metropolis_weights(g);
    const int m = g.m;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
    CHECK((mm.W * ones - ones).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((mm.W - mm.W.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::MatrixXd P = mm.consensus_projector();
    CHECK((mm.W * P - P).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((P * mm.W - P).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(mm.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mm.eigenvalues(1) < 1.0);
    CHECK(mm.eigenvalues(m - 1) > -1.0);
    for (int k = 1; k <= 200; ++k)
      CHECK(power_deviation(mm, k) <= std::pow(mm.lambda2, k) + 1e-10);
    CHECK(validate_mixing(mm, g).all_pass());
  }
}

TEST_CASE("matrix text round-trip keeps every bit") {
  const MixingMatrix mm =
      metropolis_weights(build_graph(GraphKind::erdos_renyi, 8, 4, 0.4));
  const Eigen::MatrixXd back = parse_matrix_text(matrix_to_text(mm.W));
  CHECK(back.rows() == mm.W.rows());
  CHECK((back - mm.W).cwiseAbs().maxCoeff() == 0.0);
}
