#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dmgd/rng.hpp"

using namespace dmgd;

TEST_CASE("identical seeds give identical streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived streams differ across node and purpose") {
  CHECK(derive_seed(1, 0, StreamPurpose::chain) !=
        derive_seed(1, 1, StreamPurpose::chain));
  CHECK(derive_seed(1, 0, StreamPurpose::chain) !=
        derive_seed(1, 0, StreamPurpose::sphere));
  CHECK(derive_seed(1, 0, StreamPurpose::chain) !=
        derive_seed(2, 0, StreamPurpose::chain));
}

TEST_CASE("uniform lies in [0,1) with sensible mean") {
  Rng rng(7);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / 100000 - 0.5) < 0.005);
}

TEST_CASE("normal has near-standard moments") {
  Rng rng(11);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("unit sphere draws have norm 1") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i)
    CHECK(std::abs(rng.unit_sphere(10).norm() - 1.0) < 1e-12);
}

TEST_CASE("discrete sampling matches weights") {
  Rng rng(5);
  Eigen::RowVectorXd p(3);
  p << 0.2, 0.5, 0.3;
  Eigen::Vector3d counts = Eigen::Vector3d::Zero();
  const int n = 200000;
  for (int i = 0; i < n; ++i) counts(rng.discrete(p)) += 1.0;
  for (int i = 0; i < 3; ++i) CHECK(std::abs(counts(i) / n - p(i)) < 0.005);
}

TEST_CASE("degenerate discrete row always returns its state") {
  Rng rng(9);
  Eigen::RowVectorXd p(3);
  p << 0.0, 1.0, 0.0;
  for (int i = 0; i < 100; ++i) CHECK(rng.discrete(p) == 1);
}

TEST_CASE("bernoulli frequency tracks p") {
  Rng rng(13);
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits += rng.bernoulli(0.2) ? 1 : 0;
  CHECK(std::abs(static_cast<double>(hits) / n - 0.2) < 0.005);
}
