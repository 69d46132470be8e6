#pragma once

#include <cstdint>
#include <cmath>

#include <Eigen/Dense>

namespace dmgd {

// Purpose tags for per-node stream derivation. Each (seed, node, purpose)
// triple yields an independent deterministic stream, so results do not
// depend on thread scheduling.
enum class StreamPurpose : std::uint64_t {
  chain = 1,
  sphere = 2,
  data_noise = 3,
  label_noise = 4,
  probe = 5,
  workload = 6,
  reference = 7,
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a stream seed from (master, node, purpose).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t node,
                                 StreamPurpose purpose) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s = a ^ (node * 0xd1342543de82ef95ULL + 1);
  std::uint64_t b = splitmix64(s);
  s = b ^ (static_cast<std::uint64_t>(purpose) * 0x2545f4914f6cdd1dULL + 1);
  return splitmix64(s);
}

// Small deterministic generator (xoshiro256**). All floating-point draws are
// derived from the integer stream with fixed formulas, so sequences are
// bit-reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }
  Rng(std::uint64_t master, std::uint64_t node, StreamPurpose purpose)
      : Rng(derive_seed(master, node, purpose)) {}

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller, no cached spare.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  Eigen::VectorXd normal_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  // Uniform draw from the unit sphere in R^n: normalized Gaussian.
  Eigen::VectorXd unit_sphere(int n) {
    Eigen::VectorXd v = normal_vector(n);
    double nrm = v.norm();
    while (nrm == 0.0) {  // probability-zero guard
      v = normal_vector(n);
      nrm = v.norm();
    }
    return v / nrm;
  }

  // Index sampled from a discrete distribution given as a row of weights
  // summing to ~1 (inverse-CDF scan).
  int discrete(const Eigen::Ref<const Eigen::RowVectorXd>& probs) {
    const double u = uniform();
    double acc = 0.0;
    const int n = static_cast<int>(probs.size());
    for (int i = 0; i < n; ++i) {
      acc += probs(i);
      if (u < acc) return i;
    }
    return n - 1;
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

}  // namespace dmgd
