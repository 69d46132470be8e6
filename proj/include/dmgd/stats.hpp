#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dmgd {

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Two-sided Mann-Whitney U test via the normal approximation with tie
// correction and continuity correction. Returns the p-value for the null
// hypothesis that both samples come from the same distribution.
inline double mann_whitney_p(const std::vector<double>& a,
                             const std::vector<double>& b) {
  const std::size_t n1 = a.size(), n2 = b.size();
  if (n1 == 0 || n2 == 0)
    throw std::invalid_argument("mann_whitney_p: empty sample");

  std::vector<std::pair<double, int>> pooled;
  pooled.reserve(n1 + n2);
  for (double x : a) pooled.emplace_back(x, 0);
  for (double x : b) pooled.emplace_back(x, 1);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });

  // Midranks over tied groups; accumulate the tie correction term.
  double rank_sum_a = 0.0, tie_term = 0.0;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
    const double t = static_cast<double>(j - i);
    const double midrank = 0.5 * static_cast<double>(i + j + 1);
    for (std::size_t q = i; q < j; ++q)
      if (pooled[q].second == 0) rank_sum_a += midrank;
    tie_term += t * (t * t - 1.0);
    i = j;
  }

  const double dn1 = static_cast<double>(n1), dn2 = static_cast<double>(n2);
  const double n = dn1 + dn2;
  const double u = rank_sum_a - dn1 * (dn1 + 1.0) / 2.0;
  const double mu = dn1 * dn2 / 2.0;
  const double var =
      dn1 * dn2 / 12.0 * (n + 1.0 - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return 1.0;  // all observations tied
  const double z = (std::abs(u - mu) - 0.5) / std::sqrt(var);
  if (z <= 0.0) return 1.0;
  return std::erfc(z / std::sqrt(2.0));
}

}  // namespace dmgd
