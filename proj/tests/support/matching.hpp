#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include <Eigen/Core>

namespace oracle {

// Pairs each expected point with a distinct found point, repeatedly taking
// the closest remaining pair. Returns the largest paired distance, or +inf
// when the counts differ. perm[i] is the found index matched to expected i.
inline double match_points(const std::vector<Eigen::VectorXd>& expected, const std::vector<Eigen::VectorXd>& found,
                           std::vector<int>* perm = nullptr) {
  if (expected.size() != found.size()) return std::numeric_limits<double>::infinity();
  const std::size_t r = expected.size();
  std::vector<bool> used_e(r, false), used_f(r, false);
  std::vector<int> p(r, -1);
  double worst = 0.0;
  for (std::size_t step = 0; step < r; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < r; ++i) {
      if (used_e[i]) continue;
      for (std::size_t j = 0; j < r; ++j) {
        if (used_f[j]) continue;
        const double dist = (expected[i] - found[j]).norm();
        if (dist < best) {
          best = dist;
          bi = i;
          bj = j;
        }
      }
    }
    used_e[bi] = used_f[bj] = true;
    p[bi] = static_cast<int>(bj);
    worst = std::max(worst, best);
  }
  if (perm) *perm = p;
  return worst;
}

}  // namespace oracle
