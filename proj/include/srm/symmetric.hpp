#pragma once

#include <span>
#include <vector>

namespace srm {

// p-th elementary symmetric polynomial of the values, by the standard
// one-pass DP: after absorbing x, e_j += x * e_{j-1} from the top down.
// O(|values| * p) time, exact for p = 0 (returns 1) and p > |values| (0).
inline double elementary_symmetric(std::span<const double> values, int p) {
  if (p < 0) return 0.0;
  if (p == 0) return 1.0;
  std::vector<double> e(static_cast<std::size_t>(p) + 1, 0.0);
  e[0] = 1.0;
  int seen = 0;
  for (double x : values) {
    ++seen;
    int top = seen < p ? seen : p;
    for (int j = top; j >= 1; --j) e[j] += x * e[j - 1];
  }
  return e[static_cast<std::size_t>(p)];
}

}  // namespace srm
