#include "levelgen/numeric.hpp"

#include <cmath>
#include <vector>

namespace levelgen {

// Shewchuk's non-overlapping partials with a final half-way correction.
double exact_sum(std::span<const double> terms) {
  std::vector<double> partials;
  partials.reserve(8);
  for (double x : terms) {
    if (!std::isfinite(x)) {
      double naive = 0.0;
      for (double t : terms) naive += t;
      return naive;
    }
    std::size_t used = 0;
    for (double y : partials) {
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[used++] = lo;
      x = hi;
    }
    partials.resize(used);
    partials.push_back(x);
  }

  std::size_t n = partials.size();
  if (n == 0) return 0.0;
  double hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    const double yr = x - hi;
    if (y == yr) hi = x;
  }
  if (!std::isfinite(hi)) {
    double naive = 0.0;
    for (double t : terms) naive += t;
    return naive;
  }
  return hi;
}

}  // namespace levelgen
