#pragma once

#include <cmath>

namespace wlrgs {

// Bisection for g(x) = target with g non-increasing on [lo, hi] and
// g(lo) >= target >= g(hi). Stops once |g - target| <= tol or the bracket
// collapses to rounding.
template <class G>
double bisectDecreasing(const G& g, double target, double lo, double hi, double tol) {
  for (int it = 0; it < 200; ++it) {
    const double mid = lo + (hi - lo) / 2;
    const double val = g(mid);
    if (std::abs(val - target) <= tol) return mid;
    if (val > target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (std::abs(hi - lo) <= 1e-15 * (1 + std::abs(mid))) return mid;
  }
  return lo + (hi - lo) / 2;
}

}  // namespace wlrgs
