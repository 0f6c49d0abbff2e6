#pragma once

// Reference implementations written without the library, for
// cross-checking. Loops over subjects, no Eigen, Boost for numerics.

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wlrgs/survival_data.hpp"

namespace oracle {

struct Logrank {
  double observedMinusExpected = 0.0;  // sum (d1 - d n1 / n)
  double variance = 0.0;               // sum d n1 n0 / n^2 (Breslow, no tie correction)
  int subjects = 0;
};

// Two-sample logrank score and variance by direct risk-set counting.
inline Logrank logrank(const std::vector<wlrgs::SubjectRecord>& data, double cutoff) {
  std::set<double> times;
  for (const auto& r : data)
    if (r.event && r.time <= cutoff) times.insert(r.time);
  Logrank out;
  out.subjects = static_cast<int>(data.size());
  for (double t : times) {
    double n = 0, n1 = 0, d = 0, d1 = 0;
    for (const auto& r : data) {
      if (r.time >= t) {
        n += 1;
        n1 += r.arm;
      }
      if (r.event && r.time == t) {
        d += 1;
        d1 += r.arm;
      }
    }
    out.observedMinusExpected += d1 - d * n1 / n;
    out.variance += d * (n1 / n) * (1 - n1 / n);
  }
  return out;
}

// Standard normal upper tail and quantile.
inline double normalSf(double x) {
  return boost::math::cdf(boost::math::complement(boost::math::normal(), x));
}
inline double normalQuantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

// End-of-trial functionals for the ramp-plateau weight, by adaptive
// Gauss-Kronrod quadrature of the defining integral over eta = H(xi):
//   v = e0 (1 - e0) * int Q(eta)^2 exp(-(1 + theta) eta) S_lr(eta) d eta
// with Q(eta) = (1 - exp(-min(eta, Hc))) / (1 - exp(-Hc)) and S_lr = 1 up to
// H(tau - t_er), then falling linearly in eta to 0 at H(tau).
struct Functionals {
  double v = 0.0, m = 0.0, g = 0.0;
};

inline Functionals functionalsByQuadrature(double hc, double he, double ht, double theta,
                                           double e0) {
  using boost::math::quadrature::gauss_kronrod;
  auto Q = [&](double eta) {
    if (hc <= 0) return 1.0;
    return (1 - std::exp(-std::min(eta, hc))) / (1 - std::exp(-hc));
  };
  auto slr = [&](double eta) { return eta <= he ? 1.0 : (ht - eta) / (ht - he); };
  auto base = [&](double eta) { return std::exp(-(1 + theta) * eta) * slr(eta); };
  std::vector<double> cuts = {0.0, ht};
  if (hc > 0 && hc < ht) cuts.push_back(hc);
  if (he > 0 && he < ht) cuts.push_back(he);
  std::sort(cuts.begin(), cuts.end());
  auto integrate = [&](auto f) {
    double s = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i + 1] > cuts[i])
        s += gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 8, 1e-11);
    return s;
  };
  const double alloc = e0 * (1 - e0);
  Functionals out;
  out.v = alloc * integrate([&](double e) { return Q(e) * Q(e) * base(e); });
  out.m = alloc * integrate([&](double e) { return Q(e) * base(e); });
  out.g = integrate(base);
  return out;
}

inline double relErr(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace oracle
