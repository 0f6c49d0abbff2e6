#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>

#include <Eigen/Core>

// Standard normal density, distribution and quantile functions. Scalar
// overloads are templated so the same code serves double and long double;
// the Eigen overloads return lazy expressions.
namespace wlrgs::normal {

template <std::floating_point Scalar>
inline Scalar pdf(Scalar x) {
  const Scalar invSqrt2Pi = Scalar(std::numbers::inv_sqrtpi_v<long double> /
                                   std::numbers::sqrt2_v<long double>);
  return invSqrt2Pi * std::exp(-x * x / 2);
}

// Density of N(0, variance) at x.
template <std::floating_point Scalar>
inline Scalar pdf(Scalar x, Scalar variance) {
  const Scalar sd = std::sqrt(variance);
  return pdf(x / sd) / sd;
}

template <std::floating_point Scalar>
inline Scalar cdf(Scalar x) {
  return std::erfc(-x / std::numbers::sqrt2_v<Scalar>) / 2;
}

// Upper tail 1 - Phi(x), computed without cancellation.
template <std::floating_point Scalar>
inline Scalar sf(Scalar x) {
  return std::erfc(x / std::numbers::sqrt2_v<Scalar>) / 2;
}

template <class Derived>
inline auto pdf(const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([](Scalar v) { return pdf(v); });
}

template <class Derived>
inline auto sf(const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([](Scalar v) { return sf(v); });
}

// Inverse of cdf. Acklam's rational approximation followed by one Halley
// step against erfc, which brings it to full double precision.
template <std::floating_point Scalar>
Scalar quantile(Scalar p) {
  if (!(p > 0)) return -std::numeric_limits<Scalar>::infinity();
  if (!(p < 1)) return std::numeric_limits<Scalar>::infinity();

  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double pLow = 0.02425;

  Scalar x;
  if (p < pLow) {
    Scalar q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - pLow) {
    Scalar q = p - Scalar(0.5);
    Scalar r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    Scalar q = std::sqrt(-2 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }

  // Halley refinement; work in whichever tail keeps the residual accurate.
  Scalar e = (p < Scalar(0.5)) ? cdf(x) - p : (1 - p) - sf(x);
  Scalar u = e / pdf(x);
  return x - u / (1 + x * u / 2);
}

}  // namespace wlrgs::normal
