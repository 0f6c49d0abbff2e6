#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace wlrgs::quadrature {

namespace detail {

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> kronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void kronrod15(const F& f, double a, double b, double& result, double& error) {
  const double center = (a + b) / 2;
  const double half = (b - a) / 2;
  const double fc = f(center);
  double kronrod = fc * kronrodWeights[7];
  double gauss = fc * gaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kronrodNodes[i];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kronrodWeights[i] * sum;
    if (i % 2 == 1) gauss += gaussWeights[i / 2] * sum;
  }
  result = kronrod * half;
  error = std::abs((kronrod - gauss) * half);
}

template <class F>
double adaptive(const F& f, double a, double b, double tol, int depth) {
  double whole, err;
  kronrod15(f, a, b, whole, err);
  if (err <= tol || depth <= 0) return whole;
  const double mid = (a + b) / 2;
  return adaptive(f, a, mid, tol / 2, depth - 1) + adaptive(f, mid, b, tol / 2, depth - 1);
}

}  // namespace detail

// Adaptive Gauss-Kronrod (G7/K15) quadrature of a smooth integrand on [a, b].
// absTol bounds the summed local Gauss/Kronrod discrepancies.
template <class F>
double integrate(const F& f, double a, double b, double absTol = 1e-14, int maxDepth = 30) {
  if (a == b) return 0.0;
  if (b < a) return -integrate(f, b, a, absTol, maxDepth);
  return detail::adaptive(f, a, b, absTol, maxDepth);
}

}  // namespace wlrgs::quadrature
