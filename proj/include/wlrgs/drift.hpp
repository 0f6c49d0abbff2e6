#pragma once

#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "wlrgs/wlr_stat.hpp"

namespace wlrgs {

// Assumed shape of the instantaneous log hazard ratio relative to its
// weighted average: proportional to the weight (drift linear in the
// information fraction) or constant (drift linear in r = m(t)/m(tau)).
enum class Shape { OptimalWeight, Constant };

Shape parseShape(const std::string& name);
std::string toString(Shape shape);

// End-of-trial functionals v(tau) = <Q|IF|Q>_tau and m(tau) = <Q|IF|1>_tau.
struct EndFunctionals {
  double vTau = 0.0;
  double mTau = 0.0;
};

// Drift of the Brownian-scale statistic under a weighted-average log
// relative risk betaStar at sample size n.
template <class Scalar = double>
struct DriftCurve {
  Scalar betaStar = 0;
  Scalar n = 0;
  Scalar vTau = 1;
  Scalar mTau = 1;
  Shape shape = Shape::OptimalWeight;

  // mu(tau) = m / sqrt(v) * sqrt(n) * betaStar.
  Scalar endpoint() const { return mTau / std::sqrt(vTau) * std::sqrt(n) * betaStar; }
};

// mu at a fraction: the information fraction under the optimal-weight shape,
// r_n(t; tau) under the constant shape.
double driftAt(const DriftCurve<double>& curve, double infoFrac,
               std::optional<double> rFrac = std::nullopt);

// Vectorized form over a set of fractions (information fractions or
// r-fractions, matching the shape).
template <class Scalar, class Derived>
auto driftAt(const DriftCurve<Scalar>& curve, const Eigen::ArrayBase<Derived>& fractions) {
  return curve.endpoint() * fractions;
}

struct BetaStarEstimate {
  double betaHat = 0.0;
  double mse = 0.0;
  int analysisIndex = 0;
  double scaleFactor = 0.0;  // sqrt(v) / (sqrt(n) m)
};

double scaleFactor(const EndFunctionals& tau, double n);

// Estimate at the scheduled end from X_n(tau), using the supplied
// end-of-trial functionals.
BetaStarEstimate estimateAtEnd(const AnalysisState& state, const EndFunctionals& tau);
// Same, substituting the observed V_n(tau), m_n(tau) held in the state.
BetaStarEstimate estimateAtEnd(const AnalysisState& state);

// r_n(t; tau) = m_n(t) / m(tau).
double rFraction(const AnalysisState& state, const EndFunctionals& tau);

// Estimate after stopping at an interim analysis under the declared shape.
BetaStarEstimate estimateEarly(const AnalysisState& state, Shape shape,
                               const EndFunctionals& tau,
                               std::optional<double> rFrac = std::nullopt);

// K = <Q|IF_n|1>_t / <Q|IF_n|Q>_t, the constant making q = K Q average to 1.
double proportionalityConstant(const EventTable& table, const WeightFunction& Q, double t);

}  // namespace wlrgs
