#include "wlrgs/drift.hpp"

#include "wlrgs/error.hpp"

namespace wlrgs {

namespace {
constexpr const char* kModule = "drift_estimation";

void requireFunctionals(const EndFunctionals& tau) {
  if (!(tau.vTau > 0)) throw InputError(kModule, "v(tau) must be positive");
  if (tau.mTau == 0) throw InputError(kModule, "degenerate first moment");
}
}  // namespace

Shape parseShape(const std::string& name) {
  if (name == "optimal-weight") return Shape::OptimalWeight;
  if (name == "constant") return Shape::Constant;
  throw InputError(kModule, "unknown shape '" + name + "'");
}

std::string toString(Shape shape) {
  return shape == Shape::OptimalWeight ? "optimal-weight" : "constant";
}

double driftAt(const DriftCurve<double>& curve, double infoFrac, std::optional<double> rFrac) {
  if (curve.shape == Shape::Constant) {
    if (!rFrac) throw InputError(kModule, "r-fraction required");
    return curve.endpoint() * *rFrac;
  }
  return curve.endpoint() * infoFrac;
}

double scaleFactor(const EndFunctionals& tau, double n) {
  requireFunctionals(tau);
  if (!(n > 0)) throw InputError(kModule, "sample size must be positive");
  return std::sqrt(tau.vTau) / (std::sqrt(n) * tau.mTau);
}

BetaStarEstimate estimateAtEnd(const AnalysisState& state, const EndFunctionals& tau) {
  BetaStarEstimate est;
  est.analysisIndex = state.index;
  est.scaleFactor = scaleFactor(tau, state.n);
  est.betaHat = state.X * est.scaleFactor;
  est.mse = tau.vTau / (state.n * tau.mTau * tau.mTau);
  return est;
}

BetaStarEstimate estimateAtEnd(const AnalysisState& state) {
  return estimateAtEnd(state, EndFunctionals{state.V, state.m});
}

double rFraction(const AnalysisState& state, const EndFunctionals& tau) {
  requireFunctionals(tau);
  return state.m / tau.mTau;
}

BetaStarEstimate estimateEarly(const AnalysisState& state, Shape shape,
                               const EndFunctionals& tau, std::optional<double> rFrac) {
  const double f = state.infoFrac;
  if (!(f > 0)) throw InputError(kModule, "no information accrued");

  BetaStarEstimate est;
  est.analysisIndex = state.index;
  est.scaleFactor = scaleFactor(tau, state.n);
  const double base = tau.vTau / (state.n * tau.mTau * tau.mTau);
  if (shape == Shape::OptimalWeight) {
    est.betaHat = state.X / f * est.scaleFactor;
    est.mse = base / f;
  } else {
    if (!rFrac) throw InputError(kModule, "r-fraction required");
    const double r = *rFrac;
    if (!(r > 0)) throw InputError(kModule, "no information accrued");
    est.betaHat = state.X / r * est.scaleFactor;
    est.mse = f * base / (r * r);
  }
  return est;
}

double proportionalityConstant(const EventTable& table, const WeightFunction& Q, double t) {
  const double v = bracket(Q, Q, table, t);
  if (!(v > 0)) throw InputError(kModule, "degenerate variance");
  return bracket(Q, one, table, t) / v;
}

}  // namespace wlrgs
