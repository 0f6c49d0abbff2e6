#include "wlrgs/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wlrgs/error.hpp"
#include "wlrgs/roots.hpp"

namespace wlrgs {

namespace {

constexpr const char* kModule = "boundary_engine";
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassTol = 1e-12;

void checkStop(const BoundaryResult& boundary, int J) {
  if (J < 1 || J > boundary.analyses())
    throw InputError(kModule, "stopping analysis outside the boundary schedule");
}

// Null sub-densities through J on a grid widened by `widen`, continuation
// regions from the efficacy boundaries of analyses 1..J-1.
StoppingDensity nullDensity(const DesignSpec& spec, const BoundaryResult& boundary, int J,
                            std::optional<double> divisor, double widen = 1.0) {
  Grid grid = Grid::forDrift(0.0, spec.gridPoints);
  if (widen != 1.0) {
    grid.lower *= widen;
    grid.upper *= widen;
    grid.points = static_cast<Eigen::Index>(std::ceil(double(grid.points - 1) * widen)) + 1;
  }
  StoppingDensity dens(grid, divisor);
  for (int j = 1; j <= J; ++j) {
    dens.addStage(boundary.fractions[j - 1], 0.0);
    if (j == J) break;
    const double c = boundary.brownian(boundary.efficacy[j - 1], j);
    if (spec.sided == Sidedness::Two) {
      dens.setContinuation(-c, c);
    } else {
      dens.setContinuation(-kInf, c);
    }
  }
  return dens;
}

double priorStopMass(const StoppingDensity& dens, int J) {
  double sum = 0.0;
  for (int l = 1; l < J; ++l) sum += dens.stopMass(l);
  return sum;
}

double pValueFrom(const DesignSpec& spec, const StoppingDensity& dens, int J, double x) {
  double tail = 0.0;
  if (spec.sided == Sidedness::Two) {
    const double ax = std::abs(x);
    tail = dens.upperTail(J, ax) + dens.lowerTail(J, -ax);
  } else {
    tail = dens.upperTail(J, x);
  }
  return std::clamp(tail + priorStopMass(dens, J), 0.0, 1.0);
}

double ciTarget(const DesignSpec& spec, const BoundaryResult& boundary, int J) {
  const double prior = J >= 2 ? boundary.alphaSpent[J - 2] : 0.0;
  const double remaining = spec.alpha - prior;
  return spec.sided == Sidedness::One ? remaining / 2 : remaining;
}

// Root of the critical-value equation on the given density, if bracketed.
std::optional<double> criticalValue(const DesignSpec& spec, const StoppingDensity& dens, int J,
                                    double target) {
  const Grid& g = dens.grid();
  const bool two = spec.sided == Sidedness::Two;
  auto tail = [&](double x) {
    return two ? dens.upperTail(J, x) + dens.lowerTail(J, -x) : dens.upperTail(J, x);
  };
  const double lo = two ? 0.0 : g.lower;
  if (!(target > 0) || tail(lo) < target || tail(g.upper) > target) return std::nullopt;
  return bisectDecreasing(tail, target, lo, g.upper, kMassTol);
}

double solveCritical(const DesignSpec& spec, const BoundaryResult& boundary, int J,
                     const StoppingDensity& dens, double target) {
  if (auto xu = criticalValue(spec, dens, J, target)) return *xu;
  const StoppingDensity wide = nullDensity(spec, boundary, J, std::nullopt, 1.5);
  if (auto xu = criticalValue(spec, wide, J, target)) return *xu;
  std::ostringstream os;
  os << "no critical value for tail probability " << target << " at analysis " << J
     << " within the widened grid";
  throw InputError(kModule, os.str());
}

Interval makeInterval(double center, double mse, double xu, double target, double fJ) {
  const double half = xu / std::sqrt(fJ) * std::sqrt(mse);
  return Interval{center - half, center + half, xu, target};
}

double zetaFrom(const StoppingDensity& dens, int J, double x, double divisor,
                std::vector<std::string>* warnings) {
  if (J == 1) return x / divisor;
  const double p = dens.density(J, x);
  if (!(p > 0) || !std::isfinite(p)) {
    if (warnings) warnings->push_back("bias adjustment: null density vanishes at the observed value");
    return x / dens.fraction(J);
  }
  return dens.moment(J, x) / p;
}

double defaultDivisor(const BoundaryResult& boundary, std::optional<double> firstDivisor) {
  const double d = firstDivisor.value_or(boundary.fractions.front());
  if (!(d > 0)) throw InputError("drift_estimation", "no information accrued");
  return d;
}

}  // namespace

double sequentialPValue(const DesignSpec& spec, const BoundaryResult& boundary, int J, double x) {
  checkStop(boundary, J);
  return pValueFrom(spec, nullDensity(spec, boundary, J, std::nullopt), J, x);
}

Interval confidenceInterval(const DesignSpec& spec, const BoundaryResult& boundary, int J,
                            double center, double mse) {
  checkStop(boundary, J);
  if (!(mse >= 0)) throw InputError(kModule, "negative mean squared error");
  const StoppingDensity dens = nullDensity(spec, boundary, J, std::nullopt);
  const double target = ciTarget(spec, boundary, J);
  const double xu = solveCritical(spec, boundary, J, dens, target);
  return makeInterval(center, mse, xu, target, boundary.fractions[J - 1]);
}

double biasAdjust(const DesignSpec& spec, const BoundaryResult& boundary, int J, double x,
                  std::optional<double> firstDivisor) {
  checkStop(boundary, J);
  const double d = defaultDivisor(boundary, firstDivisor);
  const StoppingDensity dens = nullDensity(spec, boundary, J, d);
  return zetaFrom(dens, J, x, d, nullptr);
}

InferenceSummary infer(const DesignSpec& spec, const BoundaryResult& boundary, int J, double x,
                       const BetaStarEstimate& estimate, std::optional<double> firstDivisor) {
  checkStop(boundary, J);
  const double d = defaultDivisor(boundary, firstDivisor);
  const StoppingDensity dens = nullDensity(spec, boundary, J, d);
  const int dir = spec.direction;
  const double xo = dir * x;

  InferenceSummary out;
  out.J = J;
  out.x = x;
  out.pValue = pValueFrom(spec, dens, J, xo);
  out.betaHat = estimate.betaHat;
  out.mse = estimate.mse;
  out.scaleFactor = estimate.scaleFactor;
  out.zetaTilde = dir * zetaFrom(dens, J, xo, d, &out.warnings);
  out.betaTilde = out.zetaTilde * estimate.scaleFactor;

  const double target = ciTarget(spec, boundary, J);
  const double xu = solveCritical(spec, boundary, J, dens, target);
  const double fJ = boundary.fractions[J - 1];
  out.ci = makeInterval(out.betaHat, out.mse, xu, target, fJ);
  out.ciTilde = makeInterval(out.betaTilde, out.mse, xu, target, fJ);
  return out;
}

}  // namespace wlrgs
