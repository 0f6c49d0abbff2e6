#include "wlrgs/boundary.hpp"

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
// Probability tolerance for boundary equations.
constexpr double kMassTol = 1e-11;

// Absolute tolerance, tightened for the tiny increments of early analyses.
double massTol(double inc) { return std::min(kMassTol, 1e-9 * inc); }

void checkFractions(std::span<const double> f) {
  if (f.empty()) throw InputError(kModule, "no analyses");
  double prev = 0.0;
  for (double v : f) {
    if (!(v > prev)) throw InputError(kModule, "non-increasing information");
    prev = v;
  }
}

// Spending at analysis j (1-based) for a schedule whose analysis
// finalAnalysis spends everything.
double cumulative(const SpendingFunction& spend, std::span<const double> f, int j,
                  int finalAnalysis) {
  if (j <= 0) return 0.0;
  if (j >= finalAnalysis) return spend.total;
  return std::min(spend(f[j - 1]), spend.total);
}

std::vector<double> oriented(const DriftCurve<double>& curve, int direction,
                             std::span<const double> f, std::span<const double> r, int count) {
  std::vector<double> mu(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    std::optional<double> rj;
    if (curve.shape == Shape::Constant) {
      if (static_cast<int>(r.size()) <= j) throw InputError("drift_estimation", "r-fraction required");
      rj = r[j];
    }
    mu[j] = direction * driftAt(curve, f[j], rj);
  }
  return mu;
}

double maxAbs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

DriftCurve<double> DesignSpec::drift() const {
  return DriftCurve<double>{betaStar, n, functionals.vTau, functionals.mTau, shape};
}

void DesignSpec::validate() const {
  if (!(alpha > 0 && alpha < 1)) throw InputError(kModule, "alpha must lie in (0, 1)");
  if (direction != 1 && direction != -1) throw InputError(kModule, "direction must be +1 or -1");
  checkFractions(plannedFractions);
  if (plannedFractions.back() > 1.0 + 1e-12)
    throw InputError(kModule, "planned fractions must not exceed 1");
  if (std::abs(spending.total - alpha) > 1e-15)
    throw InputError(kModule, "spending total differs from alpha");
  if (futility) {
    if (sided == Sidedness::Two)
      throw InputError(kModule, "futility boundaries are supported for one-sided designs only");
    if (!(futility->total >= 0 && futility->total < 1))
      throw InputError(kModule, "type-II error must lie in [0, 1)");
    if (!(functionals.vTau > 0) || functionals.mTau == 0 || !(n > 0))
      throw InputError(kModule, "futility needs v_tau, m_tau and n for the design drift");
    if (shape == Shape::Constant && plannedRFractions.size() != plannedFractions.size())
      throw InputError("drift_estimation", "r-fraction required");
  }
  if (gridPoints < 101) throw InputError(kModule, "grid_points must be at least 101");
}

bool BoundaryResult::hasFutility() const {
  return std::any_of(futility.begin(), futility.end(), [](double a) { return std::isfinite(a); });
}

double BoundaryResult::brownian(double z, int j) const {
  return std::isfinite(z) ? z * std::sqrt(fractions[j - 1]) : z;
}

StoppingDensity densityRecursion(const DesignSpec& spec, std::span<const double> fractions,
                                 std::span<const double> efficacy, int upTo,
                                 std::optional<DriftCurve<double>> drift,
                                 std::span<const double> rFractions,
                                 std::optional<double> momentDivisor) {
  if (upTo < 1 || upTo > static_cast<int>(fractions.size()))
    throw InputError(kModule, "fractions unavailable for the requested analysis");
  if (static_cast<int>(efficacy.size()) < upTo - 1)
    throw InputError(kModule, "boundaries missing for earlier analyses");
  checkFractions(fractions.first(static_cast<std::size_t>(upTo)));

  std::vector<double> mu(static_cast<std::size_t>(upTo), 0.0);
  if (drift) mu = oriented(*drift, spec.direction, fractions, rFractions, upTo);

  StoppingDensity dens(Grid::forDrift(maxAbs(mu), spec.gridPoints), momentDivisor);
  for (int j = 1; j <= upTo; ++j) {
    dens.addStage(fractions[j - 1], mu[j - 1]);
    if (j == upTo) break;
    const double c = std::isfinite(efficacy[j - 1])
                         ? efficacy[j - 1] * std::sqrt(fractions[j - 1])
                         : efficacy[j - 1];
    if (spec.sided == Sidedness::Two) {
      dens.setContinuation(-c, c);
    } else {
      dens.setContinuation(-kInf, c);
    }
  }
  return dens;
}

double tailMass(const StoppingDensity& density, int j, double x) {
  return density.upperTail(j, x);
}

BoundaryResult efficacyBoundary(const DesignSpec& spec) {
  return efficacyBoundary(spec, spec.plannedFractions, spec.analyses());
}

BoundaryResult efficacyBoundary(const DesignSpec& spec, std::span<const double> fractions,
                                int finalAnalysis) {
  checkFractions(fractions);
  const int K = static_cast<int>(fractions.size());
  BoundaryResult out;
  out.fractions.assign(fractions.begin(), fractions.end());
  out.futility.assign(K, -kInf);
  out.drift.assign(K, 0.0);

  const bool twoSided = spec.sided == Sidedness::Two;
  StoppingDensity dens(Grid::forDrift(0.0, spec.gridPoints));
  const Grid& grid = dens.grid();
  double spent = 0.0;

  for (int j = 1; j <= K; ++j) {
    dens.addStage(fractions[j - 1], 0.0);
    const double target = cumulative(spec.spending, fractions, j, finalAnalysis);
    const double inc = target - cumulative(spec.spending, fractions, j - 1, finalAnalysis);
    out.alphaTarget.push_back(target);

    auto tail = [&](double c) {
      return twoSided ? dens.upperTail(j, c) + dens.lowerTail(j, -c) : dens.upperTail(j, c);
    };

    double c = kInf;
    if (!(inc > 0)) {
      out.warnings.push_back("analysis " + std::to_string(j) +
                             ": no alpha spent, efficacy boundary set to +inf");
    } else {
      const double lo = twoSided ? 0.0 : grid.lower;
      if (tail(lo) < inc) {
        std::ostringstream os;
        os << "spending increment " << inc << " at analysis " << j
           << " exceeds the available probability " << tail(lo);
        throw InfeasibleDesign(kModule, os.str());
      }
      c = bisectDecreasing(tail, inc, lo, grid.upper, massTol(inc));
    }
    if (twoSided) {
      dens.setContinuation(-c, c);
    } else {
      dens.setContinuation(-kInf, c);
    }
    spent += dens.stopMass(j);
    out.alphaSpent.push_back(spent);
    out.efficacy.push_back(std::isfinite(c) ? c / std::sqrt(fractions[j - 1]) : c);
  }
  out.continuationMass = dens.continuationMass(K);

  // Stagewise ordering presumes a convex rejection region; flag boundaries
  // that jump around on the Brownian scale.
  for (int j = 2; j <= K; ++j) {
    const double prev = out.brownian(out.efficacy[j - 2], j - 1);
    const double cur = out.brownian(out.efficacy[j - 1], j);
    if (std::isfinite(prev) && std::isfinite(cur) && cur < prev - 1.0) {
      out.warnings.push_back("efficacy boundary drops sharply at analysis " + std::to_string(j) +
                             "; the rejection region may not be convex");
    }
  }
  return out;
}

BoundaryResult futilityBoundary(const DesignSpec& spec, const BoundaryResult& efficacy,
                                const SpendingFunction& betaSpend,
                                std::span<const double> rFractions, int finalAnalysis) {
  if (spec.sided == Sidedness::Two)
    throw InputError(kModule, "futility boundaries are supported for one-sided designs only");
  const int K = efficacy.analyses();
  if (finalAnalysis <= 0) finalAnalysis = K;
  BoundaryResult out = efficacy;
  out.betaTarget.clear();
  out.betaSpent.clear();
  out.futility.assign(K, -kInf);

  const std::span<const double> f(efficacy.fractions);
  std::span<const double> r = rFractions;
  if (r.empty() && spec.shape == Shape::Constant) r = spec.plannedRFractions;
  const auto mu = oriented(spec.drift(), spec.direction, f, r, K);
  out.drift = mu;

  // Sized by the end-of-trial drift so that a partial schedule reuses the
  // grid of the full design.
  const double reach = std::max(maxAbs(mu), std::abs(spec.drift().endpoint()));
  StoppingDensity dens(Grid::forDrift(reach, spec.gridPoints));
  const Grid& grid = dens.grid();
  double spent = 0.0;
  for (int j = 1; j <= K; ++j) {
    dens.addStage(f[j - 1], mu[j - 1]);
    const double target = cumulative(betaSpend, f, j, finalAnalysis);
    const double inc = target - cumulative(betaSpend, f, j - 1, finalAnalysis);
    out.betaTarget.push_back(target);

    const double c = efficacy.brownian(efficacy.efficacy[j - 1], j);
    double d = -kInf;
    if (inc > 0) {
      const double cap = std::min(c, grid.upper);
      if (dens.lowerTail(j, cap) <= inc) {
        std::ostringstream os;
        os << "design infeasible: futility meets efficacy at analysis " << j;
        throw InfeasibleDesign(kModule, os.str());
      }
      auto negLower = [&](double x) { return -dens.lowerTail(j, x); };
      d = bisectDecreasing(negLower, -inc, grid.lower, cap, massTol(inc));
    }
    dens.setContinuation(d, c);
    spent += dens.lowerTail(j, d);
    out.betaSpent.push_back(spent);
    out.futility[j - 1] = std::isfinite(d) ? d / std::sqrt(f[j - 1]) : d;
  }
  return out;
}

BoundaryResult designBoundaries(const DesignSpec& spec) {
  return designBoundaries(spec, spec.plannedFractions, spec.plannedRFractions, spec.analyses());
}

BoundaryResult designBoundaries(const DesignSpec& spec, std::span<const double> fractions,
                                std::span<const double> rFractions, int finalAnalysis) {
  BoundaryResult eff = efficacyBoundary(spec, fractions, finalAnalysis);
  if (!spec.futility) return eff;
  return futilityBoundary(spec, eff, *spec.futility, rFractions, finalAnalysis);
}

}  // namespace wlrgs
