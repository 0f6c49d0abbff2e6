#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wlrgs/drift.hpp"
#include "wlrgs/spending.hpp"
#include "wlrgs/stopping_density.hpp"
#include "wlrgs/wlr_stat.hpp"

namespace wlrgs {

enum class Sidedness { One, Two };

// Everything the interim analysis plan fixes in advance.
struct DesignSpec {
  double alpha = 0.05;
  Sidedness sided = Sidedness::One;
  // +1: efficacy is a large positive statistic; -1: a large negative one
  // (a protective intervention has negative log relative risk).
  int direction = 1;
  SpendingFunction spending;
  std::optional<SpendingFunction> futility;  // type-II spending, one-sided only
  std::vector<double> plannedFractions;
  std::vector<double> plannedRFractions;  // constant shape only
  Shape shape = Shape::OptimalWeight;
  double betaStar = 0.0;  // design alternative, log scale
  EndFunctionals functionals;
  double n = 0.0;
  WeightFunction weight = WeightFunction::constant();
  Eigen::Index gridPoints = 4001;

  int analyses() const { return static_cast<int>(plannedFractions.size()); }
  DriftCurve<double> drift() const;
  void validate() const;
};

// Boundaries on the oriented scale: efficacy is crossed when
// direction * Z >= efficacy[j] (two-sided: |Z| >= efficacy[j]) and
// futility when direction * Z <= futility[j].
struct BoundaryResult {
  std::vector<double> fractions;
  std::vector<double> efficacy;         // Z scale, +inf when nothing is spent
  std::vector<double> futility;         // Z scale, -inf when absent
  std::vector<double> alphaTarget;      // cumulative spending function values
  std::vector<double> alphaSpent;       // cumulative null stopping mass achieved
  std::vector<double> betaTarget;       // cumulative type-II spending
  std::vector<double> betaSpent;        // cumulative stopping-for-futility mass under drift
  std::vector<double> drift;            // oriented drift at each analysis
  double continuationMass = 0.0;        // null mass surviving the last analysis
  std::vector<std::string> warnings;

  int analyses() const { return static_cast<int>(fractions.size()); }
  bool hasFutility() const;
  // Brownian-scale version of a Z-scale bound.
  double brownian(double z, int j) const;
};

// Null (or drifted) sub-densities through analysis upTo, given Z-scale
// efficacy boundaries for the analyses before it. Paths continue below the
// oriented boundary (inside +-boundary when two-sided).
StoppingDensity densityRecursion(const DesignSpec& spec, std::span<const double> fractions,
                                 std::span<const double> efficacy, int upTo,
                                 std::optional<DriftCurve<double>> drift = std::nullopt,
                                 std::span<const double> rFractions = {},
                                 std::optional<double> momentDivisor = std::nullopt);

// Integral of pi((j, .)) over (x, inf).
double tailMass(const StoppingDensity& density, int j, double x);

// Lan-DeMets efficacy boundary at the given information fractions. The
// analysis numbered finalAnalysis (default: the last) spends all of alpha.
BoundaryResult efficacyBoundary(const DesignSpec& spec);
BoundaryResult efficacyBoundary(const DesignSpec& spec, std::span<const double> fractions,
                                int finalAnalysis);

// Non-binding futility boundary under the design drift, built on top of a
// finished efficacy boundary (which is left untouched).
BoundaryResult futilityBoundary(const DesignSpec& spec, const BoundaryResult& efficacy,
                                const SpendingFunction& betaSpend,
                                std::span<const double> rFractions = {}, int finalAnalysis = 0);

// Efficacy then (if configured) futility.
BoundaryResult designBoundaries(const DesignSpec& spec);
BoundaryResult designBoundaries(const DesignSpec& spec, std::span<const double> fractions,
                                std::span<const double> rFractions, int finalAnalysis);

}  // namespace wlrgs
