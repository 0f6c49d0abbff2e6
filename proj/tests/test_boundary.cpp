#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "wlrgs/boundary.hpp"
#include "wlrgs/error.hpp"

using namespace wlrgs;
using doctest::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

DesignSpec oneSided(double alpha, std::vector<double> f,
                    SpendingFunction::Family fam = SpendingFunction::Family::OBrienFleming) {
  DesignSpec s;
  s.alpha = alpha;
  s.spending.family = fam;
  s.spending.total = alpha;
  s.plannedFractions = std::move(f);
  return s;
}

// Null stop masses from a fresh recursion through the given Z-scale boundaries.
std::vector<double> stopMasses(const DesignSpec& spec, const BoundaryResult& b) {
  std::vector<double> out;
  const int K = b.analyses();
  StoppingDensity d = densityRecursion(spec, b.fractions, b.efficacy, K);
  for (int j = 1; j <= K; ++j) {
    const double c = b.brownian(b.efficacy[j - 1], j);
    out.push_back(spec.sided == Sidedness::Two ? d.upperTail(j, c) + d.lowerTail(j, -c)
                                               : d.upperTail(j, c));
  }
  return out;
}

}  // namespace

TEST_CASE("first-stage density values") {
  StoppingDensity d(Grid{});
  d.addStage(1.0);
  CHECK(d.density(1, 0.0) == Approx(0.398942).epsilon(1e-6));
  StoppingDensity q(Grid{});
  q.addStage(0.25);
  CHECK(q.density(1, 0.0) == Approx(0.797885).epsilon(1e-6));
}

TEST_CASE("Gaussian closure without stopping") {
  for (double mu : {0.0, 1.3}) {
    StoppingDensity d(Grid::forDrift(2 * mu));
    d.addStage(0.5, mu / 2);
    d.setContinuation(-kInf, kInf);
    d.addStage(1.0, mu);
    const Eigen::ArrayXd x = d.grid().nodes();
    const Eigen::ArrayXd g = d.gridDensity(2);
    double err = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      err = std::max(err, std::abs(g[i] - std::exp(-0.5 * (x[i] - mu) * (x[i] - mu)) /
                                              std::sqrt(2 * M_PI)));
    CHECK(err < 1e-8);
    CHECK(d.upperTail(2, 1.0 + mu) == Approx(oracle::normalSf(1.0)).epsilon(1e-10));
  }
}

TEST_CASE("tail masses") {
  const DesignSpec spec = oneSided(0.05, {1.0});
  const StoppingDensity d = densityRecursion(spec, spec.plannedFractions, {}, 1);
  CHECK(tailMass(d, 1, 1.644854) == Approx(0.05).epsilon(1e-5));
  CHECK(std::abs(tailMass(d, 1, 1.644854) - 0.05) < 1e-6);
  CHECK(tailMass(d, 1, -kInf) == Approx(1.0));
  CHECK(tailMass(d, 1, kInf) == 0.0);
}

TEST_CASE("single-analysis boundaries are normal quantiles") {
  CHECK(efficacyBoundary(oneSided(0.05, {1.0})).efficacy[0] == Approx(1.644854).epsilon(1e-6));
  CHECK(efficacyBoundary(oneSided(0.025, {1.0})).efficacy[0] == Approx(1.959964).epsilon(1e-6));
  DesignSpec two = oneSided(0.05, {1.0});
  two.sided = Sidedness::Two;
  CHECK(efficacyBoundary(two).efficacy[0] == Approx(1.959964).epsilon(1e-6));
}

TEST_CASE("mass conservation for five analyses") {
  using F = SpendingFunction::Family;
  for (F fam : {F::OBrienFleming, F::Pocock, F::Power}) {
    for (Sidedness sd : {Sidedness::One, Sidedness::Two}) {
      DesignSpec spec = oneSided(0.05, {0.2, 0.4, 0.6, 0.8, 1.0}, fam);
      spec.spending.rho = 2.0;
      spec.sided = sd;
      const BoundaryResult b = efficacyBoundary(spec);
      const std::vector<double> m = stopMasses(spec, b);
      double total = 0.0, prev = 0.0;
      for (int j = 0; j < 5; ++j) {
        const double target = spec.spending(spec.plannedFractions[j]);
        CHECK(std::abs(m[j] - (target - prev)) < 1e-6);
        prev = target;
        total += m[j];
      }
      CHECK(std::abs(total + b.continuationMass - 1.0) < 1e-6);
      CHECK(std::abs(total - 0.05) < 1e-6);
    }
  }
}

TEST_CASE("Pocock boundaries are nearly flat") {
  const BoundaryResult b =
      efficacyBoundary(oneSided(0.05, {0.2, 0.4, 0.6, 0.8, 1.0}, SpendingFunction::Family::Pocock));
  for (double z : b.efficacy) CHECK(std::abs(z - b.efficacy[0]) < 0.25);
}

TEST_CASE("grid refinement changes boundaries by less than 1e-4") {
  DesignSpec spec = oneSided(0.05, {0.15, 0.3, 0.55, 0.8, 1.0});
  const BoundaryResult coarse = efficacyBoundary(spec);
  spec.gridPoints = 8001;
  const BoundaryResult fine = efficacyBoundary(spec);
  for (int j = 0; j < 5; ++j) CHECK(std::abs(coarse.efficacy[j] - fine.efficacy[j]) < 1e-4);
}

TEST_CASE("analyses past the final one get no boundary") {
  const DesignSpec spec = oneSided(0.05, {0.5, 1.0});
  const std::vector<double> f = {0.5, 0.9, 1.0};
  const BoundaryResult b = efficacyBoundary(spec, f, 2);
  CHECK(std::isinf(b.efficacy[2]));
  CHECK_FALSE(b.warnings.empty());
}

TEST_CASE("non-increasing fractions are rejected") {
  const DesignSpec spec = oneSided(0.05, {0.5, 1.0});
  const std::vector<double> f = {0.5, 0.5};
  CHECK_THROWS_WITH_AS(efficacyBoundary(spec, f, 2),
                       "boundary_engine: non-increasing information", InputError);
}

TEST_CASE("futility boundaries") {
  DesignSpec spec = oneSided(0.05, {1.0});
  spec.betaStar = 0.3;
  spec.n = 400;
  spec.functionals = {0.25, 0.25};
  const double mu = spec.drift().endpoint();
  const BoundaryResult eff = efficacyBoundary(spec);

  SpendingFunction none;
  none.total = 0.0;
  CHECK(std::isinf(futilityBoundary(spec, eff, none).futility[0]));

  SpendingFunction beta;
  beta.total = 0.05;
  const BoundaryResult fb = futilityBoundary(spec, eff, beta);
  CHECK(fb.futility[0] == Approx(mu + oracle::normalQuantile(0.05)).epsilon(1e-7));

  DesignSpec flat = spec;
  flat.betaStar = 0.0;
  beta.total = 0.5;
  CHECK(std::abs(futilityBoundary(flat, eff, beta).futility[0]) < 1e-7);

  DesignSpec multi = spec;
  multi.plannedFractions = {0.3, 0.6, 1.0};
  multi.futility = SpendingFunction{SpendingFunction::Family::OBrienFleming, 0.1, 1.0};
  const BoundaryResult both = designBoundaries(multi);
  for (int j = 0; j < 3; ++j) {
    CHECK(both.futility[j] < both.efficacy[j]);
    CHECK(std::abs(both.betaSpent[j] - both.betaTarget[j]) < 1e-6);
  }
}

TEST_CASE("futility that meets efficacy is infeasible") {
  DesignSpec spec = oneSided(0.05, {0.5, 1.0});
  spec.betaStar = 2.0;  // nearly all paths cross efficacy at the first look
  spec.n = 100;
  spec.functionals = {0.25, 0.25};
  spec.futility = SpendingFunction{SpendingFunction::Family::Power, 0.999, 0.1};
  CHECK_THROWS_WITH_AS(designBoundaries(spec), doctest::Contains("futility meets efficacy"),
                       InfeasibleDesign);
}

TEST_CASE("grid too coarse is diagnosed") {
  DesignSpec spec = oneSided(0.05, {0.5, 0.50001, 1.0});
  CHECK_THROWS_WITH_AS(efficacyBoundary(spec), doctest::Contains("grid too coarse"), InputError);
}
