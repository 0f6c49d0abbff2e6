#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "wlrgs/error.hpp"
#include "wlrgs/inference.hpp"

using namespace wlrgs;
using doctest::Approx;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

DesignSpec design(std::vector<double> f, double alpha = 0.05) {
  DesignSpec s;
  s.alpha = alpha;
  s.spending.total = alpha;
  s.plannedFractions = std::move(f);
  return s;
}

double phi(double x, double var) { return std::exp(-x * x / (2 * var)) / std::sqrt(2 * M_PI * var); }

}  // namespace

TEST_CASE("single-analysis p-value is the normal tail") {
  const DesignSpec spec = design({1.0});
  const BoundaryResult b = efficacyBoundary(spec);
  CHECK(std::abs(sequentialPValue(spec, b, 1, 1.644854) - 0.05) < 1e-6);
  CHECK(sequentialPValue(spec, b, 1, 40.0) < 1e-15);
  CHECK(sequentialPValue(spec, b, 1, -40.0) == Approx(1.0));
}

TEST_CASE("p-value on the boundary equals cumulative spending") {
  using F = SpendingFunction::Family;
  for (F fam : {F::OBrienFleming, F::Pocock}) {
    DesignSpec spec = design({0.2, 0.4, 0.6, 0.8, 1.0});
    spec.spending.family = fam;
    const BoundaryResult b = efficacyBoundary(spec);
    for (int J = 1; J <= 5; ++J) {
      const double x = b.brownian(b.efficacy[J - 1], J);
      CHECK(std::abs(sequentialPValue(spec, b, J, x) - spec.spending(b.fractions[J - 1])) < 1e-6);
    }
  }
}

TEST_CASE("two-analysis p-value against direct integration") {
  const DesignSpec spec = design({0.4, 1.0});
  const BoundaryResult b = efficacyBoundary(spec);
  const double c = b.brownian(b.efficacy[0], 1);
  for (double x : {-0.5, 0.7, 1.5, 2.5}) {
    const double inner = gauss_kronrod<double, 31>::integrate(
        [&](double x1) { return phi(x1, 0.4) * oracle::normalSf((x - x1) / std::sqrt(0.6)); },
        -12.0, c, 15, 1e-14);
    const double ref = oracle::normalSf(c / std::sqrt(0.4)) + inner;
    CHECK(std::abs(sequentialPValue(spec, b, 2, x) - ref) < 1e-7);  // O(h^2) grid error
  }
}

TEST_CASE("interval at a single analysis") {
  const DesignSpec spec = design({1.0});
  const BoundaryResult b = efficacyBoundary(spec);
  const Interval ci = confidenceInterval(spec, b, 1, 0.3, 0.04);
  CHECK(ci.xu == Approx(1.959964).epsilon(1e-6));
  CHECK(std::abs(ci.lower - (0.3 - 1.959964 * 0.2)) < 1e-6);
  CHECK(std::abs(ci.upper - (0.3 + 1.959964 * 0.2)) < 1e-6);

  DesignSpec two = spec;
  two.sided = Sidedness::Two;
  CHECK(confidenceInterval(two, efficacyBoundary(two), 1, 0.0, 1.0).xu ==
        Approx(1.959964).epsilon(1e-6));

  const Interval point = confidenceInterval(spec, b, 1, 0.3, 0.0);
  CHECK(point.lower == 0.3);
  CHECK(point.upper == 0.3);
}

TEST_CASE("bias adjustment at the first analysis") {
  const DesignSpec spec = design({0.5, 1.0});
  const BoundaryResult b = efficacyBoundary(spec);
  CHECK(biasAdjust(spec, b, 1, 0.5) == Approx(1.0));
  CHECK(biasAdjust(spec, b, 1, 0.0) == 0.0);
}

TEST_CASE("without interim stopping the adjustment is x / f_J") {
  const DesignSpec spec = design({0.25, 0.5, 1.0});
  BoundaryResult open = efficacyBoundary(spec);
  open.efficacy = {kInf, kInf, open.efficacy[2]};
  for (double x : {-1.0, 0.3, 2.0}) CHECK(biasAdjust(spec, open, 3, x) == Approx(x).epsilon(1e-9));
  CHECK(biasAdjust(spec, open, 2, 0.8) == Approx(1.6).epsilon(1e-9));
}

TEST_CASE("conditional mean against direct integration") {
  const DesignSpec spec = design({0.3, 1.0}, 0.1);
  const BoundaryResult b = efficacyBoundary(spec);
  const double c = b.brownian(b.efficacy[0], 1);
  for (double x : {0.0, 1.0, 2.2}) {
    auto w = [&](double x1) { return phi(x1, 0.3) * phi(x - x1, 0.7); };
    const double num = gauss_kronrod<double, 31>::integrate(
        [&](double x1) { return x1 / 0.3 * w(x1); }, -12.0, c, 15, 1e-14);
    const double den = gauss_kronrod<double, 31>::integrate(w, -12.0, c, 15, 1e-14);
    CHECK(biasAdjust(spec, b, 2, x) == Approx(num / den).epsilon(1e-6));
  }
}

TEST_CASE("infer reports on the raw scale") {
  DesignSpec spec = design({0.5, 1.0});
  spec.direction = -1;
  const BoundaryResult b = efficacyBoundary(spec);
  BetaStarEstimate e;
  e.betaHat = -0.2;
  e.mse = 0.01;
  e.scaleFactor = 0.1;
  const InferenceSummary s = infer(spec, b, 2, -2.0, e);
  CHECK(s.betaHat == -0.2);
  CHECK(s.ci.lower < -0.2);
  CHECK(s.ci.upper > -0.2);
  CHECK(s.pValue == Approx(sequentialPValue(spec, b, 2, 2.0)).epsilon(1e-12));
  CHECK(s.zetaTilde == Approx(-biasAdjust(spec, b, 2, 2.0)).epsilon(1e-12));
  CHECK(s.betaTilde == Approx(s.zetaTilde * 0.1).epsilon(1e-12));
}

TEST_CASE("stopping analysis outside the schedule") {
  const DesignSpec spec = design({1.0});
  const BoundaryResult b = efficacyBoundary(spec);
  CHECK_THROWS_AS(sequentialPValue(spec, b, 2, 0.0), InputError);
}
