#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "wlrgs/drift.hpp"
#include "wlrgs/error.hpp"

using namespace wlrgs;
using doctest::Approx;

namespace {

DriftCurve<double> nlstLike(Shape shape = Shape::OptimalWeight) {
  DriftCurve<double> c;
  c.betaStar = std::log(0.85);
  c.n = 50000;
  c.vTau = 0.0022642826448493773;
  c.mTau = 0.002612743692215903;
  c.shape = shape;
  return c;
}

}  // namespace

TEST_CASE("drift endpoints") {
  const DriftCurve<double> c = nlstLike();
  CHECK(driftAt(c, 0.0) == 0.0);
  const double direct = 0.002612743692215903 / std::sqrt(0.0022642826448493773) *
                        std::sqrt(50000.0) * std::log(0.85);
  CHECK(driftAt(c, 1.0) == Approx(direct).epsilon(1e-12));
  const DriftCurve<double> k = nlstLike(Shape::Constant);
  CHECK(driftAt(k, 0.0, 0.0) == 0.0);
  CHECK(driftAt(k, 1.0, 1.0) == Approx(direct).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(driftAt(k, 0.5), "drift_estimation: r-fraction required", InputError);
}

TEST_CASE("drift is monotone with the sign of beta*") {
  DriftCurve<double> c = nlstLike();
  Eigen::ArrayXd f = Eigen::ArrayXd::LinSpaced(11, 0.0, 1.0);
  Eigen::ArrayXd mu = driftAt(c, f);
  for (Eigen::Index i = 1; i < f.size(); ++i) CHECK(mu[i] < mu[i - 1]);
  c.betaStar = 0.2;
  mu = driftAt(c, f);
  for (Eigen::Index i = 1; i < f.size(); ++i) CHECK(mu[i] > mu[i - 1]);
}

TEST_CASE("estimate at the end on two subjects") {
  const EventTable t = ingest(fixture::twoSubjects(), 3.0);
  const AnalysisState s = statistics(t, WeightFunction::constant(), 3.0, 0.125);
  const BetaStarEstimate e = estimateAtEnd(s);
  CHECK(e.betaHat == Approx(2.0).epsilon(1e-14));
  CHECK(e.mse == Approx(4.0).epsilon(1e-14));
  AnalysisState zero = s;
  zero.X = 0.0;
  CHECK(estimateAtEnd(zero).betaHat == 0.0);
}

TEST_CASE("early estimate by formula") {
  AnalysisState s;
  s.X = 0.5;
  s.infoFrac = 0.5;
  s.n = 1.0;
  // scale factor sqrt(v) / (sqrt(n) m) = 1 with v = m = 1, n = 1
  const BetaStarEstimate e = estimateEarly(s, Shape::OptimalWeight, EndFunctionals{1.0, 1.0});
  CHECK(e.scaleFactor == 1.0);
  CHECK(e.betaHat == Approx(1.0));
  s.infoFrac = 0.0;
  CHECK_THROWS_WITH_AS(estimateEarly(s, Shape::OptimalWeight, EndFunctionals{1.0, 1.0}),
                       "drift_estimation: no information accrued", InputError);
  CHECK_THROWS_WITH_AS(estimateAtEnd(s, EndFunctionals{1.0, 0.0}),
                       "drift_estimation: degenerate first moment", InputError);
}

TEST_CASE("early estimate at f = r = 1 equals the end estimate") {
  std::mt19937_64 rng(5);
  const WeightFunction Q = WeightFunction::rampPlateau(1.0);
  for (int rep = 0; rep < 10; ++rep) {
    const EventTable t = ingest(fixture::randomSample(rng), 3.0);
    AnalysisState s = statistics(t, Q, 3.0, 1.0);
    if (!(s.V > 0) || s.m == 0) continue;
    const EndFunctionals obs{s.V, s.m};
    s = statistics(t, Q, 3.0, s.V);
    const BetaStarEstimate end = estimateAtEnd(s, obs);
    for (Shape shape : {Shape::OptimalWeight, Shape::Constant}) {
      const BetaStarEstimate early = estimateEarly(s, shape, obs, rFraction(s, obs));
      CHECK(early.betaHat == end.betaHat);
      CHECK(early.mse == end.mse);
    }
  }
}

TEST_CASE("weight scale invariance") {
  std::mt19937_64 rng(17);
  const WeightFunction Q = WeightFunction::rampPlateau(1.5);
  const WeightFunction cQ = Q.scaled(3.7);
  for (int rep = 0; rep < 10; ++rep) {
    const EventTable t = ingest(fixture::randomSample(rng), 3.0);
    const AnalysisState a = statistics(t, Q, 3.0, 1.0);
    if (!(a.V > 0) || a.m == 0) continue;
    const EndFunctionals fa{2 * a.V, 1.5 * a.m};
    const EndFunctionals fb{fa.vTau * 3.7 * 3.7, fa.mTau * 3.7};
    const AnalysisState b = statistics(t, cQ, 3.0, fb.vTau);
    const AnalysisState a2 = statistics(t, Q, 3.0, fa.vTau);
    CHECK(b.infoFrac == Approx(a2.infoFrac).epsilon(1e-12));
    CHECK(b.Z == Approx(a2.Z).epsilon(1e-12));
    const auto ea = estimateEarly(a2, Shape::OptimalWeight, fa);
    const auto eb = estimateEarly(b, Shape::OptimalWeight, fb);
    CHECK(eb.betaHat == Approx(ea.betaHat).epsilon(1e-12));
    CHECK(eb.mse == Approx(ea.mse).epsilon(1e-12));
  }
}

TEST_CASE("shape identity with K from the same table") {
  std::mt19937_64 rng(23);
  const WeightFunction Q = WeightFunction::rampPlateau(2.0);
  for (int rep = 0; rep < 10; ++rep) {
    const EventTable t = ingest(fixture::randomSample(rng), 3.0);
    if (!(bracket(Q, Q, t, 3.0) > 0)) continue;
    const double K = proportionalityConstant(t, Q, 3.0);
    auto q = [&](double s) { return K * Q(s); };
    CHECK(std::abs(bracket(Q, q, t, 3.0) - bracket(Q, one, t, 3.0)) < 1e-12);
  }
}
