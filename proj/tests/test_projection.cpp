#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wlrgs/error.hpp"
#include "wlrgs/projection.hpp"

using namespace wlrgs;
using doctest::Approx;

namespace {

ProjectionInputs landmarks(double hc, double he, double ht, double theta, double tc, double ter,
                           double tau, double e0 = 0.5) {
  ProjectionInputs in;
  in.hTc = hc;
  in.hTauMinusTer = he;
  in.hTau = ht;
  in.theta = theta;
  in.e0 = e0;
  in.tc = tc;
  in.ter = ter;
  in.tau = tau;
  return in;
}

oracle::Functionals reference(const ProjectionInputs& in) {
  const double he = in.ter > 0 ? in.hTauMinusTer : in.hTau;
  return oracle::functionalsByQuadrature(in.hTc, he, in.hTau, in.theta, in.e0);
}

// H(t) = a t + b t^2.
CumulativeHazard quadraticHazard(double a, double b) {
  Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(41, 0.25, 10.0);
  return CumulativeHazard(t, a * t + b * t * t);
}

}  // namespace

TEST_CASE("zero hazard gives zero functionals") {
  const ProjectionInputs in = landmarks(0, 0, 0, 0.3, 4, 1.7, 7.4);
  CHECK(varianceAtTau(in) == 0.0);
  CHECK(firstMomentAtTau(in) == 0.0);
  CHECK(eventMass(in) == 0.0);
}

TEST_CASE("degenerate accrual window") {
  const ProjectionInputs in = landmarks(0.01, 0.02, 0.02, 0.0, 4, 1.7, 7.4);
  CHECK_THROWS_WITH_AS(varianceAtTau(in), doctest::Contains("degenerate accrual window"),
                       InputError);
}

TEST_CASE("closed forms against quadrature on both branches") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int early = 0, late = 0;
  for (int k = 0; k < 120; ++k) {
    const double theta = 2.0 * u(rng);
    const double tau = 5.0 + 4.0 * u(rng);
    const double ter = 0.5 + 3.0 * u(rng);
    const double tc = 0.5 + 7.0 * u(rng);
    const double scale = k % 10 == 0 ? 0.3 : 0.01;  // mostly H(tau) <= 0.1
    const auto H = quadraticHazard(scale * u(rng) + 1e-4, 0.1 * scale * u(rng));
    const ProjectionInputs in = ProjectionInputs::fromHazard(H, theta, 0.5, tc, ter, tau);
    (tc < tau - ter ? early : late)++;
    const oracle::Functionals ref = reference(in);
    CHECK(oracle::relErr(varianceAtTau(in), ref.v) < 1e-8);
    CHECK(oracle::relErr(firstMomentAtTau(in), ref.m) < 1e-8);
    CHECK(oracle::relErr(eventMass(in), ref.g) < 1e-8);
  }
  CHECK(early > 10);
  CHECK(late > 10);
}

TEST_CASE("closed forms across the series switch") {
  // Small arguments take the power-series route; sweep H across it.
  for (double ht = 1e-4; ht < 2.0; ht *= 1.37) {
    const ProjectionInputs in = landmarks(0.6 * ht, 0.8 * ht, ht, 0.4, 3.0, 1.0, 5.0);
    const oracle::Functionals ref = reference(in);
    CHECK(oracle::relErr(varianceAtTau(in), ref.v) < 1e-8);
    CHECK(oracle::relErr(firstMomentAtTau(in), ref.m) < 1e-8);
    const ProjectionInputs late = landmarks(0.9 * ht, 0.5 * ht, ht, 1.5, 4.5, 1.0, 5.0);
    const oracle::Functionals ref2 = reference(late);
    CHECK(oracle::relErr(varianceAtTau(late), ref2.v) < 1e-8);
    CHECK(oracle::relErr(firstMomentAtTau(late), ref2.m) < 1e-8);
  }
}

TEST_CASE("branch continuity where t_c meets tau - t_er") {
  const double h = 0.05;
  const ProjectionInputs below = landmarks(h * (1 - 1e-12), h, 0.09, 0.2, 4.0 - 1e-11, 2.0, 6.0);
  const ProjectionInputs above = landmarks(h * (1 + 1e-12), h, 0.09, 0.2, 4.0 + 1e-11, 2.0, 6.0);
  CHECK(std::abs(varianceAtTau(below) - varianceAtTau(above)) < 1e-10 * varianceAtTau(above));
  CHECK(std::abs(firstMomentAtTau(below) - firstMomentAtTau(above)) <
        1e-10 * firstMomentAtTau(above));
}

TEST_CASE("flat-weight limit and event mass") {
  const ProjectionInputs in = landmarks(0.0, 0.04, 0.07, 0.3, 0.0, 1.5, 6.0);
  CHECK(std::abs(varianceAtTau(in) - firstMomentAtTau(in)) < 1e-10);
  CHECK(oneOneMoment(in) == Approx(0.25 * eventMass(in)));
  // tiny t_c approaches the same limit
  const ProjectionInputs near = landmarks(1e-12, 0.04, 0.07, 0.3, 1e-10, 1.5, 6.0);
  CHECK(std::abs(varianceAtTau(near) - firstMomentAtTau(near)) < 1e-10);

  const ProjectionInputs open = landmarks(0.02, 0.05, 0.05, 0.0, 3.0, 0.0, 6.0);
  CHECK(eventMass(open) == Approx(1 - std::exp(-0.05)).epsilon(1e-14));
}

TEST_CASE("allocation rescaling, Cauchy-Schwarz and monotonicity") {
  const ProjectionInputs base = landmarks(0.03, 0.05, 0.08, 0.1, 4.0, 1.7, 7.4);
  ProjectionInputs skew = base;
  skew.e0 = 0.3;
  CHECK(varianceAtTau(skew) == Approx(4 * 0.3 * 0.7 * varianceAtTau(base)).epsilon(1e-13));
  const double m = firstMomentAtTau(base);
  CHECK(m * m <= varianceAtTau(base) * oneOneMoment(base));
  double pv = 0, pm = 0, pg = 0;
  for (double ht = 0.06; ht < 0.3; ht += 0.01) {
    ProjectionInputs in = base;
    in.hTau = ht;
    CHECK(varianceAtTau(in) >= pv);
    CHECK(firstMomentAtTau(in) >= pm);
    CHECK(eventMass(in) >= pg);
    pv = varianceAtTau(in);
    pm = firstMomentAtTau(in);
    pg = eventMass(in);
  }
}

TEST_CASE("term decomposition sums to the total") {
  const ProjectionInputs in = landmarks(0.03, 0.05, 0.08, 0.1, 4.0, 1.7, 7.4);
  const ProjectionTerms t = varianceTerms(in);
  CHECK(t.total() == varianceAtTau(in));
  CHECK(t.rampCensored == 0.0);  // t_c before censoring starts
}

TEST_CASE("duration solving") {
  const CumulativeHazard H(Eigen::ArrayXd::LinSpaced(5, 1.0, 5.0),
                           (Eigen::ArrayXd(5) << 0.01, 0.025, 0.045, 0.06, 0.09).finished());
  CHECK(solveDuration(H, 0.0, 1.5, 0.0) == 0.0);

  const double tau0 = 4.3;
  const double g0 = eventMassAt(H, 0.0, 1.5, tau0);
  CHECK(solveDuration(H, 0.0, 1.5, g0) == Approx(tau0).epsilon(1e-8));

  // brute-force grid search on a fine calendar grid
  const double target = 0.05;
  double best = 0;
  for (double t = 0; t < 20; t += 1e-5)
    if (eventMassAt(H, 0.0, 1.5, t) >= target) {
      best = t;
      break;
    }
  CHECK(std::abs(solveDuration(H, 0.0, 1.5, target) - best) < 2e-5);

  CHECK_THROWS_WITH_AS(solveDuration(H, 0.5, 1.5, 0.9),
                       doctest::Contains("required events unattainable"), InputError);
}

TEST_CASE("projected fractions") {
  const auto H = quadraticHazard(0.0015, 0.00015);
  const std::vector<double> f =
      projectedFractions(H, 0.05, 0.5, 4.0, 1.72, 7.41, {1.0, 2.45, 4.45, 6.45, 7.41});
  CHECK(f.back() == Approx(1.0).epsilon(1e-14));
  for (std::size_t i = 1; i < f.size(); ++i) CHECK(f[i] > f[i - 1]);
}
