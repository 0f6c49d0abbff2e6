#pragma once

#include <vector>

#include <Eigen/Core>

namespace wlrgs {

// Pooled cumulative hazard H(t), piecewise linear through its knots and
// extended linearly past the last one. A knot at t = 0 with H = 0 is implied.
class CumulativeHazard {
 public:
  CumulativeHazard(Eigen::ArrayXd times, Eigen::ArrayXd values);

  double operator()(double t) const;
  double lastSlope() const;
  const Eigen::ArrayXd& times() const { return times_; }
  const Eigen::ArrayXd& values() const { return values_; }

 private:
  Eigen::ArrayXd times_;
  Eigen::ArrayXd values_;
};

// H landmarks and the censoring / allocation parameters behind the
// closed-form end-of-trial functionals for the ramp-plateau weight
// Q = min(t / t_c, 1), written on the H scale.
struct ProjectionInputs {
  double hTc = 0.0;          // H(t_c)
  double hTauMinusTer = 0.0; // H(tau - t_er)
  double hTau = 0.0;         // H(tau)
  double theta = 0.0;        // other-cause to primary hazard ratio
  double e0 = 0.5;           // allocation fraction to the intervention arm
  double tc = 4.0;
  double ter = 0.0;
  double tau = 1.0;

  void validate() const;
  static ProjectionInputs fromHazard(const CumulativeHazard& H, double theta, double e0,
                                     double tc, double ter, double tau);
};

// The four pieces of each functional on the H scale: ramp / plateau part of
// the weight crossed with follow-up before / after administrative censoring
// starts to bite.
struct ProjectionTerms {
  double rampUncensored = 0.0;
  double plateauUncensored = 0.0;
  double rampCensored = 0.0;
  double plateauCensored = 0.0;

  double total() const { return rampUncensored + plateauUncensored + rampCensored + plateauCensored; }
};

ProjectionTerms varianceTerms(const ProjectionInputs& in);
ProjectionTerms firstMomentTerms(const ProjectionInputs& in);

// v(tau) = <Q|IF|Q>_tau and m(tau) = <Q|IF|1>_tau, per subject.
double varianceAtTau(const ProjectionInputs& in);
double firstMomentAtTau(const ProjectionInputs& in);
// G(tau): expected fraction of subjects with a primary event by tau.
double eventMass(const ProjectionInputs& in);
// <1|IF|1>_tau = e0 (1 - e0) G(tau).
double oneOneMoment(const ProjectionInputs& in);

// Same functionals by adaptive quadrature over eta = H(xi), for
// cross-checking the closed forms.
struct ProjectionOracle {
  double vTau = 0.0;
  double mTau = 0.0;
  double gTau = 0.0;
  double oneOne = 0.0;
};
ProjectionOracle projectionByQuadrature(const ProjectionInputs& in);

// Expected event fraction by calendar time tau when accrual runs uniformly
// over [0, t_er]; analyses before accrual ends count the enrolled share only.
double eventMassAt(const CumulativeHazard& H, double theta, double ter, double tau);

// Smallest tau with eventMassAt(tau) = target (bisection, 1e-10 in G).
double solveDuration(const CumulativeHazard& H, double theta, double ter, double target);

// v(c) / v(tau) for interim calendar times c, from the same closed forms.
std::vector<double> projectedFractions(const CumulativeHazard& H, double theta, double e0,
                                       double tc, double ter, double tau,
                                       const std::vector<double>& calendar);

}  // namespace wlrgs
