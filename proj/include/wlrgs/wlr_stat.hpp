#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wlrgs/survival_data.hpp"

namespace wlrgs {

// Right-continuous step function S(t); evaluated from the left, S(t-),
// whenever it feeds a weight.
struct SurvivalCurve {
  Eigen::ArrayXd time;  // jump times, increasing
  Eigen::ArrayXd surv;  // S at and after each jump

  double leftLimit(double t) const;
};

// Pooled Kaplan-Meier estimate over all listed event times.
SurvivalCurve pooledKaplanMeier(const EventTable& table);

// Deterministic, bounded, non-negative weight Q(t).
class WeightFunction {
 public:
  enum class Kind { Constant, RampPlateau, FlemingHarrington };

  static WeightFunction constant(double level = 1.0);
  // Q(t) = min(t / tc, 1).
  static WeightFunction rampPlateau(double tc);
  // Q(t) = S(t-)^rho (1 - S(t-))^gamma with S frozen ahead of time.
  // fromData marks a curve estimated from the very data being tested; the
  // weight is then random and triggers a warning downstream.
  static WeightFunction flemingHarrington(double rho, double gamma, SurvivalCurve curve,
                                          bool fromData = false);

  double operator()(double t) const;

  template <class Derived>
  Eigen::ArrayXd operator()(const Eigen::ArrayBase<Derived>& t) const {
    return t.unaryExpr([this](double s) { return (*this)(s); });
  }

  // Multiplies the weight by c > 0.
  WeightFunction scaled(double c) const;

  Kind kind() const { return kind_; }
  double level() const { return level_; }
  double tc() const { return tc_; }
  double rho() const { return rho_; }
  double gamma() const { return gamma_; }
  const SurvivalCurve& curve() const { return curve_; }
  bool deterministic() const { return !fromData_; }
  std::string name() const;

 private:
  Kind kind_ = Kind::Constant;
  double level_ = 1.0;
  double tc_ = 1.0;
  double rho_ = 0.0, gamma_ = 0.0;
  SurvivalCurve curve_;
  bool fromData_ = false;
};

// Empirical cross moment <psi1 | IF_n | psi2>_t: the sum over event times
// xi <= t of psi1(xi) psi2(xi) E(1 - E) dN / n.
template <class F1, class F2>
double bracket(const F1& psi1, const F2& psi2, const EventTable& table, double t) {
  const Eigen::Index rows = std::distance(
      table.time.data(),
      std::upper_bound(table.time.data(), table.time.data() + table.rows(), t));
  if (rows == 0) return 0.0;
  const auto head = Eigen::seqN(0, rows);
  const Eigen::ArrayXd e = table.atRiskTrt(head) / table.atRisk(head);
  const Eigen::ArrayXd times = table.time(head);
  const Eigen::ArrayXd w1 = times.unaryExpr([&](double s) { return double(psi1(s)); });
  const Eigen::ArrayXd w2 = times.unaryExpr([&](double s) { return double(psi2(s)); });
  return (w1 * w2 * e * (1 - e) * table.events(head)).sum() / double(table.n);
}

// Unit function, for brackets such as <Q | IF | 1>.
inline double one(double) { return 1.0; }

// sqrt(n)-normalized weighted score U_n(t).
double score(const EventTable& table, const WeightFunction& Q, double t);

struct AnalysisState {
  int index = 1;             // analysis number j
  double cutoff = 0.0;       // t_j
  double U = 0.0;            // score
  double V = 0.0;            // <Q|IF_n|Q>_t
  double m = 0.0;            // <Q|IF_n|1>_t
  double Z = 0.0;            // standard normal scale
  double X = 0.0;            // Brownian scale
  double infoFrac = 0.0;     // V / v(tau)
  double vTau = 0.0;         // normalizer actually used for X
  double n = 0.0;            // subjects
  double events = 0.0;
  std::vector<std::string> warnings;
};

// Score, variance and both scales at cutoff t, normalized by the projected
// end-of-trial variance vTau. If V(t) exceeds vTau the fraction is clamped
// to 1 and V(t) itself becomes the normalizer, so X = Z sqrt(f) always.
AnalysisState statistics(const EventTable& table, const WeightFunction& Q, double t,
                         double vTau, int index = 1);

}  // namespace wlrgs
