#pragma once

#include <optional>
#include <vector>

#include "wlrgs/boundary.hpp"
#include "wlrgs/drift.hpp"

namespace wlrgs {

// Stagewise-ordering inference after stopping at analysis J with
// Brownian-scale value x. All x arguments are on the oriented scale
// (direction * X); `boundary` holds the efficacy boundaries at the observed
// fractions f_1..f_J (later entries are ignored).

// Pi-bar((J, x)) plus the null stopping mass of analyses 1..J-1. Two-sided
// designs order on |x|.
double sequentialPValue(const DesignSpec& spec, const BoundaryResult& boundary, int J, double x);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double xu = 0.0;      // Brownian-scale critical value
  double target = 0.0;  // tail probability solved for
};

// Critical value: Pi-bar((J, x_u)) = alpha_tot - alpha_{J-1}, halved for
// one-sided designs (two-sided designs use the |x| tail). The interval is
// center +- (x_u / sqrt(f_J)) sqrt(mse).
Interval confidenceInterval(const DesignSpec& spec, const BoundaryResult& boundary, int J,
                            double center, double mse);

// zeta-tilde(J, x): conditional mean of X_1 / d given (J, X_J = x) under the
// null, with d = f_1 (optimal-weight shape) or r_1 (constant shape).
double biasAdjust(const DesignSpec& spec, const BoundaryResult& boundary, int J, double x,
                  std::optional<double> firstDivisor = std::nullopt);

// Everything reported at the stopping analysis, on the raw (unoriented)
// log relative risk scale.
struct InferenceSummary {
  int J = 1;
  double x = 0.0;  // raw Brownian-scale statistic
  double pValue = 1.0;
  double betaHat = 0.0;
  double betaTilde = 0.0;
  double zetaTilde = 0.0;  // raw scale
  double mse = 0.0;
  double scaleFactor = 0.0;
  Interval ci;       // around betaHat
  Interval ciTilde;  // around betaTilde
  std::vector<std::string> warnings;
};

// One null density pass (with the moment channel) for p-value, interval and
// bias adjustment. `estimate` carries betaHat, mse and the scale factor;
// firstDivisor as in biasAdjust.
InferenceSummary infer(const DesignSpec& spec, const BoundaryResult& boundary, int J, double x,
                       const BetaStarEstimate& estimate,
                       std::optional<double> firstDivisor = std::nullopt);

}  // namespace wlrgs
