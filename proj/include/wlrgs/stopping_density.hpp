#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

namespace wlrgs {

// Uniform abscissae on the Brownian scale.
struct Grid {
  double lower = -8.0;
  double upper = 8.0;
  Eigen::Index points = 4001;

  double step() const { return (upper - lower) / double(points - 1); }
  Eigen::ArrayXd nodes() const { return Eigen::ArrayXd::LinSpaced(points, lower, upper); }

  // [-(8 + drift), 8 + drift] with the given number of points.
  static Grid forDrift(double maxAbsDrift, Eigen::Index points = 4001);
};

// Sub-densities pi((j, x)) of the Brownian-scale statistic at successive
// analyses, restricted to paths that have not stopped earlier.
//
// Stage 1 is N(mu_1, f_1). Each later stage is the Gaussian convolution
// (variance f_j - f_{j-1}, mean shift mu_j - mu_{j-1}) of the previous
// sub-density on its continuation region. That restriction is discretized
// once, by the trapezoid rule on the grid nodes inside the region plus the
// two region endpoints, so every later stage is a finite Gaussian mixture:
// tail masses are exact in x and grid values come from a Toeplitz sum.
//
// An optional second channel carries N_j(x) = E[X_1 / d ; continue, X_j = x]
// through the same recursion (d = momentDivisor), from which the
// conditional mean E[X_1 / d | J = j, X_j = x] = N_j(x) / pi_j(x) follows.
//
// Analyses are numbered from 1.
class StoppingDensity {
 public:
  explicit StoppingDensity(Grid grid, std::optional<double> momentDivisor = std::nullopt);

  // Appends analysis j = stages() + 1 at information fraction f with drift
  // mean mu. The previous stage must have its continuation region set.
  void addStage(double fraction, double mean = 0.0);

  // Paths of the last stage continue iff lo < x < hi; either bound may be
  // infinite. Discretizes the continuing sub-density for the next stage.
  void setContinuation(double lo, double hi);

  int stages() const { return static_cast<int>(stages_.size()); }
  const Grid& grid() const { return grid_; }
  double fraction(int j) const { return at(j).fraction; }
  double increment(int j) const { return at(j).increment; }
  double mean(int j) const { return at(j).mean; }
  double continuationLower(int j) const { return at(j).lo; }
  double continuationUpper(int j) const { return at(j).hi; }

  double density(int j, double x) const;
  // N_j(x); requires a moment divisor.
  double moment(int j, double x) const;
  // Integral of pi_j over (x, inf) and (-inf, x).
  double upperTail(int j, double x) const;
  double lowerTail(int j, double x) const;
  // Total sub-density mass at analysis j.
  double mass(int j) const;
  // Mass stopped at analysis j (outside its continuation region).
  double stopMass(int j) const;
  // Mass carried past analysis j, as discretized.
  double continuationMass(int j) const;

  // pi_j on the grid nodes.
  Eigen::ArrayXd gridDensity(int j) const;

  bool tracksMoment() const { return momentDivisor_.has_value(); }

 private:
  struct Atoms {
    Eigen::ArrayXd loc;
    Eigen::ArrayXd mass;
    Eigen::ArrayXd moment;
    // loc(1 .. gridCount) sit on consecutive grid nodes from gridFirst;
    // loc(0) and loc(last) are the region endpoints.
    Eigen::Index gridFirst = 0;
    Eigen::Index gridCount = 0;
  };

  struct Stage {
    double fraction = 0.0;
    double increment = 0.0;
    double mean = 0.0;
    double shift = 0.0;
    double lo = 0.0, hi = 0.0;
    bool closed = false;
    Atoms carry;  // discretized continuing sub-density, feeds stage j + 1
  };

  const Stage& at(int j) const;
  const Atoms* source(int j) const;  // atoms generating stage j (null for j = 1)
  // Grid values of pi_j and N_j.
  void gridValues(int j, Eigen::ArrayXd& dens, Eigen::ArrayXd* mom) const;

  Grid grid_;
  Eigen::ArrayXd nodes_;
  std::optional<double> momentDivisor_;
  std::vector<Stage> stages_;
};

}  // namespace wlrgs
