#pragma once

#include <string>

#include <Eigen/Core>

namespace wlrgs {

// Lan-DeMets error spending function: cumulative error spent by information
// fraction f, with spend(0) = 0 and spend(1) = total.
struct SpendingFunction {
  enum class Family {
    OBrienFleming,  // total * 2 (1 - Phi(z_{1-total/2} / sqrt(f)))
    Pocock,         // total * ln(1 + (e - 1) f)
    Power           // total * f^rho
  };

  Family family = Family::OBrienFleming;
  double total = 0.05;
  double rho = 1.0;

  double operator()(double f) const;

  template <class Derived>
  Eigen::ArrayXd operator()(const Eigen::ArrayBase<Derived>& f) const {
    return f.unaryExpr([this](double v) { return (*this)(v); });
  }

  std::string name() const;
};

SpendingFunction::Family parseSpendingFamily(const std::string& name);
std::string toString(SpendingFunction::Family family);

}  // namespace wlrgs
