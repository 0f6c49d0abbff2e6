#include "wlrgs/spending.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wlrgs/error.hpp"
#include "wlrgs/normal.hpp"

namespace wlrgs {

double SpendingFunction::operator()(double f) const {
  if (!(f > 0)) return 0.0;
  f = std::min(f, 1.0);
  switch (family) {
    case Family::OBrienFleming: {
      const double z = normal::quantile(1.0 - total / 2.0);
      return 2.0 * normal::sf(z / std::sqrt(f));
    }
    case Family::Pocock:
      return total * std::log1p((std::numbers::e - 1.0) * f);
    case Family::Power:
      return total * std::pow(f, rho);
  }
  return 0.0;
}

std::string SpendingFunction::name() const {
  std::string s = toString(family);
  if (family == Family::Power) s += "(rho=" + std::to_string(rho) + ")";
  return s;
}

SpendingFunction::Family parseSpendingFamily(const std::string& name) {
  if (name == "obrien-fleming") return SpendingFunction::Family::OBrienFleming;
  if (name == "pocock") return SpendingFunction::Family::Pocock;
  if (name == "power") return SpendingFunction::Family::Power;
  throw InputError("boundary_engine", "unknown spending family '" + name + "'");
}

std::string toString(SpendingFunction::Family family) {
  switch (family) {
    case SpendingFunction::Family::OBrienFleming:
      return "obrien-fleming";
    case SpendingFunction::Family::Pocock:
      return "pocock";
    case SpendingFunction::Family::Power:
      return "power";
  }
  return "";
}

}  // namespace wlrgs
