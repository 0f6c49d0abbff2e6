#include "wlrgs/wlr_stat.hpp"

#include <sstream>

#include "wlrgs/error.hpp"

namespace wlrgs {

namespace {
constexpr const char* kModule = "wlr_stat";
}

double SurvivalCurve::leftLimit(double t) const {
  // Number of jumps strictly before t.
  const auto* begin = time.data();
  const auto k = std::lower_bound(begin, begin + time.size(), t) - begin;
  return k == 0 ? 1.0 : surv[k - 1];
}

SurvivalCurve pooledKaplanMeier(const EventTable& table) {
  SurvivalCurve curve;
  curve.time = table.time;
  curve.surv.resize(table.rows());
  double s = 1.0;
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    s *= 1.0 - table.events[r] / table.atRisk[r];
    curve.surv[r] = s;
  }
  return curve;
}

WeightFunction WeightFunction::constant(double level) {
  if (!(level > 0) || !std::isfinite(level))
    throw InputError(kModule, "constant weight must be positive and finite");
  WeightFunction w;
  w.kind_ = Kind::Constant;
  w.level_ = level;
  return w;
}

WeightFunction WeightFunction::rampPlateau(double tc) {
  if (!(tc > 0) || !std::isfinite(tc)) throw InputError(kModule, "ramp knot t_c must be positive");
  WeightFunction w;
  w.kind_ = Kind::RampPlateau;
  w.tc_ = tc;
  return w;
}

WeightFunction WeightFunction::flemingHarrington(double rho, double gamma, SurvivalCurve curve,
                                                 bool fromData) {
  if (!(rho >= 0) || !(gamma >= 0))
    throw InputError(kModule, "Fleming-Harrington exponents must be non-negative");
  if (curve.time.size() != curve.surv.size())
    throw InputError(kModule, "survival curve columns differ in length");
  if ((curve.surv < 0).any() || (curve.surv > 1).any())
    throw InputError(kModule, "survival curve outside [0, 1]");
  WeightFunction w;
  w.kind_ = Kind::FlemingHarrington;
  w.rho_ = rho;
  w.gamma_ = gamma;
  w.curve_ = std::move(curve);
  w.fromData_ = fromData;
  return w;
}

double WeightFunction::operator()(double t) const {
  switch (kind_) {
    case Kind::Constant:
      return level_;
    case Kind::RampPlateau:
      return level_ * std::min(std::max(t, 0.0) / tc_, 1.0);
    case Kind::FlemingHarrington: {
      const double s = curve_.leftLimit(t);
      return level_ * std::pow(s, rho_) * std::pow(1.0 - s, gamma_);
    }
  }
  return 0.0;
}

WeightFunction WeightFunction::scaled(double c) const {
  if (!(c > 0)) throw InputError(kModule, "weight scale must be positive");
  WeightFunction w = *this;
  w.level_ *= c;
  return w;
}

std::string WeightFunction::name() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Constant:
      os << "constant";
      break;
    case Kind::RampPlateau:
      os << "ramp-plateau(t_c=" << tc_ << ")";
      break;
    case Kind::FlemingHarrington:
      os << "fleming-harrington(rho=" << rho_ << ", gamma=" << gamma_ << ")";
      break;
  }
  return os.str();
}

double score(const EventTable& table, const WeightFunction& Q, double t) {
  const Eigen::Index rows = std::distance(
      table.time.data(),
      std::upper_bound(table.time.data(), table.time.data() + table.rows(), t));
  if (rows == 0) return 0.0;
  const auto head = Eigen::seqN(0, rows);
  const Eigen::ArrayXd e = table.atRiskTrt(head) / table.atRisk(head);
  const Eigen::ArrayXd q = Q(table.time(head));
  return (q * (table.eventsTrt(head) - e * table.events(head))).sum() /
         std::sqrt(double(table.n));
}

AnalysisState statistics(const EventTable& table, const WeightFunction& Q, double t,
                         double vTau, int index) {
  if (!(vTau > 0)) throw InputError(kModule, "projected v(tau) must be positive");
  if (!(t > 0)) throw InputError(kModule, "cutoff must be positive");

  AnalysisState s;
  s.index = index;
  s.cutoff = t;
  s.n = double(table.n);
  s.U = score(table, Q, t);
  s.V = bracket(Q, Q, table, t);
  s.m = bracket(Q, one, table, t);
  s.events = (table.time <= t).select(table.events, 0.0).sum();
  if (!Q.deterministic())
    s.warnings.push_back("weight estimated from the monitored data is not deterministic");

  if (s.V <= 0) {
    if (std::abs(s.U) > 0) throw InputError(kModule, "degenerate variance");
    s.vTau = vTau;
    return s;
  }
  s.Z = s.U / std::sqrt(s.V);
  if (s.V > vTau) {
    std::ostringstream os;
    os << "observed V=" << s.V << " exceeds projected v(tau)=" << vTau
       << "; information fraction clamped to 1";
    s.warnings.push_back(os.str());
    s.vTau = s.V;
    s.infoFrac = 1.0;
    s.X = s.Z;
  } else {
    s.vTau = vTau;
    s.infoFrac = s.V / vTau;
    s.X = s.U / std::sqrt(vTau);
  }
  return s;
}

}  // namespace wlrgs
