#include "wlrgs/projection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "wlrgs/error.hpp"
#include "wlrgs/quadrature.hpp"

namespace wlrgs {

namespace {

constexpr const char* kModule = "eot_projection";

// Switch to the power series once (a + p) u is this small.
constexpr double kSeriesReach = 0.5;
constexpr int kSeriesTerms = 40;

// int_0^w exp(-k s) ds
double e1(double k, double w) { return -std::expm1(-k * w) / k; }

// int_0^w s exp(-k s) ds
double e2(double k, double w) {
  const double z = k * w;
  if (z < 0.5) {
    double sum = 0.0, term = 1.0;  // (-z)^j / j!
    for (int j = 0; j < kSeriesTerms; ++j) {
      sum += term / (j + 2);
      term *= -z / (j + 1);
    }
    return w * w * sum;
  }
  return (1.0 - std::exp(-z) * (1.0 + z)) / (k * k);
}

// int_l^u exp(-k eta) deta, optionally times (ht - eta).
double expPiece(double k, double l, double u, std::optional<double> ht) {
  if (!(u > l)) return 0.0;
  const double w = u - l;
  const double scale = std::exp(-k * l);
  if (!ht) return scale * e1(k, w);
  return scale * ((*ht - l) * e1(k, w) - e2(k, w));
}

// int_l^u (1 - exp(-eta))^p exp(-a eta) [ht - eta] deta for p in {1, 2}.
double rampPiece(int p, double a, double l, double u, std::optional<double> ht) {
  if (!(u > l)) return 0.0;
  const std::array<double, 3> coef = p == 2 ? std::array<double, 3>{1.0, -2.0, 1.0}
                                            : std::array<double, 3>{1.0, -1.0, 0.0};
  if ((a + p) * u > kSeriesReach) {
    double sum = 0.0;
    for (int i = 0; i <= p; ++i) sum += coef[i] * expPiece(a + i, l, u, ht);
    return sum;
  }
  // Power series of the integrand around 0: sum_k c_k eta^k with
  // c_k = sum_i coef_i (-(a + i))^k / k!.
  std::array<double, 3> pw = {1.0, 1.0, 1.0};
  double sum = 0.0;
  double uPow = u, lPow = l;  // u^{k+1}, l^{k+1}
  double fact = 1.0;
  for (int k = 0; k < kSeriesTerms; ++k) {
    double ck = 0.0;
    for (int i = 0; i <= p; ++i) ck += coef[i] * pw[i];
    ck /= fact;
    double piece = (uPow - lPow) / (k + 1);
    if (ht) piece = *ht * piece - (uPow * u - lPow * l) / (k + 2);
    sum += ck * piece;
    for (int i = 0; i <= p; ++i) pw[i] *= -(a + i);
    fact *= k + 1;
    uPow *= u;
    lPow *= l;
  }
  return sum;
}

struct Layout {
  double a;        // theta + 1
  double hc;       // H(t_c) clipped to H(tau)
  double he;       // censoring onset
  double ht;       // H(tau)
  double norm;     // 1 - exp(-H(t_c)); 0 means Q == 1
  double width;    // H(tau) - H(tau - t_er)
  bool empty;
};

Layout makeLayout(double theta, double hTc, double he, double ht, bool censored) {
  Layout L{};
  L.a = theta + 1.0;
  L.ht = ht;
  L.he = censored ? he : ht;
  L.hc = std::min(hTc, ht);
  L.norm = -std::expm1(-hTc);
  L.width = L.ht - L.he;
  L.empty = !(ht > 0);
  if (!L.empty && censored && !(L.width > 0))
    throw InputError(kModule, "degenerate accrual window: H(tau) equals H(tau - t_er)");
  return L;
}

Layout layout(const ProjectionInputs& in) {
  in.validate();
  return makeLayout(in.theta, in.hTc, in.hTauMinusTer, in.hTau, in.ter > 0);
}

ProjectionTerms terms(const Layout& L, double e0, int p) {
  ProjectionTerms t;
  if (L.empty) return t;
  const double alloc = e0 * (1.0 - e0);
  const bool flat = !(L.norm > 0);
  const double rampScale = flat ? 0.0 : alloc / std::pow(L.norm, p);
  const double hc = flat ? 0.0 : L.hc;

  t.rampUncensored = rampScale * rampPiece(p, L.a, 0.0, std::min(hc, L.he), std::nullopt);
  t.plateauUncensored = alloc * expPiece(L.a, hc, L.he, std::nullopt);
  if (L.width > 0) {
    t.rampCensored = rampScale * rampPiece(p, L.a, L.he, hc, L.ht) / L.width;
    t.plateauCensored = alloc * expPiece(L.a, std::max(L.he, hc), L.ht, L.ht) / L.width;
  }
  return t;
}

double eventMassLimit(double theta, double he, double ht) {
  const double a = theta + 1.0;
  double g = expPiece(a, 0.0, he, std::nullopt);
  if (ht > he) g += expPiece(a, he, ht, ht) / (ht - he);
  return g;
}

}  // namespace

CumulativeHazard::CumulativeHazard(Eigen::ArrayXd times, Eigen::ArrayXd values) {
  if (times.size() != values.size() || times.size() == 0)
    throw InputError(kModule, "hazard curve needs matching, non-empty times and values");
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0) || !(values[i] >= 0))
      throw InputError(kModule, "hazard curve entries must be non-negative");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw InputError(kModule, "hazard curve times must increase");
    if (i > 0 && values[i] < values[i - 1])
      throw InputError(kModule, "cumulative hazard must be non-decreasing");
  }
  if (times[0] > 0) {
    if (values[0] < 0) throw InputError(kModule, "cumulative hazard must be non-decreasing");
    times_.resize(times.size() + 1);
    values_.resize(values.size() + 1);
    times_ << 0.0, times;
    values_ << 0.0, values;
  } else {
    times_ = std::move(times);
    values_ = std::move(values);
  }
}

double CumulativeHazard::operator()(double t) const {
  if (t <= times_[0]) return values_[0];
  const Eigen::Index n = times_.size();
  if (n == 1) return values_[0];
  const auto* it = std::upper_bound(times_.data(), times_.data() + n, t);
  Eigen::Index hi = std::min<Eigen::Index>(it - times_.data(), n - 1);
  const Eigen::Index lo = hi - 1;
  const double slope = (values_[hi] - values_[lo]) / (times_[hi] - times_[lo]);
  return values_[lo] + slope * (t - times_[lo]);
}

double CumulativeHazard::lastSlope() const {
  const Eigen::Index n = times_.size();
  if (n < 2) return 0.0;
  return (values_[n - 1] - values_[n - 2]) / (times_[n - 1] - times_[n - 2]);
}

void ProjectionInputs::validate() const {
  if (!(hTc >= 0 && hTauMinusTer >= 0 && hTau >= 0))
    throw InputError(kModule, "H landmarks must be non-negative");
  if (hTauMinusTer > hTau) throw InputError(kModule, "H(tau - t_er) exceeds H(tau)");
  if (!(theta >= 0)) throw InputError(kModule, "theta must be non-negative");
  if (!(e0 > 0 && e0 < 1)) throw InputError(kModule, "e0 must lie in (0, 1)");
  if (!(ter >= 0)) throw InputError(kModule, "t_er must be non-negative");
  if (!(tc >= 0)) throw InputError(kModule, "t_c must be non-negative");
  if (ter > 0 && !(ter < tau)) throw InputError(kModule, "t_er must be less than tau");
  // Landmark order must agree with the time order of t_c and tau - t_er.
  const double te = tau - ter;
  if ((tc < te && hTc > hTauMinusTer) || (tc > te && hTc < hTauMinusTer))
    throw InputError(kModule, "H landmarks out of time order");
  if (tc > tau && hTc < hTau) throw InputError(kModule, "H landmarks out of time order");
}

ProjectionInputs ProjectionInputs::fromHazard(const CumulativeHazard& H, double theta, double e0,
                                              double tc, double ter, double tau) {
  ProjectionInputs in;
  in.hTc = H(tc);
  in.hTauMinusTer = H(std::max(tau - ter, 0.0));
  in.hTau = H(tau);
  in.theta = theta;
  in.e0 = e0;
  in.tc = tc;
  in.ter = ter;
  in.tau = tau;
  return in;
}

ProjectionTerms varianceTerms(const ProjectionInputs& in) { return terms(layout(in), in.e0, 2); }
ProjectionTerms firstMomentTerms(const ProjectionInputs& in) {
  return terms(layout(in), in.e0, 1);
}

double varianceAtTau(const ProjectionInputs& in) { return varianceTerms(in).total(); }
double firstMomentAtTau(const ProjectionInputs& in) { return firstMomentTerms(in).total(); }

double eventMass(const ProjectionInputs& in) {
  const Layout L = layout(in);
  if (L.empty) return 0.0;
  return eventMassLimit(in.theta, L.he, L.ht);
}

double oneOneMoment(const ProjectionInputs& in) {
  return in.e0 * (1.0 - in.e0) * eventMass(in);
}

ProjectionOracle projectionByQuadrature(const ProjectionInputs& in) {
  const Layout L = layout(in);
  ProjectionOracle out;
  if (L.empty) return out;
  const bool flat = !(L.norm > 0);
  auto q = [&](double eta) {
    if (flat) return 1.0;
    return -std::expm1(-std::min(eta, in.hTc)) / L.norm;
  };
  auto s = [&](double eta) { return eta <= L.he ? 1.0 : (L.ht - eta) / L.width; };
  auto integrate = [&](auto&& g) {
    std::vector<double> cuts = {0.0, L.ht};
    if (L.hc > 0 && L.hc < L.ht) cuts.push_back(L.hc);
    if (L.he > 0 && L.he < L.ht) cuts.push_back(L.he);
    std::sort(cuts.begin(), cuts.end());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      sum += quadrature::integrate(g, cuts[i], cuts[i + 1], 1e-17);
    return sum;
  };
  const double alloc = in.e0 * (1.0 - in.e0);
  out.vTau = alloc * integrate([&](double eta) {
    const double w = q(eta);
    return w * w * std::exp(-L.a * eta) * s(eta);
  });
  out.mTau = alloc * integrate([&](double eta) { return q(eta) * std::exp(-L.a * eta) * s(eta); });
  out.gTau = integrate([&](double eta) { return std::exp(-L.a * eta) * s(eta); });
  out.oneOne = alloc * out.gTau;
  return out;
}

double eventMassAt(const CumulativeHazard& H, double theta, double ter, double tau) {
  if (!(tau > 0)) return 0.0;
  if (!(theta >= 0)) throw InputError(kModule, "theta must be non-negative");
  if (!(ter >= 0)) throw InputError(kModule, "t_er must be non-negative");
  const double ht = H(tau);
  if (ter == 0) return eventMassLimit(theta, ht, ht);
  const double enrolled = std::min(1.0, tau / ter);
  const double he = H(std::max(tau - ter, 0.0));
  return enrolled * eventMassLimit(theta, he, ht);
}

double solveDuration(const CumulativeHazard& H, double theta, double ter, double target) {
  if (!(target >= 0)) throw InputError(kModule, "target event fraction must be non-negative");
  if (target == 0) return 0.0;
  auto g = [&](double tau) { return eventMassAt(H, theta, ter, tau); };
  double hi = std::max({H.times()[H.times().size() - 1], ter, 1.0});
  int doublings = 0;
  while (g(hi) < target) {
    if (++doublings > 60) throw InputError(kModule, "required events unattainable");
    hi *= 2;
  }
  double lo = 0.0;
  for (int it = 0; it < 300; ++it) {
    const double mid = lo + (hi - lo) / 2;
    const double val = g(mid);
    if (std::abs(val - target) < 1e-10) {
      // Tighten towards the smallest root on flat stretches of G.
      hi = mid;
      if (hi - lo <= 1e-13 * (1 + hi)) break;
      continue;
    }
    if (val < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * (1 + hi)) break;
  }
  return hi;
}

std::vector<double> projectedFractions(const CumulativeHazard& H, double theta, double e0,
                                       double tc, double ter, double tau,
                                       const std::vector<double>& calendar) {
  const double vTau = varianceAtTau(ProjectionInputs::fromHazard(H, theta, e0, tc, ter, tau));
  if (!(vTau > 0)) throw InputError(kModule, "projected v(tau) is zero");
  std::vector<double> out;
  out.reserve(calendar.size());
  for (double c : calendar) {
    if (!(c > 0) || c > tau) throw InputError(kModule, "analysis times must lie in (0, tau]");
    // Before accrual ends, entry is uniform over [0, c] and only c / t_er
    // of the subjects are enrolled.
    const double enrolled = ter > 0 ? std::min(1.0, c / ter) : 1.0;
    const double he = H(std::max(c - ter, 0.0));
    const Layout L = makeLayout(theta, H(tc), he, H(c), ter > 0);
    out.push_back(enrolled * terms(L, e0, 2).total() / vTau);
  }
  return out;
}

}  // namespace wlrgs
