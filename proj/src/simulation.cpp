#include "wlrgs/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <thread>

#include "wlrgs/error.hpp"

namespace wlrgs {

namespace {

constexpr const char* kModule = "sim_harness";
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Stream {
 public:
  Stream(std::uint64_t master, std::uint64_t index)
      : rng_(splitmix64(splitmix64(master) ^ splitmix64(index + 0x5851f42d4c957f2dULL))) {}

  double uniform() { return double(rng_() >> 11) * 0x1.0p-53; }
  double exponential() { return -std::log1p(-uniform()); }

 private:
  std::mt19937_64 rng_;
};

// Piecewise-constant hazard on [knots[k], knots[k+1]); the last rate holds
// beyond the final knot.
struct PiecewiseHazard {
  std::vector<double> knots;
  std::vector<double> rates;
  std::vector<double> cumulative;  // at each knot

  void finish() {
    cumulative.assign(knots.size(), 0.0);
    for (std::size_t k = 1; k < knots.size(); ++k)
      cumulative[k] = cumulative[k - 1] + rates[k - 1] * (knots[k] - knots[k - 1]);
  }

  // Time at which the cumulative hazard reaches e.
  double invert(double e) const {
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), e);
    const std::size_t k = static_cast<std::size_t>(it - cumulative.begin()) - 1;
    const double r = rates[k];
    if (!(r > 0)) {
      // Zero rate: look for the next positive stretch.
      for (std::size_t j = k + 1; j < rates.size(); ++j)
        if (rates[j] > 0 && cumulative[j] >= e) return knots[j] + (e - cumulative[j]) / rates[j];
      return kInf;
    }
    return knots[k] + (e - cumulative[k]) / r;
  }
};

double baseRate(const SimScenario& s, double t) {
  const auto it = std::upper_bound(s.breaks.begin(), s.breaks.end(), t);
  return s.rates[static_cast<std::size_t>(it - s.breaks.begin())];
}

bool shapeVaries(const SimScenario& s) {
  if (s.shape == SimShape::Table) return true;
  if (s.shape == SimShape::Constant) return false;
  return s.weight.kind() != WeightFunction::Kind::Constant;
}

// Un-normalized shape: Q, 1, or the table value.
double shapeAt(const SimScenario& s, double t) {
  switch (s.shape) {
    case SimShape::Constant:
      return 1.0;
    case SimShape::Table: {
      const auto it = std::upper_bound(s.qTimes.begin(), s.qTimes.end(), t);
      if (it == s.qTimes.begin()) return s.qValues.front();
      return s.qValues[static_cast<std::size_t>(it - s.qTimes.begin()) - 1];
    }
    case SimShape::OptimalWeight:
      break;
  }
  return s.weight(t);
}

// Hazard grid shared by both arms: baseline breaks, plus a fine mesh when
// beta(t) varies. beta is frozen at each cell midpoint.
std::vector<double> hazardKnots(const SimScenario& s) {
  std::vector<double> k = {0.0};
  for (double b : s.breaks) k.push_back(b);
  if (shapeVaries(s)) {
    const double tau = s.tau();
    const int cells = static_cast<int>(std::ceil(tau / s.hazardStep - 1e-9));
    for (int i = 1; i <= cells; ++i) k.push_back(std::min(tau, i * s.hazardStep));
    if (s.shape == SimShape::Table)
      for (double t : s.qTimes) k.push_back(t);
    if (s.weight.kind() == WeightFunction::Kind::RampPlateau) k.push_back(s.weight.tc());
  }
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
          k.end());
  return k;
}

double cellMid(const std::vector<double>& knots, std::size_t k) {
  return k + 1 < knots.size() ? (knots[k] + knots[k + 1]) / 2 : knots[k];
}

struct ArmHazards {
  PiecewiseHazard control, treated, other;
  std::vector<double> beta;  // per cell
};

ArmHazards buildHazards(const SimScenario& s, double K) {
  ArmHazards h;
  const auto knots = hazardKnots(s);
  h.control.knots = h.treated.knots = h.other.knots = knots;
  for (std::size_t k = 0; k < knots.size(); ++k) {
    const double mid = cellMid(knots, k);
    const double r0 = baseRate(s, mid);
    const double b = s.betaStar * K * shapeAt(s, mid);
    h.beta.push_back(b);
    h.control.rates.push_back(r0);
    h.treated.rates.push_back(r0 * std::exp(b));
    h.other.rates.push_back(s.theta * r0);
  }
  h.control.finish();
  h.treated.finish();
  h.other.finish();
  return h;
}

struct Functionals {
  double v = 0.0, m = 0.0, qq = 0.0, qBeta = 0.0;
};

// Per-subject brackets up to calendar time c by composite Simpson on cells
// free of kinks. qq = <Q|IF|shape>, qBeta = <Q|IF|beta>.
Functionals integrate(const SimScenario& s, const ArmHazards& h, double c, double step) {
  std::vector<double> cuts = h.control.knots;
  cuts.push_back(c);
  if (s.ter > 0 && c - s.ter > 0) cuts.push_back(c - s.ter);
  if (s.weight.kind() == WeightFunction::Kind::RampPlateau) cuts.push_back(s.weight.tc());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [&](double t) { return t > c; }), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto cellOf = [&](double t) {
    const auto it = std::upper_bound(h.control.knots.begin(), h.control.knots.end(), t);
    return static_cast<std::size_t>(it - h.control.knots.begin()) - 1;
  };
  auto cumAt = [](const PiecewiseHazard& p, std::size_t k, double t) {
    return p.cumulative[k] + p.rates[k] * (t - p.knots[k]);
  };

  Functionals f;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (!(b > a)) continue;
    const std::size_t k = cellOf((a + b) / 2);
    const double r0 = h.control.rates[k], r1 = h.treated.rates[k], beta = h.beta[k];
    const double shape = shapeAt(s, cellMid(h.control.knots, k));
    auto integrand = [&](double t, Functionals& acc, double w) {
      const double s0 = std::exp(-cumAt(h.control, k, t));
      const double s1 = std::exp(-cumAt(h.treated, k, t));
      const double so = std::exp(-cumAt(h.other, k, t));
      const double rho = s.ter > 0 ? std::clamp((c - t) / s.ter, 0.0, 1.0) : 1.0;
      const double y0 = 0.5 * s0 * so * rho, y1 = 0.5 * s1 * so * rho;
      const double y = y0 + y1;
      if (!(y > 0)) return;
      const double e = y1 / y;
      const double dIF = e * (1 - e) * (y0 * r0 + y1 * r1) * w;
      const double q = s.weight(t);
      acc.v += q * q * dIF;
      acc.m += q * dIF;
      acc.qq += q * shape * dIF;
      acc.qBeta += q * beta * dIF;
    };
    const int n = std::max(2, 2 * static_cast<int>(std::ceil((b - a) / step / 2)));
    const double hh = (b - a) / n;
    for (int j = 0; j <= n; ++j) {
      const double w = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      integrand(a + j * hh, f, w * hh / 3);
    }
  }
  return f;
}

struct Subject {
  double entry, event, other;
  int arm;
};

std::vector<Subject> drawSubjects(const SimScenario& s, const ArmHazards& h, std::uint64_t index) {
  Stream rng(s.masterSeed, index);
  const int n = 2 * s.nPerArm;
  std::vector<Subject> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Subject& sub = out[static_cast<std::size_t>(i)];
    sub.arm = i < s.nPerArm ? 0 : 1;
    sub.entry = s.ter * rng.uniform();
    const double e1 = rng.exponential();
    const double e2 = rng.exponential();
    sub.event = (sub.arm ? h.treated : h.control).invert(e1);
    sub.other = s.theta > 0 ? h.other.invert(e2) : kInf;
  }
  return out;
}

EventTable tableAt(const std::vector<Subject>& subjects, double cutoff, double nTotal) {
  Eigen::Index count = 0;
  for (const Subject& s : subjects) count += s.entry < cutoff;
  Eigen::ArrayXd time(count);
  Eigen::ArrayXi event(count), arm(count);
  Eigen::Index i = 0;
  for (const Subject& s : subjects) {
    if (!(s.entry < cutoff)) continue;
    const double admin = cutoff - s.entry;
    const double t = std::min({s.event, s.other, admin});
    time[i] = t;
    event[i] = s.event <= std::min(s.other, admin);
    arm[i] = s.arm;
    ++i;
  }
  EventTable table = ingest(time, event, arm, cutoff);
  table.n = static_cast<Eigen::Index>(nTotal);
  return table;
}

BoundaryResult fixedDesign(const std::vector<double>& fractions) {
  BoundaryResult b;
  b.fractions = fractions;
  const std::size_t K = fractions.size();
  b.efficacy.assign(K, kInf);
  b.futility.assign(K, -kInf);
  b.alphaSpent.assign(K, 0.0);
  b.alphaTarget.assign(K, 0.0);
  b.drift.assign(K, 0.0);
  return b;
}

MonteCarlo meanOf(const std::vector<double>& x) {
  MonteCarlo mc;
  const double n = double(x.size());
  if (x.empty()) return mc;
  for (double v : x) mc.mean += v;
  mc.mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mc.mean) * (v - mc.mean);
  mc.se = x.size() > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  return mc;
}

MonteCarlo proportion(std::size_t hits, std::size_t n) {
  const double p = n ? double(hits) / double(n) : 0.0;
  return MonteCarlo{p, n ? std::sqrt(p * (1 - p) / double(n)) : 0.0};
}

}  // namespace

void SimScenario::validate() const {
  if (nPerArm < 1) throw InputError(kModule, "n_per_arm must be positive");
  if (rates.empty() || breaks.size() + 1 != rates.size())
    throw InputError(kModule, "hazard needs one more rate than breakpoints");
  for (double r : rates)
    if (!(r >= 0)) throw InputError(kModule, "hazard rates must be non-negative");
  for (std::size_t i = 0; i < breaks.size(); ++i)
    if (!(breaks[i] > 0) || (i > 0 && !(breaks[i] > breaks[i - 1])))
      throw InputError(kModule, "hazard breakpoints must be positive and increasing");
  if (replicates < 1) throw InputError(kModule, "replicates must be at least 1");
  if (!(ter >= 0)) throw InputError(kModule, "t_er must be non-negative");
  if (!(theta >= 0)) throw InputError(kModule, "theta must be non-negative");
  if (analysisTimes.empty()) throw InputError(kModule, "no analysis times");
  for (std::size_t i = 0; i < analysisTimes.size(); ++i)
    if (!(analysisTimes[i] > 0) || (i > 0 && !(analysisTimes[i] > analysisTimes[i - 1])))
      throw InputError(kModule, "analysis times must be positive and increasing");
  if (shape == SimShape::Table) {
    if (qTimes.empty() || qTimes.size() != qValues.size())
      throw InputError(kModule, "shape table needs matching times and values");
    if (qTimes.front() != 0.0) throw InputError(kModule, "shape table must start at t = 0");
  }
  if (!(hazardStep > 0)) throw InputError(kModule, "hazard_step must be positive");
  if (threads < 1) throw InputError(kModule, "threads must be at least 1");
}

double logHazardRatio(const SimScenario& scenario, double K, double t) {
  return scenario.betaStar * K * shapeAt(scenario, t);
}

PopulationTruth populationTruth(const SimScenario& s, double step) {
  s.validate();
  PopulationTruth t;
  t.n = 2.0 * s.nPerArm;
  const double tau = s.tau();

  // q = K * shape with <Q|IF|q>_tau = <Q|IF|1>_tau, IF taken under the
  // alternative itself.
  double K = 1.0;
  for (int it = 0; it < 200; ++it) {
    const Functionals f = integrate(s, buildHazards(s, K), tau, step);
    if (!(f.qq != 0)) throw InputError(kModule, "shape has no weight against the information");
    const double next = f.m / f.qq;
    const bool done = std::abs(next - K) <= 1e-13 * std::abs(next);
    K = next;
    if (done || s.betaStar == 0.0) break;
  }
  t.K = K;
  const ArmHazards h = buildHazards(s, K);
  const Functionals end = integrate(s, h, tau, step);
  t.vTau = end.v;
  t.mTau = end.m;
  t.qTau = K * end.qq;
  if (!(t.vTau > 0) || t.mTau == 0) throw InputError(kModule, "scenario accrues no information");
  t.driftTau = t.mTau / std::sqrt(t.vTau) * std::sqrt(t.n) * s.betaStar;
  for (double c : s.analysisTimes) {
    const Functionals f = c == tau ? end : integrate(s, h, c, step);
    t.fractions.push_back(f.v / t.vTau);
    t.rFractions.push_back(f.m / t.mTau);
    t.drift.push_back(std::sqrt(t.n) * f.qBeta / std::sqrt(t.vTau));
  }
  return t;
}

std::vector<SubjectRecord> simulateSubjects(const SimScenario& scenario, double K,
                                            std::uint64_t replicateIndex, double cutoff) {
  scenario.validate();
  const ArmHazards h = buildHazards(scenario, K);
  const auto subjects = drawSubjects(scenario, h, replicateIndex);
  std::vector<SubjectRecord> out;
  out.reserve(subjects.size());
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    const Subject& s = subjects[i];
    if (!(s.entry < cutoff)) continue;
    const double admin = cutoff - s.entry;
    SubjectRecord r;
    r.id = "S" + std::to_string(i + 1);
    r.time = std::min({s.event, s.other, admin});
    r.event = s.event <= std::min(s.other, admin);
    r.arm = s.arm;
    out.push_back(std::move(r));
  }
  return out;
}

TrialOutcome simulateTrial(const SimScenario& s, const DesignSpec& spec,
                           const PopulationTruth& truth, std::uint64_t replicateIndex) {
  const ArmHazards h = buildHazards(s, truth.K);
  const auto subjects = drawSubjects(s, h, replicateIndex);
  const int K = s.analyses();

  std::vector<EventTable> tables;
  tables.reserve(static_cast<std::size_t>(K));
  for (double c : s.analysisTimes) tables.push_back(tableAt(subjects, c, truth.n));
  const double vFinal = bracket(s.weight, s.weight, tables.back(), s.tau());
  if (!(vFinal > 0)) throw InputError(kModule, "replicate with no information at tau");

  TrialOutcome out;
  std::vector<double> fractions;
  for (int j = 1; j <= K; ++j) {
    out.analyses.push_back(statistics(tables[j - 1], s.weight, s.analysisTimes[j - 1], vFinal, j));
    fractions.push_back(out.analyses.back().infoFrac);
  }

  const int dir = spec.direction;
  if (s.stopping) {
    out.boundary = efficacyBoundary(spec, fractions, K);
    for (int j = 1; j <= K && !out.stoppedAt; ++j)
      if (dir * out.analyses[j - 1].Z >= out.boundary.efficacy[j - 1]) out.stoppedAt = j;
  } else {
    out.boundary = fixedDesign(fractions);
  }
  out.J = out.stoppedAt ? out.stoppedAt : K;

  const AnalysisState& st = out.analyses[out.J - 1];
  std::optional<double> rJ, r1;
  if (spec.shape == Shape::Constant) {
    rJ = rFraction(st, spec.functionals);
    r1 = rFraction(out.analyses.front(), spec.functionals);
  }
  AnalysisState scaled = st;
  scaled.n = spec.n;
  const BetaStarEstimate est = estimateEarly(scaled, spec.shape, spec.functionals, rJ);
  out.inference = infer(spec, out.boundary, out.J, st.X, est, r1);
  return out;
}

DesignSpec alignDesign(DesignSpec spec, const PopulationTruth& truth, const SimScenario& s) {
  spec.functionals = EndFunctionals{truth.vTau, truth.mTau};
  spec.n = truth.n;
  spec.betaStar = s.betaStar;
  if (s.betaStar != 0) spec.direction = s.betaStar < 0 ? -1 : 1;
  spec.plannedFractions = truth.fractions;
  spec.plannedRFractions = truth.rFractions;
  spec.weight = s.weight;
  return spec;
}

StudySummary runStudy(const SimScenario& s, const DesignSpec& spec, bool keepOutcomes) {
  StudySummary sum;
  sum.truth = populationTruth(s);
  const int R = s.replicates;
  const int K = s.analyses();
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(R));

  const int workers = std::min(s.threads, R);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  auto work = [&](int w) {
    try {
      for (int r = w; r < R; r += workers)
        outcomes[static_cast<std::size_t>(r)] =
            simulateTrial(s, spec, sum.truth, static_cast<std::uint64_t>(r));
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  // Aggregation in replicate order.
  sum.replicates = R;
  sum.crossing.assign(static_cast<std::size_t>(K), 0.0);
  std::size_t rejected = 0, covered = 0, coveredTilde = 0;
  std::vector<double> hat, tilde, biasHat, biasTilde;
  Eigen::MatrixXd X(R, K), F(R, K);
  for (int r = 0; r < R; ++r) {
    const TrialOutcome& o = outcomes[static_cast<std::size_t>(r)];
    if (o.stoppedAt) sum.crossing[o.stoppedAt - 1] += 1.0 / R;
    const bool rej = s.stopping ? o.stoppedAt > 0 : o.inference.pValue <= spec.alpha;
    rejected += rej;
    for (int j = 0; j < K; ++j) {
      X(r, j) = o.analyses[j].X;
      F(r, j) = o.analyses[j].infoFrac;
    }
    const InferenceSummary& inf = o.inference;
    hat.push_back(inf.betaHat);
    tilde.push_back(inf.betaTilde);
    biasHat.push_back(inf.betaHat - s.betaStar);
    biasTilde.push_back(inf.betaTilde - s.betaStar);
    covered += inf.ci.lower <= s.betaStar && s.betaStar <= inf.ci.upper;
    coveredTilde += inf.ciTilde.lower <= s.betaStar && s.betaStar <= inf.ciTilde.upper;
  }
  sum.rejection = proportion(rejected, static_cast<std::size_t>(R));
  sum.coverage = proportion(covered, static_cast<std::size_t>(R));
  sum.coverageTilde = proportion(coveredTilde, static_cast<std::size_t>(R));
  sum.betaHat = meanOf(hat);
  sum.betaTilde = meanOf(tilde);
  sum.biasHat = meanOf(biasHat);
  sum.biasTilde = meanOf(biasTilde);

  const Eigen::RowVectorXd mx = X.colwise().mean();
  const Eigen::MatrixXd centered = X.rowwise() - mx;
  sum.covariance = Eigen::MatrixXd::Zero(K, K);
  sum.covarianceSe = Eigen::MatrixXd::Zero(K, K);
  for (int i = 0; i < K; ++i) {
    sum.meanX.push_back(meanOf(std::vector<double>(X.col(i).data(), X.col(i).data() + R)));
    sum.meanF.push_back(meanOf(std::vector<double>(F.col(i).data(), F.col(i).data() + R)));
    for (int j = 0; j < K; ++j) {
      const Eigen::ArrayXd prod = centered.col(i).array() * centered.col(j).array();
      const double c = R > 1 ? prod.sum() / (R - 1) : 0.0;
      const double sd = R > 1 ? std::sqrt((prod - prod.mean()).square().sum() / (R - 1)) : 0.0;
      sum.covariance(i, j) = c;
      sum.covarianceSe(i, j) = sd / std::sqrt(double(R));
    }
  }
  if (keepOutcomes) sum.outcomes = std::move(outcomes);
  return sum;
}

}  // namespace wlrgs
