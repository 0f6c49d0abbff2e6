#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wlrgs/boundary.hpp"
#include "wlrgs/drift.hpp"
#include "wlrgs/inference.hpp"
#include "wlrgs/survival_data.hpp"
#include "wlrgs/wlr_stat.hpp"

namespace wlrgs {

// Shape of beta(t) / beta* in the data-generating model.
enum class SimShape { OptimalWeight, Constant, Table };

struct SimScenario {
  int nPerArm = 1000;
  // Control-arm hazard: rates[i] on [breaks[i-1], breaks[i]), breaks has
  // rates.size() - 1 entries; the last rate runs forever.
  std::vector<double> rates = {0.1};
  std::vector<double> breaks;
  double betaStar = 0.0;
  SimShape shape = SimShape::OptimalWeight;
  std::vector<double> qTimes;   // Table shape: q on [qTimes[i], qTimes[i+1])
  std::vector<double> qValues;
  double ter = 0.0;              // accrual duration, entry ~ U(0, ter)
  double theta = 0.0;            // other-cause hazard = theta * control hazard
  std::vector<double> analysisTimes;  // calendar cutoffs; the last is tau
  int replicates = 100;
  std::uint64_t masterSeed = 20240601;
  WeightFunction weight = WeightFunction::constant();
  bool stopping = false;         // apply the design's efficacy boundary
  int threads = 1;
  double hazardStep = 0.02;      // refinement of the hazard grid for non-constant q

  void validate() const;
  double tau() const { return analysisTimes.back(); }
  int analyses() const { return static_cast<int>(analysisTimes.size()); }
};

// Deterministic population quantities behind the scenario, by numerical
// integration over study time (per subject, both arms pooled).
struct PopulationTruth {
  double K = 1.0;                // q = K Q under the optimal-weight shape
  double vTau = 0.0;
  double mTau = 0.0;
  double qTau = 0.0;             // <Q|IF|q>_tau
  std::vector<double> fractions; // v(t_j) / v(tau)
  std::vector<double> rFractions;// m(t_j) / m(tau)
  std::vector<double> drift;     // mean of X_n(t_j)
  double driftTau = 0.0;         // (m / sqrt(v)) sqrt(n) beta*
  double n = 0.0;
};

PopulationTruth populationTruth(const SimScenario& scenario, double step = 1e-3);

// beta(t) of the scenario, given K (ignored unless shape is optimal-weight).
double logHazardRatio(const SimScenario& scenario, double K, double t);

struct TrialOutcome {
  std::vector<AnalysisState> analyses;
  int stoppedAt = 0;          // efficacy crossing analysis, 0 if none
  int J = 0;                  // analysis used for inference
  BoundaryResult boundary;    // at the observed fractions
  InferenceSummary inference;
};

// Subject-level data of one replicate at calendar cutoff c (study time
// truncated at c - entry; subjects not yet entered are left out).
std::vector<SubjectRecord> simulateSubjects(const SimScenario& scenario, double K,
                                            std::uint64_t replicateIndex, double cutoff);

// Statistics at every analysis (X normalized by the observed final V),
// stopping per the design when enabled, and inference at J. The estimators
// use the supplied end functionals.
TrialOutcome simulateTrial(const SimScenario& scenario, const DesignSpec& spec,
                           const PopulationTruth& truth, std::uint64_t replicateIndex);

struct MonteCarlo {
  double mean = 0.0;
  double se = 0.0;
};

struct StudySummary {
  PopulationTruth truth;
  int replicates = 0;
  std::vector<double> crossing;     // efficacy crossing frequency by analysis
  MonteCarlo rejection;             // any efficacy crossing
  std::vector<MonteCarlo> meanX;
  std::vector<MonteCarlo> meanF;
  Eigen::MatrixXd covariance;       // empirical cov(X_i, X_j)
  Eigen::MatrixXd covarianceSe;
  MonteCarlo betaHat;               // mean estimate
  MonteCarlo betaTilde;
  MonteCarlo biasHat;
  MonteCarlo biasTilde;
  MonteCarlo coverage;              // CI around betaHat
  MonteCarlo coverageTilde;
  std::vector<TrialOutcome> outcomes;  // kept when requested
};

StudySummary runStudy(const SimScenario& scenario, const DesignSpec& spec,
                      bool keepOutcomes = false);

// A design spec consistent with the scenario's truth: functionals, n and
// direction filled in from the population quantities.
DesignSpec alignDesign(DesignSpec spec, const PopulationTruth& truth, const SimScenario& scenario);

}  // namespace wlrgs
