#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wlrgs/io.hpp"
#include "wlrgs/simulation.hpp"
#include "wlrgs/survival_data.hpp"

namespace wlrgs::workflow {

using nlohmann::json;

struct Provenance {
  std::string command;
  std::string configHash;
  std::optional<double> dataCutoff;
};

json provenanceJson(const Provenance& p);

// Boundaries at the planned fractions. Output kind "design".
json designDocument(const json& config, const Provenance& prov);

// Adds (or replaces) analysis `analysis` computed from subject data at the
// data cutoff. `config` is a design config, a design document or an earlier
// series. Output kind "series".
json monitorDocument(const json& config, std::span<const SubjectRecord> data,
                     std::optional<double> cutoff, std::optional<int> analysis,
                     const Provenance& prov);

// Final inference from a series: stopping analysis (the first efficacy
// crossing, else the last analysis, unless given), p-value, raw and
// bias-adjusted estimates with design-adjusted intervals. With
// observedFunctionals the scheduled-end analysis uses the observed V and m
// in place of the projected end functionals. Output kind "report".
json reportDocument(const json& series, std::optional<int> analysis, bool observedFunctionals,
                    const Provenance& prov);

// Closed-form end-of-trial functionals (and duration when asked). With
// oracle, adds quadrature values and relative deltas. Output kind
// "projection".
json projectDocument(const json& config, bool oracle, const Provenance& prov);

// Monte Carlo study. `outcomes` receives per-replicate results when given.
// Output kind "simulation".
json simulateDocument(const json& config, std::optional<std::uint64_t> seed,
                      const Provenance& prov, std::vector<TrialOutcome>* outcomes = nullptr);

// Scenario and design used by simulateDocument.
struct SimulationSetup {
  SimScenario scenario;
  DesignSpec spec;
  PopulationTruth truth;
};
SimulationSetup simulationSetup(const json& config, std::optional<std::uint64_t> seed);

// Per-replicate CSV: replicate, J, stopped_at, X_j..., f_j..., estimates.
void writeReplicatesCsv(std::ostream& out, const std::vector<TrialOutcome>& outcomes);

// Human-readable rendering of any document above.
std::string pretty(const json& doc);

}  // namespace wlrgs::workflow
