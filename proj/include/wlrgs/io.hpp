#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "wlrgs/boundary.hpp"
#include "wlrgs/projection.hpp"
#include "wlrgs/simulation.hpp"
#include "wlrgs/survival_data.hpp"
#include "wlrgs/wlr_stat.hpp"

namespace wlrgs::io {

using nlohmann::json;

json readJsonFile(const std::string& path);
std::string readTextFile(const std::string& path);

// 64-bit FNV-1a of the bytes, as "fnv1a64:<16 hex digits>".
std::string fnv1a64(const std::string& bytes);

// +-inf become null, and back.
json number(double x);
double numberOr(const json& j, double infValue);

WeightFunction weightFromJson(const json& j);
json weightToJson(const WeightFunction& w);

SpendingFunction spendingFromJson(const json& j, double total);
json spendingToJson(const SpendingFunction& s);

// A hazard curve given as {"times": [...], "cumhaz": [...]}.
CumulativeHazard hazardFromJson(const json& j);

// Projection inputs: either explicit landmarks (H_tc, H_tau_minus_ter,
// H_tau) or a "hazard" curve, plus theta, e0, t_c, t_er, tau.
ProjectionInputs projectionFromJson(const json& j);

// The design object. Accepts a raw design config or any document carrying
// one under "design". Missing v_tau / m_tau / fractions are filled from a
// "projection" block when present; `notes` collects what was derived.
DesignSpec designFromJson(const json& j, std::vector<std::string>* notes = nullptr);
json designToJson(const DesignSpec& spec);
// The design object inside a document, or the document itself.
const json& designObject(const json& doc);

json boundaryToJson(const BoundaryResult& b, int direction);
BoundaryResult boundaryFromJson(const json& j);

json analysisToJson(const AnalysisState& s);
AnalysisState analysisFromJson(const json& j);

json crudeToJson(const CrudeSummary& c);

SimScenario scenarioFromJson(const json& j);

}  // namespace wlrgs::io
