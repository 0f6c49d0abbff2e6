#include "wlrgs/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "wlrgs/error.hpp"

namespace wlrgs::io {

namespace {

constexpr const char* kModule = "cli";
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> doubles(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return {};
  if (!j.at(key).is_array()) throw InputError(kModule, std::string("'") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& v : j.at(key)) out.push_back(numberOr(v, kInf));
  return out;
}

Eigen::ArrayXd toArray(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json toJsonArray(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

double required(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw InputError(kModule, std::string("missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

}  // namespace

json readJsonFile(const std::string& path) {
  const std::string text = readTextFile(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(kModule, path + ": invalid JSON (" + e.what() + ")");
  }
}

std::string readTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(kModule, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

json number(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

double numberOr(const json& j, double infValue) {
  if (j.is_null()) return infValue;
  if (!j.is_number()) throw InputError(kModule, "expected a number, got " + j.dump());
  return j.get<double>();
}

WeightFunction weightFromJson(const json& j) {
  const std::string kind = j.value("kind", "constant");
  if (kind == "constant") return WeightFunction::constant(j.value("level", 1.0));
  if (kind == "ramp-plateau") return WeightFunction::rampPlateau(required(j, "t_c"));
  if (kind == "fleming-harrington") {
    SurvivalCurve curve;
    if (j.contains("curve")) {
      curve.time = toArray(doubles(j.at("curve"), "times"));
      curve.surv = toArray(doubles(j.at("curve"), "surv"));
    }
    return WeightFunction::flemingHarrington(j.value("rho", 0.0), j.value("gamma", 0.0), curve,
                                             j.value("from_data", false));
  }
  throw InputError("wlr_stat", "unknown weight kind '" + kind + "'");
}

json weightToJson(const WeightFunction& w) {
  switch (w.kind()) {
    case WeightFunction::Kind::Constant:
      return {{"kind", "constant"}, {"level", w.level()}};
    case WeightFunction::Kind::RampPlateau:
      return {{"kind", "ramp-plateau"}, {"t_c", w.tc()}};
    case WeightFunction::Kind::FlemingHarrington: {
      const SurvivalCurve& c = w.curve();
      return {{"kind", "fleming-harrington"},
              {"rho", w.rho()},
              {"gamma", w.gamma()},
              {"from_data", !w.deterministic()},
              {"curve",
               {{"times", std::vector<double>(c.time.data(), c.time.data() + c.time.size())},
                {"surv", std::vector<double>(c.surv.data(), c.surv.data() + c.surv.size())}}}};
    }
  }
  return json::object();
}

SpendingFunction spendingFromJson(const json& j, double total) {
  SpendingFunction s;
  s.family = parseSpendingFamily(j.value("family", "obrien-fleming"));
  s.rho = j.value("rho", 1.0);
  s.total = total;
  if (s.family == SpendingFunction::Family::Power && !(s.rho > 0))
    throw InputError("boundary_engine", "power spending needs rho > 0");
  return s;
}

json spendingToJson(const SpendingFunction& s) {
  json j = {{"family", toString(s.family)}};
  if (s.family == SpendingFunction::Family::Power) j["rho"] = s.rho;
  return j;
}

CumulativeHazard hazardFromJson(const json& j) {
  return CumulativeHazard(toArray(doubles(j, "times")), toArray(doubles(j, "cumhaz")));
}

ProjectionInputs projectionFromJson(const json& j) {
  const double theta = j.value("theta", 0.0);
  const double e0 = j.value("e0", 0.5);
  const double tc = required(j, "t_c");
  const double ter = j.value("t_er", 0.0);
  const double tau = required(j, "tau");
  if (j.contains("hazard"))
    return ProjectionInputs::fromHazard(hazardFromJson(j.at("hazard")), theta, e0, tc, ter, tau);
  ProjectionInputs in;
  in.hTc = required(j, "H_tc");
  in.hTauMinusTer = required(j, "H_tau_minus_ter");
  in.hTau = required(j, "H_tau");
  in.theta = theta;
  in.e0 = e0;
  in.tc = tc;
  in.ter = ter;
  in.tau = tau;
  return in;
}

const json& designObject(const json& doc) {
  if (doc.is_object() && doc.contains("design") && doc.at("design").is_object())
    return doc.at("design");
  return doc;
}

DesignSpec designFromJson(const json& doc, std::vector<std::string>* notes) {
  const json& d = designObject(doc);
  if (!d.is_object()) throw InputError(kModule, "design config must be a JSON object");
  DesignSpec spec;
  spec.alpha = d.value("alpha", 0.05);
  const std::string sided = d.value("sided", "one");
  if (sided == "one") {
    spec.sided = Sidedness::One;
  } else if (sided == "two") {
    spec.sided = Sidedness::Two;
  } else {
    throw InputError("boundary_engine", "sided must be 'one' or 'two'");
  }
  spec.spending = spendingFromJson(d.value("spending", json::object()), spec.alpha);
  if (d.contains("futility") && !d.at("futility").is_null()) {
    const json& f = d.at("futility");
    spec.futility = spendingFromJson(f, required(f, "beta"));
  }
  spec.shape = parseShape(d.value("shape", "optimal-weight"));
  spec.betaStar = d.value("beta_star", 0.0);
  spec.n = d.value("n", 0.0);
  spec.weight = weightFromJson(d.value("weight", json{{"kind", "constant"}}));
  spec.gridPoints = d.value("grid_points", Eigen::Index(4001));

  if (d.contains("efficacy_direction")) {
    const std::string dir = d.at("efficacy_direction").get<std::string>();
    if (dir == "upper") {
      spec.direction = 1;
    } else if (dir == "lower") {
      spec.direction = -1;
    } else {
      throw InputError("boundary_engine", "efficacy_direction must be 'upper' or 'lower'");
    }
  } else {
    spec.direction = spec.betaStar < 0 ? -1 : 1;
  }

  std::optional<json> proj;
  if (d.contains("projection")) {
    proj = d.at("projection");
    if (!proj->contains("t_c") && spec.weight.kind() == WeightFunction::Kind::RampPlateau)
      (*proj)["t_c"] = spec.weight.tc();
  }

  if (d.contains("v_tau") && d.contains("m_tau")) {
    spec.functionals = EndFunctionals{required(d, "v_tau"), required(d, "m_tau")};
  } else if (proj) {
    if (spec.weight.kind() != WeightFunction::Kind::RampPlateau)
      throw InputError("eot_projection", "closed-form projection needs the ramp-plateau weight");
    const ProjectionInputs in = projectionFromJson(*proj);
    spec.functionals = EndFunctionals{varianceAtTau(in), firstMomentAtTau(in)};
    if (notes) notes->push_back("v_tau and m_tau projected from the projection block");
  }

  spec.plannedFractions = doubles(d, "fractions");
  if (spec.plannedFractions.empty() && proj && d.contains("analysis_times")) {
    if (!proj->contains("hazard"))
      throw InputError("eot_projection", "fractions from analysis_times need a hazard curve");
    spec.plannedFractions = projectedFractions(
        hazardFromJson(proj->at("hazard")), proj->value("theta", 0.0), proj->value("e0", 0.5),
        required(*proj, "t_c"), proj->value("t_er", 0.0), required(*proj, "tau"),
        doubles(d, "analysis_times"));
    if (notes) notes->push_back("fractions projected at analysis_times");
  }
  spec.plannedRFractions = doubles(d, "r_fractions");
  spec.validate();
  return spec;
}

json designToJson(const DesignSpec& spec) {
  json j;
  j["alpha"] = spec.alpha;
  j["sided"] = spec.sided == Sidedness::One ? "one" : "two";
  j["efficacy_direction"] = spec.direction > 0 ? "upper" : "lower";
  j["spending"] = spendingToJson(spec.spending);
  if (spec.futility) {
    json f = spendingToJson(*spec.futility);
    f["beta"] = spec.futility->total;
    j["futility"] = f;
  } else {
    j["futility"] = nullptr;
  }
  j["fractions"] = spec.plannedFractions;
  if (!spec.plannedRFractions.empty()) j["r_fractions"] = spec.plannedRFractions;
  j["shape"] = toString(spec.shape);
  j["beta_star"] = spec.betaStar;
  j["v_tau"] = spec.functionals.vTau;
  j["m_tau"] = spec.functionals.mTau;
  j["n"] = spec.n;
  j["weight"] = weightToJson(spec.weight);
  j["grid_points"] = spec.gridPoints;
  return j;
}

json boundaryToJson(const BoundaryResult& b, int direction) {
  std::vector<double> effX, futX;
  for (int j = 1; j <= b.analyses(); ++j) {
    effX.push_back(b.brownian(b.efficacy[j - 1], j));
    futX.push_back(b.brownian(b.futility[j - 1], j));
  }
  return {{"direction", direction},
          {"fractions", b.fractions},
          {"efficacy_z", toJsonArray(b.efficacy)},
          {"efficacy_x", toJsonArray(effX)},
          {"futility_z", toJsonArray(b.futility)},
          {"futility_x", toJsonArray(futX)},
          {"alpha_target", b.alphaTarget},
          {"alpha_spent", b.alphaSpent},
          {"beta_target", b.betaTarget},
          {"beta_spent", b.betaSpent},
          {"drift", b.drift},
          {"continuation_mass", b.continuationMass},
          {"warnings", b.warnings}};
}

BoundaryResult boundaryFromJson(const json& j) {
  BoundaryResult b;
  b.fractions = doubles(j, "fractions");
  b.efficacy = doubles(j, "efficacy_z");
  b.futility.clear();
  for (const auto& v : j.value("futility_z", json::array())) b.futility.push_back(numberOr(v, -kInf));
  if (b.futility.empty()) b.futility.assign(b.fractions.size(), -kInf);
  b.alphaTarget = doubles(j, "alpha_target");
  b.alphaSpent = doubles(j, "alpha_spent");
  b.betaTarget = doubles(j, "beta_target");
  b.betaSpent = doubles(j, "beta_spent");
  b.drift = doubles(j, "drift");
  b.continuationMass = j.value("continuation_mass", 0.0);
  if (b.efficacy.size() != b.fractions.size())
    throw InputError(kModule, "boundary arrays differ in length");
  return b;
}

json analysisToJson(const AnalysisState& s) {
  return {{"index", s.index},   {"cutoff", s.cutoff}, {"U", s.U},
          {"V", s.V},           {"m", s.m},           {"Z", s.Z},
          {"X", s.X},           {"info_fraction", s.infoFrac},
          {"v_tau", s.vTau},    {"n", s.n},           {"events", s.events},
          {"warnings", s.warnings}};
}

AnalysisState analysisFromJson(const json& j) {
  AnalysisState s;
  s.index = j.value("index", 1);
  s.cutoff = j.value("cutoff", 0.0);
  s.X = required(j, "X");
  s.infoFrac = required(j, "info_fraction");
  if (!(s.infoFrac > 0 && s.infoFrac <= 1))
    throw InputError(kModule, "info_fraction must lie in (0, 1]");
  s.Z = j.contains("Z") ? required(j, "Z") : s.X / std::sqrt(s.infoFrac);
  s.U = j.value("U", 0.0);
  s.V = j.value("V", 0.0);
  s.m = j.value("m", 0.0);
  s.vTau = j.value("v_tau", 0.0);
  s.n = j.value("n", 0.0);
  s.events = j.value("events", 0.0);
  if (j.contains("warnings")) s.warnings = j.at("warnings").get<std::vector<std::string>>();
  return s;
}

json crudeToJson(const CrudeSummary& c) {
  const bool ok = c.personTimeTrt > 0 && c.personTimeCtl > 0 && c.eventsCtl > 0;
  return {{"events_trt", c.eventsTrt},
          {"events_ctl", c.eventsCtl},
          {"person_time_trt", c.personTimeTrt},
          {"person_time_ctl", c.personTimeCtl},
          {"risk_ratio", ok ? number(c.riskRatio()) : json(nullptr)}};
}

SimScenario scenarioFromJson(const json& j) {
  SimScenario s;
  s.nPerArm = j.value("n_per_arm", s.nPerArm);
  if (j.contains("hazard")) {
    s.rates = doubles(j.at("hazard"), "rates");
    s.breaks = doubles(j.at("hazard"), "breaks");
  }
  s.betaStar = j.value("beta_star", 0.0);
  const std::string shape = j.value("shape", "optimal-weight");
  if (shape == "optimal-weight") {
    s.shape = SimShape::OptimalWeight;
  } else if (shape == "constant") {
    s.shape = SimShape::Constant;
  } else if (shape == "table") {
    s.shape = SimShape::Table;
    const json& t = j.at("q_table");
    s.qTimes = doubles(t, "times");
    s.qValues = doubles(t, "values");
  } else {
    throw InputError("sim_harness", "unknown shape '" + shape + "'");
  }
  s.ter = j.value("t_er", 0.0);
  s.theta = j.value("theta", 0.0);
  s.analysisTimes = doubles(j, "analysis_times");
  s.replicates = j.value("replicates", s.replicates);
  s.masterSeed = j.value("seed", s.masterSeed);
  s.weight = weightFromJson(j.value("weight", json{{"kind", "constant"}}));
  s.stopping = j.value("stopping", false);
  s.threads = j.value("threads", 1);
  s.hazardStep = j.value("hazard_step", s.hazardStep);
  s.validate();
  return s;
}

}  // namespace wlrgs::io
