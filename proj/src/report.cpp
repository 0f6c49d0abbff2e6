#include "wlrgs/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "wlrgs/error.hpp"
#include "wlrgs/inference.hpp"
#include "wlrgs/projection.hpp"

namespace wlrgs::workflow {

using io::designFromJson;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json normalizedDesign(const json& config, const DesignSpec& spec) {
  json d = io::designObject(config);
  d.update(io::designToJson(spec));
  return d;
}

// Monitoring weight: a Fleming-Harrington weight without a frozen curve
// falls back to the pooled Kaplan-Meier estimate of the data (flagged).
WeightFunction monitoringWeight(const DesignSpec& spec, const EventTable& table) {
  const WeightFunction& w = spec.weight;
  if (w.kind() == WeightFunction::Kind::FlemingHarrington && w.curve().time.size() == 0)
    return WeightFunction::flemingHarrington(w.rho(), w.gamma(), pooledKaplanMeier(table), true);
  return w;
}

std::vector<double> rFractionsOf(const DesignSpec& spec, const std::vector<AnalysisState>& a) {
  std::vector<double> r;
  if (spec.shape != Shape::Constant) return r;
  for (const auto& s : a) r.push_back(rFraction(s, spec.functionals));
  return r;
}

BoundaryResult observedBoundaries(const DesignSpec& spec, const std::vector<AnalysisState>& a) {
  std::vector<double> f;
  for (const auto& s : a) f.push_back(s.infoFrac);
  return designBoundaries(spec, f, rFractionsOf(spec, a), spec.analyses());
}

json analysisRow(const AnalysisState& s, const BoundaryResult& b, int direction) {
  json row = io::analysisToJson(s);
  const int j = s.index;
  const double eff = b.efficacy[j - 1], fut = b.futility[j - 1];
  row["efficacy_z"] = io::number(eff);
  row["futility_z"] = io::number(fut);
  row["crossed_efficacy"] = direction * s.Z >= eff;
  row["crossed_futility"] = direction * s.Z <= fut;
  return row;
}

std::vector<AnalysisState> analysesOf(const json& series) {
  std::vector<AnalysisState> out;
  if (!series.contains("analyses")) return out;
  for (const auto& a : series.at("analyses")) out.push_back(io::analysisFromJson(a));
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i].index != static_cast<int>(i) + 1)
      throw InputError("cli", "series analyses must be numbered 1, 2, ... in order");
  return out;
}

json interval(double lo, double hi) { return {{"lower", lo}, {"upper", hi}}; }

std::string fmt(const json& v, int prec = 6) {
  if (v.is_null()) return "-";
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    std::ostringstream os;
    os << std::setprecision(prec) << v.get<double>();
    return os.str();
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string table(const std::vector<std::string>& head, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> w(head.size());
  for (std::size_t c = 0; c < head.size(); ++c) {
    w[c] = head[c].size();
    for (const auto& r : rows) w[c] = std::max(w[c], r[c].size());
  }
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c)
      os << (c ? "  " : "") << std::setw(static_cast<int>(w[c])) << cells[c];
    os << '\n';
  };
  line(head);
  std::size_t total = 0;
  for (auto x : w) total += x + 2;
  os << std::string(total - 2, '-') << '\n';
  for (const auto& r : rows) line(r);
  return os.str();
}

std::string warningsBlock(const json& doc) {
  std::ostringstream os;
  if (doc.contains("warnings"))
    for (const auto& w : doc.at("warnings")) os << "warning: " << w.get<std::string>() << '\n';
  return os.str();
}

}  // namespace

json provenanceJson(const Provenance& p) {
  return {{"command", p.command},
          {"config_hash", p.configHash},
          {"data_cutoff", p.dataCutoff ? json(*p.dataCutoff) : json(nullptr)},
          {"tool_version", WLRGS_VERSION}};
}

json designDocument(const json& config, const Provenance& prov) {
  std::vector<std::string> notes;
  const DesignSpec spec = designFromJson(config, &notes);
  const BoundaryResult b = designBoundaries(spec);
  json doc;
  doc["kind"] = "design";
  doc["design"] = normalizedDesign(config, spec);
  doc["boundaries"] = io::boundaryToJson(b, spec.direction);
  doc["drift_endpoint"] =
      spec.functionals.vTau > 0 && spec.n > 0 ? io::number(spec.direction * spec.drift().endpoint())
                                              : json(nullptr);
  doc["notes"] = notes;
  doc["warnings"] = b.warnings;
  doc["provenance"] = provenanceJson(prov);
  return doc;
}

json monitorDocument(const json& config, std::span<const SubjectRecord> data,
                     std::optional<double> cutoff, std::optional<int> analysis,
                     const Provenance& provIn) {
  const DesignSpec spec = designFromJson(config);
  if (!(spec.functionals.vTau > 0))
    throw InputError("wlr_stat", "design must provide v_tau (or a projection block)");
  std::vector<AnalysisState> analyses = analysesOf(config);
  std::vector<json> crude;
  if (config.contains("analyses"))
    for (const auto& a : config.at("analyses")) crude.push_back(a.value("crude", json(nullptr)));

  const int j = analysis.value_or(static_cast<int>(analyses.size()) + 1);
  if (j < 1 || j > static_cast<int>(analyses.size()) + 1)
    throw InputError("cli", "analyses must be added in order");
  if (j > spec.analyses()) throw InputError("cli", "more analyses than the design plans");

  const json& d = io::designObject(config);
  double t = 0.0;
  if (cutoff) {
    t = *cutoff;
  } else if (d.contains("analysis_cutoffs") && static_cast<int>(d.at("analysis_cutoffs").size()) >= j) {
    t = d.at("analysis_cutoffs").at(j - 1).get<double>();
  } else {
    for (const auto& r : data) t = std::max(t, r.time);
  }
  const EventTable tbl = ingest(data, t);
  const WeightFunction Q = monitoringWeight(spec, tbl);
  AnalysisState s = statistics(tbl, Q, t, spec.functionals.vTau, j);
  const json crudeJ = io::crudeToJson(crudeSummary(data, t));

  analyses.resize(static_cast<std::size_t>(j));
  analyses[j - 1] = s;
  crude.resize(static_cast<std::size_t>(j));
  crude[j - 1] = crudeJ;

  const BoundaryResult b = observedBoundaries(spec, analyses);
  json rows = json::array();
  json warnings = b.warnings;
  std::optional<int> stopped;
  for (std::size_t i = 0; i < analyses.size(); ++i) {
    json row = analysisRow(analyses[i], b, spec.direction);
    row["crude"] = crude[i];
    if (!stopped && row["crossed_efficacy"].get<bool>()) stopped = static_cast<int>(i) + 1;
    for (const auto& w : analyses[i].warnings)
      warnings.push_back("analysis " + std::to_string(i + 1) + ": " + w);
    rows.push_back(row);
  }

  Provenance prov = provIn;
  prov.dataCutoff = t;
  json doc;
  doc["kind"] = "series";
  doc["design"] = normalizedDesign(config, spec);
  if (config.value("kind", "") == "design" && config.contains("boundaries"))
    doc["design_boundaries"] = config.at("boundaries");
  else if (config.contains("design_boundaries"))
    doc["design_boundaries"] = config.at("design_boundaries");
  doc["boundaries"] = io::boundaryToJson(b, spec.direction);
  doc["analyses"] = rows;
  doc["status"] = {{"stopped", stopped.has_value()},
                   {"stopped_at", stopped ? json(*stopped) : json(nullptr)},
                   {"reason", stopped ? "efficacy boundary crossed" : "continue"}};
  doc["warnings"] = warnings;
  doc["provenance"] = provenanceJson(prov);
  return doc;
}

json reportDocument(const json& series, std::optional<int> analysis, bool observedFunctionals,
                    const Provenance& provIn) {
  DesignSpec spec = designFromJson(series);
  std::vector<AnalysisState> analyses = analysesOf(series);
  if (analyses.empty()) throw InputError("cli", "series has no analyses");
  if (static_cast<int>(analyses.size()) > spec.analyses())
    throw InputError("cli", "more analyses than the design plans");
  const int K = spec.analyses();

  json warnings = json::array();
  if (observedFunctionals) {
    AnalysisState& last = analyses.back();
    if (last.index != K)
      throw InputError("drift_estimation",
                       "observed functionals apply only at the scheduled final analysis");
    if (!(last.V > 0) || last.m == 0)
      throw InputError("drift_estimation", "final analysis lacks observed V and m");
    spec.functionals = EndFunctionals{last.V, last.m};
    spec.n = last.n > 0 ? last.n : spec.n;
    for (auto& a : analyses) {
      a.vTau = last.V;
      a.infoFrac = a.V / last.V;
      a.X = a.U / std::sqrt(last.V);
    }
    last.X = last.Z;
    last.infoFrac = 1.0;
    warnings.push_back("observed V and m at the final analysis replace the projected functionals");
  }

  const BoundaryResult b = observedBoundaries(spec, analyses);
  for (const auto& w : b.warnings) warnings.push_back(w);
  json rows = json::array();
  std::optional<int> crossed;
  for (const auto& a : analyses) {
    json row = analysisRow(a, b, spec.direction);
    if (!crossed && row["crossed_efficacy"].get<bool>()) crossed = a.index;
    rows.push_back(row);
  }

  int J = static_cast<int>(analyses.size());
  std::string reason = J == K ? "scheduled end" : "latest analysis";
  if (analysis) {
    J = *analysis;
    reason = "requested";
    if (J < 1 || J > static_cast<int>(analyses.size()))
      throw InputError("cli", "requested analysis not in the series");
  } else if (crossed) {
    J = *crossed;
    reason = "efficacy boundary crossed";
  }

  const AnalysisState& st = analyses[J - 1];
  json block = {{"stopping_analysis", J},
                {"reason", reason},
                {"info_fraction", st.infoFrac},
                {"X", st.X},
                {"Z", st.Z}};
  if (spec.n > 0 && spec.functionals.mTau != 0) {
    AnalysisState est = st;
    est.n = spec.n;
    std::optional<double> rJ, r1;
    if (spec.shape == Shape::Constant) {
      rJ = rFraction(st, spec.functionals);
      r1 = rFraction(analyses.front(), spec.functionals);
    }
    const BetaStarEstimate e = estimateEarly(est, spec.shape, spec.functionals, rJ);
    const InferenceSummary inf = infer(spec, b, J, st.X, e, r1);
    for (const auto& w : inf.warnings) warnings.push_back(w);
    block.update(json{{"p_value", inf.pValue},
                      {"beta_hat", inf.betaHat},
                      {"beta_tilde", inf.betaTilde},
                      {"zeta_tilde", inf.zetaTilde},
                      {"mse", inf.mse},
                      {"scale_factor", inf.scaleFactor},
                      {"x_u", inf.ci.xu},
                      {"ci_tail_probability", inf.ci.target},
                      {"ci_log", interval(inf.ci.lower, inf.ci.upper)},
                      {"ci_rr", interval(std::exp(inf.ci.lower), std::exp(inf.ci.upper))},
                      {"ci_tilde_log", interval(inf.ciTilde.lower, inf.ciTilde.upper)},
                      {"ci_tilde_rr",
                       interval(std::exp(inf.ciTilde.lower), std::exp(inf.ciTilde.upper))},
                      {"rr_hat", std::exp(inf.betaHat)},
                      {"rr_tilde", std::exp(inf.betaTilde)}});
  } else {
    // Without n and m(tau) there is no estimate; the p-value needs neither.
    block["p_value"] = sequentialPValue(spec, b, J, spec.direction * st.X);
    for (const char* k : {"beta_hat", "beta_tilde", "zeta_tilde", "mse", "scale_factor", "x_u",
                          "ci_tail_probability", "ci_log", "ci_rr", "ci_tilde_log",
                          "ci_tilde_rr", "rr_hat", "rr_tilde"})
      block[k] = nullptr;
    warnings.push_back("design lacks n or m_tau: estimates and intervals omitted");
  }

  json crude = nullptr;
  if (series.contains("analyses")) {
    const json& a = series.at("analyses").at(J - 1);
    if (a.contains("crude")) crude = a.at("crude");
  }

  Provenance prov = provIn;
  if (!prov.dataCutoff && st.cutoff > 0) prov.dataCutoff = st.cutoff;
  json doc;
  doc["kind"] = "report";
  doc["design"] = normalizedDesign(series, spec);
  doc["boundaries"] = io::boundaryToJson(b, spec.direction);
  doc["analyses"] = rows;
  doc["inference"] = block;
  doc["crude"] = crude;
  doc["warnings"] = warnings;
  doc["provenance"] = provenanceJson(prov);
  return doc;
}

json projectDocument(const json& config, bool oracle, const Provenance& prov) {
  json cfg = config;
  json doc;
  doc["kind"] = "projection";
  if (!cfg.contains("tau") && cfg.contains("target_events")) {
    if (!cfg.contains("hazard"))
      throw InputError("eot_projection", "solving for tau needs a hazard curve");
    const double tau = solveDuration(io::hazardFromJson(cfg.at("hazard")), cfg.value("theta", 0.0),
                                     cfg.value("t_er", 0.0), cfg.at("target_events").get<double>());
    cfg["tau"] = tau;
    doc["duration"] = {{"target_events", cfg.at("target_events")}, {"tau", tau}};
  }
  const ProjectionInputs in = io::projectionFromJson(cfg);
  const ProjectionTerms vt = varianceTerms(in), mt = firstMomentTerms(in);
  auto termsJson = [](const ProjectionTerms& t) {
    return json{{"ramp_uncensored", t.rampUncensored},
                {"plateau_uncensored", t.plateauUncensored},
                {"ramp_censored", t.rampCensored},
                {"plateau_censored", t.plateauCensored}};
  };
  doc["inputs"] = {{"H_tc", in.hTc},     {"H_tau_minus_ter", in.hTauMinusTer},
                   {"H_tau", in.hTau},   {"theta", in.theta},
                   {"e0", in.e0},        {"t_c", in.tc},
                   {"t_er", in.ter},     {"tau", in.tau}};
  doc["v_tau"] = vt.total();
  doc["m_tau"] = mt.total();
  doc["G_tau"] = eventMass(in);
  doc["one_one"] = oneOneMoment(in);
  doc["terms"] = {{"variance", termsJson(vt)}, {"first_moment", termsJson(mt)}};

  if (cfg.contains("theta_sweep")) {
    json sweep = json::array();
    for (const auto& th : cfg.at("theta_sweep")) {
      ProjectionInputs s = in;
      s.theta = th.get<double>();
      sweep.push_back({{"theta", s.theta},
                       {"v_tau", varianceAtTau(s)},
                       {"m_tau", firstMomentAtTau(s)},
                       {"G_tau", eventMass(s)}});
    }
    doc["theta_sweep"] = sweep;
  }
  if (oracle) {
    const ProjectionOracle q = projectionByQuadrature(in);
    auto rel = [](double a, double b) {
      const double scale = std::max(std::abs(a), std::abs(b));
      return scale > 0 ? std::abs(a - b) / scale : 0.0;
    };
    doc["oracle"] = {{"v_tau", q.vTau},
                     {"m_tau", q.mTau},
                     {"G_tau", q.gTau},
                     {"one_one", q.oneOne},
                     {"rel_delta_v", rel(q.vTau, vt.total())},
                     {"rel_delta_m", rel(q.mTau, mt.total())},
                     {"rel_delta_G", rel(q.gTau, eventMass(in))}};
  }
  doc["warnings"] = json::array();
  doc["provenance"] = provenanceJson(prov);
  return doc;
}

SimulationSetup simulationSetup(const json& config, std::optional<std::uint64_t> seed) {
  SimulationSetup s;
  s.scenario = io::scenarioFromJson(config);
  if (seed) s.scenario.masterSeed = *seed;
  s.truth = populationTruth(s.scenario);
  json d = config.value("design", json::object());
  d["fractions"] = s.truth.fractions;
  d["r_fractions"] = s.truth.rFractions;
  d["v_tau"] = s.truth.vTau;
  d["m_tau"] = s.truth.mTau;
  d["n"] = s.truth.n;
  if (!d.contains("beta_star")) d["beta_star"] = s.scenario.betaStar;
  if (!d.contains("grid_points")) d["grid_points"] = 1001;
  d["weight"] = io::weightToJson(s.scenario.weight);
  s.spec = alignDesign(designFromJson(d), s.truth, s.scenario);
  return s;
}

json simulateDocument(const json& config, std::optional<std::uint64_t> seed,
                      const Provenance& prov, std::vector<TrialOutcome>* outcomes) {
  const SimulationSetup setup = simulationSetup(config, seed);
  StudySummary sum = runStudy(setup.scenario, setup.spec, outcomes != nullptr);
  auto mc = [](const MonteCarlo& m) { return json{{"mean", m.mean}, {"se", m.se}}; };
  auto mcs = [&](const std::vector<MonteCarlo>& v) {
    json a = json::array();
    for (const auto& m : v) a.push_back(mc(m));
    return a;
  };
  auto matrix = [](const Eigen::MatrixXd& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      a.push_back(row);
    }
    return a;
  };
  const PopulationTruth& t = sum.truth;
  json doc;
  doc["kind"] = "simulation";
  doc["scenario"] = config;
  doc["scenario"]["seed"] = setup.scenario.masterSeed;
  doc["design"] = io::designToJson(setup.spec);
  doc["truth"] = {{"K", t.K},
                  {"v_tau", t.vTau},
                  {"m_tau", t.mTau},
                  {"n", t.n},
                  {"fractions", t.fractions},
                  {"r_fractions", t.rFractions},
                  {"drift", t.drift},
                  {"drift_tau", t.driftTau}};
  doc["replicates"] = sum.replicates;
  doc["rejection"] = mc(sum.rejection);
  doc["crossing"] = sum.crossing;
  doc["mean_x"] = mcs(sum.meanX);
  doc["mean_f"] = mcs(sum.meanF);
  doc["covariance"] = matrix(sum.covariance);
  doc["covariance_se"] = matrix(sum.covarianceSe);
  doc["beta_hat"] = mc(sum.betaHat);
  doc["beta_tilde"] = mc(sum.betaTilde);
  doc["bias_hat"] = mc(sum.biasHat);
  doc["bias_tilde"] = mc(sum.biasTilde);
  doc["coverage"] = mc(sum.coverage);
  doc["coverage_tilde"] = mc(sum.coverageTilde);
  doc["warnings"] = json::array();
  doc["provenance"] = provenanceJson(prov);
  if (outcomes) *outcomes = std::move(sum.outcomes);
  return doc;
}

void writeReplicatesCsv(std::ostream& out, const std::vector<TrialOutcome>& outcomes) {
  if (outcomes.empty()) return;
  const std::size_t K = outcomes.front().analyses.size();
  out << "replicate,J,stopped_at";
  for (std::size_t j = 1; j <= K; ++j) out << ",X" << j;
  for (std::size_t j = 1; j <= K; ++j) out << ",f" << j;
  out << ",p_value,beta_hat,beta_tilde,ci_lower,ci_upper\n";
  out << std::setprecision(17);
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    const TrialOutcome& o = outcomes[r];
    out << r << ',' << o.J << ',' << o.stoppedAt;
    for (const auto& a : o.analyses) out << ',' << a.X;
    for (const auto& a : o.analyses) out << ',' << a.infoFrac;
    const InferenceSummary& i = o.inference;
    out << ',' << i.pValue << ',' << i.betaHat << ',' << i.betaTilde << ',' << i.ci.lower << ','
        << i.ci.upper << '\n';
  }
}

std::string pretty(const json& doc) {
  std::ostringstream os;
  const std::string kind = doc.value("kind", "");
  if (kind == "design" || kind == "series" || kind == "report") {
    const json& d = doc.at("design");
    const json& b = doc.at("boundaries");
    os << "design: alpha=" << fmt(d.at("alpha")) << " (" << fmt(d.at("sided")) << "-sided, "
       << fmt(d.at("spending").at("family")) << " spending), efficacy "
       << fmt(d.at("efficacy_direction")) << ", shape " << fmt(d.at("shape"))
       << ", weight " << fmt(d.at("weight").at("kind")) << "\n\n";
    if (kind == "design") {
      std::vector<std::vector<std::string>> rows;
      for (std::size_t j = 0; j < b.at("fractions").size(); ++j)
        rows.push_back({std::to_string(j + 1), fmt(b["fractions"][j], 4),
                        fmt(b["efficacy_z"][j], 5), fmt(b["efficacy_x"][j], 5),
                        fmt(b["futility_z"][j], 5), fmt(b["alpha_target"][j], 5),
                        fmt(b["alpha_spent"][j], 5)});
      os << table({"j", "f", "eff Z", "eff X", "fut Z", "alpha(f)", "spent"}, rows);
    } else {
      std::vector<std::vector<std::string>> rows;
      for (const auto& a : doc.at("analyses"))
        rows.push_back({fmt(a["index"]), fmt(a["cutoff"], 4), fmt(a["info_fraction"], 4),
                        fmt(a["Z"], 5), fmt(a["X"], 5), fmt(a["efficacy_z"], 5),
                        fmt(a["futility_z"], 5), fmt(a["crossed_efficacy"])});
      os << table({"j", "cutoff", "f", "Z", "X", "eff Z", "fut Z", "crossed"}, rows);
      os << "(boundaries on the oriented scale: crossed when "
         << (d.at("efficacy_direction") == "lower" ? "-Z" : "Z") << " >= eff Z)\n";
    }
    if (kind == "series") {
      os << "\nstatus: " << fmt(doc.at("status").at("reason")) << '\n';
    }
    if (kind == "report") {
      json i = doc.at("inference");
      os << "\nstopping analysis " << fmt(i["stopping_analysis"]) << " (" << fmt(i["reason"])
         << ")\n";
      os << "  p-value (stagewise)   " << fmt(i["p_value"]) << '\n';
      os << "  beta* raw             " << fmt(i["beta_hat"]) << "  RR " << fmt(i["rr_hat"])
         << '\n';
      os << "  CI (log)              [" << fmt(i["ci_log"]["lower"]) << ", "
         << fmt(i["ci_log"]["upper"]) << "]  RR [" << fmt(i["ci_rr"]["lower"]) << ", "
         << fmt(i["ci_rr"]["upper"]) << "]\n";
      os << "  beta* bias-adjusted   " << fmt(i["beta_tilde"]) << "  RR " << fmt(i["rr_tilde"])
         << '\n';
      os << "  CI (log, adjusted)    [" << fmt(i["ci_tilde_log"]["lower"]) << ", "
         << fmt(i["ci_tilde_log"]["upper"]) << "]\n";
      if (!doc.at("crude").is_null())
        os << "  crude risk ratio      " << fmt(doc["crude"]["risk_ratio"]) << " ("
           << fmt(doc["crude"]["events_trt"]) << " vs " << fmt(doc["crude"]["events_ctl"])
           << " events)\n";
    }
  } else if (kind == "projection") {
    os << "v(tau)   " << fmt(doc["v_tau"], 10) << '\n';
    os << "m(tau)   " << fmt(doc["m_tau"], 10) << '\n';
    os << "G(tau)   " << fmt(doc["G_tau"], 10) << '\n';
    os << "<1|IF|1> " << fmt(doc["one_one"], 10) << '\n';
    if (doc.contains("duration")) os << "tau      " << fmt(doc["duration"]["tau"], 10) << '\n';
    if (doc.contains("oracle"))
      os << "oracle relative deltas: v " << fmt(doc["oracle"]["rel_delta_v"], 3) << ", m "
         << fmt(doc["oracle"]["rel_delta_m"], 3) << ", G " << fmt(doc["oracle"]["rel_delta_G"], 3)
         << '\n';
    if (doc.contains("theta_sweep")) {
      std::vector<std::vector<std::string>> rows;
      for (const auto& r : doc["theta_sweep"])
        rows.push_back({fmt(r["theta"], 4), fmt(r["v_tau"], 8), fmt(r["m_tau"], 8),
                        fmt(r["G_tau"], 8)});
      os << '\n' << table({"theta", "v(tau)", "m(tau)", "G(tau)"}, rows);
    }
  } else if (kind == "simulation") {
    os << "replicates " << fmt(doc["replicates"]) << ", K = " << fmt(doc["truth"]["K"], 8)
       << ", mu(tau) = " << fmt(doc["truth"]["drift_tau"]) << "\n\n";
    std::vector<std::vector<std::string>> rows;
    for (std::size_t j = 0; j < doc["mean_x"].size(); ++j)
      rows.push_back({std::to_string(j + 1), fmt(doc["truth"]["fractions"][j], 4),
                      fmt(doc["mean_f"][j]["mean"], 4), fmt(doc["truth"]["drift"][j], 5),
                      fmt(doc["mean_x"][j]["mean"], 5), fmt(doc["mean_x"][j]["se"], 3),
                      fmt(doc["covariance"][j][j], 4), fmt(doc["crossing"][j], 4)});
    os << table({"j", "f", "mean f", "drift", "mean X", "se", "var X", "crossed"}, rows);
    os << "\nrejection " << fmt(doc["rejection"]["mean"]) << " (se " << fmt(doc["rejection"]["se"], 3)
       << ")\n";
    os << "bias raw " << fmt(doc["bias_hat"]["mean"]) << " (se " << fmt(doc["bias_hat"]["se"], 3)
       << "), adjusted " << fmt(doc["bias_tilde"]["mean"]) << " (se "
       << fmt(doc["bias_tilde"]["se"], 3) << ")\n";
    os << "coverage " << fmt(doc["coverage"]["mean"]) << " (se " << fmt(doc["coverage"]["se"], 3)
       << ")\n";
  } else {
    os << doc.dump(2) << '\n';
  }
  os << warningsBlock(doc);
  return os.str();
}

}  // namespace wlrgs::workflow
