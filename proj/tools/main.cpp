#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "wlrgs/error.hpp"
#include "wlrgs/io.hpp"
#include "wlrgs/report.hpp"

namespace {

using nlohmann::json;
namespace wf = wlrgs::workflow;

struct Options {
  std::string config;
  std::string data;
  std::optional<double> cutoff;
  std::optional<int> analysis;
  std::string out;
  bool pretty = false;
  bool oracle = false;
  std::optional<std::uint64_t> seed;
  bool observedFunctionals = false;
  std::string replicatesCsv;
  std::uint64_t replicate = 0;
};

void emit(const json& doc, const Options& o) {
  const std::string text = o.pretty ? wf::pretty(doc) : doc.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw wlrgs::InputError("cli", "cannot write " + o.out);
  f << text;
  if (o.pretty) std::ofstream(o.out + ".json") << doc.dump(2) << '\n';
}

wf::Provenance provenance(const std::string& command, const Options& o) {
  const std::string bytes = wlrgs::io::readTextFile(o.config);
  std::string hash = wlrgs::io::fnv1a64(bytes);
  if (!o.data.empty() && command == "monitor")
    hash += "+" + wlrgs::io::fnv1a64(wlrgs::io::readTextFile(o.data));
  return {command, hash, o.cutoff};
}

void writeTrialData(const json& config, const Options& o) {
  const wf::SimulationSetup s = wf::simulationSetup(config, o.seed);
  const auto& times = s.scenario.analysisTimes;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const std::string path = o.data + "_" + std::to_string(j + 1) + ".csv";
    std::ofstream f(path);
    if (!f) throw wlrgs::InputError("cli", "cannot write " + path);
    wlrgs::writeSubjectsCsv(
        f, wlrgs::simulateSubjects(s.scenario, s.truth.K, o.replicate, times[j]));
  }
}

int run(const std::string& command, const Options& o) {
  const json config = wlrgs::io::readJsonFile(o.config);
  const wf::Provenance prov = provenance(command, o);
  if (command == "design") {
    emit(wf::designDocument(config, prov), o);
  } else if (command == "monitor") {
    if (o.data.empty()) throw wlrgs::InputError("cli", "monitor needs --data");
    const auto records = wlrgs::readSubjectsCsv(o.data);
    emit(wf::monitorDocument(config, records, o.cutoff, o.analysis, prov), o);
  } else if (command == "report") {
    emit(wf::reportDocument(config, o.analysis, o.observedFunctionals, prov), o);
  } else if (command == "project") {
    emit(wf::projectDocument(config, o.oracle, prov), o);
  } else if (command == "simulate") {
    if (!o.data.empty()) writeTrialData(config, o);
    std::vector<wlrgs::TrialOutcome> outcomes;
    const bool keep = !o.replicatesCsv.empty();
    const json doc = wf::simulateDocument(config, o.seed, prov, keep ? &outcomes : nullptr);
    if (keep) {
      std::ofstream f(o.replicatesCsv);
      if (!f) throw wlrgs::InputError("cli", "cannot write " + o.replicatesCsv);
      wf::writeReplicatesCsv(f, outcomes);
    }
    emit(doc, o);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group-sequential weighted log-rank monitoring and inference"};
  app.set_version_flag("--version", std::string(WLRGS_VERSION));
  app.require_subcommand(1);

  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON config or document")->required();
    sub->add_option("--out", o.out, "Output path (default stdout)");
    sub->add_flag("--pretty", o.pretty, "Human-readable tables");
  };

  CLI::App* design = app.add_subcommand("design", "Boundaries at the planned fractions");
  common(design);

  CLI::App* monitor = app.add_subcommand("monitor", "Add an interim analysis from subject data");
  common(monitor);
  monitor->add_option("--data", o.data, "Subject CSV (id,time,event,arm)")->required();
  monitor->add_option("--cutoff", o.cutoff, "Data cutoff in years");
  monitor->add_option("--analysis", o.analysis, "Analysis number j");

  CLI::App* report = app.add_subcommand("report", "Inference at the stopping analysis");
  common(report);
  report->add_option("--analysis", o.analysis, "Report at analysis j");
  report->add_flag("--observed-functionals", o.observedFunctionals,
                   "Use observed V and m at the scheduled final analysis");

  CLI::App* project = app.add_subcommand("project", "End-of-trial functional projection");
  common(project);
  project->add_flag("--oracle", o.oracle, "Add quadrature cross-check deltas");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo operating characteristics");
  common(simulate);
  simulate->add_option("--seed", o.seed, "Master seed (overrides the scenario)");
  simulate->add_option("--replicates-csv", o.replicatesCsv, "Per-replicate CSV output");
  simulate->add_option("--data", o.data,
                       "Write one trial's subject data as <prefix>_<j>.csv per analysis");
  simulate->add_option("--replicate", o.replicate, "Replicate index used with --data");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), o);
  } catch (const wlrgs::InfeasibleDesign& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const wlrgs::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: cli: malformed JSON input: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
