#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace wlrgs {

struct SubjectRecord {
  std::string id;
  double time = 0.0;  // years on study
  bool event = false;
  int arm = 0;  // 1 = intervention
};

// Counting-process increments at the distinct event times of a two-arm
// sample. Counts are stored as doubles so the columns compose directly in
// array expressions.
struct EventTable {
  Eigen::ArrayXd time;       // strictly increasing event times
  Eigen::ArrayXd events;     // dN at each time
  Eigen::ArrayXd eventsTrt;  // intervention-arm share of dN
  Eigen::ArrayXd atRisk;     // #{T_i >= time}
  Eigen::ArrayXd atRiskTrt;  // #{T_i >= time, X_i = 1}
  Eigen::Index n = 0;        // subjects in the sample

  Eigen::Index rows() const { return time.size(); }
};

// Builds the event table at a data cutoff. Events after the cutoff are
// dropped; those subjects still count as at risk at every listed time.
EventTable ingest(std::span<const SubjectRecord> records, double cutoff);

// Columnar form of ingest, used by the simulator.
EventTable ingest(const Eigen::Ref<const Eigen::ArrayXd>& time,
                  const Eigen::Ref<const Eigen::ArrayXi>& event,
                  const Eigen::Ref<const Eigen::ArrayXi>& arm, double cutoff);

// Intervention-arm proportion of the risk set, E_n(xi, 0), at a listed
// event time.
double propAtRisk(const EventTable& table, double eventTime);

// The same proportion for every row.
Eigen::ArrayXd propAtRisk(const EventTable& table);

// Descriptive event counts and person-time by arm at a cutoff.
struct CrudeSummary {
  double eventsTrt = 0, eventsCtl = 0;
  double personTimeTrt = 0, personTimeCtl = 0;

  double rateTrt() const { return eventsTrt / personTimeTrt; }
  double rateCtl() const { return eventsCtl / personTimeCtl; }
  double riskRatio() const { return rateTrt() / rateCtl(); }
};

CrudeSummary crudeSummary(std::span<const SubjectRecord> records, double cutoff);

// CSV with header `id,time,event,arm`. Throws InputError naming the line
// of the first malformed row.
std::vector<SubjectRecord> readSubjectsCsv(std::istream& in);
std::vector<SubjectRecord> readSubjectsCsv(const std::string& path);
void writeSubjectsCsv(std::ostream& out, std::span<const SubjectRecord> records);

}  // namespace wlrgs
