#include "wlrgs/survival_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "wlrgs/error.hpp"

namespace wlrgs {

namespace {

constexpr const char* kModule = "survival_data";

// Number of entries of a sorted array that are >= x.
Eigen::Index countAtLeast(const std::vector<double>& sorted, double x) {
  return static_cast<Eigen::Index>(sorted.end() -
                                   std::lower_bound(sorted.begin(), sorted.end(), x));
}

}  // namespace

EventTable ingest(const Eigen::Ref<const Eigen::ArrayXd>& time,
                  const Eigen::Ref<const Eigen::ArrayXi>& event,
                  const Eigen::Ref<const Eigen::ArrayXi>& arm, double cutoff) {
  const Eigen::Index n = time.size();
  if (n == 0) throw InputError(kModule, "no subjects");
  if (event.size() != n || arm.size() != n)
    throw InputError(kModule, "column lengths differ");
  if (!(cutoff >= 0)) throw InputError(kModule, "cutoff must be non-negative");
  if ((arm != 0 && arm != 1).any()) throw InputError(kModule, "bad arm code");
  if (!(time >= 0).all()) throw InputError(kModule, "negative or missing time");

  std::vector<double> all(time.data(), time.data() + n);
  std::vector<double> trt;
  std::vector<std::pair<double, int>> evts;  // (time, arm) of counted events
  trt.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (arm[i] == 1) trt.push_back(time[i]);
    if (event[i] != 0 && time[i] <= cutoff) evts.emplace_back(time[i], arm[i]);
  }
  std::sort(all.begin(), all.end());
  std::sort(trt.begin(), trt.end());
  std::sort(evts.begin(), evts.end());

  std::vector<double> t, dN, dNTrt;
  for (const auto& [ti, ai] : evts) {
    if (t.empty() || ti != t.back()) {
      t.push_back(ti);
      dN.push_back(0);
      dNTrt.push_back(0);
    }
    dN.back() += 1;
    dNTrt.back() += ai;
  }

  EventTable table;
  const auto m = static_cast<Eigen::Index>(t.size());
  table.n = n;
  table.time = Eigen::Map<Eigen::ArrayXd>(t.data(), m);
  table.events = Eigen::Map<Eigen::ArrayXd>(dN.data(), m);
  table.eventsTrt = Eigen::Map<Eigen::ArrayXd>(dNTrt.data(), m);
  table.atRisk.resize(m);
  table.atRiskTrt.resize(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    table.atRisk[r] = static_cast<double>(countAtLeast(all, t[r]));
    table.atRiskTrt[r] = static_cast<double>(countAtLeast(trt, t[r]));
  }
  return table;
}

EventTable ingest(std::span<const SubjectRecord> records, double cutoff) {
  if (records.empty()) throw InputError(kModule, "no subjects");
  const auto n = static_cast<Eigen::Index>(records.size());
  Eigen::ArrayXd time(n);
  Eigen::ArrayXi event(n), arm(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = records[static_cast<std::size_t>(i)];
    time[i] = r.time;
    event[i] = r.event ? 1 : 0;
    arm[i] = r.arm;
  }
  return ingest(time, event, arm, cutoff);
}

double propAtRisk(const EventTable& table, double eventTime) {
  const auto* begin = table.time.data();
  const auto* end = begin + table.rows();
  const auto* it = std::lower_bound(begin, end, eventTime);
  if (it == end || *it != eventTime) throw InputError(kModule, "not a listed event time");
  const auto row = it - begin;
  if (table.atRisk[row] <= 0) throw InputError(kModule, "empty risk set");
  return table.atRiskTrt[row] / table.atRisk[row];
}

Eigen::ArrayXd propAtRisk(const EventTable& table) {
  if ((table.atRisk <= 0).any()) throw InputError(kModule, "empty risk set");
  return table.atRiskTrt / table.atRisk;
}

CrudeSummary crudeSummary(std::span<const SubjectRecord> records, double cutoff) {
  CrudeSummary s;
  for (const auto& r : records) {
    const double exposure = std::min(r.time, cutoff);
    const double event = (r.event && r.time <= cutoff) ? 1.0 : 0.0;
    if (r.arm == 1) {
      s.eventsTrt += event;
      s.personTimeTrt += exposure;
    } else {
      s.eventsCtl += event;
      s.personTimeCtl += exposure;
    }
  }
  return s;
}

std::vector<SubjectRecord> readSubjectsCsv(std::istream& in) {
  std::string line;
  std::size_t lineNo = 0;
  auto fail = [&](const std::string& why) {
    throw InputError(kModule, "line " + std::to_string(lineNo) + ": " + why);
  };

  if (!std::getline(in, line)) throw InputError(kModule, "empty CSV input");
  ++lineNo;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "id,time,event,arm") fail("expected header 'id,time,event,arm'");

  std::vector<SubjectRecord> out;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (line.back() == ',') fields.emplace_back();
    if (fields.size() != 4) fail("expected 4 fields, got " + std::to_string(fields.size()));

    SubjectRecord r;
    r.id = fields[0];
    const auto& ts = fields[1];
    auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), r.time);
    if (ec != std::errc() || ptr != ts.data() + ts.size() || !std::isfinite(r.time))
      fail("time '" + ts + "' is not a number");
    if (r.time < 0) fail("negative time");
    if (fields[2] == "0") {
      r.event = false;
    } else if (fields[2] == "1") {
      r.event = true;
    } else {
      fail("event must be 0 or 1");
    }
    if (fields[3] == "0") {
      r.arm = 0;
    } else if (fields[3] == "1") {
      r.arm = 1;
    } else {
      fail("bad arm code");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SubjectRecord> readSubjectsCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(kModule, "cannot open " + path);
  return readSubjectsCsv(in);
}

void writeSubjectsCsv(std::ostream& out, std::span<const SubjectRecord> records) {
  out << "id,time,event,arm\n";
  out << std::setprecision(17);
  for (const auto& r : records)
    out << r.id << ',' << r.time << ',' << (r.event ? 1 : 0) << ',' << r.arm << '\n';
}

}  // namespace wlrgs
