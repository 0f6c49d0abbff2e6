#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "wlrgs/error.hpp"
#include "wlrgs/survival_data.hpp"

using namespace wlrgs;

TEST_CASE("two-subject risk sets by hand") {
  const auto data = fixture::twoSubjects();
  const EventTable t = ingest(data, 3.0);
  REQUIRE(t.rows() == 2);
  CHECK(t.time[0] == 1.0);
  CHECK(t.events[0] == 1.0);
  CHECK(t.atRisk[0] == 2.0);
  CHECK(t.atRiskTrt[0] == 1.0);
  CHECK(t.time[1] == 2.0);
  CHECK(t.atRisk[1] == 1.0);
  CHECK(t.atRiskTrt[1] == 0.0);
  CHECK(t.n == 2);
}

TEST_CASE("cutoff truncates later events") {
  const EventTable t = ingest(fixture::twoSubjects(), 1.5);
  REQUIRE(t.rows() == 1);
  CHECK(t.atRisk[0] == 2.0);
  CHECK(t.atRiskTrt[0] == 1.0);
}

TEST_CASE("no events keeps n") {
  std::vector<SubjectRecord> d = {{"a", 1, false, 0}, {"b", 2, false, 1}, {"c", 3, false, 1}};
  const EventTable t = ingest(d, 5.0);
  CHECK(t.rows() == 0);
  CHECK(t.n == 3);
}

TEST_CASE("input errors") {
  CHECK_THROWS_WITH_AS(ingest(std::vector<SubjectRecord>{}, 1.0), "survival_data: no subjects",
                       InputError);
  std::vector<SubjectRecord> bad = {{"a", 1, true, 2}};
  CHECK_THROWS_WITH_AS(ingest(bad, 1.0), "survival_data: bad arm code", InputError);
}

TEST_CASE("proportion at risk") {
  const EventTable t = ingest(fixture::twoSubjects(), 3.0);
  CHECK(propAtRisk(t, 1.0) == 0.5);
  CHECK(propAtRisk(t, 2.0) == 0.0);
  std::vector<SubjectRecord> all;
  for (int i = 0; i < 5; ++i) all.push_back({"x", 1.0 + i, true, 1});
  CHECK(propAtRisk(ingest(all, 10.0), 1.0) == 1.0);
}

TEST_CASE("permutation invariance, cutoff monotonicity and event count") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 25; ++rep) {
    auto data = fixture::randomSample(rng);
    const EventTable a = ingest(data, 2.0);
    std::shuffle(data.begin(), data.end(), rng);
    const EventTable b = ingest(data, 2.0);
    REQUIRE(a.rows() == b.rows());
    CHECK((a.time == b.time).all());
    CHECK((a.events == b.events).all());
    CHECK((a.atRisk == b.atRisk).all());
    CHECK((a.atRiskTrt == b.atRiskTrt).all());

    const EventTable later = ingest(data, 2.75);
    REQUIRE(later.rows() >= a.rows());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      CHECK(later.time[r] == a.time[r]);
      CHECK(later.atRisk[r] == a.atRisk[r]);
      CHECK(later.atRiskTrt[r] == a.atRiskTrt[r]);
    }
    const auto counted = std::count_if(data.begin(), data.end(),
                                       [](const SubjectRecord& r) { return r.event && r.time <= 2.0; });
    CHECK(a.events.sum() == double(counted));
    CHECK((a.atRiskTrt <= a.atRisk).all());
    for (Eigen::Index r = 1; r < a.rows(); ++r) CHECK(a.atRisk[r] <= a.atRisk[r - 1]);
  }
}

TEST_CASE("crude summary by arm") {
  const CrudeSummary c = crudeSummary(fixture::twoSubjects(), 3.0);
  CHECK(c.eventsTrt == 1.0);
  CHECK(c.eventsCtl == 1.0);
  CHECK(c.personTimeTrt == 1.0);
  CHECK(c.personTimeCtl == 2.0);
  CHECK(c.riskRatio() == doctest::Approx(2.0));
}

TEST_CASE("csv round trip and line diagnostics") {
  std::stringstream s;
  writeSubjectsCsv(s, fixture::twoSubjects());
  const auto back = readSubjectsCsv(s);
  REQUIRE(back.size() == 2);
  CHECK(back[1].time == 2.0);
  CHECK(back[1].arm == 0);
  std::stringstream bad("id,time,event,arm\nA,1,1,1\nB,x,1,0\n");
  CHECK_THROWS_WITH_AS(readSubjectsCsv(bad), doctest::Contains("line 3"), InputError);
}
