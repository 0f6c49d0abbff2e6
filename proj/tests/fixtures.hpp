#pragma once

#include <random>
#include <vector>

#include "wlrgs/survival_data.hpp"

namespace fixture {

// (t=1, event, arm 1), (t=2, event, arm 0).
inline std::vector<wlrgs::SubjectRecord> twoSubjects() {
  return {{"A", 1.0, true, 1}, {"B", 2.0, true, 0}};
}

// Small two-arm sample with coarse (tied) times and some censoring.
inline std::vector<wlrgs::SubjectRecord> randomSample(std::mt19937_64& rng, int maxN = 50) {
  std::uniform_int_distribution<int> size(4, maxN);
  std::uniform_int_distribution<int> tick(1, 12);
  std::bernoulli_distribution coin(0.5), event(0.7);
  const int n = size(rng);
  std::vector<wlrgs::SubjectRecord> out;
  for (int i = 0; i < n; ++i)
    out.push_back({"S" + std::to_string(i), 0.25 * tick(rng), event(rng), coin(rng) ? 1 : 0});
  return out;
}

}  // namespace fixture
