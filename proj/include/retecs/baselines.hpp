#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>

#include "retecs/domain.hpp"
#include "retecs/rng.hpp"

namespace retecs {

// Baseline prioritizers. None of them learns; they only read the records.

inline PrioritizedSuite random_prioritize(std::span<const TestCaseRecord> suite,
                                          std::int64_t cycle_id, Rng& rng) {
  PrioritizedSuite out;
  out.cycle_id = cycle_id;
  out.items.reserve(suite.size());
  for (const auto& test : suite) {
    out.items.push_back({test.id, rng.uniform(), test.estimated_duration});
  }
  return out;
}

// Failure recency: sum over the verdict history of 2^-k for every failure at
// position k (k = 1 is the most recent run).
inline double failure_recency(const TestCaseRecord& test) {
  double priority = 0.0;
  double weight = 0.5;
  for (const bool passed : test.verdict_history) {
    if (!passed) priority += weight;
    weight *= 0.5;
  }
  return priority;
}

inline PrioritizedSuite sorting_prioritize(std::span<const TestCaseRecord> suite,
                                           std::int64_t cycle_id) {
  PrioritizedSuite out;
  out.cycle_id = cycle_id;
  out.items.reserve(suite.size());
  for (const auto& test : suite) {
    out.items.push_back({test.id, failure_recency(test), test.estimated_duration});
  }
  return out;
}

// Equal-weight sum of a scaled feature vector.
inline double weighting_priority(std::span<const double> scaled_features) {
  double sum = 0.0;
  for (double x : scaled_features) sum += x;
  return sum;
}

// Weighting baseline over the same scaled features the network agent sees.
inline PrioritizedSuite weighting_prioritize(std::span<const TestCaseRecord> suite,
                                             std::int64_t cycle_id,
                                             std::size_t current_cycle,
                                             std::size_t history_length,
                                             const FeatureScale& scale) {
  PrioritizedSuite out;
  out.cycle_id = cycle_id;
  out.items.reserve(suite.size());
  for (const auto& test : suite) {
    const auto features = scale_features(
        featurize(test, current_cycle, history_length), scale, current_cycle);
    out.items.push_back(
        {test.id, weighting_priority(features), test.estimated_duration});
  }
  return out;
}

}  // namespace retecs
