#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "retecs/errors.hpp"

namespace retecs {

using TestId = std::string;

// Metadata the prioritizers see for one test case. Cycle numbers are
// positions in the replayed dataset (0-based), not dataset cycle ids.
struct TestCaseRecord {
  TestId id;
  double estimated_duration = 0.0;  // running maximum of observed durations
  std::optional<std::size_t> last_executed_cycle;
  std::vector<bool> verdict_history;  // most recent first, true = passed

  bool operator==(const TestCaseRecord&) const = default;
};

struct Execution {
  double duration = 0.0;  // seconds, > 0
  bool passed = true;

  bool operator==(const Execution&) const = default;
};

// Ground truth for one CI cycle: every test of the suite with its outcome.
struct CycleLog {
  std::int64_t cycle_id = 0;
  std::map<TestId, Execution> entries;

  bool operator==(const CycleLog&) const = default;

  std::size_t failure_count() const {
    return static_cast<std::size_t>(std::count_if(
        entries.begin(), entries.end(),
        [](const auto& kv) { return !kv.second.passed; }));
  }
};

struct PrioritizedTest {
  TestId id;
  double priority = 0.0;
  double estimated_duration = 0.0;
};

struct PrioritizedSuite {
  std::int64_t cycle_id = 0;
  std::vector<PrioritizedTest> items;
};

inline void validate(const PrioritizedSuite& suite) {
  std::set<TestId> seen;
  for (const auto& item : suite.items) {
    if (!std::isfinite(item.priority)) {
      throw ValidationError("non-finite priority for test '" + item.id + "'");
    }
    if (!seen.insert(item.id).second) {
      throw ValidationError("duplicate test '" + item.id +
                            "' in prioritized suite");
    }
  }
}

struct Schedule {
  std::int64_t cycle_id = 0;
  std::vector<TestId> ordered_test_ids;  // index 0 runs first
  double budget = 0.0;

  bool operator==(const Schedule&) const = default;
};

struct ScheduledVerdict {
  bool passed = true;
  double actual_duration = 0.0;

  bool operator==(const ScheduledVerdict&) const = default;
};

struct ScheduleResult {
  Schedule schedule;
  std::vector<ScheduledVerdict> verdicts;  // parallel to ordered_test_ids
  std::size_t undetected_failures = 0;

  std::size_t detected_failures() const {
    return static_cast<std::size_t>(
        std::count_if(verdicts.begin(), verdicts.end(),
                      [](const ScheduledVerdict& v) { return !v.passed; }));
  }

  std::size_t total_failures() const {
    return detected_failures() + undetected_failures;
  }

  double actual_duration() const {
    double total = 0.0;
    for (const auto& v : verdicts) total += v.actual_duration;
    return total;
  }

  // Selection runs on estimated durations, so the executed schedule may take
  // longer than the budget. Reported, never enforced.
  bool exceeded_budget() const { return actual_duration() > schedule.budget; }
};

// 1-based execution position of `id` in `schedule`.
inline std::size_t rank(const Schedule& schedule, const TestId& id) {
  const auto& ids = schedule.ordered_test_ids;
  const auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) {
    throw LookupError("test '" + id + "' is not in the schedule");
  }
  return static_cast<std::size_t>(it - ids.begin()) + 1;
}

// Raw state vector: [estimated_duration, time_since_last_run, h_1..h_L] where
// h_k = 1 if the k-th most recent execution failed. A never-executed test is
// treated as last run before cycle 0, so time_since_last_run = cycle + 1.
inline std::vector<double> featurize(const TestCaseRecord& test,
                                     std::size_t current_cycle,
                                     std::size_t history_length) {
  std::vector<double> features(2 + history_length, 0.0);
  features[0] = test.estimated_duration;
  features[1] = test.last_executed_cycle
                    ? static_cast<double>(current_cycle) -
                          static_cast<double>(*test.last_executed_cycle)
                    : static_cast<double>(current_cycle) + 1.0;
  const std::size_t n = std::min(history_length, test.verdict_history.size());
  for (std::size_t k = 0; k < n; ++k) {
    features[2 + k] = test.verdict_history[k] ? 0.0 : 1.0;
  }
  return features;
}

inline TestCaseRecord update_record(TestCaseRecord test, bool passed,
                                    double actual_duration, std::size_t cycle,
                                    std::size_t history_length) {
  if (!(actual_duration > 0.0)) {
    throw PreconditionError("actual duration must be positive");
  }
  test.verdict_history.insert(test.verdict_history.begin(), passed);
  if (test.verdict_history.size() > history_length) {
    test.verdict_history.resize(history_length);
  }
  test.last_executed_cycle = cycle;
  test.estimated_duration = std::max(test.estimated_duration, actual_duration);
  return test;
}

// Observed duration range of a replay so far; used to scale and bucket the
// duration feature.
struct FeatureScale {
  double min_duration = 0.0;
  double max_duration = 0.0;

  void observe(double duration) {
    if (max_duration <= 0.0) {
      min_duration = max_duration = duration;
      return;
    }
    min_duration = std::min(min_duration, duration);
    max_duration = std::max(max_duration, duration);
  }
};

// Network/weighting input: duration divided by the largest observed duration,
// staleness divided by its largest possible value (current_cycle + 1), history
// bits unchanged. All components land in [0, 1].
inline std::vector<double> scale_features(std::vector<double> raw,
                                          const FeatureScale& scale,
                                          std::size_t current_cycle) {
  if (raw.size() < 2) {
    throw PreconditionError("feature vector needs at least two components");
  }
  raw[0] = scale.max_duration > 0.0 ? raw[0] / scale.max_duration : 0.0;
  raw[1] = raw[1] / (static_cast<double>(current_cycle) + 1.0);
  return raw;
}

}  // namespace retecs
