#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <set>
#include <string>
#include <span>
#include <vector>

#include "retecs/domain.hpp"
#include "retecs/rng.hpp"

namespace retecs {

// Time limit for a cycle: `ratio` of the estimated duration of the full suite.
inline double compute_budget(std::span<const TestCaseRecord> suite,
                             double ratio) {
  if (suite.empty()) throw PreconditionError("budget of an empty suite");
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw PreconditionError("schedule ratio must lie in (0, 1]");
  }
  double total = 0.0;
  for (const auto& test : suite) total += test.estimated_duration;
  return ratio * total;
}

// Greedy single-agent schedule. Tests are scanned by descending priority, ties
// in random order; a test is taken when its estimated duration still fits and
// the scan continues past tests that do not fit. The rng is always consumed
// the same way regardless of priorities.
inline Schedule build_schedule(const PrioritizedSuite& prioritized,
                               double budget, Rng& rng) {
  if (!(budget >= 0.0)) throw PreconditionError("budget must be non-negative");
  const auto& items = prioritized.items;

  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span(order));
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return items[a].priority > items[b].priority;
                   });

  Schedule schedule;
  schedule.cycle_id = prioritized.cycle_id;
  schedule.budget = budget;
  double used = 0.0;
  for (const std::size_t i : order) {
    const double next = used + items[i].estimated_duration;
    if (next <= budget) {
      used = next;
      schedule.ordered_test_ids.push_back(items[i].id);
    }
  }
  return schedule;
}

// Replays `schedule` against the logged outcomes of its cycle.
inline ScheduleResult virtual_execute(const Schedule& schedule,
                                      const CycleLog& log) {
  ScheduleResult result;
  result.schedule = schedule;
  result.verdicts.reserve(schedule.ordered_test_ids.size());
  std::set<TestId> scheduled;
  for (const auto& id : schedule.ordered_test_ids) {
    const auto it = log.entries.find(id);
    if (it == log.entries.end()) {
      throw LookupError("scheduled test '" + id + "' is not in the log of cycle " +
                        std::to_string(log.cycle_id));
    }
    if (!scheduled.insert(id).second) {
      throw PreconditionError("test '" + id + "' scheduled twice");
    }
    result.verdicts.push_back({it->second.passed, it->second.duration});
  }
  for (const auto& [id, execution] : log.entries) {
    if (!execution.passed && !scheduled.contains(id)) ++result.undetected_failures;
  }
  return result;
}

}  // namespace retecs
