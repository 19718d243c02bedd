#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "retecs/domain.hpp"

namespace retecs {

// Per-test reward for one finished cycle. Every test of the suite has an entry
// and every value is >= 0.
struct RewardAssignment {
  std::int64_t cycle_id = 0;
  std::map<TestId, double> rewards;

  bool operator==(const RewardAssignment&) const = default;
};

enum class RewardKind {
  kFailureCount,     // "failcount"
  kTestCaseFailure,  // "tcfail"
  kTimeRanked,       // "timerank"
};

inline std::optional<RewardKind> parse_reward_kind(std::string_view token) {
  if (token == "failcount") return RewardKind::kFailureCount;
  if (token == "tcfail") return RewardKind::kTestCaseFailure;
  if (token == "timerank") return RewardKind::kTimeRanked;
  return std::nullopt;
}

inline std::string_view to_string(RewardKind kind) {
  switch (kind) {
    case RewardKind::kFailureCount: return "failcount";
    case RewardKind::kTestCaseFailure: return "tcfail";
    case RewardKind::kTimeRanked: return "timerank";
  }
  return "?";
}

namespace detail {

inline void check_consistent(const ScheduleResult& result) {
  if (result.verdicts.size() != result.schedule.ordered_test_ids.size()) {
    throw PreconditionError("schedule result has " +
                            std::to_string(result.verdicts.size()) +
                            " verdicts for " +
                            std::to_string(result.schedule.ordered_test_ids.size()) +
                            " scheduled tests");
  }
}

inline RewardAssignment zero_rewards(const ScheduleResult& result,
                                     std::span<const TestId> suite) {
  RewardAssignment out;
  out.cycle_id = result.schedule.cycle_id;
  for (const auto& id : suite) out.rewards[id] = 0.0;
  for (const auto& id : result.schedule.ordered_test_ids) {
    if (!out.rewards.contains(id)) {
      throw PreconditionError("scheduled test '" + id + "' is not in the suite");
    }
  }
  return out;
}

}  // namespace detail

// Every test of the suite, scheduled or not, receives the number of failed
// tests in the schedule.
inline RewardAssignment failure_count_reward(const ScheduleResult& result,
                                             std::span<const TestId> suite) {
  detail::check_consistent(result);
  RewardAssignment out = detail::zero_rewards(result, suite);
  const double failures = static_cast<double>(result.detected_failures());
  for (auto& kv : out.rewards) kv.second = failures;
  return out;
}

// 1 for a scheduled test that failed, 0 otherwise.
inline RewardAssignment test_case_failure_reward(const ScheduleResult& result,
                                                 std::span<const TestId> suite) {
  detail::check_consistent(result);
  RewardAssignment out = detail::zero_rewards(result, suite);
  const auto& ids = result.schedule.ordered_test_ids;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.rewards[ids[i]] = result.verdicts[i].passed ? 0.0 : 1.0;
  }
  return out;
}

// A scheduled test gets the number of failed scheduled tests, minus (if it
// passed) the number of failed tests that run after it. Unscheduled tests get 0.
inline RewardAssignment time_ranked_reward(const ScheduleResult& result,
                                           std::span<const TestId> suite) {
  detail::check_consistent(result);
  RewardAssignment out = detail::zero_rewards(result, suite);
  const auto& ids = result.schedule.ordered_test_ids;
  const std::size_t total_failed = result.detected_failures();
  // Walk backwards so `failed_after` counts failures ranked after position i.
  std::size_t failed_after = 0;
  for (std::size_t i = ids.size(); i-- > 0;) {
    const bool passed = result.verdicts[i].passed;
    out.rewards[ids[i]] = static_cast<double>(
        passed ? total_failed - failed_after : total_failed);
    if (!passed) ++failed_after;
  }
  return out;
}

inline RewardAssignment compute_reward(RewardKind kind,
                                       const ScheduleResult& result,
                                       std::span<const TestId> suite) {
  switch (kind) {
    case RewardKind::kFailureCount: return failure_count_reward(result, suite);
    case RewardKind::kTestCaseFailure: return test_case_failure_reward(result, suite);
    case RewardKind::kTimeRanked: return time_ranked_reward(result, suite);
  }
  throw PreconditionError("unknown reward kind");
}

}  // namespace retecs
