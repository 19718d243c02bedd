#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "oracles.hpp"
#include "retecs/rewards.hpp"

namespace retecs {
namespace {

ScheduleResult make_result(const std::vector<std::string>& ids,
                           const std::vector<bool>& passed,
                           std::size_t undetected = 0) {
  ScheduleResult r;
  r.schedule.ordered_test_ids = ids;
  for (bool p : passed) r.verdicts.push_back({p, 1.0});
  r.undetected_failures = undetected;
  return r;
}

const std::vector<std::string> kSuite{"t1", "t2", "t3", "u1", "u2"};

TEST(FailureCountReward, WholeSuiteGetsScheduledFailureCount) {
  const auto r = failure_count_reward(
      make_result({"t1", "t2", "t3"}, {true, false, false}), kSuite);
  ASSERT_EQ(r.rewards.size(), 5u);
  for (const auto& [id, v] : r.rewards) EXPECT_EQ(v, 2.0) << id;
  for (const auto& [id, v] :
       failure_count_reward(make_result({"t1"}, {true}), kSuite).rewards) {
    EXPECT_EQ(v, 0.0);
  }
  for (const auto& [id, v] : failure_count_reward(make_result({}, {}), kSuite).rewards) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(TestCaseFailureReward, OnlyScheduledFailuresAreRewarded) {
  const auto r = test_case_failure_reward(
      make_result({"t1", "t2", "t3"}, {true, false, false}), kSuite);
  EXPECT_EQ(r.rewards.at("t1"), 0.0);
  EXPECT_EQ(r.rewards.at("t2"), 1.0);
  EXPECT_EQ(r.rewards.at("t3"), 1.0);
  EXPECT_EQ(r.rewards.at("u1"), 0.0);
  EXPECT_EQ(r.rewards.at("u2"), 0.0);
}

TEST(TimeRankedReward, HandTraces) {
  auto r = time_ranked_reward(make_result({"t1", "t2", "t3"}, {true, false, false}), kSuite);
  EXPECT_EQ(r.rewards.at("t1"), 0.0);
  EXPECT_EQ(r.rewards.at("t2"), 2.0);
  EXPECT_EQ(r.rewards.at("t3"), 2.0);
  EXPECT_EQ(r.rewards.at("u1"), 0.0);

  r = time_ranked_reward(make_result({"t1", "t2"}, {false, true}), kSuite);
  EXPECT_EQ(r.rewards.at("t1"), 1.0);
  EXPECT_EQ(r.rewards.at("t2"), 1.0);

  r = time_ranked_reward(make_result({"t1", "t2"}, {true, true}), kSuite);
  for (const auto& [id, v] : r.rewards) EXPECT_EQ(v, 0.0);
}

TEST(Rewards, RejectInconsistentResults) {
  auto bad = make_result({"t1", "t2"}, {true});
  EXPECT_THROW(test_case_failure_reward(bad, kSuite), PreconditionError);
  EXPECT_THROW(time_ranked_reward(make_result({"zz"}, {true}), kSuite),
               PreconditionError);
}

TEST(Rewards, MatchEnumerationOracle) {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto c = oracle::random_case(rng);
    const auto expected = oracle::rewards(c.result, c.suite);
    const auto fc = failure_count_reward(c.result, c.suite);
    const auto tc = test_case_failure_reward(c.result, c.suite);
    const auto tr = time_ranked_reward(c.result, c.suite);
    EXPECT_EQ(fc.rewards, expected.failcount);
    EXPECT_EQ(tc.rewards, expected.tcfail);
    EXPECT_EQ(tr.rewards, expected.timerank);
  }
}

TEST(Rewards, Properties) {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const auto c = oracle::random_case(rng, 8, 3);
    const auto fc = failure_count_reward(c.result, c.suite);
    const auto tr = time_ranked_reward(c.result, c.suite);
    const double constant = c.suite.empty() ? 0.0 : fc.rewards.begin()->second;
    for (const auto& kind : {RewardKind::kFailureCount, RewardKind::kTestCaseFailure,
                             RewardKind::kTimeRanked}) {
      for (const auto& [id, v] : compute_reward(kind, c.result, c.suite).rewards) {
        EXPECT_GE(v, 0.0);
        EXPECT_TRUE(std::isfinite(v));
      }
    }
    for (const auto& [id, v] : fc.rewards) EXPECT_EQ(v, constant);
    const auto& ids = c.result.schedule.ordered_test_ids;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!c.result.verdicts[i].passed) EXPECT_EQ(tr.rewards.at(ids[i]), constant);
    }

    // Reversing the passed tests that follow the last failure changes nothing.
    std::size_t last_fail = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!c.result.verdicts[i].passed) last_fail = i + 1;
    }
    auto permuted = c.result;
    std::reverse(permuted.schedule.ordered_test_ids.begin() + last_fail,
                 permuted.schedule.ordered_test_ids.end());
    std::reverse(permuted.verdicts.begin() + last_fail, permuted.verdicts.end());
    EXPECT_EQ(time_ranked_reward(permuted, c.suite), tr);
  }
}

TEST(RewardKind, Tokens) {
  EXPECT_EQ(parse_reward_kind("failcount"), RewardKind::kFailureCount);
  EXPECT_EQ(parse_reward_kind("tcfail"), RewardKind::kTestCaseFailure);
  EXPECT_EQ(parse_reward_kind("timerank"), RewardKind::kTimeRanked);
  EXPECT_FALSE(parse_reward_kind("napfd"));
  EXPECT_EQ(to_string(RewardKind::kTimeRanked), "timerank");
}

}  // namespace
}  // namespace retecs
