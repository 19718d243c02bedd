#include <gtest/gtest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "retecs/scheduler.hpp"

namespace retecs {
namespace {

PrioritizedSuite suite_of(const std::vector<double>& priorities,
                          const std::vector<double>& durations) {
  PrioritizedSuite s;
  for (std::size_t i = 0; i < priorities.size(); ++i) {
    s.items.push_back({std::string(1, static_cast<char>('a' + i)), priorities[i], durations[i]});
  }
  return s;
}

TEST(ComputeBudget, FractionOfSuiteDuration) {
  std::vector<TestCaseRecord> suite{{"a", 4.0, {}, {}}, {"b", 6.0, {}, {}}};
  EXPECT_DOUBLE_EQ(compute_budget(suite, 0.5), 5.0);
  EXPECT_DOUBLE_EQ(compute_budget(suite, 1.0), 10.0);
  std::vector<TestCaseRecord> single{{"a", 10.0, {}, {}}};
  EXPECT_DOUBLE_EQ(compute_budget(single, 0.5), 5.0);
  EXPECT_THROW(compute_budget(std::vector<TestCaseRecord>{}, 0.5), PreconditionError);
  EXPECT_THROW(compute_budget(suite, 0.0), PreconditionError);
}

TEST(BuildSchedule, HandTraces) {
  Rng rng(1);
  EXPECT_EQ(build_schedule(suite_of({0.9, 0.5, 0.1}, {3, 3, 3}), 6, rng).ordered_test_ids,
            (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(build_schedule(suite_of({0.9, 0.5, 0.1}, {3, 3, 3}), 0, rng)
                  .ordered_test_ids.empty());
  // b does not fit, the scan continues to c.
  EXPECT_EQ(build_schedule(suite_of({0.9, 0.8, 0.7}, {5, 10, 4}), 9, rng).ordered_test_ids,
            (std::vector<std::string>{"a", "c"}));
}

TEST(BuildSchedule, SingleTooLongTestIsSkipped) {
  Rng rng(1);
  EXPECT_TRUE(build_schedule(suite_of({1.0}, {10}), 5, rng).ordered_test_ids.empty());
}

TEST(BuildSchedule, TiesAreBrokenRandomly) {
  std::size_t a_first = 0;
  Rng rng(99);
  for (int i = 0; i < 2000; ++i) {
    const auto s = build_schedule(suite_of({0.5, 0.5}, {1, 1}), 2, rng);
    if (s.ordered_test_ids.front() == "a") ++a_first;
  }
  EXPECT_NEAR(a_first / 2000.0, 0.5, 0.05);
}

TEST(BuildSchedule, BudgetAndTopKProperties) {
  Rng gen(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + gen.index(12);
    std::vector<double> pr(n), du(n);
    for (auto& p : pr) p = gen.uniform();
    for (auto& d : du) d = gen.uniform(0.1, 20);
    const double budget = gen.uniform(0, 100);
    Rng rng(trial);
    const auto suite = suite_of(pr, du);
    const auto s = build_schedule(suite, budget, rng);
    double used = 0.0;
    for (const auto& id : s.ordered_test_ids) used += du[id[0] - 'a'];
    EXPECT_LE(used, budget);
    std::vector<std::string> sorted = s.ordered_test_ids;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());

    // Equal durations: exactly the k highest priorities, in priority order.
    const std::size_t k = gen.index(n + 1);
    const auto equal = build_schedule(suite_of(pr, std::vector<double>(n, 2.0)),
                                      2.0 * static_cast<double>(k), rng);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return pr[a] > pr[b]; });
    std::vector<std::string> top;
    for (std::size_t i = 0; i < k; ++i) top.push_back(std::string(1, 'a' + idx[i]));
    EXPECT_EQ(equal.ordered_test_ids, top);
  }
}

TEST(BuildSchedule, EqualDurationsAreKnapsackOptimal) {
  Rng gen(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + gen.index(10);
    std::vector<double> pr(n);
    for (auto& p : pr) p = gen.uniform();
    const std::vector<double> du(n, 3.0);
    const double budget = gen.uniform(0, 3.0 * n + 1);
    Rng rng(trial);
    const auto s = build_schedule(suite_of(pr, du), budget, rng);
    double total = 0.0;
    for (const auto& id : s.ordered_test_ids) total += pr[id[0] - 'a'];
    EXPECT_NEAR(total, oracle::knapsack_best(pr, du, budget), 1e-12);
  }
}

TEST(BuildSchedule, RaisingPriorityNeverDelaysATest) {
  Rng gen(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + gen.index(10);
    std::vector<double> pr(n), du(n);
    for (auto& p : pr) p = std::floor(gen.uniform() * 4) / 4;  // plenty of ties
    for (auto& d : du) d = gen.uniform(0.5, 5);
    const double budget = gen.uniform(0, 30);
    const std::size_t target = gen.index(n);
    auto raised = pr;
    raised[target] += gen.uniform(0, 1);
    const std::string id(1, 'a' + target);

    Rng r1(trial), r2(trial);
    const auto before = build_schedule(suite_of(pr, du), budget, r1);
    const auto after = build_schedule(suite_of(raised, du), budget, r2);
    const auto pos = [&](const Schedule& s) {
      const auto it = std::find(s.ordered_test_ids.begin(), s.ordered_test_ids.end(), id);
      return it - s.ordered_test_ids.begin();
    };
    if (pos(before) < static_cast<std::ptrdiff_t>(before.ordered_test_ids.size())) {
      ASSERT_LT(pos(after), static_cast<std::ptrdiff_t>(after.ordered_test_ids.size()));
      EXPECT_LE(pos(after), pos(before));
    }
  }
}

TEST(VirtualExecute, CopiesVerdictsAndCountsMissedFailures) {
  CycleLog log{3, {{"a", {1.0, false}}, {"b", {2.0, true}}, {"c", {4.0, false}}}};
  const auto r = virtual_execute(Schedule{3, {"a", "b"}, 10}, log);
  ASSERT_EQ(r.verdicts.size(), 2u);
  EXPECT_FALSE(r.verdicts[0].passed);
  EXPECT_TRUE(r.verdicts[1].passed);
  EXPECT_DOUBLE_EQ(r.verdicts[1].actual_duration, 2.0);
  EXPECT_EQ(r.undetected_failures, 1u);

  EXPECT_EQ(virtual_execute(Schedule{3, {}, 0}, log).undetected_failures, 2u);
  EXPECT_EQ(virtual_execute(Schedule{3, {"c", "a"}, 10}, log).undetected_failures, 0u);
  EXPECT_THROW(virtual_execute(Schedule{3, {"zz"}, 10}, log), LookupError);
}

TEST(VirtualExecute, ActualOverrunIsReportedNotRejected) {
  CycleLog log{1, {{"a", {9.0, true}}}};
  const auto r = virtual_execute(Schedule{1, {"a"}, 5}, log);
  EXPECT_TRUE(r.exceeded_budget());
}

}  // namespace
}  // namespace retecs
