#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "retecs/agents.hpp"
#include "retecs/domain.hpp"
#include "retecs/evaluation.hpp"
#include "retecs/ingestion.hpp"
#include "retecs/rewards.hpp"
#include "retecs/rng.hpp"
#include "retecs/scheduler.hpp"

namespace retecs {

enum class Method { kRandom, kSorting, kWeighting, kTableau, kNetwork };

inline std::optional<Method> parse_method(std::string_view token) {
  if (token == "random") return Method::kRandom;
  if (token == "sorting") return Method::kSorting;
  if (token == "weighting") return Method::kWeighting;
  if (token == "tableau") return Method::kTableau;
  if (token == "network") return Method::kNetwork;
  return std::nullopt;
}

inline std::string_view to_string(Method method) {
  switch (method) {
    case Method::kRandom: return "random";
    case Method::kSorting: return "sorting";
    case Method::kWeighting: return "weighting";
    case Method::kTableau: return "tableau";
    case Method::kNetwork: return "network";
  }
  return "?";
}

struct AgentParams {
  std::size_t actions = 25;      // tableau
  double epsilon = 0.2;          // tableau exploration probability
  std::size_t hidden = 12;       // network hidden units
  double sigma = 0.1;            // network exploration noise
  double learning_rate = 0.05;   // network
  std::size_t replay_capacity = 10000;
  std::size_t replay_batch = 1000;
  double exploration_decay = 1.0;  // multiplied into epsilon/sigma every cycle
};

struct ExperimentConfig {
  Method method = Method::kNetwork;
  RewardKind reward = RewardKind::kTestCaseFailure;
  std::size_t history_length = 4;
  double schedule_ratio = 0.5;
  std::size_t repetitions = 30;
  std::uint64_t base_seed = 0;
  AgentParams agent;
  std::size_t jobs = 1;  // threads used for repetitions

  void validate() const {
    if (repetitions < 1) throw ValidationError("repetitions must be at least 1");
    if (!(schedule_ratio > 0.0 && schedule_ratio <= 1.0)) {
      throw ValidationError("schedule ratio must lie in (0, 1]");
    }
    if (history_length < 1 || history_length > kMaxDiscreteHistory) {
      throw ValidationError("history length must lie in [1, 59]");
    }
    if (agent.actions < 2) throw ValidationError("actions must be at least 2");
    if (!(agent.epsilon >= 0.0 && agent.epsilon <= 1.0)) {
      throw ValidationError("epsilon must lie in [0, 1]");
    }
    if (agent.hidden < 1) throw ValidationError("hidden must be at least 1");
    if (!(agent.sigma >= 0.0)) throw ValidationError("sigma must be non-negative");
    if (!(agent.learning_rate > 0.0)) {
      throw ValidationError("learning rate must be positive");
    }
    if (agent.replay_capacity < 1 || agent.replay_batch < 1) {
      throw ValidationError("replay capacity and batch must be positive");
    }
    if (!(agent.exploration_decay > 0.0 && agent.exploration_decay <= 1.0)) {
      throw ValidationError("exploration decay must lie in (0, 1]");
    }
    if (jobs < 1) throw ValidationError("jobs must be at least 1");
  }
};

inline std::unique_ptr<Prioritizer> make_prioritizer(const ExperimentConfig& config,
                                                     Rng& rng) {
  const AgentParams& p = config.agent;
  switch (config.method) {
    case Method::kRandom: return std::make_unique<RandomPrioritizer>();
    case Method::kSorting: return std::make_unique<SortingPrioritizer>();
    case Method::kWeighting: return std::make_unique<WeightingPrioritizer>();
    case Method::kTableau:
      return std::make_unique<TableauAgent>(TableauMemory(p.actions, p.epsilon),
                                            p.exploration_decay);
    case Method::kNetwork: {
      NetworkMemory net =
          NetworkMemory::initialized(2 + config.history_length, p.hidden, rng);
      net.exploration_rate = p.sigma;
      net.learning_rate = p.learning_rate;
      return std::make_unique<NetworkAgent>(
          std::move(net), ReplayBuffer(p.replay_capacity, p.replay_batch),
          p.exploration_decay);
    }
  }
  throw PreconditionError("unknown method");
}

// Sees every cycle after it has been scheduled and executed.
using ReplayObserver = std::function<void(
    std::size_t cycle_index, const PrioritizedSuite&, const ScheduleResult&)>;

// Replays the dataset cycle by cycle: prioritize the cycle's suite, schedule it
// under the time budget, execute it against the log, evaluate, reward, learn,
// and record the executed tests' outcomes. The agent only ever learns from
// cycles it has already been evaluated on.
inline EvaluationSeries run_replay(const Dataset& dataset,
                                   const ExperimentConfig& config,
                                   std::size_t repetition,
                                   const ReplayObserver& observer = {}) {
  validate(dataset);
  config.validate();
  Rng rng(config.base_seed + repetition);
  const auto agent = make_prioritizer(config, rng);
  const std::size_t history = config.history_length;

  std::map<TestId, TestCaseRecord> records;
  FeatureScale scale;
  EvaluationSeries series;
  series.reserve(dataset.cycles.size());

  for (std::size_t index = 0; index < dataset.cycles.size(); ++index) {
    const CycleLog& log = dataset.cycles[index];

    std::vector<TestCaseRecord> suite;
    std::vector<TestId> suite_ids;
    suite.reserve(log.entries.size());
    for (const auto& [id, execution] : log.entries) {
      auto it = records.find(id);
      if (it == records.end()) {
        TestCaseRecord fresh;
        fresh.id = id;
        const auto declared = dataset.catalog.find(id);
        fresh.estimated_duration =
            declared != dataset.catalog.end() && declared->second
                ? *declared->second
                : execution.duration;
        it = records.emplace(id, std::move(fresh)).first;
      }
      scale.observe(it->second.estimated_duration);
      suite.push_back(it->second);
      suite_ids.push_back(id);
    }

    const CycleContext context{log.cycle_id, index, history, scale};
    const PrioritizedSuite prioritized = agent->prioritize(suite, context, rng);
    validate(prioritized);
    const double budget = compute_budget(suite, config.schedule_ratio);
    const Schedule schedule = build_schedule(prioritized, budget, rng);
    const ScheduleResult result = virtual_execute(schedule, log);
    series.push_back(evaluate_cycle(result, suite.size()));

    const RewardAssignment rewards = compute_reward(config.reward, result, suite_ids);
    // Failure count rewards every test; the per-test rewards carry no
    // information for unscheduled tests, so only scheduled ones are fed.
    const std::set<TestId> feed =
        config.reward == RewardKind::kFailureCount
            ? std::set<TestId>(suite_ids.begin(), suite_ids.end())
            : std::set<TestId>(schedule.ordered_test_ids.begin(),
                               schedule.ordered_test_ids.end());
    agent->learn(rewards, feed, rng);
    agent->end_cycle();

    for (std::size_t i = 0; i < schedule.ordered_test_ids.size(); ++i) {
      TestCaseRecord& record = records.at(schedule.ordered_test_ids[i]);
      record = update_record(std::move(record), result.verdicts[i].passed,
                             result.verdicts[i].actual_duration, index, history);
    }

    if (observer) observer(index, prioritized, result);
  }
  return series;
}

struct ExperimentResult {
  std::vector<EvaluationSeries> repetitions;
  NapfdSummary summary;
};

// Runs every repetition (seed base_seed + index) and averages per cycle.
// Repetitions run on `config.jobs` threads; the result does not depend on it.
inline ExperimentResult run_experiment(const Dataset& dataset,
                                       const ExperimentConfig& config) {
  config.validate();
  validate(dataset);
  ExperimentResult out;
  out.repetitions.resize(config.repetitions);

  const std::size_t workers = std::min(config.jobs, config.repetitions);
  if (workers <= 1) {
    for (std::size_t r = 0; r < config.repetitions; ++r) {
      out.repetitions[r] = run_replay(dataset, config, r);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (std::size_t r = next++; r < config.repetitions; r = next++) {
          try {
            out.repetitions[r] = run_replay(dataset, config, r);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  out.summary = aggregate(out.repetitions);
  return out;
}

struct SweepRow {
  double value = 0.0;
  double mean_napfd = 0.0;
};

inline std::vector<SweepRow> sweep_history_length(const Dataset& dataset,
                                                  ExperimentConfig config,
                                                  std::span<const std::size_t> lengths) {
  if (lengths.empty()) throw PreconditionError("no history lengths to sweep");
  std::vector<SweepRow> rows;
  for (const std::size_t length : lengths) {
    config.history_length = length;
    rows.push_back({static_cast<double>(length),
                    run_experiment(dataset, config).summary.overall_mean()});
  }
  return rows;
}

inline std::vector<SweepRow> sweep_schedule_ratio(const Dataset& dataset,
                                                  ExperimentConfig config,
                                                  std::span<const double> ratios) {
  if (ratios.empty()) throw PreconditionError("no schedule ratios to sweep");
  std::vector<SweepRow> rows;
  for (const double ratio : ratios) {
    config.schedule_ratio = ratio;
    rows.push_back({ratio, run_experiment(dataset, config).summary.overall_mean()});
  }
  return rows;
}

}  // namespace retecs
