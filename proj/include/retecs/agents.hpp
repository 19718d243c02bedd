#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "retecs/baselines.hpp"
#include "retecs/domain.hpp"
#include "retecs/network.hpp"
#include "retecs/rewards.hpp"
#include "retecs/rng.hpp"
#include "retecs/tableau.hpp"

namespace retecs {

// What a prioritizer may know about the cycle it is asked to prioritize.
struct CycleContext {
  std::int64_t cycle_id = 0;
  std::size_t cycle_index = 0;  // position in the replay, 0-based
  std::size_t history_length = 4;
  FeatureScale scale;
};

// Common face of agents and baselines for the replay loop. Each test is
// prioritized individually; learn() receives the rewards of the cycle that was
// just prioritized, restricted to the ids in `feed`.
class Prioritizer {
 public:
  virtual ~Prioritizer() = default;

  virtual PrioritizedSuite prioritize(std::span<const TestCaseRecord> suite,
                                      const CycleContext& context, Rng& rng) = 0;

  virtual void learn(const RewardAssignment& /*rewards*/,
                     const std::set<TestId>& /*feed*/, Rng& /*rng*/) {}

  // Called once after learning, before the next cycle.
  virtual void end_cycle() {}
};

class RandomPrioritizer final : public Prioritizer {
 public:
  PrioritizedSuite prioritize(std::span<const TestCaseRecord> suite,
                              const CycleContext& context, Rng& rng) override {
    return random_prioritize(suite, context.cycle_id, rng);
  }
};

class SortingPrioritizer final : public Prioritizer {
 public:
  PrioritizedSuite prioritize(std::span<const TestCaseRecord> suite,
                              const CycleContext& context, Rng&) override {
    return sorting_prioritize(suite, context.cycle_id);
  }
};

class WeightingPrioritizer final : public Prioritizer {
 public:
  PrioritizedSuite prioritize(std::span<const TestCaseRecord> suite,
                              const CycleContext& context, Rng&) override {
    return weighting_prioritize(suite, context.cycle_id, context.cycle_index,
                                context.history_length, context.scale);
  }
};

class TableauAgent final : public Prioritizer {
 public:
  explicit TableauAgent(TableauMemory memory, double exploration_decay = 1.0)
      : memory_(std::move(memory)), decay_(exploration_decay) {}

  PrioritizedSuite prioritize(std::span<const TestCaseRecord> suite,
                              const CycleContext& context, Rng& rng) override {
    pending_.clear();
    PrioritizedSuite out;
    out.cycle_id = context.cycle_id;
    for (const auto& test : suite) {
      const auto features =
          featurize(test, context.cycle_index, context.history_length);
      const StateKey key = discretize(features, context.scale);
      const TableauAction action = tableau_act(memory_, key, rng);
      pending_.push_back({test.id, key, action.index});
      out.items.push_back({test.id, action.priority, test.estimated_duration});
    }
    return out;
  }

  void learn(const RewardAssignment& rewards, const std::set<TestId>& feed,
             Rng&) override {
    std::vector<TableauExperience> batch;
    for (const auto& d : pending_) {
      if (feed.contains(d.id)) batch.push_back({d.state, d.action, rewards.rewards.at(d.id)});
    }
    tableau_learn(memory_, batch);
  }

  void end_cycle() override { memory_.exploration_rate *= decay_; }

  const TableauMemory& memory() const { return memory_; }

 private:
  struct Decision {
    TestId id;
    StateKey state;
    std::size_t action;
  };
  TableauMemory memory_;
  double decay_;
  std::vector<Decision> pending_;
};

class NetworkAgent final : public Prioritizer {
 public:
  NetworkAgent(NetworkMemory memory, ReplayBuffer buffer,
               double exploration_decay = 1.0)
      : memory_(std::move(memory)),
        buffer_(std::move(buffer)),
        decay_(exploration_decay) {}

  PrioritizedSuite prioritize(std::span<const TestCaseRecord> suite,
                              const CycleContext& context, Rng& rng) override {
    pending_.clear();
    PrioritizedSuite out;
    out.cycle_id = context.cycle_id;
    for (const auto& test : suite) {
      auto state = scale_features(
          featurize(test, context.cycle_index, context.history_length),
          context.scale, context.cycle_index);
      const double priority = network_act(memory_, state, rng);
      out.items.push_back({test.id, priority, test.estimated_duration});
      pending_.push_back({test.id, std::move(state), priority});
    }
    return out;
  }

  // Stores the cycle's experiences, then trains on one sampled batch.
  void learn(const RewardAssignment& rewards, const std::set<TestId>& feed,
             Rng& rng) override {
    for (auto& d : pending_) {
      if (feed.contains(d.id)) {
        replay_store(buffer_, {std::move(d.state), d.action, rewards.rewards.at(d.id)});
      }
    }
    pending_.clear();
    if (buffer_.size() == 0) return;
    const auto batch = replay_sample(buffer_, rng);
    network_train(memory_, batch);
  }

  void end_cycle() override { memory_.exploration_rate *= decay_; }

  const NetworkMemory& memory() const { return memory_; }
  const ReplayBuffer& buffer() const { return buffer_; }

 private:
  struct Decision {
    TestId id;
    std::vector<double> state;
    double action;
  };
  NetworkMemory memory_;
  ReplayBuffer buffer_;
  double decay_;
  std::vector<Decision> pending_;
};

// ---------------------------------------------------------------------------
// Memory snapshots (JSON, versioned)

inline constexpr int kSnapshotVersion = 1;

namespace detail {

inline void check_snapshot(const nlohmann::json& j, const char* kind) {
  if (!j.is_object() || j.value("format", "") != "retecs-agent") {
    throw ValidationError("not an agent snapshot");
  }
  if (j.value("version", 0) != kSnapshotVersion) {
    throw ValidationError("unsupported snapshot version " +
                          std::to_string(j.value("version", 0)));
  }
  if (j.value("kind", "") != kind) {
    throw ValidationError(std::string("snapshot is not a ") + kind + " agent");
  }
}

}  // namespace detail

inline nlohmann::json to_json(const TableauMemory& memory) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& [state, cell] : memory.cells) {
    cells.push_back({{"state", state},
                     {"counts", cell.counts},
                     {"mean_reward", cell.mean_reward}});
  }
  return {{"format", "retecs-agent"},
          {"version", kSnapshotVersion},
          {"kind", "tableau"},
          {"action_count", memory.action_count},
          {"exploration_rate", memory.exploration_rate},
          {"cells", std::move(cells)}};
}

inline TableauMemory tableau_from_json(const nlohmann::json& j) {
  detail::check_snapshot(j, "tableau");
  try {
    TableauMemory memory(j.at("action_count").get<std::size_t>(),
                         j.at("exploration_rate").get<double>());
    for (const auto& c : j.at("cells")) {
      TableauCell cell{c.at("counts").get<std::vector<std::int64_t>>(),
                       c.at("mean_reward").get<std::vector<double>>()};
      if (cell.counts.size() != memory.action_count ||
          cell.mean_reward.size() != memory.action_count) {
        throw ValidationError("tableau row has the wrong number of actions");
      }
      memory.cells.emplace(c.at("state").get<StateKey>(), std::move(cell));
    }
    return memory;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed tableau snapshot: ") + e.what());
  }
}

inline nlohmann::json to_json(const NetworkMemory& net, const ReplayBuffer& buffer) {
  nlohmann::json experiences = nlohmann::json::array();
  for (const auto& e : buffer.experiences) {
    experiences.push_back({{"state", e.state}, {"action", e.action}, {"reward", e.reward}});
  }
  return {{"format", "retecs-agent"},
          {"version", kSnapshotVersion},
          {"kind", "network"},
          {"input_size", net.input_size},
          {"hidden_size", net.hidden_size},
          {"hidden_weights", net.hidden_weights},
          {"hidden_bias", net.hidden_bias},
          {"output_weights", net.output_weights},
          {"output_bias", net.output_bias},
          {"exploration_rate", net.exploration_rate},
          {"learning_rate", net.learning_rate},
          {"replay",
           {{"capacity", buffer.capacity},
            {"batch_size", buffer.batch_size},
            {"experiences", std::move(experiences)}}}};
}

inline std::pair<NetworkMemory, ReplayBuffer> network_from_json(const nlohmann::json& j) {
  detail::check_snapshot(j, "network");
  try {
    NetworkMemory net(j.at("input_size").get<std::size_t>(),
                      j.at("hidden_size").get<std::size_t>());
    net.hidden_weights = j.at("hidden_weights").get<std::vector<double>>();
    net.hidden_bias = j.at("hidden_bias").get<std::vector<double>>();
    net.output_weights = j.at("output_weights").get<std::vector<double>>();
    net.output_bias = j.at("output_bias").get<double>();
    net.exploration_rate = j.at("exploration_rate").get<double>();
    net.learning_rate = j.at("learning_rate").get<double>();
    if (net.hidden_weights.size() != net.input_size * net.hidden_size ||
        net.hidden_bias.size() != net.hidden_size ||
        net.output_weights.size() != net.hidden_size) {
      throw ValidationError("network snapshot has inconsistent layer sizes");
    }
    const auto& r = j.at("replay");
    ReplayBuffer buffer(r.at("capacity").get<std::size_t>(),
                        r.at("batch_size").get<std::size_t>());
    for (const auto& e : r.at("experiences")) {
      replay_store(buffer, {e.at("state").get<std::vector<double>>(),
                            e.at("action").get<double>(), e.at("reward").get<double>()});
    }
    return {std::move(net), std::move(buffer)};
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed network snapshot: ") + e.what());
  }
}

inline void save_snapshot(const nlohmann::json& snapshot,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << snapshot.dump() << '\n';
}

inline nlohmann::json load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed snapshot " + path.string() + ": " + e.what());
  }
}

}  // namespace retecs
