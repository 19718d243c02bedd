#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "retecs/domain.hpp"
#include "retecs/rng.hpp"

namespace retecs {

using StateKey = std::uint64_t;

inline constexpr std::size_t kDurationBuckets = 3;
inline constexpr std::size_t kRecencyBuckets = 4;
inline constexpr std::size_t kMaxDiscreteHistory = 59;

// 0..2: logarithmic thirds of the observed duration range.
inline std::size_t duration_bucket(double duration, const FeatureScale& scale) {
  if (!(scale.max_duration > scale.min_duration) || !(scale.min_duration > 0.0) ||
      duration <= scale.min_duration) {
    return 0;
  }
  if (duration >= scale.max_duration) return kDurationBuckets - 1;
  const double t = (std::log(duration) - std::log(scale.min_duration)) /
                   (std::log(scale.max_duration) - std::log(scale.min_duration));
  return std::min(kDurationBuckets - 1,
                  static_cast<std::size_t>(t * static_cast<double>(kDurationBuckets)));
}

// Cycles since the last run: {1}, {2}, {3..5}, {>5}.
inline std::size_t recency_bucket(double cycles_since_run) {
  if (cycles_since_run < 1.5) return 0;
  if (cycles_since_run < 2.5) return 1;
  if (cycles_since_run < 5.5) return 2;
  return 3;
}

// Maps a raw feature vector (see featurize) to a tableau row. History bits are
// kept as they are, so the key space has 3 * 4 * 2^L members.
inline StateKey discretize(std::span<const double> features,
                           const FeatureScale& scale) {
  if (features.size() < 2 || features.size() - 2 > kMaxDiscreteHistory) {
    throw PreconditionError("state must hold 2 + history (<= 59) features");
  }
  StateKey bits = 0;
  for (std::size_t k = 2; k < features.size(); ++k) {
    bits = (bits << 1) | (features[k] > 0.5 ? 1u : 0u);
  }
  return (bits << 4) |
         static_cast<StateKey>(duration_bucket(features[0], scale) * kRecencyBuckets +
                               recency_bucket(features[1]));
}

struct TableauCell {
  std::vector<std::int64_t> counts;
  std::vector<double> mean_reward;

  bool operator==(const TableauCell&) const = default;
};

// Per (state, action) visit counts and running mean rewards. States not in
// `cells` behave like a row of zeros.
struct TableauMemory {
  std::size_t action_count = 25;
  double exploration_rate = 0.2;  // epsilon
  std::map<StateKey, TableauCell> cells;

  bool operator==(const TableauMemory&) const = default;

  explicit TableauMemory(std::size_t actions = 25, double epsilon = 0.2)
      : action_count(actions), exploration_rate(epsilon) {
    if (actions < 2) throw PreconditionError("tableau needs at least 2 actions");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
      throw PreconditionError("exploration rate must lie in [0, 1]");
    }
  }

  TableauCell& cell(StateKey state) {
    auto [it, inserted] = cells.try_emplace(state);
    if (inserted) {
      it->second.counts.assign(action_count, 0);
      it->second.mean_reward.assign(action_count, 0.0);
    }
    return it->second;
  }
};

struct TableauAction {
  std::size_t index = 0;
  double priority = 0.0;  // index / (action_count - 1)
};

// Epsilon-greedy: a uniformly random action with probability epsilon,
// otherwise the action with the highest mean reward (ties uniformly at random).
inline TableauAction tableau_act(const TableauMemory& memory, StateKey state,
                                 Rng& rng) {
  std::size_t action = 0;
  if (rng.uniform() < memory.exploration_rate) {
    action = rng.index(memory.action_count);
  } else {
    const auto it = memory.cells.find(state);
    if (it == memory.cells.end()) {
      action = rng.index(memory.action_count);
    } else {
      const auto& means = it->second.mean_reward;
      double best = means[0];
      for (double m : means) best = std::max(best, m);
      std::vector<std::size_t> best_actions;
      for (std::size_t a = 0; a < means.size(); ++a) {
        if (means[a] == best) best_actions.push_back(a);
      }
      action = best_actions.size() == 1
                   ? best_actions.front()
                   : best_actions[rng.index(best_actions.size())];
    }
  }
  return {action, static_cast<double>(action) /
                      static_cast<double>(memory.action_count - 1)};
}

struct TableauExperience {
  StateKey state = 0;
  std::size_t action = 0;
  double reward = 0.0;
};

inline void tableau_learn(TableauMemory& memory,
                          std::span<const TableauExperience> experiences) {
  for (const auto& e : experiences) {
    if (e.action >= memory.action_count) {
      throw PreconditionError("action index out of range");
    }
    TableauCell& cell = memory.cell(e.state);
    const std::int64_t n = ++cell.counts[e.action];
    double& mean = cell.mean_reward[e.action];
    mean += (e.reward - mean) / static_cast<double>(n);
  }
}

}  // namespace retecs
