#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "retecs/experiment.hpp"
#include "retecs/ingestion.hpp"

namespace retecs {

namespace detail {

template <typename T>
T config_number(std::string_view key, std::string_view value) {
  T out{};
  if (!parse_number(value, out)) {
    throw ValidationError("config key '" + std::string(key) +
                          "': not a valid number '" + std::string(value) + "'");
  }
  return out;
}

}  // namespace detail

// Applies one `key = value` setting to `config`. Keys mirror the fields of
// ExperimentConfig and AgentParams.
inline void apply_setting(ExperimentConfig& config, std::string_view key,
                          std::string_view value) {
  using detail::config_number;
  AgentParams& a = config.agent;
  if (key == "method") {
    const auto m = parse_method(value);
    if (!m) throw ValidationError("unknown method '" + std::string(value) + "'");
    config.method = *m;
  } else if (key == "reward") {
    const auto r = parse_reward_kind(value);
    if (!r) throw ValidationError("unknown reward '" + std::string(value) + "'");
    config.reward = *r;
  } else if (key == "history_length") {
    config.history_length = config_number<std::size_t>(key, value);
  } else if (key == "schedule_ratio") {
    config.schedule_ratio = config_number<double>(key, value);
  } else if (key == "repetitions") {
    config.repetitions = config_number<std::size_t>(key, value);
  } else if (key == "base_seed" || key == "seed") {
    config.base_seed = config_number<std::uint64_t>(key, value);
  } else if (key == "jobs") {
    config.jobs = config_number<std::size_t>(key, value);
  } else if (key == "actions") {
    a.actions = config_number<std::size_t>(key, value);
  } else if (key == "epsilon") {
    a.epsilon = config_number<double>(key, value);
  } else if (key == "hidden") {
    a.hidden = config_number<std::size_t>(key, value);
  } else if (key == "sigma") {
    a.sigma = config_number<double>(key, value);
  } else if (key == "learning_rate") {
    a.learning_rate = config_number<double>(key, value);
  } else if (key == "replay_capacity") {
    a.replay_capacity = config_number<std::size_t>(key, value);
  } else if (key == "replay_batch") {
    a.replay_batch = config_number<std::size_t>(key, value);
  } else if (key == "exploration_decay") {
    a.exploration_decay = config_number<double>(key, value);
  } else {
    throw ValidationError("unknown config key '" + std::string(key) + "'");
  }
}

// Flat `key = value` lines; blank lines and lines starting with '#' are
// ignored.
inline ExperimentConfig parse_config(std::string_view text,
                                     ExperimentConfig config = {}) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = detail::trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line_no, "expected key = value");
    }
    try {
      apply_setting(config, detail::trim(line.substr(0, eq)),
                    detail::trim(line.substr(eq + 1)));
    } catch (const ValidationError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  config.validate();
  return config;
}

inline ExperimentConfig load_config(const std::filesystem::path& path,
                                    ExperimentConfig config = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(config));
}

}  // namespace retecs
