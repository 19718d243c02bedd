#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>

#include "retecs/evaluation.hpp"
#include "retecs/experiment.hpp"
#include "retecs/ingestion.hpp"

namespace retecs {

// Tidy CSV outputs. Numbers use the shortest round-trip representation so the
// files are byte-identical across runs with the same seed.

inline constexpr std::string_view kResultsHeader =
    "method,reward,repetition,cycle,napfd,detected,total,scheduled,suite_size";
inline constexpr std::string_view kBlocksHeader =
    "block_start,block_end,mean_napfd_a,mean_napfd_b,difference";
inline constexpr std::string_view kSweepHeader = "param,value,mean_napfd";

inline std::string results_csv(const ExperimentConfig& config,
                               const ExperimentResult& result,
                               bool with_header = true) {
  std::string out;
  if (with_header) {
    out += kResultsHeader;
    out += '\n';
  }
  const std::string prefix = std::string(to_string(config.method)) + "," +
                             std::string(to_string(config.reward)) + ",";
  for (std::size_t r = 0; r < result.repetitions.size(); ++r) {
    for (const auto& e : result.repetitions[r]) {
      out += prefix;
      out += std::to_string(r) + "," + std::to_string(e.cycle_id) + ",";
      out += detail::format_double(e.napfd) + ",";
      out += std::to_string(e.detected_failures) + "," +
             std::to_string(e.total_failures) + "," +
             std::to_string(e.scheduled_count) + "," +
             std::to_string(e.suite_size) + "\n";
    }
  }
  return out;
}

inline std::string blocks_csv(std::span<const BlockDifference> blocks) {
  std::string out(kBlocksHeader);
  out += '\n';
  for (const auto& b : blocks) {
    out += std::to_string(b.block_start) + "," + std::to_string(b.block_end) + "," +
           detail::format_double(b.mean_napfd_a) + "," +
           detail::format_double(b.mean_napfd_b) + "," +
           detail::format_double(b.difference) + "\n";
  }
  return out;
}

inline std::string sweep_csv(std::string_view param, std::span<const SweepRow> rows) {
  std::string out(kSweepHeader);
  out += '\n';
  for (const auto& row : rows) {
    out += std::string(param) + "," + detail::format_double(row.value) + "," +
           detail::format_double(row.mean_napfd) + "\n";
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace retecs
