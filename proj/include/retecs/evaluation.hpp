#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "retecs/domain.hpp"

namespace retecs {

struct CycleEvaluation {
  std::int64_t cycle_id = 0;
  double napfd = 0.0;
  std::size_t detected_failures = 0;
  std::size_t total_failures = 0;
  std::size_t scheduled_count = 0;
  std::size_t suite_size = 0;

  bool operator==(const CycleEvaluation&) const = default;
};

// Normalized APFD of an executed schedule:
//
//   p - sum(rank of detected failures) / (detected * scheduled)
//     + p / (2 * scheduled),      p = detected / (detected + undetected)
//
// Ranks are positions within the schedule. A cycle without any failure scores
// 1; a cycle with failures but none detected scores 0. When p < 1 the value
// can drop below 0 (the rank term is normalized by detected, not total,
// failures).
inline double napfd(const ScheduleResult& result) {
  const std::size_t total = result.total_failures();
  if (total == 0) return 1.0;
  const std::size_t detected = result.detected_failures();
  if (detected == 0) return 0.0;

  const double n = static_cast<double>(result.verdicts.size());
  const double p = static_cast<double>(detected) / static_cast<double>(total);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < result.verdicts.size(); ++i) {
    if (!result.verdicts[i].passed) rank_sum += static_cast<double>(i + 1);
  }
  return p - rank_sum / (static_cast<double>(detected) * n) + p / (2.0 * n);
}

// Classic APFD. Only defined when every failure was detected, where it
// coincides with NAPFD.
inline double apfd(const ScheduleResult& result) {
  if (result.undetected_failures != 0) {
    throw PreconditionError("APFD requires all failures to be detected");
  }
  if (result.detected_failures() == 0) {
    throw PreconditionError("APFD requires at least one detected failure");
  }
  return napfd(result);
}

inline CycleEvaluation evaluate_cycle(const ScheduleResult& result,
                                      std::size_t suite_size) {
  CycleEvaluation eval;
  eval.cycle_id = result.schedule.cycle_id;
  eval.napfd = napfd(result);
  eval.detected_failures = result.detected_failures();
  eval.total_failures = result.total_failures();
  eval.scheduled_count = result.verdicts.size();
  eval.suite_size = suite_size;
  return eval;
}

using EvaluationSeries = std::vector<CycleEvaluation>;

// Per-cycle mean NAPFD over repetitions.
struct NapfdSummary {
  std::vector<std::int64_t> cycle_ids;
  std::vector<double> mean_napfd;

  bool operator==(const NapfdSummary&) const = default;

  double overall_mean() const {
    if (mean_napfd.empty()) return 0.0;
    double sum = 0.0;
    for (double v : mean_napfd) sum += v;
    return sum / static_cast<double>(mean_napfd.size());
  }

  // Mean over positions [first, last) of the cycle sequence.
  double mean_over(std::size_t first, std::size_t last) const {
    if (first >= last || last > mean_napfd.size()) {
      throw PreconditionError("invalid cycle range");
    }
    double sum = 0.0;
    for (std::size_t i = first; i < last; ++i) sum += mean_napfd[i];
    return sum / static_cast<double>(last - first);
  }
};

inline NapfdSummary aggregate(std::span<const EvaluationSeries> repetitions) {
  if (repetitions.empty()) throw PreconditionError("no repetitions to aggregate");
  NapfdSummary summary;
  const EvaluationSeries& first = repetitions.front();
  for (const auto& eval : first) summary.cycle_ids.push_back(eval.cycle_id);
  summary.mean_napfd.assign(first.size(), 0.0);
  for (const auto& series : repetitions) {
    if (series.size() != first.size()) {
      throw PreconditionError("repetitions cover different cycles");
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (series[i].cycle_id != summary.cycle_ids[i]) {
        throw PreconditionError("repetitions cover different cycles");
      }
      summary.mean_napfd[i] += series[i].napfd;
    }
  }
  for (double& v : summary.mean_napfd) v /= static_cast<double>(repetitions.size());
  return summary;
}

struct BlockDifference {
  std::int64_t block_start = 0;  // first cycle id in the block
  std::int64_t block_end = 0;    // last cycle id in the block
  double mean_napfd_a = 0.0;
  double mean_napfd_b = 0.0;
  double difference = 0.0;  // a - b
  bool partial = false;     // final block shorter than block_size

  bool operator==(const BlockDifference&) const = default;
};

inline constexpr std::size_t kDefaultBlockSize = 30;

inline std::vector<BlockDifference> block_differences(
    const NapfdSummary& a, const NapfdSummary& b,
    std::size_t block_size = kDefaultBlockSize) {
  if (a.cycle_ids != b.cycle_ids) {
    throw PreconditionError("compared summaries cover different cycles");
  }
  if (block_size == 0) throw PreconditionError("block size must be positive");
  std::vector<BlockDifference> blocks;
  for (std::size_t start = 0; start < a.cycle_ids.size(); start += block_size) {
    const std::size_t end = std::min(start + block_size, a.cycle_ids.size());
    BlockDifference block;
    block.block_start = a.cycle_ids[start];
    block.block_end = a.cycle_ids[end - 1];
    block.mean_napfd_a = a.mean_over(start, end);
    block.mean_napfd_b = b.mean_over(start, end);
    block.difference = block.mean_napfd_a - block.mean_napfd_b;
    block.partial = end - start < block_size;
    blocks.push_back(block);
  }
  return blocks;
}

}  // namespace retecs
