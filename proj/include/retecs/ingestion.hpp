#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "retecs/domain.hpp"
#include "retecs/errors.hpp"
#include "retecs/rng.hpp"

namespace retecs {

struct Dataset {
  std::string name;
  std::vector<CycleLog> cycles;  // cycle_id strictly increasing
  // Every test id of the dataset with an optional declared duration. When no
  // duration is declared, the first observed run seeds the estimate.
  std::map<TestId, std::optional<double>> catalog;

  // Name is a label only and does not take part in equality.
  bool operator==(const Dataset& other) const {
    return cycles == other.cycles && catalog == other.catalog;
  }
};

inline void validate(const Dataset& dataset) {
  if (dataset.cycles.empty()) {
    throw ValidationError("dataset has no cycles");
  }
  for (std::size_t i = 0; i < dataset.cycles.size(); ++i) {
    const CycleLog& cycle = dataset.cycles[i];
    const std::string where = "cycle " + std::to_string(cycle.cycle_id);
    if (cycle.cycle_id < 0) {
      throw ValidationError(where + ": negative cycle id");
    }
    if (i > 0 && cycle.cycle_id <= dataset.cycles[i - 1].cycle_id) {
      throw ValidationError(where + ": cycle ids are not strictly increasing");
    }
    if (cycle.entries.empty()) {
      throw ValidationError(where + ": no test executions");
    }
    for (const auto& [id, execution] : cycle.entries) {
      if (id.empty()) {
        throw ValidationError(where + ": empty test id");
      }
      if (!(execution.duration > 0.0) || !std::isfinite(execution.duration)) {
        throw ValidationError(where + ": non-positive duration for test '" +
                              id + "'");
      }
    }
  }
}

// Catalog holding every id that occurs in the cycles, without durations.
inline std::map<TestId, std::optional<double>> catalog_of(
    const std::vector<CycleLog>& cycles) {
  std::map<TestId, std::optional<double>> catalog;
  for (const auto& cycle : cycles) {
    for (const auto& entry : cycle.entries) catalog.emplace(entry.first, std::nullopt);
  }
  return catalog;
}

enum class VerdictConvention {
  kOneIsPassed,  // 1 = passed, 0 = failed (canonical)
  kOneIsFailed,
};

struct CsvOptions {
  VerdictConvention verdict = VerdictConvention::kOneIsPassed;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

// Shortest representation that parses back to the same double.
inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace detail

inline constexpr std::string_view kCsvHeader = "cycle,test_id,duration,verdict";

inline Dataset parse_csv(std::string_view text, std::string name,
                         const CsvOptions& options = {}) {
  std::map<std::int64_t, CycleLog> cycles;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  int col_cycle = -1, col_id = -1, col_duration = -1, col_verdict = -1;
  std::size_t n_columns = 0;
  bool have_header = false;

  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = detail::trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;

    const auto fields = detail::split(line, ',');
    if (!have_header) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const int col = static_cast<int>(i);
        if (fields[i] == "cycle") col_cycle = col;
        else if (fields[i] == "test_id") col_id = col;
        else if (fields[i] == "duration") col_duration = col;
        else if (fields[i] == "verdict") col_verdict = col;
      }
      if (col_cycle < 0 || col_id < 0 || col_duration < 0 || col_verdict < 0) {
        throw ParseError(line_no, "header must name the columns " +
                                      std::string(kCsvHeader));
      }
      n_columns = fields.size();
      have_header = true;
      continue;
    }

    if (fields.size() != n_columns) {
      throw ParseError(line_no, "expected " + std::to_string(n_columns) +
                                    " fields, got " +
                                    std::to_string(fields.size()));
    }
    std::int64_t cycle_id = 0;
    if (!detail::parse_number(fields[col_cycle], cycle_id)) {
      throw ParseError(line_no, "cycle is not an integer: '" +
                                    std::string(fields[col_cycle]) + "'");
    }
    double duration = 0.0;
    if (!detail::parse_number(fields[col_duration], duration)) {
      throw ParseError(line_no, "duration is not a number: '" +
                                    std::string(fields[col_duration]) + "'");
    }
    const std::string_view verdict = fields[col_verdict];
    if (verdict != "0" && verdict != "1") {
      throw ParseError(line_no, "verdict must be 0 or 1, got '" +
                                    std::string(verdict) + "'");
    }
    const std::string id(fields[col_id]);
    if (id.empty()) throw ParseError(line_no, "empty test_id");
    if (cycle_id < 0) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": negative cycle id");
    }
    if (!(duration > 0.0) || !std::isfinite(duration)) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": duration must be positive");
    }
    const bool one = verdict == "1";
    const bool passed =
        options.verdict == VerdictConvention::kOneIsPassed ? one : !one;

    CycleLog& cycle = cycles[cycle_id];
    cycle.cycle_id = cycle_id;
    if (!cycle.entries.emplace(id, Execution{duration, passed}).second) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": duplicate test '" + id + "' in cycle " +
                            std::to_string(cycle_id));
    }
  }
  if (!have_header) throw ParseError(1, "missing header");

  Dataset dataset;
  dataset.name = std::move(name);
  for (auto& kv : cycles) dataset.cycles.push_back(std::move(kv.second));
  dataset.catalog = catalog_of(dataset.cycles);
  validate(dataset);
  return dataset;
}

inline Dataset load_csv(const std::filesystem::path& path,
                        const CsvOptions& options = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), path.stem().string(), options);
}

inline std::string to_csv(const Dataset& dataset) {
  validate(dataset);
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& cycle : dataset.cycles) {
    const std::string cycle_text = std::to_string(cycle.cycle_id);
    for (const auto& [id, execution] : cycle.entries) {
      if (id.find_first_of(",\r\n") != std::string::npos ||
          detail::trim(id) != id) {
        throw ValidationError("test id '" + id + "' cannot be written to CSV");
      }
      out += cycle_text;
      out += ',';
      out += id;
      out += ',';
      out += detail::format_double(execution.duration);
      out += execution.passed ? ",1\n" : ",0\n";
    }
  }
  return out;
}

inline void write_csv(const Dataset& dataset,
                      const std::filesystem::path& path) {
  const std::string text = to_csv(dataset);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

struct SyntheticSpec {
  std::size_t n_tests = 100;
  std::size_t n_cycles = 300;
  double failure_rate = 0.12;
  // P(fail in cycle i+1 | failed in cycle i)
  double temporal_correlation = 0.8;
  // Per test and cycle, probability of being retired and replaced.
  double churn_rate = 0.0;
  double min_duration = 1.0;
  double max_duration = 100.0;
  std::uint64_t seed = 0;
};

inline void validate(const SyntheticSpec& spec) {
  auto probability = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError(std::string(what) + " must lie in [0, 1]");
    }
  };
  probability(spec.failure_rate, "failure_rate");
  probability(spec.temporal_correlation, "temporal_correlation");
  probability(spec.churn_rate, "churn_rate");
  if (spec.n_tests < 1 || spec.n_cycles < 1) {
    throw ValidationError("n_tests and n_cycles must be at least 1");
  }
  if (!(spec.min_duration > 0.0) || !(spec.min_duration <= spec.max_duration) ||
      !std::isfinite(spec.max_duration)) {
    throw ValidationError("duration range must satisfy 0 < min <= max");
  }
}

// Two-state Markov failure process per test. A test that failed keeps failing
// with probability temporal_correlation; a passing test starts failing with the
// probability that keeps the stationary failure rate at failure_rate. When that
// probability would exceed 1 it is clamped and the realized rate falls below
// failure_rate. Each test has a base duration drawn log-uniformly from the
// range; each run jitters it by up to 10% (clamped to the range).
inline Dataset generate_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);

  const double f = spec.failure_rate;
  const double c = spec.temporal_correlation;
  // Stationary failure share q / (1 - c + q) equals f. When the onset
  // probability saturates at 1, persistence is raised instead.
  const double onset = f >= 1.0 ? 1.0 : std::min(1.0, f * (1.0 - c) / (1.0 - f));
  const double persistence = onset < 1.0 ? c : std::max(c, 2.0 - 1.0 / f);

  struct LiveTest {
    TestId id;
    double base_duration;
    bool failing;
  };
  std::size_t next_id = 0;
  const double log_lo = std::log(spec.min_duration);
  const double log_hi = std::log(spec.max_duration);
  auto fresh = [&]() {
    LiveTest t;
    t.id = "t" + std::to_string(next_id++);
    t.base_duration = std::exp(rng.uniform(log_lo, log_hi));
    t.failing = rng.bernoulli(f);
    return t;
  };

  std::vector<LiveTest> live;
  live.reserve(spec.n_tests);
  for (std::size_t i = 0; i < spec.n_tests; ++i) live.push_back(fresh());

  Dataset dataset;
  dataset.name = "synthetic";
  dataset.cycles.reserve(spec.n_cycles);
  for (std::size_t cycle = 0; cycle < spec.n_cycles; ++cycle) {
    if (cycle > 0) {
      for (auto& test : live) {
        if (rng.bernoulli(spec.churn_rate)) {
          test = fresh();
        } else {
          test.failing = rng.bernoulli(test.failing ? persistence : onset);
        }
      }
    }
    CycleLog log;
    log.cycle_id = static_cast<std::int64_t>(cycle) + 1;
    for (const auto& test : live) {
      const double jitter = rng.uniform(0.9, 1.1);
      const double duration = std::clamp(test.base_duration * jitter,
                                         spec.min_duration, spec.max_duration);
      log.entries.emplace(test.id, Execution{duration, !test.failing});
    }
    dataset.cycles.push_back(std::move(log));
  }
  dataset.catalog = catalog_of(dataset.cycles);
  return dataset;
}

}  // namespace retecs
