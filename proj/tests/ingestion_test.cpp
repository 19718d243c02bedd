#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "retecs/ingestion.hpp"

namespace retecs {
namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("retecs_ingest_" + name);
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

TEST(LoadCsv, GroupsRowsIntoCycles) {
  const auto p = temp_file("basic.csv");
  write_file(p, "cycle,test_id,duration,verdict\n1,a,1.5,1\n1,b,2,0\n1,c,3,1\n");
  const Dataset d = load_csv(p);
  ASSERT_EQ(d.cycles.size(), 1u);
  EXPECT_EQ(d.cycles[0].entries.size(), 3u);
  EXPECT_FALSE(d.cycles[0].entries.at("b").passed);
  EXPECT_TRUE(d.cycles[0].entries.at("a").passed);
  EXPECT_EQ(d.name, "retecs_ingest_basic");
  EXPECT_EQ(d.catalog.size(), 3u);
}

TEST(LoadCsv, RejectsZeroDuration) {
  EXPECT_THROW(parse_csv("cycle,test_id,duration,verdict\n1,a,0,1\n", "x"),
               ValidationError);
}

TEST(LoadCsv, SortsInterleavedCycles) {
  const Dataset d = parse_csv(
      "cycle,test_id,duration,verdict\r\n2,a,1,1\r\n1,a,1,0\r\n2,b,1,1\r\n", "x");
  ASSERT_EQ(d.cycles.size(), 2u);
  EXPECT_EQ(d.cycles[0].cycle_id, 1);
  EXPECT_EQ(d.cycles[1].cycle_id, 2);
  EXPECT_EQ(d.cycles[1].entries.size(), 2u);
}

TEST(LoadCsv, ReportsLineNumbers) {
  try {
    parse_csv("cycle,test_id,duration,verdict\n1,a,1,1\n1,b,abc,1\n", "x");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_csv("cycle,test_id,duration,verdict\n1,a,1,2\n", "x"), ParseError);
  EXPECT_THROW(parse_csv("cycle,test_id,duration,verdict\n1,a,1\n", "x"), ParseError);
  EXPECT_THROW(parse_csv("cycle,id,duration,verdict\n1,a,1,1\n", "x"), ParseError);
  EXPECT_THROW(parse_csv("cycle,test_id,duration,verdict\n1,a,1,1\n1,a,2,0\n", "x"),
               ValidationError);
  EXPECT_THROW(load_csv(temp_file("does_not_exist.csv")), IoError);
}

TEST(LoadCsv, FlippedVerdictConvention) {
  CsvOptions options;
  options.verdict = VerdictConvention::kOneIsFailed;
  const Dataset d = parse_csv("cycle,test_id,duration,verdict\n1,a,1,1\n", "x", options);
  EXPECT_FALSE(d.cycles[0].entries.at("a").passed);
}

TEST(WriteCsv, RoundTripsSyntheticData) {
  SyntheticSpec spec;
  spec.n_tests = 20;
  spec.n_cycles = 15;
  spec.churn_rate = 0.1;
  spec.seed = 5;
  const Dataset d = generate_synthetic(spec);
  const auto p = temp_file("roundtrip.csv");
  write_csv(d, p);
  EXPECT_EQ(load_csv(p), d);
}

TEST(WriteCsv, RowPerExecution) {
  SyntheticSpec spec;
  spec.n_tests = 7;
  spec.n_cycles = 2;
  spec.churn_rate = 0.3;
  const Dataset d = generate_synthetic(spec);
  std::size_t executions = 0;
  for (const auto& c : d.cycles) executions += c.entries.size();
  const std::string text = to_csv(d);
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')),
            executions + 1);
  EXPECT_EQ(text.substr(0, text.find('\n')), "cycle,test_id,duration,verdict");
}

TEST(WriteCsv, RejectsInvalidDatasets) {
  Dataset empty;
  EXPECT_THROW(write_csv(empty, temp_file("empty.csv")), ValidationError);
  Dataset empty_cycle;
  empty_cycle.cycles.push_back(CycleLog{1, {}});
  EXPECT_THROW(to_csv(empty_cycle), ValidationError);
  Dataset decreasing;
  decreasing.cycles.push_back(CycleLog{2, {{"a", {1.0, true}}}});
  decreasing.cycles.push_back(CycleLog{1, {{"a", {1.0, true}}}});
  EXPECT_THROW(validate(decreasing), ValidationError);
}

TEST(Synthetic, ExtremeFailureRates) {
  SyntheticSpec spec;
  spec.n_tests = 30;
  spec.n_cycles = 20;
  spec.churn_rate = 0.2;
  spec.failure_rate = 0.0;
  for (const auto& c : generate_synthetic(spec).cycles) {
    for (const auto& e : c.entries) EXPECT_TRUE(e.second.passed);
  }
  spec.failure_rate = 1.0;
  for (const auto& c : generate_synthetic(spec).cycles) {
    for (const auto& e : c.entries) EXPECT_FALSE(e.second.passed);
  }
}

TEST(Synthetic, DeterministicPerSeed) {
  SyntheticSpec spec;
  spec.n_tests = 40;
  spec.n_cycles = 30;
  spec.churn_rate = 0.05;
  spec.seed = 42;
  EXPECT_EQ(to_csv(generate_synthetic(spec)), to_csv(generate_synthetic(spec)));
  auto other = spec;
  other.seed = 43;
  EXPECT_NE(to_csv(generate_synthetic(spec)), to_csv(generate_synthetic(other)));
}

TEST(Synthetic, FailureFrequencyAndPersistence) {
  for (const std::uint64_t seed : {1u, 2u, 3u}) {
    SyntheticSpec spec;
    spec.n_tests = 100;
    spec.n_cycles = 300;
    spec.failure_rate = 0.12;
    spec.temporal_correlation = 0.8;
    spec.churn_rate = 0.01;
    spec.seed = seed;
    const Dataset d = generate_synthetic(spec);
    std::size_t failures = 0, total = 0, fail_fail = 0, fail_any = 0;
    for (std::size_t i = 0; i < d.cycles.size(); ++i) {
      for (const auto& [id, e] : d.cycles[i].entries) {
        ++total;
        if (!e.passed) ++failures;
        if (i + 1 < d.cycles.size() && !e.passed) {
          const auto& next = d.cycles[i + 1].entries;
          const auto it = next.find(id);
          if (it != next.end()) {
            ++fail_any;
            if (!it->second.passed) ++fail_fail;
          }
        }
      }
    }
    EXPECT_NEAR(static_cast<double>(failures) / total, 0.12, 0.02);
    EXPECT_NEAR(static_cast<double>(fail_fail) / fail_any, 0.8, 0.03);
  }
}

TEST(Synthetic, ValidatesSpec) {
  SyntheticSpec spec;
  spec.failure_rate = 1.5;
  EXPECT_THROW(generate_synthetic(spec), ValidationError);
  spec = {};
  spec.min_duration = 10;
  spec.max_duration = 5;
  EXPECT_THROW(generate_synthetic(spec), ValidationError);
  spec = {};
  spec.n_tests = 0;
  EXPECT_THROW(generate_synthetic(spec), ValidationError);
}

TEST(Synthetic, DurationsStayInRange) {
  SyntheticSpec spec;
  spec.n_tests = 50;
  spec.n_cycles = 10;
  spec.min_duration = 2;
  spec.max_duration = 9;
  for (const auto& c : generate_synthetic(spec).cycles) {
    for (const auto& e : c.entries) {
      EXPECT_GE(e.second.duration, 2.0);
      EXPECT_LE(e.second.duration, 9.0);
    }
  }
}

}  // namespace
}  // namespace retecs
