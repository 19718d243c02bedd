#pragma once

#include <cstddef>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "retecs/config.hpp"
#include "retecs/evaluation.hpp"
#include "retecs/experiment.hpp"
#include "retecs/ingestion.hpp"
#include "retecs/report.hpp"

namespace retecs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

// Bad flag values found after CLI11 parsing; reported like parse errors.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct SharedOptions {
  std::string data;
  std::string config_file;
  std::string method;
  std::string reward;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> history;
  std::optional<double> ratio;
  std::optional<std::size_t> jobs;
  std::string out;
  bool one_is_failed = false;
};

struct SyntheticOptions {
  std::size_t tests = 100;
  std::size_t cycles = 300;
  double failure_rate = 0.12;
  double correlation = 0.8;
  double churn = 0.0;
  double min_duration = 1.0;
  double max_duration = 100.0;
};

inline void add_shared(CLI::App& cmd, SharedOptions& o, bool method_flags) {
  cmd.add_option("--data", o.data, "Dataset CSV (cycle,test_id,duration,verdict)");
  cmd.add_option("--config", o.config_file, "Experiment config file (key = value)");
  if (method_flags) {
    cmd.add_option("--method", o.method,
                   "random | sorting | weighting | tableau | network");
    cmd.add_option("--reward", o.reward, "failcount | tcfail | timerank");
  }
  cmd.add_option("--reps", o.reps, "Repetitions (default 30)");
  cmd.add_option("--seed", o.seed, "Base seed; repetition i uses seed + i");
  cmd.add_option("--history", o.history, "Verdict history length (default 4)");
  cmd.add_option("--ratio", o.ratio, "Schedule time ratio in (0,1] (default 0.5)");
  cmd.add_option("--jobs", o.jobs, "Threads for repetitions");
  cmd.add_option("--out", o.out, "Output CSV path")->required();
  cmd.add_flag("--verdict-one-is-failed", o.one_is_failed,
               "Input verdict column uses 1 = failed");
}

inline void add_synthetic(CLI::App& cmd, SyntheticOptions& s, std::uint64_t* seed) {
  cmd.add_option("--tests", s.tests, "Synthetic: tests per cycle");
  cmd.add_option("--cycles", s.cycles, "Synthetic: number of cycles");
  cmd.add_option("--failure-rate", s.failure_rate, "Synthetic: failure rate");
  cmd.add_option("--correlation", s.correlation,
                 "Synthetic: P(fail again | failed last cycle)");
  cmd.add_option("--churn", s.churn, "Synthetic: per-cycle replacement rate");
  cmd.add_option("--min-duration", s.min_duration, "Synthetic: min duration (s)");
  cmd.add_option("--max-duration", s.max_duration, "Synthetic: max duration (s)");
  if (seed != nullptr) cmd.add_option("--seed", *seed, "Generator seed");
}

inline SyntheticSpec to_spec(const SyntheticOptions& s, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n_tests = s.tests;
  spec.n_cycles = s.cycles;
  spec.failure_rate = s.failure_rate;
  spec.temporal_correlation = s.correlation;
  spec.churn_rate = s.churn;
  spec.min_duration = s.min_duration;
  spec.max_duration = s.max_duration;
  spec.seed = seed;
  return spec;
}

// Defaults, then the config file, then explicit flags.
inline ExperimentConfig build_config(const SharedOptions& o) {
  ExperimentConfig config;
  if (!o.config_file.empty()) config = load_config(o.config_file);
  try {
    if (!o.method.empty()) apply_setting(config, "method", o.method);
    if (!o.reward.empty()) apply_setting(config, "reward", o.reward);
    if (o.reps) config.repetitions = *o.reps;
    if (o.seed) config.base_seed = *o.seed;
    if (o.history) config.history_length = *o.history;
    if (o.ratio) config.schedule_ratio = *o.ratio;
    if (o.jobs) config.jobs = *o.jobs;
    config.validate();
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  return config;
}

inline Dataset obtain_dataset(const SharedOptions& o, const SyntheticOptions& s,
                              std::uint64_t seed) {
  if (!o.data.empty()) {
    CsvOptions csv;
    if (o.one_is_failed) csv.verdict = VerdictConvention::kOneIsFailed;
    return load_csv(o.data, csv);
  }
  try {
    return generate_synthetic(to_spec(s, seed));
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
}

// "method" or "method:reward"
inline ExperimentConfig with_method_spec(ExperimentConfig config,
                                         const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string method = spec.substr(0, colon);
  try {
    apply_setting(config, "method", method);
    if (colon != std::string::npos) {
      apply_setting(config, "reward", spec.substr(colon + 1));
    }
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  return config;
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const auto item = detail::trim(std::string_view(text).substr(start, comma - start));
    if (!item.empty()) items.emplace_back(item);
    start = comma + 1;
  }
  return items;
}

// Entry point shared by the executable and the tests. `args` excludes the
// program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"Reinforcement-learning test case prioritization for CI replay"};
  app.name("retecs");
  app.require_subcommand(1);

  SharedOptions shared;
  SyntheticOptions synth;

  auto* run = app.add_subcommand("run", "Replay a dataset with one method");
  add_shared(*run, shared, true);
  add_synthetic(*run, synth, nullptr);

  std::string spec_a, spec_b;
  std::size_t block = kDefaultBlockSize;
  auto* compare = app.add_subcommand("compare", "Per-block NAPFD difference of two methods");
  add_shared(*compare, shared, false);
  add_synthetic(*compare, synth, nullptr);
  compare->add_option("--a", spec_a, "First method, e.g. network:tcfail")->required();
  compare->add_option("--b", spec_b, "Second method, e.g. sorting")->required();
  compare->add_option("--reward", shared.reward, "Default reward for both methods");
  compare->add_option("--block", block, "Cycles per block (default 30)");

  std::string param, values;
  auto* sweep = app.add_subcommand("sweep", "Mean NAPFD across history lengths or ratios");
  add_shared(*sweep, shared, true);
  add_synthetic(*sweep, synth, nullptr);
  sweep->add_option("--param", param, "history | ratio")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();

  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset CSV");
  add_synthetic(*generate, synth, &gen_seed);
  generate->add_option("--out", gen_out, "Output CSV path")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*generate) {
      Dataset dataset;
      try {
        dataset = generate_synthetic(to_spec(synth, gen_seed));
      } catch (const ValidationError& e) {
        throw UsageError(e.what());
      }
      write_csv(dataset, gen_out);
      out << "wrote " << dataset.cycles.size() << " cycles to " << gen_out << '\n';
      return kExitOk;
    }

    const ExperimentConfig config = build_config(shared);
    if (*run) {
      const Dataset dataset = obtain_dataset(shared, synth, config.base_seed);
      const ExperimentResult result = run_experiment(dataset, config);
      write_text(shared.out, results_csv(config, result));
      out << to_string(config.method) << ' ' << to_string(config.reward)
          << " mean_napfd=" << detail::format_double(result.summary.overall_mean())
          << '\n';
      return kExitOk;
    }
    if (*compare) {
      if (block == 0) throw UsageError("--block must be positive");
      const ExperimentConfig a = with_method_spec(config, spec_a);
      const ExperimentConfig b = with_method_spec(config, spec_b);
      const Dataset dataset = obtain_dataset(shared, synth, config.base_seed);
      const auto ra = run_experiment(dataset, a);
      const auto rb = run_experiment(dataset, b);
      const auto blocks = block_differences(ra.summary, rb.summary, block);
      write_text(shared.out, blocks_csv(blocks));
      out << spec_a << " mean_napfd=" << detail::format_double(ra.summary.overall_mean())
          << ' ' << spec_b
          << " mean_napfd=" << detail::format_double(rb.summary.overall_mean()) << '\n';
      return kExitOk;
    }
    if (*sweep) {
      const auto items = split_list(values);
      if (items.empty()) throw UsageError("--values is empty");
      if (param != "history" && param != "ratio") {
        throw UsageError("--param must be 'history' or 'ratio'");
      }
      std::vector<SweepRow> rows;
      if (param == "history") {
        std::vector<std::size_t> lengths;
        for (const auto& v : items) {
          std::size_t n = 0;
          if (!detail::parse_number(std::string_view(v), n) || n < 1 ||
              n > kMaxDiscreteHistory) {
            throw UsageError("invalid history length '" + v + "'");
          }
          lengths.push_back(n);
        }
        rows = sweep_history_length(obtain_dataset(shared, synth, config.base_seed),
                                    config, lengths);
      } else {
        std::vector<double> ratios;
        for (const auto& v : items) {
          double r = 0.0;
          if (!detail::parse_number(std::string_view(v), r) || !(r > 0.0 && r <= 1.0)) {
            throw UsageError("invalid ratio '" + v + "'");
          }
          ratios.push_back(r);
        }
        rows = sweep_schedule_ratio(obtain_dataset(shared, synth, config.base_seed),
                                    config, ratios);
      }
      write_text(shared.out, sweep_csv(param, rows));
      out << "wrote " << rows.size() << " rows to " << shared.out << '\n';
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitUsage;
}

}  // namespace retecs::cli
