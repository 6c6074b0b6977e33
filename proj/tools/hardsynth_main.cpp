#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hardsynth/config.hpp"
#include "hardsynth/errors.hpp"
#include "hardsynth/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

struct CommonOpts {
  std::string config_path;
  std::string work_dir;
  std::int64_t seed = -1;
  int parallelism = 0;
  double budget_hours = -1.0;
  double min_prompt_s = -1.0;
  double gamma = -1.0;
  std::string prompt_strategy;
  bool no_rewrite = false;
};

void add_common_flags(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "pipeline config file (JSON)")
      ->required();
  cmd->add_option("--work-dir", opts.work_dir, "override paths.work_dir");
  cmd->add_option("--seed", opts.seed, "override global seed");
  cmd->add_option("--parallelism", opts.parallelism,
                  "override client fan-out width");
  cmd->add_option("--budget-hours", opts.budget_hours,
                  "override selection.budget_hours");
  cmd->add_option("--min-prompt-s", opts.min_prompt_s,
                  "override selection.min_prompt_s");
  cmd->add_option("--gamma", opts.gamma, "override filter.gamma");
  cmd->add_option("--prompt-strategy", opts.prompt_strategy,
                  "hard|random, override selection.strategy");
  cmd->add_flag("--no-rewrite", opts.no_rewrite,
                "synthesize from original transcripts instead of rewrites");
}

hardsynth::PipelineConfig load_config(const CommonOpts& opts) {
  hardsynth::PipelineConfig cfg = hardsynth::validate_config(opts.config_path);
  if (!opts.work_dir.empty()) cfg.work_dir = opts.work_dir;
  if (opts.seed >= 0) cfg.seed = std::uint64_t(opts.seed);
  if (opts.parallelism > 0) cfg.parallelism = opts.parallelism;
  if (opts.budget_hours > 0.0) cfg.budget_hours = opts.budget_hours;
  if (opts.min_prompt_s >= 0.0) cfg.min_prompt_s = opts.min_prompt_s;
  if (opts.gamma >= 0.0) cfg.gamma = opts.gamma;
  if (!opts.prompt_strategy.empty()) {
    if (opts.prompt_strategy == "hard")
      cfg.strategy = hardsynth::PromptStrategy::kHard;
    else if (opts.prompt_strategy == "random")
      cfg.strategy = hardsynth::PromptStrategy::kRandom;
    else
      throw hardsynth::ConfigError("bad --prompt-strategy (want hard|random)");
  }
  if (opts.no_rewrite) cfg.rewrite_enabled = false;
  return cfg;
}

void print_outcome(const hardsynth::StageOutcome& outcome) {
  std::cout << hardsynth::stage_name(outcome.stage)
            << (outcome.skipped ? ": skipped (up to date)" : ": done");
  for (const auto& a : outcome.artifacts) std::cout << " " << a;
  std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hard-sample speech corpus augmentation pipeline"};
  app.require_subcommand(1);

  const std::vector<std::string> stages = {"score", "select", "rewrite",
                                           "synth", "filter", "mix",
                                           "stats", "eval"};
  std::vector<std::pair<CLI::App*, CommonOpts>> subcommands;
  subcommands.reserve(stages.size() + 1);
  for (const auto& name : stages) {
    CLI::App* cmd = app.add_subcommand(name, "run the " + name + " stage");
    subcommands.emplace_back(cmd, CommonOpts{});
    add_common_flags(cmd, subcommands.back().second);
  }
  CLI::App* pipeline_cmd =
      app.add_subcommand("pipeline", "run all stages in order");
  subcommands.emplace_back(pipeline_cmd, CommonOpts{});
  add_common_flags(pipeline_cmd, subcommands.back().second);

  CLI11_PARSE(app, argc, argv);

  for (auto& [cmd, opts] : subcommands) {
    if (!cmd->parsed()) continue;
    hardsynth::PipelineConfig cfg;
    try {
      cfg = load_config(opts);
    } catch (const hardsynth::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfig;
    }

    try {
      if (cmd == pipeline_cmd) {
        for (const auto& outcome : hardsynth::run_pipeline(cfg))
          print_outcome(outcome);
      } else {
        print_outcome(
            hardsynth::run_stage(hardsynth::stage_from_name(cmd->get_name()), cfg));
      }
    } catch (const std::exception& e) {
      std::cerr << "stage failure: " << e.what() << "\n";
      return kExitStage;
    }
    return kExitOk;
  }
  return kExitConfig;
}
