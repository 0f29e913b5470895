#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pmvr/pmvr.h"

namespace {

enum Exit { kOk = 0, kValidation = 1, kRuntime = 2, kCheckFailed = 3 };

void print_line(const char* line, void*) {
  std::fputs(line, stdout);
  std::fputc('\n', stdout);
  std::fflush(stdout);
}

void print_progress(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

int report(pmvr_status status) {
  if (status == PMVR_OK) return kOk;
  std::fprintf(stderr, "error: %s\n", pmvr_last_error());
  switch (status) {
    case PMVR_ERR_VALIDATION:
      return kValidation;
    case PMVR_ERR_CHECK_FAILED:
      return kCheckFailed;
    default:
      return kRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pmvr: projection-free variance-reduced compositional optimization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pmvr_version()));

  std::uint64_t threads = 1;
  app.add_option("--threads", threads, "Worker threads across repetitions")
      ->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "Run a JSON-configured experiment");
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed, reps;
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--seed", seed, "Base seed (overrides the config)");
  run->add_option("--reps", reps, "Repetitions (overrides the config)")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory");

  auto* check = app.add_subcommand("check", "Run a self-check suite");
  std::string suite = "all";
  check->add_option("--suite", suite, "oracles | gradients | subsolver | all");

  auto* repro = app.add_subcommand("reproduce", "Run an experiment of the benchmark study");
  std::string experiment, scale = "desk", data_path, repro_out;
  std::optional<std::uint64_t> repro_reps;
  repro->add_option("--experiment", experiment, "matrix | mv-portfolio | md-portfolio")
      ->required()
      ->check(CLI::IsMember({"matrix", "mv-portfolio", "md-portfolio"}));
  repro->add_option("--scale", scale, "desk | paper")->check(CLI::IsMember({"desk", "paper"}));
  repro->add_option("--data", data_path, "French industry portfolio CSV");
  repro->add_option("--out", repro_out, "Output root");
  repro->add_option("--reps", repro_reps, "Repetitions (overrides the scale default)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  if (*run) {
    pmvr_config* config = nullptr;
    pmvr_status st = pmvr_config_load(config_path.c_str(), &config);
    if (st == PMVR_OK && seed) st = pmvr_config_set_seed(config, *seed);
    if (st == PMVR_OK && reps) st = pmvr_config_set_reps(config, *reps);
    if (st == PMVR_OK && app.count("--threads")) st = pmvr_config_set_threads(config, threads);
    if (st == PMVR_OK)
      st = pmvr_run_config(config, out_dir.empty() ? nullptr : out_dir.c_str(), print_progress,
                           nullptr);
    pmvr_config_free(config);
    return report(st);
  }
  if (*check) return report(pmvr_check(suite.c_str(), print_line, nullptr));
  return report(pmvr_reproduce(experiment.c_str(), scale.c_str(),
                               data_path.empty() ? nullptr : data_path.c_str(),
                               repro_out.empty() ? nullptr : repro_out.c_str(), threads,
                               repro_reps.value_or(0), print_progress, nullptr));
}
