#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "tniso/version.hpp"

namespace {

void add_common(CLI::App* sub, tniso::cli::RunConfig& cfg) {
  sub->add_option("--channel", cfg.channel, "Channel JSON file");
  sub->add_option("--code", cfg.code, "Code JSON file");
  sub->add_option("--recovery", cfg.recovery, "Recovery channel JSON file");
  sub->add_option("--state", cfg.state, "Initial state JSON file (logical or physical)");
  sub->add_option("--iters", cfg.iters, "Number of noise-plus-recovery rounds");
  sub->add_option("--horizon", cfg.horizon, "Channel powers checked by the noiseless certificate");
  sub->add_option("--tol", cfg.tol, "Detection tolerance (default 1e-8 or $TNISO_TOL)");
  sub->add_option("--strategy", cfg.strategy, "Recovery strategy: petz | time_reversal | replace");
  sub->add_option("--seed", cfg.seed, "Seed for randomized steps");
  sub->add_option("--samples", cfg.samples, "Random states used to estimate epsilon");
  sub->add_option("--refine", cfg.refine_steps, "Local refinement steps for epsilon");
  sub->add_option("--out", cfg.out, "Write the JSON report here");
  sub->add_option("--csv", cfg.csv, "Write an error/bound CSV here (simulate)");
  sub->add_option("--p", cfg.p, "Single-flip probability (examples and presets)");
  sub->add_option("--epsilon", cfg.epsilon,
                  "Phase-flip weight (example2 preset) or certified per-round epsilon (simulate)");
}

}  // namespace

int main(int argc, char** argv) {
  tniso::cli::RunConfig cfg;
  try {
    cfg.tol = tniso::cli::default_tolerance();
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return tniso::cli::kExitInput;
  }

  CLI::App app{"Isometric encodings, noiseless codes and recovery channels"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tniso::kVersion));

  const std::pair<const char*, const char*> commands[] = {
      {"check-channel", "Validate a channel file (trace preservation, dimensions)"},
      {"classify", "Classify a code under a channel"},
      {"correct", "Construct a recovery channel for a preserved code"},
      {"simulate", "Iterate noise and recovery and track the error"},
      {"epsilon", "Estimate how far a channel (plus recovery) moves the code"},
      {"example", "Generate and check the built-in examples"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, cfg);
    if (std::string(name) == "simulate") {
      sub->add_option("--preset", cfg.preset, "Built-in scenario (example2)");
    }
    if (std::string(name) == "example") {
      sub->add_option("name", cfg.example, "repetition | example2")->required();
      sub->add_option("--out-dir", cfg.out_dir, "Write channel/code/recovery JSON here");
    }
    sub->callback([&cfg, sub] { cfg.command = sub->get_name(); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : tniso::cli::kExitInput;
  }

  const tniso::cli::CommandResult res = tniso::cli::run(cfg);
  (res.exit_code == tniso::cli::kExitInput ? std::cerr : std::cout) << res.text;
  return res.exit_code;
}
