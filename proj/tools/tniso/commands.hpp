#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tniso/io.hpp"

namespace tniso::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdict = 1;
inline constexpr int kExitInput = 2;

struct RunConfig {
  std::string command;
  std::string channel;
  std::string code;
  std::string recovery;
  std::string state;
  std::string out;
  std::string csv;
  std::string out_dir;
  std::string preset;
  std::string example;
  std::string strategy = "time_reversal";
  std::size_t iters = 10;
  unsigned horizon = 8;
  double tol = kDetectionTolerance;
  std::uint64_t seed = 0;
  std::size_t samples = 2000;
  std::size_t refine_steps = 200;
  std::optional<double> p;
  std::optional<double> epsilon;
};

// Default tolerance, overridden by TNISO_TOL when set.
double default_tolerance();

// Throws ParseError on invalid settings.
void validate(const RunConfig& cfg);
Json config_to_json(const RunConfig& cfg);

struct CommandResult {
  int exit_code = kExitOk;
  Report report;
  std::string text;  // human-readable summary
};

// Runs one command. Input errors are reported through exit code 2, never thrown.
CommandResult run(const RunConfig& cfg);

}  // namespace tniso::cli
