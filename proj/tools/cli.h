// tools/cli.h


// Copyright 2026  The zevox Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.


#ifndef ZEVOX_TOOLS_CLI_H_
#define ZEVOX_TOOLS_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace zevox::cli {

inline constexpr std::uint64_t kDefaultSeed = 2024;

/// Parsed command line. Only the fields of the chosen subcommand matter.
struct RunConfig {
  std::string subcommand;
  std::optional<std::uint64_t> seed;  // --seed, else ZEVOX_SEED
  int jobs = 1;

  // Common paths.
  std::string in, out, model, train, test, config, report, targets, manifest;
  std::string csv, pgm, curve, ece_out;

  // synth-data
  int dim = 16, speakers_per_sex = 50, utts_per_speaker = 10;
  double shift_magnitude = 5.0;
  std::string shift_direction = "axis";
  int shift_axis = 0;
  double speaker_spread = 1.0, utterance_spread = 0.5;

  // train-flow
  std::string kind = "linear";
  double delta = 10.0;
  int epochs = 50, batch_size = 128;
  double learning_rate = 1e-3, validation_fraction = 0.1;
  int coupling_blocks = 6, coupling_hidden = 64;
  bool length_norm = false;

  // protect-emb
  bool global = false;
  double target_llr = 0.0;

  // pitch / audio
  double f0_min = 60.0, f0_max = 400.0, window = 0.040, hop = 0.010;
  double yin_threshold = 0.15, min_source_sigma = 1.0, floor_hz = 40.0;

  // attack / asv
  std::string protection = "none", attack = "ignorant", condition = "F";

  // experiment
  std::vector<std::string> overrides;  // key=value
};

struct ParseOutcome {
  RunConfig config;
  /// Set when parsing already decided the exit code (help: 0, usage error: 2).
  std::optional<int> exit_code;
};

/// Parses argv; usage text and errors go to `out` / `err`.
ParseOutcome ParseArgs(int argc, const char *const *argv, std::ostream &out,
                       std::ostream &err);

/// The seed after applying the --seed / ZEVOX_SEED / default precedence.
std::uint64_t ResolveSeed(const RunConfig &cfg);

/// Runs the subcommand. Returns 0 on success, 1 on runtime errors (printed
/// to `err` with their module prefix), 2 on usage errors found late.
int Dispatch(const RunConfig &cfg, std::ostream &out, std::ostream &err);

/// ParseArgs then Dispatch.
int Main(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace zevox::cli

#endif  // ZEVOX_TOOLS_CLI_H_
