// zevox/experiment.h


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


#ifndef ZEVOX_EXPERIMENT_H_
#define ZEVOX_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "zevox/config.h"
#include "zevox/embeddings.h"
#include "zevox/flow.h"
#include "zevox/harness.h"
#include "zevox/metrics.h"

namespace zevox {

/// Everything an end-to-end run depends on. Sub-seeds are derived from
/// `seed`: data seed + 0, split seed + 1, flow training seed + 2, coupling
/// permutations seed + 3.
struct ExperimentConfig {
  std::uint64_t seed = 2024;
  /// Embedding CSV to ingest; empty means synthetic data from `synth`.
  std::string input;
  bool length_norm = false;
  SynthConfig synth;
  /// Spread the synthetic shift over all coordinates instead of one axis.
  bool diagonal_shift = true;
  double train_fraction = 0.8;
  FlowKind flow_kind = FlowKind::kLinear;
  double delta = 10.0;
  TrainConfig train;
  CouplingOptions coupling;
  AttackerConfig attacker;

  /// Sets one key from its text value. Throws ConfigError for an unknown key
  /// or a value that does not parse.
  void Set(const std::string &key, const std::string &value);
  void Apply(const KeyValues &values);
  /// Throws ConfigError on out-of-range values.
  void Validate() const;
};

/// The defaults used by `experiment --config default`: the member defaults
/// above except a flow learning rate of 1e-2.
ExperimentConfig DefaultExperimentConfig();

/// `key = value` text listing every key, readable by ExperimentConfig::Apply.
std::string FormatExperimentConfig(const ExperimentConfig &cfg);

struct ExperimentSummary {
  /// attack[protection][attack kind], names as in ProtectionName/AttackName.
  std::map<std::string, std::map<std::string, EvalReport>> attack;
  /// asv[protection][condition].
  std::map<std::string, std::map<std::string, EvalReport>> asv;
  /// Same-sex minus cross-sex mean cell, per similarity matrix.
  std::map<std::string, double> similarity_gap;
  int flow_best_epoch = 0;
  /// Held-out correlation of the flow LLR with the generator's exact LLR;
  /// only for synthetic data.
  std::optional<double> llr_correlation;
  std::size_t n_train = 0, n_test = 0;
};

/// Runs data -> split -> flow training -> protections -> attacks -> ASV
/// trials -> similarity matrices and writes the bundle into `out_dir`
/// (created if needed):
///   run_config.txt, summary.json, training_curve.csv, flow.zevf,
///   reports/attack_{protection}_{attack}.json,
///   ece_profile_{protection}_{attack}.csv,
///   reports/asv_{protection}.json,
///   simmat_{original,proposed,global}.{csv,pgm}.
/// No file carries timestamps, so reruns are byte-identical. Errors are
/// rethrown with the failing stage in the message.
ExperimentSummary RunExperiment(const ExperimentConfig &cfg,
                                const std::filesystem::path &out_dir,
                                int jobs = 1);

std::string FormatSummaryJson(const ExperimentSummary &summary);

}  // namespace zevox

#endif  // ZEVOX_EXPERIMENT_H_
