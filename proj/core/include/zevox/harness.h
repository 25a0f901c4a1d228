// zevox/harness.h


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


#ifndef ZEVOX_HARNESS_H_
#define ZEVOX_HARNESS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zevox/embeddings.h"
#include "zevox/flow.h"
#include "zevox/metrics.h"
#include "zevox/similarity.h"

namespace zevox {

enum class Protection { kNone, kProposed, kGlobal };
enum class AttackKind { kIgnorant, kSemiInformed };

const char *ProtectionName(Protection p);  // none, proposed, global
Protection ParseProtection(const std::string &name);
const char *AttackName(AttackKind a);  // ignorant, semi_informed
AttackKind ParseAttack(const std::string &name);

struct AttackerConfig {
  int iterations = 500;
  double learning_rate = 0.5;
  double l2 = 1e-4;

  void Validate() const;
};

/// Linear logistic-regression sex classifier. Features are standardized with
/// the training mean and std (a coordinate with zero spread is left
/// unscaled), then fitted by full-batch gradient descent from zero weights,
/// so training is deterministic.
class Attacker {
 public:
  /// Throws DataError unless both sexes are present.
  static Attacker Train(const Dataset &train, const AttackerConfig &cfg = {});

  /// Detection score for "female": w' standardize(x) + b.
  double Score(std::span<const double> x) const;
  /// Scores of a dataset with female records as targets.
  ScoreSet ScoreDataset(const Dataset &ds) const;

  const std::vector<double> &weights() const { return w_; }
  double bias() const { return b_; }
  /// Mean logistic loss before each iteration and after the last one.
  const std::vector<double> &loss_history() const { return loss_; }

 private:
  std::vector<double> mean_, scale_, w_;
  double b_ = 0.0;
  std::vector<double> loss_;
};

/// Whatever a protection needs: the trained flow for kProposed, the
/// training-set global mean for kGlobal.
struct ProtectionArtifacts {
  std::optional<FlowModel> flow;
  std::vector<double> global_mean;
};

/// Replaces every vector by its protected version. Throws ConfigError when
/// the needed artifact is missing. `jobs` > 1 protects records in parallel.
Dataset ApplyProtection(const Dataset &ds, Protection protection,
                        const ProtectionArtifacts &artifacts, int jobs = 1);
/// Flow protection of every record with the given target LLR.
Dataset ProtectDataset(const Dataset &ds, const FlowModel &model,
                       double target_llr = 0.0, int jobs = 1);

struct ProtocolResult {
  EvalReport report;
  Attacker attacker;
};

/// Ignorant: the attacker learns from the original training set.
/// Semi-informed: it learns from the protected training set. Both are
/// evaluated on the protected test set.
ProtocolResult RunProtocol(const Dataset &train, const Dataset &test,
                           Protection protection, AttackKind attack,
                           const ProtectionArtifacts &artifacts,
                           const AttackerConfig &cfg = {}, int jobs = 1);

enum class AsvCondition { kFemale, kMale, kCross };
const char *AsvConditionName(AsvCondition c);  // F, M, FM
AsvCondition ParseAsvCondition(const std::string &name);

/// Verification trials scored by `scorer` (cosine by default). Targets are
/// unordered same-speaker pairs of distinct utterances; for F and M they come
/// from that sex and non-targets are different-speaker pairs of the same sex.
/// For FM targets come from both sexes and non-targets are cross-sex pairs.
/// Throws DataError when the condition has fewer than 2 speakers (one per
/// sex for FM) or no target pairs.
ScoreSet AsvTrials(const Dataset &ds, AsvCondition condition,
                   const PairScorer &scorer = CosineSimilarity);

}  // namespace zevox

#endif  // ZEVOX_HARNESS_H_
