// src/harness.cc


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


#include "zevox/harness.h"

#include <map>

#include "parallel.h"
#include "zevox/errors.h"

namespace zevox {

const char *ProtectionName(Protection p) {
  switch (p) {
    case Protection::kNone: return "none";
    case Protection::kProposed: return "proposed";
    case Protection::kGlobal: return "global";
  }
  return "?";
}

Protection ParseProtection(const std::string &name) {
  if (name == "none") return Protection::kNone;
  if (name == "proposed") return Protection::kProposed;
  if (name == "global") return Protection::kGlobal;
  throw ConfigError("harness: unknown protection \"" + name +
                    "\" (expected none, proposed or global)");
}

const char *AttackName(AttackKind a) {
  return a == AttackKind::kIgnorant ? "ignorant" : "semi_informed";
}

AttackKind ParseAttack(const std::string &name) {
  if (name == "ignorant") return AttackKind::kIgnorant;
  if (name == "semi_informed" || name == "semi-informed") return AttackKind::kSemiInformed;
  throw ConfigError("harness: unknown attack \"" + name +
                    "\" (expected ignorant or semi_informed)");
}

const char *AsvConditionName(AsvCondition c) {
  switch (c) {
    case AsvCondition::kFemale: return "F";
    case AsvCondition::kMale: return "M";
    case AsvCondition::kCross: return "FM";
  }
  return "?";
}

AsvCondition ParseAsvCondition(const std::string &name) {
  if (name == "F") return AsvCondition::kFemale;
  if (name == "M") return AsvCondition::kMale;
  if (name == "FM") return AsvCondition::kCross;
  throw ConfigError("harness: unknown ASV condition \"" + name + "\" (expected F, M or FM)");
}

Dataset ProtectDataset(const Dataset &ds, const FlowModel &model, double target_llr,
                       int jobs) {
  if (static_cast<int>(ds.dim()) != model.dim() && !ds.empty())
    throw ConfigError("harness: flow dimension " + std::to_string(model.dim()) +
                      " does not match data dimension " + std::to_string(ds.dim()));
  std::vector<std::vector<double>> out(ds.size());
  internal::ParallelFor(ds.size(), jobs, [&](std::size_t i) {
    out[i] = model.Protect(ds[i].vec, target_llr);
  });
  const EmbeddingRecord *base = ds.records().data();
  return ds.Transform([&](const EmbeddingRecord &r) { return out[&r - base]; });
}

Dataset ApplyProtection(const Dataset &ds, Protection protection,
                        const ProtectionArtifacts &artifacts, int jobs) {
  switch (protection) {
    case Protection::kNone:
      return ds;
    case Protection::kProposed:
      if (!artifacts.flow)
        throw ConfigError("harness: proposed protection requires a trained flow");
      return ProtectDataset(ds, *artifacts.flow, 0.0, jobs);
    case Protection::kGlobal:
      if (artifacts.global_mean.empty())
        throw ConfigError("harness: global protection requires a global mean");
      return ApplyGlobal(ds, artifacts.global_mean);
  }
  return ds;
}

ProtocolResult RunProtocol(const Dataset &train, const Dataset &test,
                           Protection protection, AttackKind attack,
                           const ProtectionArtifacts &artifacts,
                           const AttackerConfig &cfg, int jobs) {
  const Dataset attacker_train = attack == AttackKind::kIgnorant
                                     ? train
                                     : ApplyProtection(train, protection, artifacts, jobs);
  const Dataset eval = ApplyProtection(test, protection, artifacts, jobs);
  Attacker attacker = Attacker::Train(attacker_train, cfg);
  ProtocolResult res{Evaluate(attacker.ScoreDataset(eval)), std::move(attacker)};
  return res;
}

ScoreSet AsvTrials(const Dataset &ds, AsvCondition condition, const PairScorer &scorer) {
  auto included = [&](Sex s) {
    switch (condition) {
      case AsvCondition::kFemale: return s == Sex::kFemale;
      case AsvCondition::kMale: return s == Sex::kMale;
      case AsvCondition::kCross: return true;
    }
    return false;
  };
  std::vector<std::size_t> idx;
  std::map<std::string, int> speakers;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (included(ds[i].sex)) {
      idx.push_back(i);
      speakers[ds[i].spk_id] = 1;
    }
  const std::string name = AsvConditionName(condition);
  if (speakers.size() < 2)
    throw DataError("harness: ASV condition " + name + " needs at least 2 speakers");
  if (condition == AsvCondition::kCross &&
      (ds.Speakers(Sex::kMale).empty() || ds.Speakers(Sex::kFemale).empty()))
    throw DataError("harness: ASV condition FM needs speakers of both sexes");

  ScoreSet s;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      const EmbeddingRecord &ra = ds[idx[a]], &rb = ds[idx[b]];
      if (ra.spk_id == rb.spk_id) {
        s.tar.push_back(scorer(ra.vec, rb.vec));
      } else if (condition != AsvCondition::kCross || ra.sex != rb.sex) {
        s.non.push_back(scorer(ra.vec, rb.vec));
      }
    }
  if (s.tar.empty())
    throw DataError("harness: ASV condition " + name +
                    " has no speaker with two or more utterances");
  return s;
}

}  // namespace zevox
