// src/experiment.cc


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


#include "zevox/experiment.h"

#include <functional>
#include <system_error>

#include <nlohmann/json.hpp>

#include "text-util.h"
#include "zevox/errors.h"
#include "zevox/similarity.h"

namespace zevox {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void BadValue(const std::string &key, const std::string &value) {
  throw ConfigError("config: bad value \"" + value + "\" for key " + key);
}

double ToDouble(const std::string &key, const std::string &v) {
  auto d = internal::ParseDouble(v);
  if (!d) BadValue(key, v);
  return *d;
}

template <typename Int>
Int ToInt(const std::string &key, const std::string &v) {
  Int out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) BadValue(key, v);
  return out;
}

bool ToBool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  BadValue(key, v);
}

struct Field {
  const char *key;
  std::function<void(ExperimentConfig &, const std::string &)> set;
  std::function<std::string(const ExperimentConfig &)> get;
};

std::string Num(double v) { return internal::FormatDouble(v); }
template <typename Int>
std::string Num(Int v) requires std::is_integral_v<Int> { return std::to_string(v); }

#define ZEVOX_FIELD(name, member, conv)                                        \
  Field {                                                                      \
    name, [](ExperimentConfig &c, const std::string &v) {                      \
      c.member = conv;                                                         \
    },                                                                         \
        [](const ExperimentConfig &c) { return Num(c.member); }                \
  }

const std::vector<Field> &Fields() {
  static const std::vector<Field> fields = {
      ZEVOX_FIELD("seed", seed, ToInt<std::uint64_t>("seed", v)),
      {"input", [](ExperimentConfig &c, const std::string &v) { c.input = v; },
       [](const ExperimentConfig &c) { return c.input; }},
      {"length_norm",
       [](ExperimentConfig &c, const std::string &v) { c.length_norm = ToBool("length_norm", v); },
       [](const ExperimentConfig &c) { return std::string(c.length_norm ? "true" : "false"); }},
      ZEVOX_FIELD("dim", synth.dim, ToInt<int>("dim", v)),
      ZEVOX_FIELD("speakers_per_sex", synth.speakers_per_sex, ToInt<int>("speakers_per_sex", v)),
      ZEVOX_FIELD("utts_per_speaker", synth.utts_per_speaker, ToInt<int>("utts_per_speaker", v)),
      ZEVOX_FIELD("shift_magnitude", synth.shift_magnitude, ToDouble("shift_magnitude", v)),
      {"shift_direction",
       [](ExperimentConfig &c, const std::string &v) {
         if (v == "diagonal") c.diagonal_shift = true;
         else if (v == "axis") c.diagonal_shift = false;
         else BadValue("shift_direction", v);
       },
       [](const ExperimentConfig &c) { return std::string(c.diagonal_shift ? "diagonal" : "axis"); }},
      ZEVOX_FIELD("shift_axis", synth.shift_axis, ToInt<int>("shift_axis", v)),
      ZEVOX_FIELD("speaker_spread", synth.speaker_spread, ToDouble("speaker_spread", v)),
      ZEVOX_FIELD("utterance_spread", synth.utterance_spread, ToDouble("utterance_spread", v)),
      ZEVOX_FIELD("train_fraction", train_fraction, ToDouble("train_fraction", v)),
      {"flow_kind",
       [](ExperimentConfig &c, const std::string &v) { c.flow_kind = ParseFlowKind(v); },
       [](const ExperimentConfig &c) { return std::string(FlowKindName(c.flow_kind)); }},
      ZEVOX_FIELD("delta", delta, ToDouble("delta", v)),
      ZEVOX_FIELD("epochs", train.epochs, ToInt<int>("epochs", v)),
      ZEVOX_FIELD("batch_size", train.batch_size, ToInt<int>("batch_size", v)),
      ZEVOX_FIELD("learning_rate", train.learning_rate, ToDouble("learning_rate", v)),
      ZEVOX_FIELD("beta1", train.beta1, ToDouble("beta1", v)),
      ZEVOX_FIELD("beta2", train.beta2, ToDouble("beta2", v)),
      ZEVOX_FIELD("validation_fraction", train.validation_fraction,
                  ToDouble("validation_fraction", v)),
      ZEVOX_FIELD("coupling_blocks", coupling.num_blocks, ToInt<int>("coupling_blocks", v)),
      ZEVOX_FIELD("coupling_hidden", coupling.hidden, ToInt<int>("coupling_hidden", v)),
      ZEVOX_FIELD("scale_clamp", coupling.scale_clamp, ToDouble("scale_clamp", v)),
      ZEVOX_FIELD("attacker_iterations", attacker.iterations,
                  ToInt<int>("attacker_iterations", v)),
      ZEVOX_FIELD("attacker_learning_rate", attacker.learning_rate,
                  ToDouble("attacker_learning_rate", v)),
      ZEVOX_FIELD("attacker_l2", attacker.l2, ToDouble("attacker_l2", v)),
  };
  return fields;
}

#undef ZEVOX_FIELD

template <typename Fn>
auto Stage(const char *name, Fn &&fn) {
  try {
    return fn();
  } catch (const std::exception &e) {
    throw Error(std::string("experiment: stage ") + name + " failed: " + e.what());
  }
}

ordered_json ReportJson(const EvalReport &r) {
  ordered_json j;
  j["eer"] = r.eer;
  j["d_ece_bits"] = r.d_ece;
  j["cllr_min_bits"] = r.cllr_min;
  j["n_tar"] = r.n_tar;
  j["n_non"] = r.n_non;
  return j;
}

}  // namespace

void ExperimentConfig::Set(const std::string &key, const std::string &value) {
  for (const Field &f : Fields())
    if (key == f.key) {
      f.set(*this, value);
      return;
    }
  throw ConfigError("config: unknown key " + key);
}

void ExperimentConfig::Apply(const KeyValues &values) {
  for (const auto &[k, v] : values) Set(k, v);
}

void ExperimentConfig::Validate() const {
  if (input.empty()) synth.Validate();
  if (!(train_fraction > 0 && train_fraction < 1))
    throw ConfigError("config: train_fraction must be in (0, 1)");
  if (!(delta > 0)) throw ConfigError("config: delta must be > 0");
  train.Validate();
  attacker.Validate();
  if (flow_kind == FlowKind::kCoupling &&
      (coupling.num_blocks < 1 || coupling.hidden < 1 || !(coupling.scale_clamp > 0)))
    throw ConfigError("config: coupling_blocks, coupling_hidden and scale_clamp must be > 0");
}

ExperimentConfig DefaultExperimentConfig() {
  ExperimentConfig cfg;
  // 1e-3 leaves the linear flow short of convergence after 50 epochs on the
  // default data.
  cfg.train.learning_rate = 1e-2;
  return cfg;
}

std::string FormatExperimentConfig(const ExperimentConfig &cfg) {
  std::string out;
  for (const Field &f : Fields()) out += std::string(f.key) + " = " + f.get(cfg) + "\n";
  return out;
}

ExperimentSummary RunExperiment(const ExperimentConfig &cfg_in,
                                const std::filesystem::path &out_dir, int jobs) {
  ExperimentConfig cfg = cfg_in;
  Stage("config", [&] {
    cfg.Validate();
    return 0;
  });
  SynthConfig synth = cfg.synth;
  synth.seed = cfg.seed;
  if (cfg.diagonal_shift) synth.shift = DiagonalShift(synth.dim, synth.shift_magnitude);
  TrainConfig train_cfg = cfg.train;
  train_cfg.seed = cfg.seed + 2;
  CouplingOptions coupling = cfg.coupling;
  coupling.seed = cfg.seed + 3;

  Stage("output", [&] {
    std::filesystem::create_directories(out_dir / "reports");
    internal::WriteTextFile(out_dir / "run_config.txt", FormatExperimentConfig(cfg),
                            "experiment");
    return 0;
  });

  const Dataset data = Stage("data", [&] {
    if (!cfg.input.empty()) return ReadEmbeddings(cfg.input, {cfg.length_norm});
    return GenerateSynthetic(synth);
  });
  const auto [train, test] =
      Stage("split", [&] { return SplitSpeakerDisjoint(data, cfg.train_fraction, cfg.seed + 1); });

  ExperimentSummary summary;
  summary.n_train = train.size();
  summary.n_test = test.size();

  ProtectionArtifacts artifacts;
  Stage("flow", [&] {
    TrainResult tr = TrainFlow(cfg.flow_kind, train, cfg.delta, train_cfg, coupling);
    summary.flow_best_epoch = tr.best_epoch;
    internal::WriteTextFile(out_dir / "training_curve.csv", FormatTrainingCurve(tr.curve),
                            "experiment");
    SaveModel(tr.model, out_dir / "flow.zevf");
    if (cfg.input.empty()) {
      std::vector<double> model_llr, true_llr;
      for (const auto &r : test.records()) {
        model_llr.push_back(tr.model.Llr(r.vec));
        true_llr.push_back(TrueLlr(synth, r.vec));
      }
      summary.llr_correlation = PearsonCorrelation(model_llr, true_llr);
    }
    artifacts.flow = std::move(tr.model);
    return 0;
  });
  Stage("global-mean", [&] {
    artifacts.global_mean = GlobalMean(train);
    return 0;
  });

  const Protection protections[] = {Protection::kNone, Protection::kProposed,
                                    Protection::kGlobal};
  Stage("attack", [&] {
    for (Protection p : protections)
      for (AttackKind a : {AttackKind::kIgnorant, AttackKind::kSemiInformed}) {
        const std::string tag = std::string(ProtectionName(p)) + "_" + AttackName(a);
        ProtocolResult res = RunProtocol(train, test, p, a, artifacts, cfg.attacker, jobs);
        internal::WriteTextFile(out_dir / "reports" / ("attack_" + tag + ".json"),
                                FormatEvalReportJson(res.report), "experiment");
        internal::WriteTextFile(out_dir / ("ece_profile_" + tag + ".csv"),
                                FormatEceProfileCsv(res.report.ece_profile), "experiment");
        summary.attack[ProtectionName(p)][AttackName(a)] = std::move(res.report);
      }
    return 0;
  });

  Stage("asv", [&] {
    for (Protection p : protections) {
      const Dataset eval = ApplyProtection(test, p, artifacts, jobs);
      ordered_json j;
      for (AsvCondition c : {AsvCondition::kFemale, AsvCondition::kMale, AsvCondition::kCross}) {
        EvalReport r = Evaluate(AsvTrials(eval, c));
        j[AsvConditionName(c)] = ReportJson(r);
        summary.asv[ProtectionName(p)][AsvConditionName(c)] = std::move(r);
      }
      internal::WriteTextFile(out_dir / "reports" / ("asv_" + std::string(ProtectionName(p)) + ".json"),
                              j.dump(2) + "\n", "experiment");
    }
    return 0;
  });

  Stage("similarity", [&] {
    for (Protection p : protections) {
      const std::string name = p == Protection::kNone ? "original" : ProtectionName(p);
      const SimilarityMatrix m =
          ComputeSimilarity(ApplyProtection(test, p, artifacts, jobs), CosineSimilarity, jobs);
      WriteSimilarity(m, out_dir / ("simmat_" + name + ".csv"),
                      out_dir / ("simmat_" + name + ".pgm"));
      summary.similarity_gap[name] = SexSimilarityGap(m);
    }
    internal::WriteTextFile(out_dir / "summary.json", FormatSummaryJson(summary), "experiment");
    return 0;
  });
  return summary;
}

std::string FormatSummaryJson(const ExperimentSummary &s) {
  ordered_json j;
  j["n_train"] = s.n_train;
  j["n_test"] = s.n_test;
  j["flow_best_epoch"] = s.flow_best_epoch;
  if (s.llr_correlation) j["llr_correlation"] = *s.llr_correlation;
  ordered_json attack, asv, gap;
  for (const char *p : {"none", "proposed", "global"}) {
    if (auto it = s.attack.find(p); it != s.attack.end())
      for (const auto &[a, r] : it->second) attack[p][a] = ReportJson(r);
    if (auto it = s.asv.find(p); it != s.asv.end())
      for (const char *c : {"F", "M", "FM"})
        if (auto rt = it->second.find(c); rt != it->second.end())
          asv[p][c] = ReportJson(rt->second);
  }
  for (const char *m : {"original", "proposed", "global"})
    if (auto it = s.similarity_gap.find(m); it != s.similarity_gap.end()) gap[m] = it->second;
  j["attack"] = attack;
  j["asv"] = asv;
  j["similarity_gap"] = gap;
  return j.dump(2) + "\n";
}

}  // namespace zevox
