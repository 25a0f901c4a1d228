// tools/cli.cc


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


#include "cli.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "zevox/config.h"
#include "zevox/embeddings.h"
#include "zevox/errors.h"
#include "zevox/experiment.h"
#include "zevox/flow.h"
#include "zevox/harness.h"
#include "zevox/metrics.h"
#include "zevox/pitch.h"
#include "zevox/psola.h"
#include "zevox/similarity.h"
#include "zevox/wav.h"

namespace zevox::cli {

namespace {

// Usage problems detected after parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

void WriteOrPrint(const std::string &path, const std::string &text, std::ostream &out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cli: cannot write " + path);
  f << text;
  if (!f) throw Error("cli: write failed for " + path);
}

PitchConfig MakePitchConfig(const RunConfig &c) {
  PitchConfig p;
  p.f0_min = c.f0_min;
  p.f0_max = c.f0_max;
  p.window = c.window;
  p.hop = c.hop;
  p.yin_threshold = c.yin_threshold;
  return p;
}

void AddPitchOptions(CLI::App *sub, RunConfig &c) {
  sub->add_option("--f0-min", c.f0_min, "Lowest f0 searched, Hz")->capture_default_str();
  sub->add_option("--f0-max", c.f0_max, "Highest f0 searched, Hz")->capture_default_str();
  sub->add_option("--window", c.window, "Analysis window, s")->capture_default_str();
  sub->add_option("--hop", c.hop, "Frame hop, s")->capture_default_str();
  sub->add_option("--yin-threshold", c.yin_threshold)->capture_default_str();
}

int SynthData(const RunConfig &c, std::ostream &out) {
  SynthConfig s;
  s.dim = c.dim;
  s.speakers_per_sex = c.speakers_per_sex;
  s.utts_per_speaker = c.utts_per_speaker;
  s.shift_magnitude = c.shift_magnitude;
  s.shift_axis = c.shift_axis;
  s.speaker_spread = c.speaker_spread;
  s.utterance_spread = c.utterance_spread;
  s.seed = ResolveSeed(c);
  if (c.shift_direction == "diagonal") s.shift = DiagonalShift(s.dim, s.shift_magnitude);
  const Dataset ds = GenerateSynthetic(s);
  WriteEmbeddings(ds, c.out);
  out << "wrote " << ds.size() << " records to " << c.out << "\n";
  return 0;
}

int TrainFlowCmd(const RunConfig &c, std::ostream &out) {
  const Dataset ds = ReadEmbeddings(c.in, {c.length_norm});
  TrainConfig t;
  t.epochs = c.epochs;
  t.batch_size = c.batch_size;
  t.learning_rate = c.learning_rate;
  t.validation_fraction = c.validation_fraction;
  t.seed = ResolveSeed(c);
  CouplingOptions co;
  co.num_blocks = c.coupling_blocks;
  co.hidden = c.coupling_hidden;
  co.seed = t.seed + 1;
  const TrainResult r = TrainFlow(ParseFlowKind(c.kind), ds, c.delta, t, co);
  SaveModel(r.model, c.out);
  if (!c.curve.empty()) WriteOrPrint(c.curve, FormatTrainingCurve(r.curve), out);
  const TrainingCurvePoint &best = r.curve[r.best_epoch];
  out << "best epoch " << r.best_epoch << ", validation nll " << best.validation_nll
      << (r.validated_on_train ? " (validated on training data)" : "") << "\n";
  return 0;
}

int ProtectEmb(const RunConfig &c, std::ostream &out) {
  if (c.global == !c.model.empty())
    throw UsageError("protect-emb: give exactly one of --model or --global");
  if (!c.global && !c.train.empty())
    throw UsageError("protect-emb: --train only applies with --global");
  const Dataset ds = ReadEmbeddings(c.in, {c.length_norm});
  Dataset protected_ds;
  if (c.global) {
    const Dataset ref = c.train.empty() ? ds : ReadEmbeddings(c.train, {c.length_norm});
    protected_ds = ApplyGlobal(ds, GlobalMean(ref));
  } else {
    protected_ds = ProtectDataset(ds, LoadModel(c.model), c.target_llr, c.jobs);
  }
  WriteEmbeddings(protected_ds, c.out);
  out << "wrote " << protected_ds.size() << " protected records to " << c.out << "\n";
  return 0;
}

int F0TargetsCmd(const RunConfig &c, std::ostream &out) {
  const auto entries = ReadManifest(c.manifest);
  const F0Targets t = TargetsFromManifest(entries, MakePitchConfig(c));
  WriteOrPrint(c.out, FormatTargetsJson(t), out);
  return 0;
}

int ProtectAudioCmd(const RunConfig &c, std::ostream &out, std::ostream &err) {
  const Waveform wf = ReadWav(c.in);
  const F0Targets t = ReadTargetsJson(c.targets);
  AudioProtectConfig ac;
  ac.pitch = MakePitchConfig(c);
  ac.min_source_sigma = c.min_source_sigma;
  ac.floor_hz = c.floor_hz;
  const auto [wav, report] = ProtectAudio(wf, t, ac);
  if (report.passthrough) err << "warning: " << c.in << " has no voiced frames, copied unchanged\n";
  if (report.clamped_frames > 0)
    err << "warning: " << report.clamped_frames << " frames raised to the " << c.floor_hz
        << " Hz floor\n";
  WriteWav(wav, c.out);
  WriteOrPrint(c.report, FormatAudioReportJson(report), out);
  return 0;
}

ProtectionArtifacts ArtifactsFor(const RunConfig &c, Protection p, const Dataset &train) {
  ProtectionArtifacts a;
  if (p == Protection::kProposed) {
    if (c.model.empty()) throw UsageError("attack: --protection proposed requires --model");
    a.flow = LoadModel(c.model);
  } else if (!c.model.empty()) {
    throw UsageError("attack: --model only applies with --protection proposed");
  }
  if (p == Protection::kGlobal) a.global_mean = GlobalMean(train);
  return a;
}

int AttackCmd(const RunConfig &c, std::ostream &out) {
  const Dataset train = ReadEmbeddings(c.train, {c.length_norm});
  const Dataset test = ReadEmbeddings(c.test, {c.length_norm});
  const Protection p = ParseProtection(c.protection);
  const ProtocolResult r =
      RunProtocol(train, test, p, ParseAttack(c.attack), ArtifactsFor(c, p, train), {}, c.jobs);
  WriteOrPrint(c.out, FormatEvalReportJson(r.report), out);
  if (!c.ece_out.empty()) WriteOrPrint(c.ece_out, FormatEceProfileCsv(r.report.ece_profile), out);
  return 0;
}

int AsvCmd(const RunConfig &c, std::ostream &out) {
  const Dataset ds = ReadEmbeddings(c.in, {c.length_norm});
  const EvalReport r = Evaluate(AsvTrials(ds, ParseAsvCondition(c.condition)));
  WriteOrPrint(c.out, FormatEvalReportJson(r), out);
  return 0;
}

int SimmatCmd(const RunConfig &c, std::ostream &out) {
  const Dataset ds = ReadEmbeddings(c.in, {c.length_norm});
  const SimilarityMatrix m = ComputeSimilarity(ds, CosineSimilarity, c.jobs);
  WriteSimilarity(m, c.out + ".csv", c.out + ".pgm");
  out << "sex similarity gap " << SexSimilarityGap(m) << "\n";
  return 0;
}

int ExperimentCmd(const RunConfig &c, std::ostream &out) {
  ExperimentConfig cfg = DefaultExperimentConfig();
  bool seed_set = false;
  if (c.config != "default") {
    const KeyValues kv = ReadKeyValues(c.config);
    for (const auto &[k, v] : kv) seed_set |= k == "seed";
    cfg.Apply(kv);
  }
  for (const std::string &o : c.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw UsageError("experiment: --set expects key=value, got " + o);
    const KeyValues kv = ParseKeyValues(o);
    seed_set |= kv.front().first == "seed";
    cfg.Apply(kv);
  }
  if (c.seed || !seed_set) cfg.seed = ResolveSeed(c);
  const ExperimentSummary s = RunExperiment(cfg, c.out, c.jobs);
  out << FormatSummaryJson(s);
  return 0;
}

}  // namespace

std::uint64_t ResolveSeed(const RunConfig &cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char *env = std::getenv("ZEVOX_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t v = 0;
    const char *end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec != std::errc() || ptr != end)
      throw UsageError(std::string("cli: ZEVOX_SEED is not an unsigned integer: ") + env);
    return v;
  }
  return kDefaultSeed;
}

ParseOutcome ParseArgs(int argc, const char *const *argv, std::ostream &out,
                       std::ostream &err) {
  ParseOutcome res;
  RunConfig &c = res.config;
  CLI::App app{"Zero-evidence sex-attribute protection for speaker embeddings and pitch.",
               "zevox"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  CLI::Option *seed_opt =
      app.add_option("--seed", seed, "Random seed (fallback: ZEVOX_SEED, then 2024)");
  app.add_option("--jobs", c.jobs, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);

  auto *synth = app.add_subcommand("synth-data", "Generate hierarchical Gaussian embeddings");
  synth->add_option("--out", c.out, "Output embedding CSV")->required();
  synth->add_option("--dim", c.dim)->capture_default_str();
  synth->add_option("--speakers-per-sex", c.speakers_per_sex)->capture_default_str();
  synth->add_option("--utts-per-speaker", c.utts_per_speaker)->capture_default_str();
  synth->add_option("--shift", c.shift_magnitude, "Between-sex shift magnitude")
      ->capture_default_str();
  synth->add_option("--shift-direction", c.shift_direction)
      ->check(CLI::IsMember({"axis", "diagonal"}))
      ->capture_default_str();
  synth->add_option("--shift-axis", c.shift_axis)->capture_default_str();
  synth->add_option("--speaker-spread", c.speaker_spread)->capture_default_str();
  synth->add_option("--utterance-spread", c.utterance_spread)->capture_default_str();

  auto *train = app.add_subcommand("train-flow", "Train a flow on labeled embeddings");
  train->add_option("--in", c.in, "Training embedding CSV")->required();
  train->add_option("--out", c.out, "Output model file")->required();
  train->add_option("--kind", c.kind)
      ->check(CLI::IsMember({"linear", "coupling"}))
      ->capture_default_str();
  train->add_option("--delta", c.delta, "Base-space class separation")->capture_default_str();
  train->add_option("--epochs", c.epochs)->capture_default_str();
  train->add_option("--batch-size", c.batch_size)->capture_default_str();
  train->add_option("--lr", c.learning_rate)->capture_default_str();
  train->add_option("--validation-fraction", c.validation_fraction)->capture_default_str();
  train->add_option("--blocks", c.coupling_blocks, "Coupling blocks")->capture_default_str();
  train->add_option("--hidden", c.coupling_hidden, "Coupling hidden width")
      ->capture_default_str();
  train->add_option("--curve", c.curve, "Write the training curve CSV here");
  train->add_flag("--length-norm", c.length_norm, "Scale embeddings to unit norm");

  auto *prot = app.add_subcommand("protect-emb", "Protect embeddings with a flow or the global mean");
  prot->add_option("--in", c.in, "Embedding CSV")->required();
  prot->add_option("--out", c.out, "Output embedding CSV")->required();
  prot->add_option("--model", c.model, "Flow model file");
  prot->add_flag("--global", c.global, "Replace every vector by the global mean");
  prot->add_option("--train", c.train, "Data for the global mean (default: --in)");
  prot->add_option("--target-llr", c.target_llr)->capture_default_str();
  prot->add_flag("--length-norm", c.length_norm);

  auto *f0t = app.add_subcommand("f0-targets", "Balanced target f0 moments from a manifest");
  f0t->add_option("--manifest", c.manifest, "CSV path,spk_id,sex")->required();
  f0t->add_option("--out", c.out, "Targets JSON (default: stdout)");
  AddPitchOptions(f0t, c);

  auto *pa = app.add_subcommand("protect-audio", "Impose target f0 moments on a WAV file");
  pa->add_option("--in", c.in, "Input WAV (16-bit PCM mono)")->required();
  pa->add_option("--out", c.out, "Output WAV")->required();
  pa->add_option("--targets", c.targets, "Targets JSON from f0-targets")->required();
  pa->add_option("--report", c.report, "Report JSON (default: stdout)");
  pa->add_option("--min-source-sigma", c.min_source_sigma)->capture_default_str();
  pa->add_option("--floor", c.floor_hz, "Lowest output f0, Hz")->capture_default_str();
  AddPitchOptions(pa, c);

  auto *att = app.add_subcommand("attack", "Train a sex classifier and evaluate it");
  att->add_option("--train", c.train, "Original attacker training CSV")->required();
  att->add_option("--test", c.test, "Original test CSV")->required();
  att->add_option("--protection", c.protection)
      ->check(CLI::IsMember({"none", "proposed", "global"}))
      ->capture_default_str();
  att->add_option("--attack", c.attack)
      ->check(CLI::IsMember({"ignorant", "semi_informed"}))
      ->capture_default_str();
  att->add_option("--model", c.model, "Flow model for --protection proposed");
  att->add_option("--out", c.out, "Report JSON (default: stdout)");
  att->add_option("--ece-out", c.ece_out, "ECE profile CSV");
  att->add_flag("--length-norm", c.length_norm);

  auto *asv = app.add_subcommand("asv", "Cosine-scored verification trials");
  asv->add_option("--in", c.in, "Embedding CSV")->required();
  asv->add_option("--condition", c.condition)
      ->check(CLI::IsMember({"F", "M", "FM"}))
      ->capture_default_str();
  asv->add_option("--out", c.out, "Report JSON (default: stdout)");
  asv->add_flag("--length-norm", c.length_norm);

  auto *sim = app.add_subcommand("simmat", "Speaker log-similarity matrix");
  sim->add_option("--in", c.in, "Embedding CSV")->required();
  sim->add_option("--out", c.out, "Output prefix; writes PREFIX.csv and PREFIX.pgm")->required();
  sim->add_flag("--length-norm", c.length_norm);

  auto *exp = app.add_subcommand("experiment", "Run the full evaluation and write a bundle");
  exp->add_option("--config", c.config, "Config file or 'default'")->required();
  exp->add_option("--out", c.out, "Bundle directory")->required();
  exp->add_option("--set", c.overrides, "Override a config key (key=value), repeatable");

  if (argc <= 1) {
    err << app.help();
    res.exit_code = 2;
    return res;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const bool help = e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success);
    app.exit(e, out, err);
    res.exit_code = help ? 0 : 2;
    return res;
  }
  if (seed_opt->count() > 0) c.seed = seed;
  for (const CLI::App *sub : app.get_subcommands()) c.subcommand = sub->get_name();
  return res;
}

int Dispatch(const RunConfig &c, std::ostream &out, std::ostream &err) {
  try {
    if (c.subcommand == "synth-data") return SynthData(c, out);
    if (c.subcommand == "train-flow") return TrainFlowCmd(c, out);
    if (c.subcommand == "protect-emb") return ProtectEmb(c, out);
    if (c.subcommand == "f0-targets") return F0TargetsCmd(c, out);
    if (c.subcommand == "protect-audio") return ProtectAudioCmd(c, out, err);
    if (c.subcommand == "attack") return AttackCmd(c, out);
    if (c.subcommand == "asv") return AsvCmd(c, out);
    if (c.subcommand == "simmat") return SimmatCmd(c, out);
    if (c.subcommand == "experiment") return ExperimentCmd(c, out);
    err << "zevox: unknown subcommand \"" << c.subcommand << "\"\n";
    return 2;
  } catch (const UsageError &e) {
    err << "zevox: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    err << "zevox: " << e.what() << "\n";
    return 1;
  }
}

int Main(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  const ParseOutcome p = ParseArgs(argc, argv, out, err);
  if (p.exit_code) return *p.exit_code;
  return Dispatch(p.config, out, err);
}

}  // namespace zevox::cli
