// tests/acceptance-test.cc


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


// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are pinned here and printed with each result.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flow-oracles.h"
#include "metrics-oracles.h"
#include "test-util.h"
#include "zevox/experiment.h"
#include "zevox/harness.h"
#include "zevox/metrics.h"
#include "zevox/pitch.h"
#include "zevox/psola.h"

namespace zevox {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects named checks; the first failing one is reported.
class Checks {
 public:
  void Expect(bool ok, const std::string &what) {
    if (!ok && pass_) failure_ = what;
    pass_ = pass_ && ok;
  }
  void Note(const std::string &text) { notes_ += (notes_.empty() ? "" : "; ") + text; }
  Outcome Result() const {
    return {pass_, pass_ ? notes_ : "failed: " + failure_ + (notes_.empty() ? "" : "; " + notes_)};
  }

 private:
  bool pass_ = true;
  std::string failure_, notes_;
};

std::string Fmt(const char *f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

std::string Fmt(const char *f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a, b);
  return buf;
}

double LocalPearson(const std::vector<double> &a, const std::vector<double> &b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// 1. Flow round trip, gradients and log-determinants.
Outcome FlowCorrectness() {
  Checks c;
  std::mt19937_64 rng(101);
  double rt_lin = 0, rt_cpl = 0, ld = 0;
  for (int d : {2, 4, 8}) {
    const FlowModel lin = testing::RandomLinear(d, 10 + d);
    const FlowModel cpl = testing::RandomCoupling(d, 20 + d, 0.5);
    for (int t = 0; t < 25; ++t) {
      const auto x = testing::RandomVec(d, rng, 2.0);
      const auto xl = lin.Inverse(lin.Forward(x).z);
      const auto xc = cpl.Inverse(cpl.Forward(x).z);
      for (int k = 0; k < d; ++k) {
        rt_lin = std::max(rt_lin, std::abs(xl[k] - x[k]));
        rt_cpl = std::max(rt_cpl, std::abs(xc[k] - x[k]) / (1.0 + testing::MaxAbs(x)));
      }
      if (t < 5)
        for (const FlowModel *m : {&lin, &cpl})
          ld = std::max(ld, std::abs(m->Forward(x).logdet - testing::NumericLogDet(*m, x)));
    }
  }
  double grad = 0;
  grad = std::max(grad, testing::WorstGradientError(testing::RandomLinear(6, 1), 2));
  grad = std::max(grad, testing::WorstGradientError(testing::RandomCoupling(6, 3, 0.4), 4));
  grad = std::max(grad, testing::WorstGradientError(testing::RandomCoupling(5, 5, 0.4), 6));
  c.Expect(rt_lin <= 1e-9, "linear round trip");
  c.Expect(rt_cpl <= 1e-6, "coupling round trip");
  c.Expect(grad < 1e-4, "gradient check");
  c.Expect(ld < 1e-5, "logdet vs numeric Jacobian");
  c.Note(Fmt("round trip linear %.1e (<=1e-9), coupling rel %.1e (<=1e-6)", rt_lin, rt_cpl));
  c.Note(Fmt("grad rel err %.1e (<1e-4), logdet err %.1e (<1e-5)", grad, ld));
  return c.Result();
}

// 2. Held-out LLR correlation against the generator's exact LLR.
Outcome LlrOracle(const ExperimentConfig &cfg) {
  Checks c;
  SynthConfig sc = cfg.synth;
  sc.seed = cfg.seed;
  sc.shift = DiagonalShift(sc.dim, sc.shift_magnitude);
  const auto [train, test] = SplitSpeakerDisjoint(GenerateSynthetic(sc), cfg.train_fraction, cfg.seed + 1);
  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed + 2;
  const FlowModel m = TrainFlow(FlowKind::kLinear, train, cfg.delta, tc).model;
  std::vector<double> got, want;
  for (const auto &r : test.records()) {
    got.push_back(m.Llr(r.vec));
    want.push_back(TrueLlr(sc, r.vec));
  }
  const double r = LocalPearson(got, want);
  c.Expect(r > 0.99, "Pearson r");
  c.Note(Fmt("d=%.0f, %.0f spk/sex", sc.dim, sc.speakers_per_sex));
  c.Note(Fmt("held-out r %.5f (>0.99) on %.0f utterances", r, static_cast<double>(got.size())));
  return c.Result();
}

// 3. Attack reports from the default experiment.
Outcome ProtectionEfficacy(const ExperimentSummary &s) {
  Checks c;
  const EvalReport &none = s.attack.at("none").at("ignorant");
  const EvalReport &ign = s.attack.at("proposed").at("ignorant");
  const EvalReport &semi = s.attack.at("proposed").at("semi_informed");
  c.Expect(none.eer <= 0.05, "unprotected EER <= 5%");
  c.Expect(none.d_ece >= 0.4, "unprotected D_ECE >= 0.4");
  c.Expect(ign.eer >= 0.45, "proposed ignorant EER >= 45%");
  c.Expect(ign.d_ece <= 0.05, "proposed ignorant D_ECE <= 0.05");
  c.Expect(semi.eer >= 0.40, "proposed semi-informed EER >= 40%");
  c.Expect(semi.d_ece <= 0.1, "proposed semi-informed D_ECE <= 0.1");
  for (const char *a : {"ignorant", "semi_informed"}) {
    c.Expect(s.attack.at("global").at(a).d_ece == 0.0, std::string("global D_ECE == 0 (") + a + ")");
    c.Expect(s.attack.at("global").at(a).eer == 0.5, std::string("global EER == 0.5 (") + a + ")");
  }
  c.Note(Fmt("none EER %.3f D_ECE %.3f", none.eer, none.d_ece));
  c.Note(Fmt("proposed ignorant EER %.3f D_ECE %.4f", ign.eer, ign.d_ece));
  c.Note(Fmt("semi-informed EER %.3f D_ECE %.4f", semi.eer, semi.d_ece));
  c.Note("global D_ECE 0 exactly");
  return c.Result();
}

// 4. ASV and similarity-matrix ordering from the default experiment.
Outcome ConsistencyOrdering(const ExperimentSummary &s) {
  Checks c;
  const double prop = s.asv.at("proposed").at("F").eer;
  const double glob = s.asv.at("global").at("F").eer;
  const double g0 = s.similarity_gap.at("original");
  const double g1 = s.similarity_gap.at("proposed");
  c.Expect(glob - prop >= 0.20, "ASV F: global EER - proposed EER >= 20 points");
  c.Expect(g0 > 0, "original same-sex minus cross-sex gap > 0");
  c.Expect(std::abs(g1) <= 0.2 * g0, "gap shrinks by >= 80%");
  c.Note(Fmt("ASV F EER proposed %.3f, global %.3f", prop, glob));
  c.Note(Fmt("gap original %.4f, proposed %.4f", g0, g1));
  c.Note(Fmt("shrink %.1f%%", 100.0 * (1.0 - std::abs(g1) / g0)));
  return c.Result();
}

// 5. Toy manifest targets and exact moments after the affine transform.
Outcome F0TargetsAndTransform() {
  Checks c;
  const fs::path dir = testing::TempDir("acceptance-manifest");
  // Speaker means: M1 (100, 120) -> 110, M2 130, F1 200, F2 (220, 240) -> 230.
  // Sex means 120 and 215, midpoint 167.5.
  std::string manifest = "path,spk_id,sex\n";
  const std::vector<std::tuple<std::string, std::string, double>> utts{
      {"M1", "M", 100}, {"M1", "M", 120}, {"M2", "M", 130},
      {"F1", "F", 200}, {"F2", "F", 220}, {"F2", "F", 240}};
  int k = 0;
  for (const auto &[spk, sex, mean] : utts) {
    const std::string name = "u" + std::to_string(k++) + ".csv";
    testing::Spit(dir / name, "time_s,f0_hz,voiced\n0.02," + std::to_string(mean - 5) +
                                  ",1\n0.03,0,0\n0.04," + std::to_string(mean + 5) + ",1\n");
    manifest += name + "," + spk + "," + sex + "\n";
  }
  testing::Spit(dir / "manifest.csv", manifest);
  const F0Targets t = TargetsFromManifest(ReadManifest(dir / "manifest.csv"));
  c.Expect(t.mu_T == 167.5, "mu_T == 167.5 exactly");
  c.Note(Fmt("mu_T %.17g", t.mu_T));

  F0Targets target;
  target.mu_T = 167.5;
  target.sigma_T = 21.25;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> f0(85.0, 260.0);
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    F0Track tr;
    for (int i = 0; i < 300; ++i) {
      const bool voiced = i % 7 != 3;
      tr.frames.push_back({voiced ? f0(rng) : 0.0, voiced});
    }
    const F0Track out = AffineProtect(tr, target).track;
    double n = 0, sum = 0;
    for (const auto &fr : out.frames)
      if (fr.voiced) {
        n += 1;
        sum += fr.f0;
      }
    const double mean = sum / n;
    double ss = 0;
    for (const auto &fr : out.frames)
      if (fr.voiced) ss += (fr.f0 - mean) * (fr.f0 - mean);
    const double sd = std::sqrt(ss / n);
    worst = std::max({worst, std::abs(mean - target.mu_T) / target.mu_T,
                      std::abs(sd - target.sigma_T) / target.sigma_T});
  }
  c.Expect(worst <= 1e-9, "affine moments within 1e-9 relative");
  c.Note(Fmt("affine moment rel err %.1e (<=1e-9)", worst));
  return c.Result();
}

// 6. YIN accuracy and PSOLA contour/duration fidelity.
Outcome PitchAndPsola() {
  Checks c;
  double yin = 0;
  for (double f = 80; f <= 350; f += 10)
    for (const Waveform &w : {testing::Sine(f, 0.5), testing::Sawtooth(f, 0.5)})
      yin = std::max(yin, std::abs(testing::MedianVoicedF0(ExtractF0(w)) - f) / f);
  c.Expect(yin < 0.02, "YIN median error < 2%");

  double contour = 0, drift = 0;
  for (double f : {120.0, 200.0})
    for (bool saw : {true, false})
      for (double ratio : {0.5, 0.75, 1.0, 1.25, 1.5}) {
        const Waveform in = saw ? testing::Sawtooth(f, 1.0) : testing::Sine(f, 1.0);
        const F0Track src = ExtractF0(in);
        F0Track target = src;
        for (auto &fr : target.frames)
          if (fr.voiced) fr.f0 = f * ratio;
        const Waveform out = PsolaResynth(in, PlaceMarks(in, src), src, target);
        const double got = testing::MedianVoicedF0(ExtractF0(out, testing::WidePitchConfig()));
        contour = std::max(contour, std::abs(got - f * ratio) / (f * ratio));
        drift = std::max(drift, std::abs(static_cast<double>(out.samples.size()) -
                                         static_cast<double>(in.samples.size())) /
                                    static_cast<double>(in.samples.size()));
      }
  c.Expect(contour < 0.03, "PSOLA commanded-contour error < 3%");
  c.Expect(drift < 0.01, "duration drift < 1%");
  c.Note(Fmt("YIN worst %.2f%% over 80-350 Hz", 100 * yin));
  c.Note(Fmt("PSOLA worst contour %.2f%%, drift %.2f%% (x0.5-x1.5)", 100 * contour, 100 * drift));
  return c.Result();
}

// 7. Metric endpoints, PAV vs exhaustive search, monotone invariance.
Outcome MetricOracles() {
  Checks c;
  const double full = 1.0 / (2.0 * std::log(2.0));
  const double d0 = DEce({{0, 0, 0}, {0, 0}});
  const double d1 = DEce({{1, 2, 3}, {-1, -2}});
  const double cllr0 = Cllr({{0, 0}, {0, 0, 0}});
  c.Expect(d0 == 0.0, "D_ECE of zero LLRs == 0");
  c.Expect(std::abs(d1 - full) <= 1e-3, "D_ECE perfect separation");
  c.Expect(cllr0 == 1.0, "Cllr of zero LLRs == 1");

  std::mt19937_64 rng(77);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 6);
  int sets = 0;
  double pav = 0;
  for (int t = 0; t < 1000; ++t) {
    ScoreSet s;
    const bool ties = t % 2 == 0;
    auto draw = [&](double m) { return ties ? std::round(2 * (m + n(rng))) / 2 : m + n(rng); };
    for (int i = size(rng); i > 0; --i) s.tar.push_back(draw(0.7));
    for (int i = size(rng); i > 0; --i) s.non.push_back(draw(0.0));
    const ScoreSet l = PavLlrs(s);
    const auto p = testing::BruteForcePosteriors(s);
    const double prior = std::log(static_cast<double>(s.tar.size()) / s.non.size());
    std::size_t i = 0;
    for (const auto *side : {&l.tar, &l.non})
      for (double v : *side) pav = std::max(pav, std::abs(1.0 / (1.0 + std::exp(-(v + prior))) - p[i++]));
    ++sets;
  }
  c.Expect(pav <= 1e-12, "PAV equals brute force");

  double inv = 0;
  std::vector<double (*)(double)> maps{[](double x) { return 2 * x + 1; },
                                       [](double x) { return std::tanh(x) * 10; }};
  for (int t = 0; t < 10; ++t) {
    ScoreSet s;
    for (int i = 0; i < 80; ++i) s.tar.push_back(0.9 + n(rng));
    for (int i = 0; i < 90; ++i) s.non.push_back(n(rng));
    for (auto f : maps) {
      ScoreSet m;
      for (double v : s.tar) m.tar.push_back(f(v));
      for (double v : s.non) m.non.push_back(f(v));
      inv = std::max({inv, std::abs(Eer(m) - Eer(s)), std::abs(DEce(m) - DEce(s)),
                      std::abs(CllrMin(m) - CllrMin(s))});
    }
  }
  c.Expect(inv <= 1e-10, "monotone invariance");
  c.Note(Fmt("D_ECE endpoints %.0f and %.5f", d0, d1));
  c.Note(Fmt("Cllr(0) %.0f", cllr0));
  c.Note(Fmt("PAV max posterior diff %.1e on %.0f sets of size <= 12", pav, sets));
  c.Note(Fmt("invariance max diff %.1e (<=1e-10)", inv));
  return c.Result();
}

// 8. Bitwise-identical rerun of the default experiment.
Outcome Reproducible(const fs::path &a, const fs::path &b, double first_run_seconds) {
  Checks c;
  std::vector<fs::path> files;
  for (const auto &e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), a));
  std::size_t same = 0;
  for (const auto &f : files) same += testing::Slurp(a / f) == testing::Slurp(b / f);
  std::size_t count_b = 0;
  for (const auto &e : fs::recursive_directory_iterator(b)) count_b += e.is_regular_file();
  c.Expect(!files.empty() && same == files.size() && count_b == files.size(), "bundles identical");
  c.Expect(first_run_seconds < 120.0, "default experiment < 2 min");
  c.Note(Fmt("%.0f of %.0f files identical", same, files.size()));
  c.Note(Fmt("first run %.2f s", first_run_seconds));
  return c.Result();
}

// Not a criterion: how often criteria 2-4 hold across seeds at this data scale.
std::string SeedSweep(const ExperimentConfig &base, const fs::path &dir) {
  int c3 = 0, c4 = 0, c2 = 0, n = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ExperimentConfig cfg = base;
    cfg.seed = seed;
    const ExperimentSummary s = RunExperiment(cfg, dir / std::to_string(seed));
    c2 += s.llr_correlation.value_or(0.0) > 0.99;
    c3 += ProtectionEfficacy(s).pass;
    c4 += ConsistencyOrdering(s).pass;
    ++n;
  }
  std::ostringstream o;
  o << "seeds 1-" << n << ": criterion 2 holds " << c2 << "/" << n << ", criterion 3 " << c3
    << "/" << n << ", criterion 4 " << c4 << "/" << n;
  return o.str();
}

int RunAll() {
  using Clock = std::chrono::steady_clock;
  int failures = 0;
  auto report = [&](int id, const char *name, double limit, const std::function<Outcome()> &fn) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (limit > 0 && secs >= limit) {
      o.pass = false;
      o.detail += "; over the runtime limit";
    }
    failures += !o.pass;
    std::printf("CRITERION %d %s: %s (%s; %.2f s", id, o.pass ? "PASS" : "FAIL", name,
                o.detail.c_str(), secs);
    if (limit > 0) std::printf(", limit %.0f s", limit);
    std::printf(")\n");
    std::fflush(stdout);
  };

  const ExperimentConfig cfg = DefaultExperimentConfig();
  const fs::path dir = testing::TempDir("acceptance-experiment");
  ExperimentSummary summary;
  double first_run = 0;
  bool have_summary = false;
  std::string run_error;
  try {
    const auto t0 = Clock::now();
    summary = RunExperiment(cfg, dir / "run1");
    first_run = std::chrono::duration<double>(Clock::now() - t0).count();
    RunExperiment(cfg, dir / "run2");
    have_summary = true;
  } catch (const std::exception &e) {
    run_error = e.what();
  }
  auto needs_summary = [&](const std::function<Outcome()> &fn) {
    return [&, fn]() -> Outcome {
      if (!have_summary) return {false, "default experiment failed: " + run_error};
      return fn();
    };
  };

  report(1, "flow correctness", 30, FlowCorrectness);
  report(2, "LLR oracle", 60, [&] { return LlrOracle(cfg); });
  report(3, "protection efficacy", 0, needs_summary([&] { return ProtectionEfficacy(summary); }));
  report(4, "consistency ordering", 0, needs_summary([&] { return ConsistencyOrdering(summary); }));
  report(5, "f0 targets and transform", 0, F0TargetsAndTransform);
  report(6, "pitch and PSOLA", 60, PitchAndPsola);
  report(7, "metric oracles", 0, MetricOracles);
  report(8, "end-to-end reproducibility", 0,
         needs_summary([&] { return Reproducible(dir / "run1", dir / "run2", first_run); }));
  try {
    std::printf("INFO seed sensitivity at the default data scale: %s\n",
                SeedSweep(cfg, dir / "sweep").c_str());
  } catch (const std::exception &e) {
    std::printf("INFO seed sweep failed: %s\n", e.what());
  }
  std::printf("%s: %d of 8 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}

}  // namespace
}  // namespace zevox

int main() { return zevox::RunAll(); }
