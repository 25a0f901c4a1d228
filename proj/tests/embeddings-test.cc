// tests/embeddings-test.cc


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


#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "test-util.h"
#include "zevox/embeddings.h"
#include "zevox/errors.h"
#include "zevox/metrics.h"

namespace zevox {
namespace {

// Independent density: log of the isotropic Gaussian pdf written out.
double LogGauss(const std::vector<double> &x, const std::vector<double> &mean, double var) {
  double q = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) q += (x[k] - mean[k]) * (x[k] - mean[k]);
  return -0.5 * x.size() * std::log(2.0 * std::numbers::pi * var) - 0.5 * q / var;
}

TEST(Synthetic, CountsAndBalance) {
  SynthConfig cfg;
  const Dataset ds = GenerateSynthetic(cfg);
  EXPECT_EQ(ds.size(), 1000u);
  EXPECT_EQ(ds.Speakers().size(), 100u);
  EXPECT_EQ(ds.CountRecords(Sex::kMale), 500u);
  EXPECT_EQ(ds.CountRecords(Sex::kFemale), 500u);
  EXPECT_EQ(ds.dim(), 16u);
}

TEST(Synthetic, DeterministicForSeed) {
  SynthConfig cfg;
  cfg.speakers_per_sex = 3;
  EXPECT_EQ(FormatEmbeddings(GenerateSynthetic(cfg)), FormatEmbeddings(GenerateSynthetic(cfg)));
  SynthConfig other = cfg;
  other.seed = cfg.seed + 1;
  EXPECT_NE(FormatEmbeddings(GenerateSynthetic(cfg)), FormatEmbeddings(GenerateSynthetic(other)));
}

TEST(Synthetic, TrueLlrZeroShift) {
  SynthConfig cfg;
  cfg.shift_magnitude = 0.0;
  for (const auto &r : GenerateSynthetic(cfg).records()) EXPECT_EQ(TrueLlr(cfg, r.vec), 0.0);
}

TEST(Synthetic, TrueLlrTwoDimensionalExample) {
  SynthConfig cfg;
  cfg.dim = 2;
  cfg.shift = {4.0, 0.0};
  cfg.speaker_spread = 1.0;
  cfg.utterance_spread = 1.0;
  const std::vector<double> x{0.7, -3.0};
  EXPECT_NEAR(TrueLlr(cfg, x), 2.0 * 0.7, 1e-15);
}

TEST(Synthetic, TrueLlrMatchesDensityRatio) {
  SynthConfig cfg;
  cfg.dim = 5;
  cfg.shift = {1.0, -2.0, 0.5, 0.0, 3.0};
  cfg.speaker_spread = 0.8;
  cfg.utterance_spread = 0.6;
  const double var = 0.8 * 0.8 + 0.6 * 0.6;
  std::vector<double> m0(5), m1(5);
  for (int k = 0; k < 5; ++k) {
    m0[k] = 0.5 * cfg.shift[k];
    m1[k] = -0.5 * cfg.shift[k];
  }
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x(5);
    for (double &v : x) v = n(rng);
    EXPECT_NEAR(TrueLlr(cfg, x), LogGauss(x, m0, var) - LogGauss(x, m1, var), 1e-9);
  }
}

TEST(Synthetic, NoShiftBayesEerIsChance) {
  SynthConfig cfg;
  cfg.shift_magnitude = 0.0;
  const Dataset ds = GenerateSynthetic(cfg);
  ScoreSet s;
  for (const auto &r : ds.records())
    (r.sex == Sex::kFemale ? s.tar : s.non).push_back(-TrueLlr(cfg, r.vec));
  const double eer = Eer(s);
  EXPECT_GE(eer, 0.45);
  EXPECT_LE(eer, 0.55);
}

TEST(Synthetic, InvalidConfig) {
  SynthConfig cfg;
  cfg.speakers_per_sex = 0;
  EXPECT_THROW(GenerateSynthetic(cfg), ConfigError);
  cfg = {};
  cfg.utterance_spread = 0.0;
  EXPECT_THROW(GenerateSynthetic(cfg), ConfigError);
  cfg = {};
  cfg.shift = {1.0, 2.0};
  EXPECT_THROW(GenerateSynthetic(cfg), ConfigError);
}

TEST(EmbeddingIo, RoundTripIsExact) {
  SynthConfig cfg;
  cfg.speakers_per_sex = 4;
  cfg.dim = 3;
  const Dataset ds = GenerateSynthetic(cfg);
  const auto dir = testing::TempDir("emb-io");
  WriteEmbeddings(ds, dir / "a.csv");
  const Dataset back = ReadEmbeddings(dir / "a.csv");
  ASSERT_EQ(back.size(), ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(back[i].utt_id, ds[i].utt_id);
    EXPECT_EQ(back[i].spk_id, ds[i].spk_id);
    EXPECT_EQ(back[i].sex, ds[i].sex);
    EXPECT_EQ(back[i].vec, ds[i].vec);
  }
}

TEST(EmbeddingIo, UnknownSexNamesRow) {
  const std::string text =
      "utt_id,spk_id,sex,v0,v1\n"
      "u1,s1,M,0,1\n"
      "u2,s2,X,0,1\n";
  try {
    ParseEmbeddings(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("unknown sex label, row 2"), std::string::npos)
        << e.what();
  }
}

TEST(EmbeddingIo, SpeakerWithTwoSexesNamesSpeakerAndRows) {
  std::string text = "utt_id,spk_id,sex,v0,v1\n";
  for (int r = 1; r <= 9; ++r) {
    const std::string spk = (r == 3 || r == 9) ? "s1" : "s" + std::to_string(r + 10);
    const char sex = r == 9 ? 'F' : 'M';
    text += "u" + std::to_string(r) + "," + spk + "," + sex + ",0,1\n";
  }
  try {
    ParseEmbeddings(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("s1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("row 9"), std::string::npos) << msg;
  }
}

TEST(EmbeddingIo, DimensionMismatchAndDuplicates) {
  EXPECT_THROW(ParseEmbeddings("utt_id,spk_id,sex,v0,v1\nu1,s1,M,0,1\nu2,s1,M,0\n"),
               ParseError);
  EXPECT_THROW(ParseEmbeddings("utt_id,spk_id,sex,v0,v1\nu1,s1,M,0,1\nu1,s1,M,0,2\n"),
               ParseError);
}

TEST(EmbeddingIo, LengthNormOption) {
  const Dataset ds = ParseEmbeddings("utt_id,spk_id,sex,v0,v1\nu1,s1,M,3,4\n", {true});
  EXPECT_DOUBLE_EQ(ds[0].vec[0], 0.6);
  EXPECT_DOUBLE_EQ(ds[0].vec[1], 0.8);
}

TEST(Split, CountsPerSex) {
  const Dataset ds = GenerateSynthetic({});
  const auto [train, test] = SplitSpeakerDisjoint(ds, 0.8, 5);
  EXPECT_EQ(train.Speakers(Sex::kMale).size(), 40u);
  EXPECT_EQ(train.Speakers(Sex::kFemale).size(), 40u);
  EXPECT_EQ(test.Speakers(Sex::kMale).size(), 10u);
  EXPECT_EQ(test.Speakers(Sex::kFemale).size(), 10u);
  std::set<std::string> a;
  for (const auto &s : train.Speakers()) a.insert(s);
  for (const auto &s : test.Speakers()) EXPECT_EQ(a.count(s), 0u);
  EXPECT_EQ(train.size() + test.size(), ds.size());
}

TEST(Split, Deterministic) {
  const Dataset ds = GenerateSynthetic({});
  EXPECT_EQ(SplitSpeakerDisjoint(ds, 0.8, 5).second.Speakers(),
            SplitSpeakerDisjoint(ds, 0.8, 5).second.Speakers());
}

TEST(Split, Errors) {
  const Dataset one_female = ParseEmbeddings(
      "utt_id,spk_id,sex,v0,v1\nu1,m1,M,0,1\nu2,m2,M,0,1\nu3,f1,F,1,0\n");
  EXPECT_THROW(SplitSpeakerDisjoint(one_female, 0.5, 1), DataError);
  EXPECT_THROW(SplitSpeakerDisjoint(GenerateSynthetic({}), 1.0, 1), ConfigError);
}

}  // namespace
}  // namespace zevox
