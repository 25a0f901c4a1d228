// tests/psola-test.cc


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

#include <gtest/gtest.h>

#include "test-util.h"
#include "zevox/errors.h"
#include "zevox/psola.h"

namespace zevox {
namespace {

F0Track ConstantTarget(const F0Track &src, double f0) {
  F0Track t = src;
  for (auto &f : t.frames)
    if (f.voiced) f.f0 = f0;
  return t;
}

double MeasuredF0(const Waveform &w) {
  return testing::MedianVoicedF0(ExtractF0(w, testing::WidePitchConfig()));
}

Waveform Shift(const Waveform &in, double target_f0) {
  const F0Track src = ExtractF0(in);
  return PsolaResynth(in, PlaceMarks(in, src), src, ConstantTarget(src, target_f0));
}

TEST(Wav, RoundTripWithinOneLsb) {
  const Waveform w = testing::Sawtooth(123.0, 0.2);
  const Waveform back = ParseWav(EncodeWav(w));
  ASSERT_EQ(back.samples.size(), w.samples.size());
  EXPECT_EQ(back.rate, w.rate);
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    EXPECT_LE(std::abs(back.samples[i] - w.samples[i]), 1.0 / 32768.0);
}

TEST(Wav, RejectsStereoAndEmpty) {
  auto bytes = EncodeWav(testing::Sine(100, 0.01));
  bytes[22] = 2;  // channel count
  EXPECT_THROW(ParseWav(bytes), FormatError);
  EXPECT_THROW(ParseWav(std::vector<std::uint8_t>{}), FormatError);
  auto compressed = EncodeWav(testing::Sine(100, 0.01));
  compressed[20] = 3;  // IEEE float format tag
  EXPECT_THROW(ParseWav(compressed), FormatError);
}

TEST(Marks, SawtoothSpacing) {
  const Waveform w = testing::Sawtooth(100.0, 0.5);
  const PitchMarks m = PlaceMarks(w, ExtractF0(w));
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 1; i < m.size(); ++i)
    if (m.voiced[i] && m.voiced[i - 1]) {
      const double gap = static_cast<double>(m.positions[i] - m.positions[i - 1]);
      EXPECT_NEAR(gap, 160.0, 0.25 * 160.0);
      sum += gap;
      ++n;
    }
  ASSERT_GT(n, 10);
  EXPECT_NEAR(sum / n, 160.0, 8.0);
}

TEST(Marks, SilenceGetsUniformMarks) {
  Waveform w;
  w.samples.assign(8000, 0.0);
  const PitchMarks m = PlaceMarks(w, ExtractF0(w));
  ASSERT_EQ(m.size(), 50u);
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_EQ(m.positions[i], 160 * i);
    EXPECT_FALSE(m.voiced[i]);
  }
}

TEST(Marks, StrictlyIncreasingAndInBounds) {
  for (const Waveform &w : {testing::Noise(0.5, 3), testing::Sawtooth(230, 0.5),
                            testing::Sine(61, 0.5)}) {
    const PitchMarks m = PlaceMarks(w, ExtractF0(w));
    for (std::size_t i = 0; i < m.size(); ++i) {
      EXPECT_LT(m.positions[i], w.samples.size());
      if (i > 0) {
        EXPECT_GT(m.positions[i], m.positions[i - 1]);
      }
    }
  }
}

TEST(Psola, IdentityContour) {
  for (const Waveform &in : {testing::Sawtooth(150, 1.0), testing::Sine(200, 1.0)}) {
    const F0Track src = ExtractF0(in);
    const Waveform out = PsolaResynth(in, PlaceMarks(in, src), src, src);
    ASSERT_EQ(out.samples.size(), in.samples.size());
    const double f_in = testing::MedianVoicedF0(src);
    EXPECT_NEAR(MeasuredF0(out), f_in, 0.02 * f_in);
    // Correlation at the best lag within one period.
    const int period = static_cast<int>(std::lround(in.rate / f_in));
    double best = -1.0;
    for (int lag = -period; lag <= period; ++lag) {
      double xy = 0, xx = 0, yy = 0;
      for (std::size_t i = period; i + period < in.samples.size(); ++i) {
        const double x = in.samples[i], y = out.samples[i + lag];
        xy += x * y;
        xx += x * x;
        yy += y * y;
      }
      best = std::max(best, xy / std::sqrt(xx * yy));
    }
    EXPECT_GE(best, 0.9);
  }
}

TEST(Psola, SawtoothUp) {
  const Waveform in = testing::Sawtooth(150, 1.0);
  const Waveform out = Shift(in, 225.0);
  EXPECT_NEAR(MeasuredF0(out), 225.0, 0.03 * 225.0);
  EXPECT_EQ(out.samples.size(), in.samples.size());
}

TEST(Psola, SineDown) {
  const Waveform out = Shift(testing::Sine(200, 1.0), 100.0);
  EXPECT_NEAR(MeasuredF0(out), 100.0, 0.03 * 100.0);
}

TEST(Psola, EnergyWithinThreeDecibels) {
  for (double ratio : {0.5, 0.8, 1.25, 1.5}) {
    const Waveform in = testing::Sawtooth(160, 0.8);
    const Waveform out = Shift(in, 160 * ratio);
    const double db = 20.0 * std::log10(testing::Rms(out.samples) / testing::Rms(in.samples));
    EXPECT_LE(std::abs(db), 3.0) << "ratio " << ratio;
  }
}

TEST(Psola, Errors) {
  const Waveform in = testing::Sine(200, 0.3);
  const F0Track src = ExtractF0(in);
  EXPECT_THROW(PsolaResynth(in, PitchMarks{}, src, src), DomainError);
  F0Track flipped = src;
  flipped.frames[3].voiced = !flipped.frames[3].voiced;
  EXPECT_THROW(PsolaResynth(in, PlaceMarks(in, src), src, flipped), DomainError);
}

TEST(ProtectAudio, SteadyToneReachesTarget) {
  F0Targets t;
  t.mu_T = 167.5;
  t.sigma_T = 20.0;
  const auto [out, report] = ProtectAudio(testing::Sawtooth(120, 1.0), t);
  EXPECT_TRUE(report.shift_only);
  EXPECT_NEAR(report.out_mu, 167.5, 0.03 * 167.5);
  EXPECT_EQ(report.mu_T, t.mu_T);
  EXPECT_EQ(report.sigma_T, t.sigma_T);
  EXPECT_NEAR(report.source_mu, 120.0, 0.02 * 120.0);
}

TEST(ProtectAudio, SilencePassesThrough) {
  Waveform w;
  w.samples.assign(8000, 0.0);
  const auto [out, report] = ProtectAudio(w, {150.0, 10.0});
  EXPECT_TRUE(report.passthrough);
  EXPECT_EQ(out.samples, w.samples);
}

TEST(ProtectAudio, ReportJsonKeys) {
  AudioProtectReport r;
  r.mu_T = 1.5;
  const std::string j = FormatAudioReportJson(r);
  for (const char *k : {"source_mu", "source_sigma", "out_mu", "out_sigma", "mu_T", "sigma_T",
                        "clamped_frames"})
    EXPECT_NE(j.find(std::string("\"") + k + "\""), std::string::npos) << k;
}

}  // namespace
}  // namespace zevox
