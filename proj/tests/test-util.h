// tests/test-util.h


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


#ifndef ZEVOX_TESTS_TEST_UTIL_H_
#define ZEVOX_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "zevox/pitch.h"
#include "zevox/wav.h"

namespace zevox::testing {

inline Waveform Sine(double f0, double seconds, int rate = 16000, double amp = 0.5) {
  Waveform w;
  w.rate = rate;
  w.samples.resize(static_cast<std::size_t>(seconds * rate));
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    w.samples[i] = amp * std::sin(2.0 * std::numbers::pi * f0 * i / rate);
  return w;
}

inline Waveform Sawtooth(double f0, double seconds, int rate = 16000, double amp = 0.5) {
  Waveform w;
  w.rate = rate;
  w.samples.resize(static_cast<std::size_t>(seconds * rate));
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    const double phase = f0 * i / rate;
    w.samples[i] = amp * (2.0 * (phase - std::floor(phase)) - 1.0);
  }
  return w;
}

inline Waveform Noise(double seconds, unsigned seed, int rate = 16000) {
  Waveform w;
  w.rate = rate;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  w.samples.resize(static_cast<std::size_t>(seconds * rate));
  for (double &s : w.samples) s = u(rng);
  return w;
}

inline double Median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double MedianVoicedF0(const F0Track &t) {
  std::vector<double> f;
  for (const auto &fr : t.frames)
    if (fr.voiced) f.push_back(fr.f0);
  return Median(f);
}

inline double VoicedFraction(const F0Track &t) {
  return t.frames.empty() ? 0.0 : static_cast<double>(t.NumVoiced()) / t.frames.size();
}

// Pitch settings wide enough to measure the output of large shifts.
inline PitchConfig WidePitchConfig() {
  PitchConfig p;
  p.f0_min = 35.0;
  p.f0_max = 600.0;
  p.window = 0.060;
  return p;
}

inline double Rms(const std::vector<double> &x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / std::max<std::size_t>(1, x.size()));
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path TempDir(const std::string &name) {
  auto p = std::filesystem::temp_directory_path() / ("zevox-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string Slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void Spit(const std::filesystem::path &p, const std::string &text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace zevox::testing

#endif  // ZEVOX_TESTS_TEST_UTIL_H_
