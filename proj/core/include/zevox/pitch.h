// zevox/pitch.h

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

#ifndef ZEVOX_PITCH_H_
#define ZEVOX_PITCH_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zevox/embeddings.h"
#include "zevox/wav.h"

namespace zevox {

struct PitchConfig {
  double f0_min = 60.0;      // Hz
  double f0_max = 400.0;     // Hz
  double window = 0.040;     // seconds, analysis frame length
  double hop = 0.010;        // seconds
  double yin_threshold = 0.15;

  /// Throws ConfigError unless 0 < f0_min < f0_max, hop > 0 and
  /// window >= 2 / f0_min.
  void Validate() const;
};

struct F0Frame {
  double f0 = 0.0;  // Hz, 0 when unvoiced
  bool voiced = false;
};

/// Framewise f0. Frame i is centered at first_time + i * hop seconds.
struct F0Track {
  double hop = 0.010;
  double first_time = 0.0;
  std::vector<F0Frame> frames;

  double TimeOf(std::size_t i) const { return first_time + hop * static_cast<double>(i); }
  /// Index of the frame whose center is nearest to t, clamped to the track.
  std::size_t FrameAt(double t) const;
  std::size_t NumVoiced() const;
};

/// YIN-style tracker: squared-difference function, cumulative-mean
/// normalization, absolute threshold with descent to the local minimum, and
/// parabolic refinement of the lag. Frames whose normalized difference never
/// drops below the threshold, or whose estimate falls outside
/// [f0_min, f0_max], are unvoiced. Throws DomainError when the waveform is
/// shorter than one window or sampled below 8 kHz.
F0Track ExtractF0(const Waveform &wf, const PitchConfig &cfg = {});

/// Population moments of the voiced frames.
struct F0Stats {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t n_voiced = 0;

  bool defined() const { return n_voiced > 0; }
};

F0Stats TrackStats(const F0Track &track);

struct UtteranceF0 {
  std::string spk_id;
  Sex sex = Sex::kMale;
  F0Stats stats;
};

struct F0Targets {
  double mu_T = 0.0;     // Hz
  double sigma_T = 0.0;  // Hz
  double male_mean = 0.0, male_std = 0.0;
  double female_mean = 0.0, female_std = 0.0;
  std::size_t male_speakers = 0, female_speakers = 0;
};

/// Speaker-balanced targets. Utterance means and stds are averaged per
/// speaker, speaker values are averaged per sex, and the targets are the
/// midpoints of the male and female values. Utterances without voiced frames
/// are ignored. The result does not depend on input order. Throws DataError
/// when a sex has no voiced data.
F0Targets ComputeTargets(std::span<const UtteranceF0> utterances);

struct AffineOptions {
  /// Source std at or below this value is treated as zero and the transform
  /// becomes a pure shift to mu_T.
  double min_source_sigma = 0.0;
  /// Output f0 below this floor is raised to it and counted.
  double floor_hz = 40.0;
  /// Use these source moments instead of the track's own (for per-speaker
  /// normalization).
  std::optional<F0Stats> source_override;
};

struct AffineResult {
  F0Track track;
  F0Stats source;
  std::size_t clamped_frames = 0;
  bool shift_only = false;
  /// No voiced frames: the track is returned unchanged.
  bool passthrough = false;
};

/// Voiced frames: f0' = mu_T + (f0 - mu_u) * sigma_T / sigma_u. Unvoiced
/// frames are copied bit for bit.
AffineResult AffineProtect(const F0Track &track, const F0Targets &targets,
                           const AffineOptions &opts = {});

/// CSV `time_s,f0_hz,voiced` with voiced in {0,1}.
std::string FormatF0Track(const F0Track &track);
F0Track ParseF0Track(std::string_view text);
void WriteF0Track(const F0Track &track, const std::filesystem::path &path);
F0Track ReadF0Track(const std::filesystem::path &path);

std::string FormatTargetsJson(const F0Targets &targets);
F0Targets ParseTargetsJson(std::string_view text);
F0Targets ReadTargetsJson(const std::filesystem::path &path);

/// One manifest row: `path,spk_id,sex`.
struct ManifestEntry {
  std::filesystem::path path;
  std::string spk_id;
  Sex sex = Sex::kMale;
};

/// Relative paths are resolved against the manifest's directory.
std::vector<ManifestEntry> ReadManifest(const std::filesystem::path &path);

/// Targets from a manifest. Entries ending in .csv are read as f0 track CSVs,
/// anything else as WAV audio passed through ExtractF0.
F0Targets TargetsFromManifest(std::span<const ManifestEntry> entries,
                              const PitchConfig &cfg = {});

}  // namespace zevox

#endif  // ZEVOX_PITCH_H_
