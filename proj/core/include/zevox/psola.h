// zevox/psola.h

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

#ifndef ZEVOX_PSOLA_H_
#define ZEVOX_PSOLA_H_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "zevox/pitch.h"
#include "zevox/wav.h"

namespace zevox {

/// Analysis epochs: strictly increasing sample indices inside the signal.
struct PitchMarks {
  std::vector<std::size_t> positions;
  std::vector<bool> voiced;

  std::size_t size() const { return positions.size(); }
};

/// Spacing of marks (and of synthesis grains) in unvoiced regions, seconds.
inline constexpr double kUnvoicedMarkSpacing = 0.010;

/// Places one mark per pitch period in voiced regions, at the waveform
/// maximum within +-20% of the period predicted by the track, and uniform
/// 10 ms marks elsewhere.
PitchMarks PlaceMarks(const Waveform &wf, const F0Track &track);

/// Time-domain pitch-synchronous overlap-add. Synthesis marks advance by the
/// target period (rate / target f0) in voiced regions; each one receives a
/// Hann-windowed grain two analysis periods long, taken around the nearest
/// analysis mark. Unvoiced regions are rebuilt from their own marks, which
/// reproduces the input there. The sum is divided by the window overlap where
/// that exceeds 1/2. The output has the input's length.
///
/// Throws DomainError when marks are empty or the target voicing differs from
/// the source voicing.
Waveform PsolaResynth(const Waveform &wf, const PitchMarks &marks,
                      const F0Track &source, const F0Track &target);

struct AudioProtectConfig {
  PitchConfig pitch;
  /// Tracker jitter on a steady tone is well below this, so such inputs take
  /// the shift-only path.
  double min_source_sigma = 1.0;
  double floor_hz = 40.0;
};

struct AudioProtectReport {
  double source_mu = 0.0, source_sigma = 0.0;
  double out_mu = 0.0, out_sigma = 0.0;
  double mu_T = 0.0, sigma_T = 0.0;
  std::size_t clamped_frames = 0;
  bool passthrough = false;
  bool shift_only = false;
};

/// extract f0 -> affine transform -> place marks -> PSOLA. The output
/// moments in the report are measured by re-extracting f0 from the output.
/// All-unvoiced input is returned unchanged with passthrough set.
std::pair<Waveform, AudioProtectReport> ProtectAudio(
    const Waveform &wf, const F0Targets &targets,
    const AudioProtectConfig &cfg = {});

/// JSON object with keys source_mu, source_sigma, out_mu, out_sigma, mu_T,
/// sigma_T, clamped_frames.
std::string FormatAudioReportJson(const AudioProtectReport &report);

}  // namespace zevox

#endif  // ZEVOX_PSOLA_H_
