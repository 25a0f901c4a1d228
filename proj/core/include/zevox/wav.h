// zevox/wav.h

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

#ifndef ZEVOX_WAV_H_
#define ZEVOX_WAV_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace zevox {

/// Mono audio, samples nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int rate = 16000;

  double Duration() const {
    return static_cast<double>(samples.size()) / static_cast<double>(rate);
  }
};

/// Reads a 16-bit PCM mono RIFF/WAVE file. Samples are scaled by 1/32768.
/// Throws FormatError for stereo, compressed, non-16-bit or malformed files.
Waveform ReadWav(const std::filesystem::path &path);
Waveform ParseWav(std::span<const std::uint8_t> bytes);

/// Writes 16-bit PCM mono. Samples are rounded to the nearest step of 1/32768
/// and clipped to the int16 range.
void WriteWav(const Waveform &wf, const std::filesystem::path &path);
std::vector<std::uint8_t> EncodeWav(const Waveform &wf);

}  // namespace zevox

#endif  // ZEVOX_WAV_H_
