// src/wav.cc

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

#include "zevox/wav.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "zevox/errors.h"

namespace zevox {

namespace {

std::uint32_t U32(const std::uint8_t *p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
         (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

std::uint16_t U16(const std::uint8_t *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::vector<std::uint8_t> *out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void PutU16(std::vector<std::uint8_t> *out, std::uint16_t v) {
  out->push_back(static_cast<std::uint8_t>(v & 0xff));
  out->push_back(static_cast<std::uint8_t>(v >> 8));
}

}  // namespace

Waveform ParseWav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) throw FormatError("wav: file too short for a RIFF header");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw FormatError("wav: not a RIFF/WAVE file");

  bool have_fmt = false;
  int rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t *chunk = bytes.data() + pos;
    const std::uint32_t size = U32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size() && std::memcmp(chunk, "data", 4) != 0)
      throw FormatError("wav: chunk extends past end of file");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw FormatError("wav: fmt chunk too short");
      const std::uint8_t *f = bytes.data() + body;
      const std::uint16_t format = U16(f);
      const std::uint16_t channels = U16(f + 2);
      rate = static_cast<int>(U32(f + 4));
      const std::uint16_t bits = U16(f + 14);
      // 0xFFFE (extensible) is accepted only when it wraps plain PCM.
      bool pcm = format == 1;
      if (format == 0xFFFE && size >= 40) pcm = U16(f + 24) == 1;
      if (!pcm) throw FormatError("wav: only uncompressed PCM is supported");
      if (channels != 1)
        throw FormatError("wav: expected mono, got " + std::to_string(channels) +
                          " channels");
      if (bits != 16)
        throw FormatError("wav: expected 16-bit samples, got " + std::to_string(bits));
      if (rate <= 0) throw FormatError("wav: bad sample rate");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw FormatError("wav: data chunk before fmt chunk");
      // Some writers leave the size field unset; clamp to the file.
      const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
      Waveform wf;
      wf.rate = rate;
      wf.samples.resize(avail / 2);
      for (std::size_t i = 0; i < wf.samples.size(); ++i) {
        const auto v = static_cast<std::int16_t>(U16(bytes.data() + body + 2 * i));
        wf.samples[i] = static_cast<double>(v) / 32768.0;
      }
      return wf;
    }
    pos = body + size + (size & 1);
  }
  throw FormatError(have_fmt ? "wav: missing data chunk" : "wav: missing fmt chunk");
}

Waveform ReadWav(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("wav: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return ParseWav(bytes);
}

std::vector<std::uint8_t> EncodeWav(const Waveform &wf) {
  if (wf.rate <= 0) throw DomainError("wav: sample rate must be positive");
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(wf.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  PutU32(&out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  PutU32(&out, 16);
  PutU16(&out, 1);  // PCM
  PutU16(&out, 1);  // mono
  PutU32(&out, static_cast<std::uint32_t>(wf.rate));
  PutU32(&out, static_cast<std::uint32_t>(wf.rate) * 2);
  PutU16(&out, 2);
  PutU16(&out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  PutU32(&out, data_bytes);
  for (double s : wf.samples) {
    if (!std::isfinite(s)) throw DomainError("wav: non-finite sample");
    const double q = std::clamp(std::nearbyint(s * 32768.0), -32768.0, 32767.0);
    PutU16(&out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  return out;
}

void WriteWav(const Waveform &wf, const std::filesystem::path &path) {
  const auto bytes = EncodeWav(wf);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("wav: cannot write " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("wav: write failed for " + path.string());
}

}  // namespace zevox
