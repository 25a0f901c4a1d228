// src/psola.cc

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

#include "zevox/psola.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "zevox/errors.h"

namespace zevox {

namespace {

std::size_t UnvoicedSpacing(int rate) {
  return std::max<std::size_t>(1, std::lround(kUnvoicedMarkSpacing * rate));
}

// Voiced frame of `track` covering sample `pos`, or nullptr.
const F0Frame *VoicedAt(const F0Track &track, double pos, int rate) {
  if (track.frames.empty()) return nullptr;
  const F0Frame &f = track.frames[track.FrameAt(pos / rate)];
  return f.voiced ? &f : nullptr;
}

std::size_t ArgMax(const std::vector<double> &x, std::size_t lo, std::size_t hi) {
  std::size_t best = lo;
  for (std::size_t i = lo + 1; i <= hi; ++i)
    if (x[i] > x[best]) best = i;
  return best;
}

}  // namespace

PitchMarks PlaceMarks(const Waveform &wf, const F0Track &track) {
  PitchMarks marks;
  const std::vector<double> &x = wf.samples;
  const std::size_t n = x.size();
  const std::size_t unv = UnvoicedSpacing(wf.rate);
  double next = 0.0;
  bool last_voiced = false;
  std::size_t last = 0;

  while (next < static_cast<double>(n)) {
    const F0Frame *here = VoicedAt(track, next, wf.rate);
    if (here == nullptr) {
      const auto m = static_cast<std::size_t>(std::ceil(next));
      if (m >= n) break;
      if (!marks.positions.empty() && m <= last) {
        next = static_cast<double>(last + 1);
        continue;
      }
      marks.positions.push_back(m);
      marks.voiced.push_back(false);
      last = m;
      last_voiced = false;
      next = static_cast<double>(m + unv);
      continue;
    }
    const double period = wf.rate / here->f0;
    std::size_t lo, hi;
    if (last_voiced) {
      lo = static_cast<std::size_t>(std::ceil(last + 0.8 * period));
      hi = static_cast<std::size_t>(std::floor(last + 1.2 * period));
    } else {
      lo = static_cast<std::size_t>(std::ceil(next));
      hi = lo + static_cast<std::size_t>(std::ceil(period)) - 1;
    }
    if (!marks.positions.empty()) lo = std::max(lo, last + 1);
    if (lo >= n) break;
    hi = std::clamp(hi, lo, n - 1);
    const std::size_t m = ArgMax(x, lo, hi);
    marks.positions.push_back(m);
    marks.voiced.push_back(true);
    last = m;
    last_voiced = true;
    // Where the next period would start; its voicing decides the next branch.
    next = m + period;
    if (VoicedAt(track, next, wf.rate) == nullptr) last_voiced = false;
  }
  return marks;
}

Waveform PsolaResynth(const Waveform &wf, const PitchMarks &marks,
                      const F0Track &source, const F0Track &target) {
  if (marks.positions.empty()) throw DomainError("psola: no pitch marks");
  if (marks.voiced.size() != marks.positions.size())
    throw DomainError("psola: pitch marks and voicing flags differ in length");
  if (source.frames.size() != target.frames.size())
    throw DomainError("psola: source and target tracks differ in length");
  for (std::size_t i = 0; i < source.frames.size(); ++i)
    if (source.frames[i].voiced != target.frames[i].voiced)
      throw DomainError("psola: target voicing differs from source at frame " +
                        std::to_string(i));

  const std::vector<double> &x = wf.samples;
  const std::size_t n = x.size();
  const std::size_t unv = UnvoicedSpacing(wf.rate);
  std::vector<double> out(n, 0.0), wsum(n, 0.0);

  auto grain_half = [&](std::size_t mark_index) -> std::size_t {
    const std::size_t a = marks.positions[mark_index];
    const F0Frame *f = marks.voiced[mark_index] ? VoicedAt(source, a, wf.rate) : nullptr;
    if (f == nullptr) return unv;
    return std::max<std::size_t>(1, std::lround(wf.rate / f->f0));
  };
  // Periodic Hann of length 2*half centered on src, added at dst.
  auto add_grain = [&](std::size_t src, std::size_t dst, std::size_t half) {
    const double len = 2.0 * static_cast<double>(half);
    for (std::size_t k = 0; k < 2 * half; ++k) {
      const auto s = static_cast<std::ptrdiff_t>(src + k) - static_cast<std::ptrdiff_t>(half);
      const auto d = static_cast<std::ptrdiff_t>(dst + k) - static_cast<std::ptrdiff_t>(half);
      if (s < 0 || d < 0 || s >= static_cast<std::ptrdiff_t>(n) ||
          d >= static_cast<std::ptrdiff_t>(n))
        continue;
      const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k / len);
      out[d] += w * x[s];
      wsum[d] += w;
    }
  };
  auto nearest_mark = [&](std::size_t pos) {
    auto it = std::lower_bound(marks.positions.begin(), marks.positions.end(), pos);
    if (it == marks.positions.end()) return marks.positions.size() - 1;
    std::size_t idx = it - marks.positions.begin();
    if (idx > 0 && pos - marks.positions[idx - 1] < marks.positions[idx] - pos) --idx;
    return idx;
  };

  // Target period, measured against the local epoch spacing rather than the
  // nominal source period, so small f0 estimation errors do not make the
  // synthesis marks drift away from the analysis marks.
  auto SynthesisStep = [&](std::size_t idx, double target_f0) {
    const double nominal = wf.rate / target_f0;
    const F0Frame *sf = marks.voiced[idx] ? VoicedAt(source, marks.positions[idx], wf.rate) : nullptr;
    if (sf == nullptr) return nominal;
    const double src_period = wf.rate / sf->f0;
    double spacing = 0.0;
    if (idx + 1 < marks.size() && marks.voiced[idx + 1])
      spacing = static_cast<double>(marks.positions[idx + 1] - marks.positions[idx]);
    else if (idx > 0 && marks.voiced[idx - 1])
      spacing = static_cast<double>(marks.positions[idx] - marks.positions[idx - 1]);
    if (std::abs(spacing - src_period) > 0.25 * src_period) return nominal;
    return spacing * sf->f0 / target_f0;
  };

  double t = static_cast<double>(marks.positions.front());
  while (t < static_cast<double>(n)) {
    const auto ti = static_cast<std::size_t>(std::lround(t));
    if (ti >= n) break;
    const F0Frame *tf = VoicedAt(target, static_cast<double>(ti), wf.rate);
    if (tf != nullptr) {
      const std::size_t idx = nearest_mark(ti);
      add_grain(marks.positions[idx], ti, grain_half(idx));
      t += SynthesisStep(idx, tf->f0);
      continue;
    }
    // Unvoiced target: copy the next analysis grain in place.
    auto it = std::lower_bound(marks.positions.begin(), marks.positions.end(), ti);
    if (it == marks.positions.end()) break;
    const std::size_t idx = it - marks.positions.begin();
    add_grain(marks.positions[idx], marks.positions[idx], grain_half(idx));
    t = idx + 1 < marks.size() ? static_cast<double>(marks.positions[idx + 1])
                               : static_cast<double>(marks.positions[idx] + unv);
  }

  Waveform y;
  y.rate = wf.rate;
  y.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) y.samples[i] = out[i] / std::max(wsum[i], 0.5);
  return y;
}

std::pair<Waveform, AudioProtectReport> ProtectAudio(const Waveform &wf,
                                                     const F0Targets &targets,
                                                     const AudioProtectConfig &cfg) {
  AudioProtectReport report;
  report.mu_T = targets.mu_T;
  report.sigma_T = targets.sigma_T;

  const F0Track source = ExtractF0(wf, cfg.pitch);
  const F0Stats src_stats = TrackStats(source);
  report.source_mu = src_stats.mean;
  report.source_sigma = src_stats.stddev;

  AffineOptions affine_opts;
  affine_opts.min_source_sigma = cfg.min_source_sigma;
  affine_opts.floor_hz = cfg.floor_hz;
  const AffineResult affine = AffineProtect(source, targets, affine_opts);
  report.clamped_frames = affine.clamped_frames;
  report.shift_only = affine.shift_only;
  if (affine.passthrough) {
    report.passthrough = true;
    report.out_mu = src_stats.mean;
    report.out_sigma = src_stats.stddev;
    return {wf, report};
  }

  const PitchMarks marks = PlaceMarks(wf, source);
  Waveform out = PsolaResynth(wf, marks, source, affine.track);
  const F0Stats out_stats = TrackStats(ExtractF0(out, cfg.pitch));
  report.out_mu = out_stats.mean;
  report.out_sigma = out_stats.stddev;
  return {std::move(out), report};
}

std::string FormatAudioReportJson(const AudioProtectReport &r) {
  nlohmann::ordered_json j;
  j["source_mu"] = r.source_mu;
  j["source_sigma"] = r.source_sigma;
  j["out_mu"] = r.out_mu;
  j["out_sigma"] = r.out_sigma;
  j["mu_T"] = r.mu_T;
  j["sigma_T"] = r.sigma_T;
  j["clamped_frames"] = r.clamped_frames;
  return j.dump(2) + "\n";
}

}  // namespace zevox
