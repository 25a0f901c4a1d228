// src/pitch.cc

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

#include "zevox/pitch.h"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "text-util.h"
#include "zevox/errors.h"

namespace zevox {

void PitchConfig::Validate() const {
  if (!(f0_min > 0.0 && f0_min < f0_max) || !std::isfinite(f0_max))
    throw ConfigError("pitch: need 0 < f0_min < f0_max");
  if (!(hop > 0.0)) throw ConfigError("pitch: hop must be > 0");
  if (!(window >= 2.0 / f0_min - 1e-12))
    throw ConfigError("pitch: window must be at least two periods of f0_min");
  if (!(yin_threshold > 0.0 && yin_threshold < 1.0))
    throw ConfigError("pitch: yin_threshold must be in (0, 1)");
}

std::size_t F0Track::FrameAt(double t) const {
  if (frames.empty()) return 0;
  const double pos = std::round((t - first_time) / hop);
  if (pos <= 0.0) return 0;
  return std::min(frames.size() - 1, static_cast<std::size_t>(pos));
}

std::size_t F0Track::NumVoiced() const {
  return std::count_if(frames.begin(), frames.end(),
                       [](const F0Frame &f) { return f.voiced; });
}

F0Track ExtractF0(const Waveform &wf, const PitchConfig &cfg) {
  cfg.Validate();
  if (wf.rate < 8000)
    throw DomainError("pitch: sample rate must be at least 8 kHz");
  const std::size_t win = static_cast<std::size_t>(std::lround(cfg.window * wf.rate));
  const std::size_t hop = std::max<std::size_t>(1, std::lround(cfg.hop * wf.rate));
  if (wf.samples.size() < win)
    throw DomainError("pitch: waveform shorter than one analysis window");
  const std::size_t tau_min = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::floor(wf.rate / cfg.f0_max)));
  const std::size_t tau_max = static_cast<std::size_t>(std::ceil(wf.rate / cfg.f0_min)) + 1;
  if (tau_max + 1 >= win) throw ConfigError("pitch: window too short for f0_min");
  const std::size_t n_int = win - tau_max;  // integration length

  F0Track track;
  track.hop = static_cast<double>(hop) / wf.rate;
  track.first_time = 0.5 * static_cast<double>(win) / wf.rate;
  const std::size_t n_frames = 1 + (wf.samples.size() - win) / hop;
  track.frames.resize(n_frames);

  std::vector<double> diff(tau_max + 1), cmnd(tau_max + 1);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const double *x = wf.samples.data() + f * hop;
    double energy = 0.0;
    for (std::size_t j = 0; j < win; ++j) energy += x[j] * x[j];
    if (!(energy > 1e-12)) continue;

    diff[0] = 0.0;
    for (std::size_t tau = 1; tau <= tau_max; ++tau) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n_int; ++j) {
        const double d = x[j] - x[j + tau];
        acc += d * d;
      }
      diff[tau] = acc;
    }
    cmnd[0] = 1.0;
    double running = 0.0;
    for (std::size_t tau = 1; tau <= tau_max; ++tau) {
      running += diff[tau];
      cmnd[tau] = running > 0.0 ? diff[tau] * static_cast<double>(tau) / running : 1.0;
    }

    std::size_t best = 0;
    for (std::size_t tau = tau_min; tau < tau_max; ++tau) {
      if (cmnd[tau] < cfg.yin_threshold) {
        while (tau + 1 < tau_max && cmnd[tau + 1] < cmnd[tau]) ++tau;
        best = tau;
        break;
      }
    }
    if (best == 0) continue;

    double lag = static_cast<double>(best);
    const double a = diff[best - 1], b = diff[best], c = diff[best + 1];
    const double denom = a - 2.0 * b + c;
    if (denom > 0.0) lag += std::clamp(0.5 * (a - c) / denom, -1.0, 1.0);
    const double f0 = wf.rate / lag;
    if (f0 >= cfg.f0_min && f0 <= cfg.f0_max) track.frames[f] = {f0, true};
  }
  return track;
}

F0Stats TrackStats(const F0Track &track) {
  F0Stats s;
  double sum = 0.0;
  for (const auto &f : track.frames)
    if (f.voiced) {
      sum += f.f0;
      ++s.n_voiced;
    }
  if (s.n_voiced == 0) return s;
  s.mean = sum / static_cast<double>(s.n_voiced);
  double ss = 0.0;
  for (const auto &f : track.frames)
    if (f.voiced) ss += (f.f0 - s.mean) * (f.f0 - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(s.n_voiced));
  return s;
}

namespace {

double SortedMean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

F0Targets ComputeTargets(std::span<const UtteranceF0> utterances) {
  struct Speaker {
    Sex sex;
    std::vector<double> means, stds;
  };
  std::map<std::string, Speaker> speakers;
  for (const auto &u : utterances) {
    auto [it, fresh] = speakers.try_emplace(u.spk_id, Speaker{u.sex, {}, {}});
    if (!fresh && it->second.sex != u.sex)
      throw DataError("pitch: speaker " + u.spk_id + " has two sex labels");
    if (!u.stats.defined()) continue;
    it->second.means.push_back(u.stats.mean);
    it->second.stds.push_back(u.stats.stddev);
  }
  std::vector<double> sex_means[2], sex_stds[2];
  for (const auto &[id, spk] : speakers) {
    if (spk.means.empty()) continue;
    sex_means[SexClass(spk.sex)].push_back(SortedMean(spk.means));
    sex_stds[SexClass(spk.sex)].push_back(SortedMean(spk.stds));
  }
  if (sex_means[0].empty()) throw DataError("pitch: no voiced data for male speakers");
  if (sex_means[1].empty()) throw DataError("pitch: no voiced data for female speakers");

  F0Targets t;
  t.male_mean = SortedMean(sex_means[0]);
  t.male_std = SortedMean(sex_stds[0]);
  t.female_mean = SortedMean(sex_means[1]);
  t.female_std = SortedMean(sex_stds[1]);
  t.male_speakers = sex_means[0].size();
  t.female_speakers = sex_means[1].size();
  t.mu_T = 0.5 * (t.male_mean + t.female_mean);
  t.sigma_T = 0.5 * (t.male_std + t.female_std);
  return t;
}

AffineResult AffineProtect(const F0Track &track, const F0Targets &targets,
                           const AffineOptions &opts) {
  if (!(targets.mu_T > 0.0) || !std::isfinite(targets.mu_T) ||
      !(targets.sigma_T > 0.0) || !std::isfinite(targets.sigma_T))
    throw DomainError("pitch: targets need mu_T > 0 and sigma_T > 0");
  AffineResult r;
  r.track = track;
  r.source = opts.source_override ? *opts.source_override : TrackStats(track);
  if (!r.source.defined() || track.NumVoiced() == 0) {
    r.passthrough = true;
    return r;
  }
  r.shift_only = !(r.source.stddev > opts.min_source_sigma);
  const double scale = r.shift_only ? 1.0 : targets.sigma_T / r.source.stddev;
  for (auto &f : r.track.frames) {
    if (!f.voiced) continue;
    double v = targets.mu_T + (f.f0 - r.source.mean) * scale;
    if (v < opts.floor_hz) {
      v = opts.floor_hz;
      ++r.clamped_frames;
    }
    f.f0 = v;
  }
  return r;
}

std::string FormatF0Track(const F0Track &track) {
  std::string out = "time_s,f0_hz,voiced\n";
  for (std::size_t i = 0; i < track.frames.size(); ++i) {
    const auto &f = track.frames[i];
    out += internal::FormatDouble(track.TimeOf(i)) + "," +
           internal::FormatDouble(f.f0) + "," + (f.voiced ? "1" : "0") + "\n";
  }
  return out;
}

F0Track ParseF0Track(std::string_view text) {
  auto lines = internal::SplitLines(text);
  if (lines.empty() || internal::Trim(lines[0]) != "time_s,f0_hz,voiced")
    throw ParseError("pitch: f0 track header must be time_s,f0_hz,voiced");
  std::vector<double> times;
  F0Track track;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (internal::Trim(lines[li]).empty()) continue;
    const std::string where = ", row " + std::to_string(li);
    auto fields = internal::SplitFields(lines[li]);
    if (fields.size() != 3) throw ParseError("pitch: expected 3 fields" + where);
    auto t = internal::ParseDouble(fields[0]);
    auto f0 = internal::ParseDouble(fields[1]);
    auto voiced = internal::Trim(fields[2]);
    if (!t || !f0 || !std::isfinite(*t) || !std::isfinite(*f0) || *f0 < 0.0)
      throw ParseError("pitch: bad number" + where);
    if (voiced != "0" && voiced != "1")
      throw ParseError("pitch: voiced must be 0 or 1" + where);
    const bool is_voiced = voiced == "1";
    if (is_voiced && !(*f0 > 0.0))
      throw ParseError("pitch: voiced frame with f0 <= 0" + where);
    times.push_back(*t);
    track.frames.push_back({is_voiced ? *f0 : 0.0, is_voiced});
  }
  if (times.empty()) return track;
  track.first_time = times.front();
  if (times.size() >= 2) {
    track.hop = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(track.hop > 0.0)) throw ParseError("pitch: frame times must increase");
    for (std::size_t i = 0; i < times.size(); ++i)
      if (std::abs(times[i] - track.TimeOf(i)) > 1e-6 * track.hop + 1e-9)
        throw ParseError("pitch: frame times are not evenly spaced, row " +
                         std::to_string(i + 1));
  }
  return track;
}

void WriteF0Track(const F0Track &track, const std::filesystem::path &path) {
  internal::WriteTextFile(path, FormatF0Track(track), "pitch");
}

F0Track ReadF0Track(const std::filesystem::path &path) {
  return ParseF0Track(internal::ReadTextFile(path, "pitch"));
}

std::string FormatTargetsJson(const F0Targets &t) {
  nlohmann::ordered_json j;
  j["mu_T"] = t.mu_T;
  j["sigma_T"] = t.sigma_T;
  j["male_mean"] = t.male_mean;
  j["male_std"] = t.male_std;
  j["female_mean"] = t.female_mean;
  j["female_std"] = t.female_std;
  j["male_speakers"] = t.male_speakers;
  j["female_speakers"] = t.female_speakers;
  return j.dump(2) + "\n";
}

F0Targets ParseTargetsJson(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("pitch: bad targets JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("mu_T") || !j.contains("sigma_T") ||
      !j["mu_T"].is_number() || !j["sigma_T"].is_number())
    throw ParseError("pitch: targets JSON needs numeric mu_T and sigma_T");
  F0Targets t;
  t.mu_T = j["mu_T"].get<double>();
  t.sigma_T = j["sigma_T"].get<double>();
  t.male_mean = j.value("male_mean", 0.0);
  t.male_std = j.value("male_std", 0.0);
  t.female_mean = j.value("female_mean", 0.0);
  t.female_std = j.value("female_std", 0.0);
  t.male_speakers = j.value("male_speakers", std::size_t{0});
  t.female_speakers = j.value("female_speakers", std::size_t{0});
  return t;
}

F0Targets ReadTargetsJson(const std::filesystem::path &path) {
  return ParseTargetsJson(internal::ReadTextFile(path, "pitch"));
}

std::vector<ManifestEntry> ReadManifest(const std::filesystem::path &path) {
  const std::string text = internal::ReadTextFile(path, "pitch");
  auto lines = internal::SplitLines(text);
  if (lines.empty() || internal::Trim(lines[0]) != "path,spk_id,sex")
    throw ParseError("pitch: manifest header must be path,spk_id,sex");
  const std::filesystem::path base = path.parent_path();
  std::vector<ManifestEntry> out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (internal::Trim(lines[li]).empty()) continue;
    auto fields = internal::SplitFields(lines[li]);
    if (fields.size() != 3)
      throw ParseError("pitch: manifest row " + std::to_string(li) +
                       " needs 3 fields");
    auto sex = ParseSex(internal::Trim(fields[2]));
    if (!sex)
      throw ParseError("pitch: unknown sex label, row " + std::to_string(li));
    ManifestEntry e;
    e.path = std::filesystem::path(std::string(internal::Trim(fields[0])));
    if (e.path.is_relative()) e.path = base / e.path;
    e.spk_id = std::string(internal::Trim(fields[1]));
    e.sex = *sex;
    out.push_back(std::move(e));
  }
  return out;
}

F0Targets TargetsFromManifest(std::span<const ManifestEntry> entries,
                              const PitchConfig &cfg) {
  std::vector<UtteranceF0> utts;
  utts.reserve(entries.size());
  for (const auto &e : entries) {
    F0Track track = e.path.extension() == ".csv" ? ReadF0Track(e.path)
                                                 : ExtractF0(ReadWav(e.path), cfg);
    utts.push_back({e.spk_id, e.sex, TrackStats(track)});
  }
  return ComputeTargets(utts);
}

}  // namespace zevox
