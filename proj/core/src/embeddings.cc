// src/embeddings.cc

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

#include "zevox/embeddings.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <unordered_map>

#include "text-util.h"
#include "zevox/errors.h"

namespace zevox {

std::optional<Sex> ParseSex(std::string_view label) {
  if (label == "M") return Sex::kMale;
  if (label == "F") return Sex::kFemale;
  return std::nullopt;
}

Dataset::Dataset(std::vector<EmbeddingRecord> records)
    : records_(std::move(records)) {
  if (records_.empty()) return;
  dim_ = records_.front().vec.size();
  if (dim_ < 2)
    throw DataError("embeddings: dimension must be at least 2, got " +
                    std::to_string(dim_));
  std::unordered_map<std::string, std::size_t> utt_seen;
  std::unordered_map<std::string, std::size_t> spk_first;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const EmbeddingRecord &r = records_[i];
    if (r.vec.size() != dim_)
      throw DataError("embeddings: record " + r.utt_id + " has dimension " +
                      std::to_string(r.vec.size()) + ", expected " +
                      std::to_string(dim_));
    for (double v : r.vec)
      if (!std::isfinite(v))
        throw DataError("embeddings: non-finite component in " + r.utt_id);
    if (!utt_seen.emplace(r.utt_id, i).second)
      throw DataError("embeddings: duplicate utt_id " + r.utt_id);
    auto [it, inserted] = spk_first.emplace(r.spk_id, i);
    if (!inserted && records_[it->second].sex != r.sex)
      throw DataError("embeddings: speaker " + r.spk_id +
                      " has two sex labels");
  }
}

std::vector<std::string> Dataset::Speakers() const {
  std::set<std::string> s;
  for (const auto &r : records_) s.insert(r.spk_id);
  return {s.begin(), s.end()};
}

std::vector<std::string> Dataset::Speakers(Sex sex) const {
  std::set<std::string> s;
  for (const auto &r : records_)
    if (r.sex == sex) s.insert(r.spk_id);
  return {s.begin(), s.end()};
}

std::size_t Dataset::CountRecords(Sex sex) const {
  return std::count_if(records_.begin(), records_.end(),
                       [sex](const EmbeddingRecord &r) { return r.sex == sex; });
}

bool Dataset::HasBothSexes() const {
  return CountRecords(Sex::kMale) > 0 && CountRecords(Sex::kFemale) > 0;
}

Dataset Dataset::Transform(
    const std::function<std::vector<double>(const EmbeddingRecord &)> &fn)
    const {
  std::vector<EmbeddingRecord> out = records_;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].vec = fn(records_[i]);
  return Dataset(std::move(out));
}

Dataset Dataset::FilterSpeakers(
    const std::function<bool(const std::string &)> &keep) const {
  std::vector<EmbeddingRecord> out;
  for (const auto &r : records_)
    if (keep(r.spk_id)) out.push_back(r);
  return Dataset(std::move(out));
}

void SynthConfig::Validate() const {
  if (dim < 2) throw ConfigError("embeddings: dim must be >= 2");
  if (speakers_per_sex < 1)
    throw ConfigError("embeddings: speakers_per_sex must be >= 1");
  if (utts_per_speaker < 1)
    throw ConfigError("embeddings: utts_per_speaker must be >= 1");
  if (!(speaker_spread > 0.0) || !std::isfinite(speaker_spread))
    throw ConfigError("embeddings: speaker_spread must be > 0");
  if (!(utterance_spread > 0.0) || !std::isfinite(utterance_spread))
    throw ConfigError("embeddings: utterance_spread must be > 0");
  if (!shift.empty() && static_cast<int>(shift.size()) != dim)
    throw ConfigError("embeddings: shift vector has length " +
                      std::to_string(shift.size()) + ", expected " +
                      std::to_string(dim));
  if (shift.empty() && (shift_axis < 0 || shift_axis >= dim))
    throw ConfigError("embeddings: shift_axis out of range");
  if (!std::isfinite(shift_magnitude))
    throw ConfigError("embeddings: shift_magnitude must be finite");
}

std::vector<double> SynthConfig::ShiftVector() const {
  if (!shift.empty()) return shift;
  std::vector<double> s(dim, 0.0);
  s[shift_axis] = shift_magnitude;
  return s;
}

std::vector<double> DiagonalShift(int dim, double magnitude) {
  if (dim < 1) throw ConfigError("embeddings: dim must be >= 1");
  return std::vector<double>(dim, magnitude / std::sqrt(static_cast<double>(dim)));
}

namespace {

std::string PaddedId(char prefix, int k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%03d", prefix, k);
  return buf;
}

}  // namespace

Dataset GenerateSynthetic(const SynthConfig &cfg) {
  cfg.Validate();
  const std::vector<double> shift = cfg.ShiftVector();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<EmbeddingRecord> records;
  records.reserve(2 * cfg.speakers_per_sex * cfg.utts_per_speaker);
  for (Sex sex : {Sex::kMale, Sex::kFemale}) {
    const double sign = sex == Sex::kMale ? 0.5 : -0.5;
    const char prefix = sex == Sex::kMale ? 'm' : 'f';
    for (int s = 0; s < cfg.speakers_per_sex; ++s) {
      std::vector<double> spk_mean(cfg.dim);
      for (int k = 0; k < cfg.dim; ++k)
        spk_mean[k] = sign * shift[k] + cfg.speaker_spread * normal(rng);
      const std::string spk_id = PaddedId(prefix, s);
      for (int u = 0; u < cfg.utts_per_speaker; ++u) {
        EmbeddingRecord r;
        r.spk_id = spk_id;
        r.utt_id = spk_id + "_" + PaddedId('u', u);
        r.sex = sex;
        r.vec.resize(cfg.dim);
        for (int k = 0; k < cfg.dim; ++k)
          r.vec[k] = spk_mean[k] + cfg.utterance_spread * normal(rng);
        records.push_back(std::move(r));
      }
    }
  }
  return Dataset(std::move(records));
}

double TrueLlr(const SynthConfig &cfg, std::span<const double> x) {
  const std::vector<double> shift = cfg.ShiftVector();
  if (x.size() != shift.size())
    throw DomainError("embeddings: TrueLlr dimension mismatch");
  const double var = cfg.speaker_spread * cfg.speaker_spread +
                     cfg.utterance_spread * cfg.utterance_spread;
  double dot = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) dot += shift[k] * x[k];
  return dot / var;
}

Dataset ParseEmbeddings(std::string_view text, const ReadOptions &opts) {
  using internal::SplitFields;
  auto lines = internal::SplitLines(text);
  if (lines.empty() || lines.front().empty())
    throw ParseError("embeddings: missing header");
  auto header = SplitFields(lines.front());
  if (header.size() < 5 || header[0] != "utt_id" || header[1] != "spk_id" ||
      header[2] != "sex")
    throw ParseError(
        "embeddings: header must be utt_id,spk_id,sex,v0,...,v{d-1} with d >= 2");
  const std::size_t dim = header.size() - 3;
  for (std::size_t k = 0; k < dim; ++k)
    if (header[3 + k] != "v" + std::to_string(k))
      throw ParseError("embeddings: header column " + std::to_string(3 + k) +
                       " must be v" + std::to_string(k));

  std::vector<EmbeddingRecord> records;
  std::unordered_map<std::string, std::size_t> utt_row;
  std::unordered_map<std::string, std::pair<Sex, std::size_t>> spk_row;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const std::size_t row = li;  // data rows are 1-based, header excluded
    const std::string where = ", row " + std::to_string(row);
    auto fields = SplitFields(lines[li]);
    if (fields.size() != dim + 3)
      throw ParseError("embeddings: dimension mismatch: expected " +
                       std::to_string(dim) + " components, got " +
                       std::to_string(fields.size() < 3 ? 0 : fields.size() - 3) +
                       where);
    EmbeddingRecord r;
    r.utt_id = std::string(fields[0]);
    r.spk_id = std::string(fields[1]);
    if (r.utt_id.empty() || r.spk_id.empty())
      throw ParseError("embeddings: empty utt_id or spk_id" + where);
    auto sex = ParseSex(fields[2]);
    if (!sex) throw ParseError("embeddings: unknown sex label, row " +
                               std::to_string(row));
    r.sex = *sex;
    r.vec.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      auto v = internal::ParseDouble(fields[3 + k]);
      if (!v || !std::isfinite(*v))
        throw ParseError("embeddings: bad value in column v" +
                         std::to_string(k) + where);
      r.vec[k] = *v;
    }
    auto [uit, ufresh] = utt_row.emplace(r.utt_id, row);
    if (!ufresh)
      throw ParseError("embeddings: duplicate utt_id " + r.utt_id + " in rows " +
                       std::to_string(uit->second) + " and " +
                       std::to_string(row));
    auto [sit, sfresh] = spk_row.emplace(r.spk_id, std::make_pair(r.sex, row));
    if (!sfresh && sit->second.first != r.sex)
      throw ParseError("embeddings: speaker " + r.spk_id + " labeled " +
                       SexLabel(sit->second.first) + " in row " +
                       std::to_string(sit->second.second) + " and " +
                       SexLabel(r.sex) + " in row " + std::to_string(row));
    if (opts.length_norm) {
      double norm = 0.0;
      for (double v : r.vec) norm += v * v;
      norm = std::sqrt(norm);
      if (norm > 0.0)
        for (double &v : r.vec) v /= norm;
    }
    records.push_back(std::move(r));
  }
  return Dataset(std::move(records));
}

Dataset ReadEmbeddings(const std::filesystem::path &path,
                       const ReadOptions &opts) {
  return ParseEmbeddings(internal::ReadTextFile(path, "embeddings"), opts);
}

std::string FormatEmbeddings(const Dataset &ds) {
  std::string out = "utt_id,spk_id,sex";
  for (std::size_t k = 0; k < ds.dim(); ++k) out += ",v" + std::to_string(k);
  out += '\n';
  for (const auto &r : ds.records()) {
    out += r.utt_id;
    out += ',';
    out += r.spk_id;
    out += ',';
    out += SexLabel(r.sex);
    for (double v : r.vec) {
      out += ',';
      out += internal::FormatDouble(v);
    }
    out += '\n';
  }
  return out;
}

void WriteEmbeddings(const Dataset &ds, const std::filesystem::path &path) {
  internal::WriteTextFile(path, FormatEmbeddings(ds), "embeddings");
}

std::pair<Dataset, Dataset> SplitSpeakerDisjoint(const Dataset &ds,
                                                 double train_fraction,
                                                 std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("embeddings: train_fraction must be in (0, 1)");
  std::mt19937_64 rng(seed);
  std::set<std::string> train_spk;
  for (Sex sex : {Sex::kMale, Sex::kFemale}) {
    std::vector<std::string> spk = ds.Speakers(sex);
    if (spk.size() < 2)
      throw DataError(std::string("embeddings: cannot split, fewer than 2 ") +
                      (sex == Sex::kMale ? "male" : "female") + " speakers");
    std::shuffle(spk.begin(), spk.end(), rng);
    auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(spk.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, spk.size() - 1);
    train_spk.insert(spk.begin(), spk.begin() + n_train);
  }
  auto in_train = [&](const std::string &s) { return train_spk.count(s) > 0; };
  return {ds.FilterSpeakers(in_train),
          ds.FilterSpeakers([&](const std::string &s) { return !in_train(s); })};
}

}  // namespace zevox
