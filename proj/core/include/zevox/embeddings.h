// zevox/embeddings.h

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

#ifndef ZEVOX_EMBEDDINGS_H_
#define ZEVOX_EMBEDDINGS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace zevox {

/// Speaker sex. The numeric class used everywhere downstream is fixed:
/// male -> 0, female -> 1.
enum class Sex : int { kMale = 0, kFemale = 1 };

inline int SexClass(Sex sex) { return static_cast<int>(sex); }
inline char SexLabel(Sex sex) { return sex == Sex::kMale ? 'M' : 'F'; }
std::optional<Sex> ParseSex(std::string_view label);

struct EmbeddingRecord {
  std::string utt_id;
  std::string spk_id;
  Sex sex = Sex::kMale;
  std::vector<double> vec;
};

/// Immutable, validated collection of embedding records.
///
/// Construction checks that the dimension is shared and at least 2, that all
/// components are finite, that utterance ids are unique and that each speaker
/// carries a single sex label. Violations throw DataError.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<EmbeddingRecord> records);

  const std::vector<EmbeddingRecord> &records() const { return records_; }
  const EmbeddingRecord &operator[](std::size_t i) const { return records_[i]; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::size_t dim() const { return dim_; }

  /// Sorted distinct speaker ids.
  std::vector<std::string> Speakers() const;
  /// Sorted distinct speaker ids of one sex.
  std::vector<std::string> Speakers(Sex sex) const;
  std::size_t CountRecords(Sex sex) const;
  bool HasBothSexes() const;

  /// Returns a dataset with identical metadata and vectors replaced by
  /// fn(record). The output dimension may differ from the input's.
  Dataset Transform(
      const std::function<std::vector<double>(const EmbeddingRecord &)> &fn)
      const;
  /// Keeps records whose speaker satisfies keep(spk_id).
  Dataset FilterSpeakers(
      const std::function<bool(const std::string &)> &keep) const;

 private:
  std::vector<EmbeddingRecord> records_;
  std::size_t dim_ = 0;
};

/// Parameters of the hierarchical Gaussian generator.
///
/// Class means are +shift/2 (male) and -shift/2 (female). When `shift` is
/// empty the shift is `shift_magnitude` along axis `shift_axis`. Speaker means
/// are drawn around the class mean with spread `speaker_spread`, utterances
/// around the speaker mean with spread `utterance_spread`.
struct SynthConfig {
  int dim = 16;
  int speakers_per_sex = 50;
  int utts_per_speaker = 10;
  std::vector<double> shift;
  double shift_magnitude = 5.0;
  int shift_axis = 0;
  double speaker_spread = 1.0;
  double utterance_spread = 0.5;
  std::uint64_t seed = 2024;

  /// Throws ConfigError on invalid counts, spreads or shift size.
  void Validate() const;
  /// The resolved between-sex shift vector (length dim).
  std::vector<double> ShiftVector() const;
};

/// A shift of the given magnitude spread evenly over all coordinates.
std::vector<double> DiagonalShift(int dim, double magnitude);

/// Draws a dataset. Reproducible for a fixed seed (mt19937_64 with
/// std::normal_distribution, so across standard libraries the streams may
/// differ).
Dataset GenerateSynthetic(const SynthConfig &cfg);

/// Exact log p(x|male)/p(x|female) for data drawn from `cfg`: both classes
/// share the isotropic covariance (speaker_spread^2 + utterance_spread^2) I,
/// so the ratio reduces to shift' x / variance.
double TrueLlr(const SynthConfig &cfg, std::span<const double> x);

struct ReadOptions {
  /// Scale every vector to unit Euclidean norm after parsing.
  bool length_norm = false;
};

/// CSV with header `utt_id,spk_id,sex,v0,...,v{d-1}`. Throws ParseError naming
/// the offending row (1-based data row, header excluded).
Dataset ReadEmbeddings(const std::filesystem::path &path,
                       const ReadOptions &opts = {});
Dataset ParseEmbeddings(std::string_view text, const ReadOptions &opts = {});
void WriteEmbeddings(const Dataset &ds, const std::filesystem::path &path);
std::string FormatEmbeddings(const Dataset &ds);

/// Splits speakers (separately per sex) so that round(fraction * n) speakers
/// of each sex go to the first set, at least one to each side. Throws
/// DataError when a sex has fewer than 2 speakers.
std::pair<Dataset, Dataset> SplitSpeakerDisjoint(const Dataset &ds,
                                                 double train_fraction,
                                                 std::uint64_t seed);

}  // namespace zevox

#endif  // ZEVOX_EMBEDDINGS_H_
