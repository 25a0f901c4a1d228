// zevox/similarity.h


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


#ifndef ZEVOX_SIMILARITY_H_
#define ZEVOX_SIMILARITY_H_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "zevox/embeddings.h"

namespace zevox {

using PairScorer =
    std::function<double(std::span<const double>, std::span<const double>)>;

/// Cosine of the angle between a and b; 0 when either has zero norm.
double CosineSimilarity(std::span<const double> a, std::span<const double> b);

/// Speaker-by-speaker log-similarity. Row i follows speakers[i].
struct SimilarityMatrix {
  std::vector<std::string> speakers;
  std::vector<Sex> sexes;
  std::vector<double> values;  // row-major, NaN where undefined
  std::vector<bool> defined;

  std::size_t size() const { return speakers.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
  bool is_defined(std::size_t i, std::size_t j) const {
    return defined[i * size() + j];
  }
};

/// Cell value from the scores of all utterance pairs between two speakers:
/// log of the mean of sigmoid(score). Kept separate so the form can be
/// swapped.
double LogSimilarityCell(std::span<const double> scores);

/// Speakers are ordered males first, then females, each sorted by id. Cell
/// (i, j) pools ordered pairs of distinct utterances. A diagonal cell of a
/// speaker with one utterance has no pairs and is left undefined. Throws
/// DataError with fewer than 2 speakers. `jobs` > 1 scores rows in parallel
/// with identical results.
SimilarityMatrix ComputeSimilarity(const Dataset &ds, const PairScorer &scorer,
                                   int jobs = 1);

/// Mean of defined same-sex off-diagonal cells minus mean of cross-sex cells.
double SexSimilarityGap(const SimilarityMatrix &m);

/// CSV with a `spk_id` header column followed by one column per speaker.
/// Undefined cells are written as `nan`.
std::string FormatSimilarityCsv(const SimilarityMatrix &m);
/// Plain (P2) greyscale image, one pixel per cell, brighter is more similar.
/// Defined cells span 0..255 linearly between their min and max (all 128
/// when constant); undefined cells are 0.
std::string FormatSimilarityPgm(const SimilarityMatrix &m);
void WriteSimilarity(const SimilarityMatrix &m, const std::filesystem::path &csv,
                     const std::filesystem::path &pgm);

}  // namespace zevox

#endif  // ZEVOX_SIMILARITY_H_
