// src/similarity.cc


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


#include "zevox/similarity.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "parallel.h"
#include "text-util.h"
#include "zevox/errors.h"

namespace zevox {

namespace {

double Sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

}  // namespace

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

double LogSimilarityCell(std::span<const double> scores) {
  if (scores.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (double s : scores) sum += Sigmoid(s);
  return std::log(sum / static_cast<double>(scores.size()));
}

SimilarityMatrix ComputeSimilarity(const Dataset &ds, const PairScorer &scorer,
                                   int jobs) {
  SimilarityMatrix m;
  std::map<std::string, std::vector<std::size_t>> utts;
  for (std::size_t r = 0; r < ds.size(); ++r) utts[ds[r].spk_id].push_back(r);
  for (Sex sex : {Sex::kMale, Sex::kFemale})
    for (const std::string &spk : ds.Speakers(sex)) {
      m.speakers.push_back(spk);
      m.sexes.push_back(sex);
    }
  const std::size_t n = m.size();
  if (n < 2) throw DataError("metrics: similarity matrix needs at least 2 speakers");
  m.values.assign(n * n, std::numeric_limits<double>::quiet_NaN());
  m.defined.assign(n * n, false);
  std::vector<char> defined(n * n, 0);  // vector<bool> is not thread safe

  internal::ParallelFor(n, jobs, [&](std::size_t i) {
    const auto &ui = utts.at(m.speakers[i]);
    std::vector<double> scores;
    for (std::size_t j = 0; j < n; ++j) {
      const auto &uj = utts.at(m.speakers[j]);
      scores.clear();
      for (std::size_t a : ui)
        for (std::size_t b : uj)
          if (a != b) scores.push_back(scorer(ds[a].vec, ds[b].vec));
      if (scores.empty()) continue;
      m.values[i * n + j] = LogSimilarityCell(scores);
      defined[i * n + j] = 1;
    }
  });
  for (std::size_t k = 0; k < n * n; ++k) m.defined[k] = defined[k] != 0;
  return m;
}

double SexSimilarityGap(const SimilarityMatrix &m) {
  double same = 0.0, cross = 0.0;
  std::size_t n_same = 0, n_cross = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (i == j || !m.is_defined(i, j)) continue;
      if (m.sexes[i] == m.sexes[j]) {
        same += m.at(i, j);
        ++n_same;
      } else {
        cross += m.at(i, j);
        ++n_cross;
      }
    }
  if (n_same == 0 || n_cross == 0)
    throw DataError("metrics: similarity gap needs same-sex and cross-sex cells");
  return same / n_same - cross / n_cross;
}

std::string FormatSimilarityCsv(const SimilarityMatrix &m) {
  std::ostringstream os;
  os << "spk_id";
  for (const auto &s : m.speakers) os << ',' << s;
  os << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    os << m.speakers[i];
    for (std::size_t j = 0; j < m.size(); ++j)
      os << ',' << (m.is_defined(i, j) ? internal::FormatDouble(m.at(i, j)) : "nan");
    os << '\n';
  }
  return os.str();
}

std::string FormatSimilarityPgm(const SimilarityMatrix &m) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 0; k < m.values.size(); ++k)
    if (m.defined[k]) {
      lo = std::min(lo, m.values[k]);
      hi = std::max(hi, m.values[k]);
    }
  std::ostringstream os;
  os << "P2\n" << m.size() << ' ' << m.size() << "\n255\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      int level = 0;
      if (m.is_defined(i, j))
        level = hi > lo ? static_cast<int>(std::lround(255.0 * (m.at(i, j) - lo) / (hi - lo)))
                        : 128;
      os << (j ? " " : "") << level;
    }
    os << '\n';
  }
  return os.str();
}

void WriteSimilarity(const SimilarityMatrix &m, const std::filesystem::path &csv,
                     const std::filesystem::path &pgm) {
  internal::WriteTextFile(csv, FormatSimilarityCsv(m), "metrics");
  internal::WriteTextFile(pgm, FormatSimilarityPgm(m), "metrics");
}

}  // namespace zevox
