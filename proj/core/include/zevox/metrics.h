// zevox/metrics.h


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


#ifndef ZEVOX_METRICS_H_
#define ZEVOX_METRICS_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace zevox {

/// Detection scores split by ground truth. `tar` holds scores of trials from
/// the class of interest, `non` the rest.
struct ScoreSet {
  std::vector<double> tar;
  std::vector<double> non;
};

/// Oracle-calibrated LLRs, one per trial, in the input order of each class.
/// Uses pool-adjacent-violators on the target posterior with tied scores
/// pooled first, then removes the empirical prior log-odds. A bin holding
/// only non-targets maps to -inf and one holding only targets to +inf.
/// Throws DomainError when either class is empty or a score is not finite.
ScoreSet PavLlrs(const ScoreSet &scores);

enum class EerMethod {
  kRocch,  // convex hull of the ROC, crossing with pfa = pmiss
  kNaive,  // raw ROC steps, linear interpolation at the crossing
};

/// Equal error rate in [0, 0.5] (ROCCH). Constant scores give 0.5.
double Eer(const ScoreSet &scores, EerMethod method = EerMethod::kRocch);

/// Cllr in bits of LLRs given per trial; +-inf follow the limits of
/// log2(1 + e^x).
double Cllr(const ScoreSet &llrs);
double CllrMin(const ScoreSet &scores);

struct EcePoint {
  double prior = 0.0;
  double ece_cal = 0.0;
  double ece_default = 0.0;
};

/// Uniform prior grid on [0, 1] including both endpoints.
std::vector<double> PriorGrid(std::size_t points = 2001);

/// Empirical cross-entropy of `llrs` at each prior, next to the zero-evidence
/// reference, which is the binary entropy of the prior.
std::vector<EcePoint> EceProfile(const ScoreSet &llrs,
                                 const std::vector<double> &priors);

/// Trapezoid integral of ece_default - ece_cal over the profile's priors.
double IntegrateDisclosure(const std::vector<EcePoint> &profile);

/// Expected information disclosed by the scores, in bits: PAV calibration
/// followed by IntegrateDisclosure on the default grid. Lies in
/// [0, 1 / (2 ln 2)].
double DEce(const ScoreSet &scores);

struct EvalReport {
  double eer = 0.0;
  double d_ece = 0.0;     // bits
  double cllr_min = 0.0;  // bits
  std::size_t n_tar = 0, n_non = 0;
  std::vector<EcePoint> ece_profile;
};

EvalReport Evaluate(const ScoreSet &scores, std::size_t grid_points = 2001);

/// Sample Pearson correlation; 0 when either input is constant. Throws
/// DomainError on length mismatch or fewer than 2 points.
double PearsonCorrelation(const std::vector<double> &a, const std::vector<double> &b);

/// JSON object with keys eer, d_ece_bits, cllr_min_bits, n_tar, n_non.
std::string FormatEvalReportJson(const EvalReport &report);
/// CSV `pi,ece_cal,ece_default`.
std::string FormatEceProfileCsv(const std::vector<EcePoint> &profile);

}  // namespace zevox

#endif  // ZEVOX_METRICS_H_
