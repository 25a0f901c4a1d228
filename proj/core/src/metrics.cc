// src/metrics.cc


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


#include "zevox/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "text-util.h"
#include "zevox/errors.h"

namespace zevox {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckScores(const ScoreSet &s) {
  if (s.tar.empty() || s.non.empty())
    throw DomainError("metrics: both target and non-target scores are required");
  for (double v : s.tar)
    if (!std::isfinite(v)) throw DomainError("metrics: non-finite target score");
  for (double v : s.non)
    if (!std::isfinite(v)) throw DomainError("metrics: non-finite non-target score");
}

// log(1 + e^x), exact at +-inf.
double Softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double Log2OnePlusExp(double x) { return Softplus(x) / std::numbers::ln2; }

struct Trial {
  double score;
  bool target;
  std::size_t index;
};

std::vector<Trial> SortedTrials(const ScoreSet &s) {
  std::vector<Trial> t;
  t.reserve(s.tar.size() + s.non.size());
  for (std::size_t i = 0; i < s.tar.size(); ++i) t.push_back({s.tar[i], true, i});
  for (std::size_t i = 0; i < s.non.size(); ++i) t.push_back({s.non[i], false, i});
  std::sort(t.begin(), t.end(), [](const Trial &a, const Trial &b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.target != b.target) return a.target < b.target;
    return a.index < b.index;
  });
  return t;
}

// A run of sorted trials, [begin, end), with its class counts.
struct Bin {
  std::size_t begin, end;
  std::size_t n_tar, n_non;
};

// Bins of tied scores, ascending.
std::vector<Bin> TieBins(const std::vector<Trial> &t) {
  std::vector<Bin> bins;
  for (std::size_t i = 0; i < t.size();) {
    Bin b{i, i, 0, 0};
    while (b.end < t.size() && t[b.end].score == t[i].score) {
      (t[b.end].target ? b.n_tar : b.n_non)++;
      ++b.end;
    }
    bins.push_back(b);
    i = b.end;
  }
  return bins;
}

// Pool adjacent violators of a nondecreasing target rate. Comparisons are on
// integer cross products so ties in rate never merge spuriously.
std::vector<Bin> PavBins(const std::vector<Trial> &t) {
  std::vector<Bin> stack;
  for (Bin b : TieBins(t)) {
    while (!stack.empty()) {
      const Bin &p = stack.back();
      if (p.n_tar * b.n_non <= b.n_tar * p.n_non) break;
      b = {p.begin, b.end, p.n_tar + b.n_tar, p.n_non + b.n_non};
      stack.pop_back();
    }
    stack.push_back(b);
  }
  return stack;
}

// ROC vertices (pfa, pmiss) as the threshold moves down past each bin.
double EerFromBins(const std::vector<Bin> &bins, std::size_t n_tar,
                   std::size_t n_non) {
  const double nt = static_cast<double>(n_tar), nn = static_cast<double>(n_non);
  double pfa = 0.0, pmiss = 1.0;
  std::size_t acc_tar = 0, acc_non = 0;
  for (auto it = bins.rbegin(); it != bins.rend(); ++it) {
    acc_tar += it->n_tar;
    acc_non += it->n_non;
    const double next_pfa = acc_non / nn;
    const double next_pmiss = (n_tar - acc_tar) / nt;
    if (next_pfa - next_pmiss >= 0.0) {
      const double dfa = next_pfa - pfa, dmiss = next_pmiss - pmiss;
      const double alpha = (pmiss - pfa) / (dfa - dmiss);
      return pfa + alpha * dfa;
    }
    pfa = next_pfa;
    pmiss = next_pmiss;
  }
  return 0.5;  // unreachable: the last vertex is (1, 0)
}

}  // namespace

ScoreSet PavLlrs(const ScoreSet &scores) {
  CheckScores(scores);
  const std::vector<Trial> trials = SortedTrials(scores);
  const double prior_log_odds = std::log(static_cast<double>(scores.tar.size())) -
                                std::log(static_cast<double>(scores.non.size()));
  ScoreSet out;
  out.tar.resize(scores.tar.size());
  out.non.resize(scores.non.size());
  for (const Bin &b : PavBins(trials)) {
    double llr;
    if (b.n_tar == 0) {
      llr = -kInf;
    } else if (b.n_non == 0) {
      llr = kInf;
    } else {
      llr = std::log(static_cast<double>(b.n_tar)) -
            std::log(static_cast<double>(b.n_non)) - prior_log_odds;
    }
    for (std::size_t i = b.begin; i < b.end; ++i)
      (trials[i].target ? out.tar : out.non)[trials[i].index] = llr;
  }
  return out;
}

double Eer(const ScoreSet &scores, EerMethod method) {
  CheckScores(scores);
  const std::vector<Trial> trials = SortedTrials(scores);
  const std::vector<Bin> bins =
      method == EerMethod::kRocch ? PavBins(trials) : TieBins(trials);
  return EerFromBins(bins, scores.tar.size(), scores.non.size());
}

double Cllr(const ScoreSet &llrs) {
  if (llrs.tar.empty() || llrs.non.empty())
    throw DomainError("metrics: both target and non-target LLRs are required");
  double st = 0.0, sn = 0.0;
  for (double l : llrs.tar) st += Log2OnePlusExp(-l);
  for (double l : llrs.non) sn += Log2OnePlusExp(l);
  return 0.5 * (st / llrs.tar.size() + sn / llrs.non.size());
}

double CllrMin(const ScoreSet &scores) { return Cllr(PavLlrs(scores)); }

std::vector<double> PriorGrid(std::size_t points) {
  if (points < 2) throw ConfigError("metrics: prior grid needs at least 2 points");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

std::vector<EcePoint> EceProfile(const ScoreSet &llrs,
                                 const std::vector<double> &priors) {
  if (llrs.tar.empty() || llrs.non.empty())
    throw DomainError("metrics: both target and non-target LLRs are required");
  // Distinct values with weights count / N, so the sum does not depend on
  // trial order and a constant-zero input reproduces the reference exactly.
  auto group = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::vector<std::pair<double, double>> g;
    const double n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size();) {
      std::size_t j = i;
      while (j < v.size() && v[j] == v[i]) ++j;
      g.emplace_back(v[i], (j - i) / n);
      i = j;
    }
    return g;
  };
  const auto tar = group(llrs.tar), non = group(llrs.non);
  const std::vector<std::pair<double, double>> zero{{0.0, 1.0}};
  auto ece = [](double pi, const auto &t, const auto &n) {
    if (pi <= 0.0 || pi >= 1.0) return 0.0;
    const double lo = std::log(pi) - std::log1p(-pi);
    double et = 0.0, en = 0.0;
    for (const auto &[l, w] : t) et += w * Log2OnePlusExp(-l - lo);
    for (const auto &[l, w] : n) en += w * Log2OnePlusExp(l + lo);
    return pi * et + (1.0 - pi) * en;
  };
  std::vector<EcePoint> profile;
  profile.reserve(priors.size());
  for (double pi : priors)
    profile.push_back({pi, ece(pi, tar, non), ece(pi, zero, zero)});
  return profile;
}

double IntegrateDisclosure(const std::vector<EcePoint> &profile) {
  double area = 0.0;
  for (std::size_t i = 1; i < profile.size(); ++i) {
    const double a = profile[i - 1].ece_default - profile[i - 1].ece_cal;
    const double b = profile[i].ece_default - profile[i].ece_cal;
    area += 0.5 * (a + b) * (profile[i].prior - profile[i - 1].prior);
  }
  return area;
}

double DEce(const ScoreSet &scores) {
  return IntegrateDisclosure(EceProfile(PavLlrs(scores), PriorGrid()));
}

EvalReport Evaluate(const ScoreSet &scores, std::size_t grid_points) {
  EvalReport r;
  const ScoreSet llrs = PavLlrs(scores);
  r.eer = Eer(scores);
  r.cllr_min = Cllr(llrs);
  r.ece_profile = EceProfile(llrs, PriorGrid(grid_points));
  r.d_ece = IntegrateDisclosure(r.ece_profile);
  r.n_tar = scores.tar.size();
  r.n_non = scores.non.size();
  return r;
}

double PearsonCorrelation(const std::vector<double> &a, const std::vector<double> &b) {
  if (a.size() != b.size() || a.size() < 2)
    throw DomainError("metrics: correlation needs two equal-length series of 2+ points");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

std::string FormatEvalReportJson(const EvalReport &r) {
  nlohmann::ordered_json j;
  j["eer"] = r.eer;
  j["d_ece_bits"] = r.d_ece;
  j["cllr_min_bits"] = r.cllr_min;
  j["n_tar"] = r.n_tar;
  j["n_non"] = r.n_non;
  return j.dump(2) + "\n";
}

std::string FormatEceProfileCsv(const std::vector<EcePoint> &profile) {
  std::ostringstream os;
  os << "pi,ece_cal,ece_default\n";
  for (const EcePoint &p : profile)
    os << internal::FormatDouble(p.prior) << ',' << internal::FormatDouble(p.ece_cal)
       << ',' << internal::FormatDouble(p.ece_default) << '\n';
  return os.str();
}

}  // namespace zevox
