// tests/metrics-oracles.h


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


// Exhaustive reference implementations used by the metric tests and the
// acceptance binary.

#ifndef ZEVOX_TESTS_METRICS_ORACLES_H_
#define ZEVOX_TESTS_METRICS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "zevox/metrics.h"

namespace zevox::testing {

// Target posterior per trial (tar then non) from the best monotone step
// function: every split of the distinct sorted scores into contiguous groups
// is tried, groups take their empirical target rate, non-monotone fits are
// discarded, and the lowest negative log-likelihood wins.
inline std::vector<double> BruteForcePosteriors(const ScoreSet &s) {
  std::map<double, std::pair<int, int>> counts;  // score -> (tar, non)
  for (double v : s.tar) counts[v].first++;
  for (double v : s.non) counts[v].second++;
  std::vector<std::pair<int, int>> c;
  std::vector<double> keys;
  for (const auto &[k, v] : counts) {
    keys.push_back(k);
    c.push_back(v);
  }
  const int m = static_cast<int>(c.size());
  double best_nll = std::numeric_limits<double>::infinity();
  std::vector<double> best_rate;
  auto xlogy = [](double x, double y) { return x == 0 ? 0.0 : x * std::log(y); };
  for (unsigned mask = 0; mask < (1u << (m - 1)); ++mask) {
    std::vector<double> rate(m);
    double nll = 0.0, prev = -1.0;
    bool monotone = true;
    for (int i = 0; i < m;) {
      int j = i, t = 0, n = 0;
      while (true) {
        t += c[j].first;
        n += c[j].second;
        if (j == m - 1 || (mask >> j) & 1u) break;
        ++j;
      }
      const double p = static_cast<double>(t) / (t + n);
      if (p < prev) monotone = false;
      prev = p;
      nll -= xlogy(t, p) + xlogy(n, 1 - p);
      for (int k = i; k <= j; ++k) rate[k] = p;
      i = j + 1;
    }
    if (monotone && nll < best_nll - 1e-12) {
      best_nll = nll;
      best_rate = rate;
    }
  }
  std::vector<double> out;
  auto rate_of = [&](double v) {
    return best_rate[std::lower_bound(keys.begin(), keys.end(), v) - keys.begin()];
  };
  for (double v : s.tar) out.push_back(rate_of(v));
  for (double v : s.non) out.push_back(rate_of(v));
  return out;
}

// EER from a sweep over every threshold, with the lower convex hull of the
// resulting (pfa, pmiss) points intersected with pfa = pmiss.
inline double SweepHullEer(const ScoreSet &s) {
  std::vector<double> th;
  for (double v : s.tar) th.push_back(v);
  for (double v : s.non) th.push_back(v);
  th.push_back(std::numeric_limits<double>::infinity());
  std::sort(th.begin(), th.end());
  th.erase(std::unique(th.begin(), th.end()), th.end());
  std::vector<std::pair<double, double>> pts;  // (pfa, pmiss), accept if >= t
  for (double t : th) {
    double fa = 0, miss = 0;
    for (double v : s.non) fa += v >= t;
    for (double v : s.tar) miss += v < t;
    pts.push_back({fa / s.non.size(), miss / s.tar.size()});
  }
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> hull;  // lower hull, Andrew's chain
  for (const auto &p : pts) {
    while (hull.size() >= 2) {
      const auto &a = hull[hull.size() - 2], &b = hull.back();
      const double cross =
          (b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first);
      if (cross > 0) break;
      hull.pop_back();
    }
    hull.push_back(p);
  }
  for (std::size_t i = 1; i < hull.size(); ++i) {
    const auto [x0, y0] = hull[i - 1];
    const auto [x1, y1] = hull[i];
    if (x0 - y0 <= 0 && x1 - y1 >= 0) {
      const double a = (y0 - x0) / ((x1 - x0) - (y1 - y0));
      return x0 + a * (x1 - x0);
    }
  }
  return 0.5;
}

}  // namespace zevox::testing

#endif  // ZEVOX_TESTS_METRICS_ORACLES_H_
