// src/attacker.cc


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


#include <cmath>

#include <Eigen/Dense>

#include "zevox/errors.h"
#include "zevox/harness.h"

namespace zevox {

namespace {

double Softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

}  // namespace

void AttackerConfig::Validate() const {
  if (iterations < 1) throw ConfigError("harness: attacker iterations must be >= 1");
  if (!(learning_rate > 0)) throw ConfigError("harness: attacker learning rate must be > 0");
  if (!(l2 >= 0)) throw ConfigError("harness: attacker l2 must be >= 0");
}

Attacker Attacker::Train(const Dataset &train, const AttackerConfig &cfg) {
  cfg.Validate();
  if (!train.HasBothSexes())
    throw DataError("harness: attacker training data must contain both sexes");
  const std::size_t n = train.size(), d = train.dim();
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);  // +1 female, -1 male
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) x(i, k) = train[i].vec[k];
    y(i) = train[i].sex == Sex::kFemale ? 1.0 : -1.0;
  }

  Attacker a;
  a.mean_.resize(d);
  a.scale_.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double m = x.col(k).mean();
    const double sd = std::sqrt((x.col(k).array() - m).square().mean());
    a.mean_[k] = m;
    a.scale_[k] = sd < 1e-12 ? 1.0 : sd;
    x.col(k) = (x.col(k).array() - m) / a.scale_[k];
  }

  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double b = 0.0;
  auto loss = [&](const Eigen::VectorXd &margin) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += Softplus(-margin(i));
    return s / n + 0.5 * cfg.l2 * w.squaredNorm();
  };
  for (int it = 0; it < cfg.iterations; ++it) {
    const Eigen::VectorXd f = (x * w).array() + b;
    const Eigen::VectorXd margin = y.cwiseProduct(f);
    a.loss_.push_back(loss(margin));
    // d/df softplus(-y f) = -y sigmoid(-y f)
    Eigen::VectorXd g(n);
    for (std::size_t i = 0; i < n; ++i) g(i) = -y(i) / (1.0 + std::exp(margin(i)));
    const Eigen::VectorXd gw = x.transpose() * g / n + cfg.l2 * w;
    const double gb = g.mean();
    w -= cfg.learning_rate * gw;
    b -= cfg.learning_rate * gb;
  }
  a.loss_.push_back(loss(y.cwiseProduct(Eigen::VectorXd((x * w).array() + b))));
  a.w_.assign(w.data(), w.data() + d);
  a.b_ = b;
  return a;
}

double Attacker::Score(std::span<const double> x) const {
  if (x.size() != w_.size())
    throw DomainError("harness: attacker expects dimension " + std::to_string(w_.size()) +
                      ", got " + std::to_string(x.size()));
  double s = b_;
  for (std::size_t k = 0; k < x.size(); ++k) s += w_[k] * (x[k] - mean_[k]) / scale_[k];
  return s;
}

ScoreSet Attacker::ScoreDataset(const Dataset &ds) const {
  ScoreSet s;
  for (const auto &r : ds.records())
    (r.sex == Sex::kFemale ? s.tar : s.non).push_back(Score(r.vec));
  return s;
}

}  // namespace zevox
