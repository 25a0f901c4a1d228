// src/flow-train.cc

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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "text-util.h"
#include "zevox/errors.h"
#include "zevox/flow.h"

namespace zevox {

void TrainConfig::Validate() const {
  if (epochs < 1) throw ConfigError("flow: epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("flow: batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("flow: learning rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ConfigError("flow: moment decay rates must be in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("flow: epsilon must be > 0");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
    throw ConfigError("flow: validation_fraction must be in [0, 1)");
}

namespace {

struct Labeled {
  Eigen::MatrixXd x;
  std::vector<int> cls;
};

Labeled ToMatrix(const Dataset &ds) {
  Labeled out;
  out.x.resize(ds.dim(), ds.size());
  out.cls.resize(ds.size());
  for (std::size_t j = 0; j < ds.size(); ++j) {
    const auto &r = ds[j];
    out.x.col(j) = Eigen::Map<const Eigen::VectorXd>(r.vec.data(), r.vec.size());
    out.cls[j] = SexClass(r.sex);
  }
  return out;
}

// Adam with bias correction.
class Adam {
 public:
  Adam(std::size_t n, const TrainConfig &cfg)
      : cfg_(cfg), m_(Eigen::VectorXd::Zero(n)), v_(Eigen::VectorXd::Zero(n)) {}

  Eigen::VectorXd Step(const Eigen::VectorXd &params, const Eigen::VectorXd &grad) {
    ++t_;
    m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
    v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double c2 = 1.0 - std::pow(cfg_.beta2, t_);
    const Eigen::ArrayXd mhat = m_.array() / c1;
    const Eigen::ArrayXd vhat = v_.array() / c2;
    return params.array() - cfg_.learning_rate * mhat / (vhat.sqrt() + cfg_.epsilon);
  }

 private:
  TrainConfig cfg_;
  Eigen::VectorXd m_, v_;
  int t_ = 0;
};

}  // namespace

TrainResult TrainFlow(FlowKind kind, const Dataset &train, double delta,
                      const TrainConfig &cfg, const CouplingOptions &coupling) {
  cfg.Validate();
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ConfigError("flow: delta must be positive and finite");
  if (!train.HasBothSexes())
    throw DataError("flow: training data must contain both sexes");

  Dataset fit = train, val = train;
  bool validated_on_train = true;
  if (cfg.validation_fraction > 0.0) {
    try {
      auto split = SplitSpeakerDisjoint(train, 1.0 - cfg.validation_fraction,
                                        cfg.seed ^ 0x5a5a5a5aULL);
      fit = std::move(split.first);
      val = std::move(split.second);
      validated_on_train = false;
    } catch (const DataError &) {
      // Fewer than two speakers of a sex: keep everything for fitting.
    }
  }

  const int dim = static_cast<int>(train.dim());
  FlowModel model = kind == FlowKind::kLinear
                        ? FlowModel::Linear(dim, delta)
                        : FlowModel::Coupling(dim, delta, coupling);
  const Labeled fit_data = ToMatrix(fit);
  const Labeled val_data = ToMatrix(val);

  TrainResult result{model, {}, 0, validated_on_train};
  double best_val = model.Nll(val_data.x, val_data.cls);
  result.curve.push_back({0, model.Nll(fit_data.x, fit_data.cls), best_val});

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(fit.size());
  std::iota(order.begin(), order.end(), 0);
  Adam adam(model.num_parameters(), cfg);
  Eigen::VectorXd grad;
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t n = std::min(batch, order.size() - start);
      Eigen::MatrixXd xb(dim, n);
      std::vector<int> cb(n);
      for (std::size_t j = 0; j < n; ++j) {
        xb.col(j) = fit_data.x.col(order[start + j]);
        cb[j] = fit_data.cls[order[start + j]];
      }
      model.Nll(xb, cb, &grad);
      Eigen::VectorXd next = adam.Step(model.parameters(), grad);
      try {
        model.SetParameters(next);
      } catch (const NumericError &) {
        // A step that makes the linear map singular is skipped.
      }
    }
    const double val_nll = model.Nll(val_data.x, val_data.cls);
    result.curve.push_back({epoch, model.Nll(fit_data.x, fit_data.cls), val_nll});
    if (val_nll < best_val) {
      best_val = val_nll;
      result.model = model;
      result.best_epoch = epoch;
    }
  }
  return result;
}

std::string FormatTrainingCurve(const std::vector<TrainingCurvePoint> &curve) {
  std::string out = "epoch,train_nll,validation_nll\n";
  for (const auto &p : curve) {
    out += std::to_string(p.epoch) + "," + internal::FormatDouble(p.train_nll) +
           "," + internal::FormatDouble(p.validation_nll) + "\n";
  }
  return out;
}

}  // namespace zevox
