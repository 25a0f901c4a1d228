// zevox/flow.h

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

#ifndef ZEVOX_FLOW_H_
#define ZEVOX_FLOW_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zevox/embeddings.h"

namespace zevox {

/*
  Class-conditional normalizing flow for discriminant analysis.

  An invertible map f takes an embedding x to a base vector z. In the base
  space the classes are modeled as

      z_1 | C=0 ~ N(+delta/2, delta),   z_1 | C=1 ~ N(-delta/2, delta),
      z_k       ~ N(0, 1)               for k >= 2, both classes,

  so that log p(z|C=0) - log p(z|C=1) = z_1 exactly: the first base
  coordinate *is* the log-likelihood ratio of the two classes (C=0 male,
  C=1 female), and the other coordinates carry no class information.
  Protection maps x to the base space, sets z_1 to zero (or a target LLR) and
  maps back.

  Two families are provided. kLinear is z = A x + b, initialized to the
  identity. kCoupling is a stack of affine coupling blocks: each block splits
  the coordinates by a fixed permutation into a conditioning part a and a
  transformed part u, and computes

      h  = tanh(W1 a + c1)
      s  = s_max * tanh((Ws h + cs) / s_max)
      t  = Wt h + ct
      u' = u * exp(s) + t

  Blocks come in pairs sharing a permutation, with the roles of the two halves
  swapped in the second block, so every coordinate gets transformed. The
  output weights start at zero, which makes a fresh model the identity.
*/

enum class FlowKind : std::uint8_t { kLinear = 0, kCoupling = 1 };

const char *FlowKindName(FlowKind kind);
/// Accepts "linear" and "coupling"; throws ConfigError otherwise.
FlowKind ParseFlowKind(const std::string &name);

struct CouplingOptions {
  int num_blocks = 6;
  int hidden = 64;
  double scale_clamp = 3.0;
  /// Seeds the permutations and the first-layer initialization.
  std::uint64_t seed = 7;
};

/// log N(z_1; +-delta/2, delta) + sum_{k>=2} log N(z_k; 0, 1). `cls` is 0 or 1.
/// Throws DomainError for non-finite z or delta <= 0.
double BaseLogDensity(std::span<const double> z, int cls, double delta);

/// One coupling block's fixed coordinate routing.
struct CouplingRoute {
  std::vector<int> cond;   // conditioning coordinates, passed through
  std::vector<int> trans;  // transformed coordinates
};

class FlowModel {
 public:
  /// Identity linear flow.
  static FlowModel Linear(int dim, double delta);
  /// Linear flow with the given parameters. Throws NumericError when A is
  /// singular or non-finite.
  static FlowModel Linear(const Eigen::MatrixXd &a, const Eigen::VectorXd &b,
                          double delta);
  /// Coupling flow initialized to the identity map.
  static FlowModel Coupling(int dim, double delta, const CouplingOptions &opts);

  FlowKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double delta() const { return delta_; }
  int num_blocks() const { return static_cast<int>(routes_.size()); }
  int hidden() const { return hidden_; }
  double scale_clamp() const { return scale_clamp_; }
  const std::vector<CouplingRoute> &routes() const { return routes_; }

  /// Flat parameter vector. Linear: A column-major, then b. Coupling, per
  /// block: W1 (hidden x |cond|, column-major), c1, Ws (|trans| x hidden), cs,
  /// Wt (|trans| x hidden), ct.
  const Eigen::VectorXd &parameters() const { return params_; }
  /// Replaces all parameters; throws NumericError on a singular linear map or
  /// non-finite values, and DomainError on a size mismatch.
  void SetParameters(const Eigen::VectorXd &params);
  std::size_t num_parameters() const { return params_.size(); }

  struct ForwardResult {
    std::vector<double> z;
    double logdet = 0.0;  // log |det J_f(x)|
  };
  ForwardResult Forward(std::span<const double> x) const;
  std::vector<double> Inverse(std::span<const double> z) const;

  /// Column-wise forward on a d x n matrix; logdet receives one entry per
  /// column.
  Eigen::MatrixXd ForwardBatch(const Eigen::MatrixXd &x,
                               Eigen::VectorXd *logdet) const;
  Eigen::MatrixXd InverseBatch(const Eigen::MatrixXd &z) const;

  /// log p(x|C=0) / p(x|C=1), which is the first base coordinate.
  double Llr(std::span<const double> x) const;
  /// Sets the first base coordinate to target_llr and maps back.
  std::vector<double> Protect(std::span<const double> x,
                              double target_llr = 0.0) const;

  /// Mean negative log-likelihood of labeled columns:
  ///   -mean[ BaseLogDensity(f(x), c) + log|det J_f(x)| ].
  /// If grad is non-null it receives d(nll)/d(parameters). Throws NumericError
  /// naming the first sample with a non-finite term.
  double Nll(const Eigen::MatrixXd &x, std::span<const int> classes,
             Eigen::VectorXd *grad = nullptr) const;

 private:
  FlowModel() = default;
  void RefreshLinear();
  void CheckDim(std::size_t n) const;

  // Coupling helpers. Offsets index into params_.
  struct BlockLayout {
    std::size_t w1, c1, ws, cs, wt, ct, end;
  };
  BlockLayout Layout(int block) const;
  // Evaluates block `blk`'s conditioner on the conditioning rows `a`:
  // hidden activations, tanh(raw / s_max), scale s and translation t.
  void Conditioner(int blk, const Eigen::MatrixXd &a, Eigen::MatrixXd *hid,
                   Eigen::ArrayXXd *th, Eigen::MatrixXd *s,
                   Eigen::MatrixXd *t) const;

  FlowKind kind_ = FlowKind::kLinear;
  int dim_ = 0;
  double delta_ = 1.0;
  int hidden_ = 0;
  double scale_clamp_ = 0.0;
  std::vector<CouplingRoute> routes_;
  Eigen::VectorXd params_;
  // Cached for the linear kind.
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  double linear_logdet_ = 0.0;

  friend FlowModel MakeCouplingModel(int, double, int, double,
                                     std::vector<CouplingRoute>,
                                     const Eigen::VectorXd &);
};

/// Builds a coupling model with explicit routes and parameters (used by the
/// loader and by tests).
FlowModel MakeCouplingModel(int dim, double delta, int hidden,
                            double scale_clamp,
                            std::vector<CouplingRoute> routes,
                            const Eigen::VectorXd &params);

struct TrainConfig {
  int epochs = 50;
  int batch_size = 128;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 2024;
  /// Fraction of speakers held out for validation (speaker-disjoint, per sex).
  /// Zero validates on the training data.
  double validation_fraction = 0.1;

  void Validate() const;
};

struct TrainingCurvePoint {
  int epoch = 0;  // 0 is the untrained model
  double train_nll = 0.0;
  double validation_nll = 0.0;
};

struct TrainResult {
  FlowModel model;
  std::vector<TrainingCurvePoint> curve;
  int best_epoch = 0;
  /// True when the validation set is the training set (too few speakers to
  /// hold some out, or validation_fraction == 0).
  bool validated_on_train = false;
};

/// Maximum-likelihood training with Adam on mini-batches. Returns the
/// parameters with the lowest validation NLL seen, including the initial
/// ones, so the result never validates worse than the starting point.
/// Throws DataError when either sex is missing and ConfigError on bad config.
TrainResult TrainFlow(FlowKind kind, const Dataset &train, double delta,
                      const TrainConfig &cfg,
                      const CouplingOptions &coupling = {});

/// Writes the training curve as CSV `epoch,train_nll,validation_nll`.
std::string FormatTrainingCurve(const std::vector<TrainingCurvePoint> &curve);

/// Balanced mean: the average over the two sexes of the average over speakers
/// of each speaker's mean vector. Throws DataError if a sex is missing.
std::vector<double> GlobalMean(const Dataset &train);
/// Replaces every vector with `mean`.
Dataset ApplyGlobal(const Dataset &ds, std::span<const double> mean);

/// Binary model file, little-endian:
///   "ZEVF" | version u16 | kind u8 | d u32 | delta f64
///   coupling only: K u32 | h u32 | s_max f64 |
///                  per block: |cond| u32, then d u32 coordinate indices
///                  (conditioning first, then transformed)
///   number of parameters u64 | parameters f64 in parameters() order
void SaveModel(const FlowModel &model, const std::filesystem::path &path);
FlowModel LoadModel(const std::filesystem::path &path);
std::vector<std::uint8_t> SerializeModel(const FlowModel &model);
FlowModel LoadModelFromBytes(std::span<const std::uint8_t> bytes);

}  // namespace zevox

#endif  // ZEVOX_FLOW_H_
