// src/flow.cc

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

#include "zevox/flow.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "zevox/errors.h"

namespace zevox {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double LogNormal(double z, double mean, double var) {
  const double d = z - mean;
  return -0.5 * (kLog2Pi + std::log(var)) - d * d / (2.0 * var);
}

double ClassMean(int cls, double delta) {
  return cls == 0 ? 0.5 * delta : -0.5 * delta;
}

Eigen::MatrixXd GatherRows(const Eigen::MatrixXd &m, const std::vector<int> &rows) {
  Eigen::MatrixXd out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = m.row(rows[i]);
  return out;
}

void ScatterRows(const Eigen::MatrixXd &src, const std::vector<int> &rows,
                 Eigen::MatrixXd *dst) {
  for (std::size_t i = 0; i < rows.size(); ++i) dst->row(rows[i]) = src.row(i);
}

}  // namespace

const char *FlowKindName(FlowKind kind) {
  return kind == FlowKind::kLinear ? "linear" : "coupling";
}

FlowKind ParseFlowKind(const std::string &name) {
  if (name == "linear") return FlowKind::kLinear;
  if (name == "coupling") return FlowKind::kCoupling;
  throw ConfigError("flow: unknown flow kind '" + name +
                    "' (expected linear or coupling)");
}

double BaseLogDensity(std::span<const double> z, int cls, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw DomainError("flow: delta must be positive and finite");
  if (cls != 0 && cls != 1) throw DomainError("flow: class must be 0 or 1");
  if (z.empty()) throw DomainError("flow: empty base vector");
  double lp = LogNormal(z[0], ClassMean(cls, delta), delta);
  for (std::size_t k = 1; k < z.size(); ++k) lp += LogNormal(z[k], 0.0, 1.0);
  if (!std::isfinite(lp)) throw DomainError("flow: non-finite base vector");
  return lp;
}

FlowModel FlowModel::Linear(int dim, double delta) {
  return Linear(Eigen::MatrixXd::Identity(dim, dim), Eigen::VectorXd::Zero(dim),
                delta);
}

FlowModel FlowModel::Linear(const Eigen::MatrixXd &a, const Eigen::VectorXd &b,
                            double delta) {
  if (a.rows() != a.cols() || a.rows() != b.size() || a.rows() < 1)
    throw DomainError("flow: linear map must be square and match the bias");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ConfigError("flow: delta must be positive and finite");
  FlowModel m;
  m.kind_ = FlowKind::kLinear;
  m.dim_ = static_cast<int>(a.rows());
  m.delta_ = delta;
  Eigen::VectorXd p(a.size() + b.size());
  p.head(a.size()) = Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
  p.tail(b.size()) = b;
  m.SetParameters(p);
  return m;
}

FlowModel FlowModel::Coupling(int dim, double delta, const CouplingOptions &opts) {
  if (dim < 2) throw ConfigError("flow: coupling flow needs dim >= 2");
  if (opts.num_blocks < 1) throw ConfigError("flow: need at least one block");
  if (opts.hidden < 1) throw ConfigError("flow: hidden width must be >= 1");
  if (!(opts.scale_clamp > 0.0))
    throw ConfigError("flow: scale clamp must be positive");
  std::mt19937_64 rng(opts.seed);
  const int first = (dim + 1) / 2;
  std::vector<CouplingRoute> routes;
  std::vector<int> perm(dim);
  for (int b = 0; b < opts.num_blocks; ++b) {
    if (b % 2 == 0) {
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
    }
    std::vector<int> head(perm.begin(), perm.begin() + first);
    std::vector<int> tail(perm.begin() + first, perm.end());
    if (b % 2 == 0)
      routes.push_back({head, tail});
    else
      routes.push_back({tail, head});
  }
  std::size_t n = 0;
  for (const auto &r : routes) {
    const std::size_t na = r.cond.size(), nb = r.trans.size();
    n += opts.hidden * na + opts.hidden + 2 * (nb * opts.hidden + nb);
  }
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::size_t off = 0;
  for (const auto &r : routes) {
    const std::size_t na = r.cond.size(), nb = r.trans.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(na));
    for (std::size_t i = 0; i < opts.hidden * na; ++i)
      p[off + i] = scale * normal(rng);
    off += opts.hidden * na + opts.hidden + 2 * (nb * opts.hidden + nb);
  }
  return MakeCouplingModel(dim, delta, opts.hidden, opts.scale_clamp,
                           std::move(routes), p);
}

FlowModel MakeCouplingModel(int dim, double delta, int hidden, double scale_clamp,
                            std::vector<CouplingRoute> routes,
                            const Eigen::VectorXd &params) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ConfigError("flow: delta must be positive and finite");
  if (dim < 2 || hidden < 1 || !(scale_clamp > 0.0) || routes.empty())
    throw ConfigError("flow: invalid coupling shape");
  for (const auto &r : routes) {
    std::vector<int> all(r.cond);
    all.insert(all.end(), r.trans.begin(), r.trans.end());
    std::sort(all.begin(), all.end());
    if (r.cond.empty() || r.trans.empty() || static_cast<int>(all.size()) != dim)
      throw FormatError("flow: coupling route does not partition the coordinates");
    for (int k = 0; k < dim; ++k)
      if (all[k] != k)
        throw FormatError("flow: coupling route does not partition the coordinates");
  }
  FlowModel m;
  m.kind_ = FlowKind::kCoupling;
  m.dim_ = dim;
  m.delta_ = delta;
  m.hidden_ = hidden;
  m.scale_clamp_ = scale_clamp;
  m.routes_ = std::move(routes);
  m.SetParameters(params);
  return m;
}

FlowModel::BlockLayout FlowModel::Layout(int block) const {
  std::size_t off = 0;
  BlockLayout l{};
  for (int b = 0; b <= block; ++b) {
    const std::size_t na = routes_[b].cond.size(), nb = routes_[b].trans.size();
    const std::size_t h = hidden_;
    l.w1 = off;
    l.c1 = l.w1 + h * na;
    l.ws = l.c1 + h;
    l.cs = l.ws + nb * h;
    l.wt = l.cs + nb;
    l.ct = l.wt + nb * h;
    l.end = l.ct + nb;
    off = l.end;
  }
  return l;
}

void FlowModel::SetParameters(const Eigen::VectorXd &params) {
  const std::size_t expected =
      kind_ == FlowKind::kLinear
          ? static_cast<std::size_t>(dim_) * dim_ + dim_
          : Layout(num_blocks() - 1).end;
  if (static_cast<std::size_t>(params.size()) != expected)
    throw DomainError("flow: expected " + std::to_string(expected) +
                      " parameters, got " + std::to_string(params.size()));
  if (!params.allFinite()) throw NumericError("flow: non-finite parameters");
  params_ = params;
  if (kind_ == FlowKind::kLinear) RefreshLinear();
}

void FlowModel::RefreshLinear() {
  Eigen::Map<const Eigen::MatrixXd> a(params_.data(), dim_, dim_);
  lu_.compute(a);
  const Eigen::MatrixXd &lu = lu_.matrixLU();
  double logdet = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double u = std::abs(lu(i, i));
    if (!(u > 0.0)) throw NumericError("flow: singular linear map");
    logdet += std::log(u);
  }
  if (!std::isfinite(logdet)) throw NumericError("flow: singular linear map");
  linear_logdet_ = logdet;
}

void FlowModel::Conditioner(int blk, const Eigen::MatrixXd &a,
                            Eigen::MatrixXd *hid, Eigen::ArrayXXd *th,
                            Eigen::MatrixXd *s, Eigen::MatrixXd *t) const {
  const CouplingRoute &r = routes_[blk];
  const BlockLayout l = Layout(blk);
  const Eigen::Index na = r.cond.size(), nb = r.trans.size(), h = hidden_;
  Eigen::Map<const Eigen::MatrixXd> w1(params_.data() + l.w1, h, na);
  Eigen::Map<const Eigen::VectorXd> c1(params_.data() + l.c1, h);
  Eigen::Map<const Eigen::MatrixXd> ws(params_.data() + l.ws, nb, h);
  Eigen::Map<const Eigen::VectorXd> cs(params_.data() + l.cs, nb);
  Eigen::Map<const Eigen::MatrixXd> wt(params_.data() + l.wt, nb, h);
  Eigen::Map<const Eigen::VectorXd> ct(params_.data() + l.ct, nb);
  *hid = ((w1 * a).colwise() + c1).array().tanh().matrix();
  *th = (((ws * *hid).colwise() + cs).array() / scale_clamp_).tanh();
  *s = (scale_clamp_ * *th).matrix();
  *t = (wt * *hid).colwise() + ct;
}

void FlowModel::CheckDim(std::size_t n) const {
  if (n != static_cast<std::size_t>(dim_))
    throw DomainError("flow: input has dimension " + std::to_string(n) +
                      ", model expects " + std::to_string(dim_));
}

Eigen::MatrixXd FlowModel::ForwardBatch(const Eigen::MatrixXd &x,
                                        Eigen::VectorXd *logdet) const {
  CheckDim(x.rows());
  const Eigen::Index n = x.cols();
  if (kind_ == FlowKind::kLinear) {
    Eigen::Map<const Eigen::MatrixXd> a(params_.data(), dim_, dim_);
    Eigen::Map<const Eigen::VectorXd> b(params_.data() + dim_ * dim_, dim_);
    if (logdet) *logdet = Eigen::VectorXd::Constant(n, linear_logdet_);
    return (a * x).colwise() + b;
  }
  Eigen::MatrixXd y = x;
  Eigen::VectorXd ld = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd hid, s, t;
  Eigen::ArrayXXd th;
  for (int blk = 0; blk < num_blocks(); ++blk) {
    const CouplingRoute &r = routes_[blk];
    Conditioner(blk, GatherRows(y, r.cond), &hid, &th, &s, &t);
    const Eigen::MatrixXd u = GatherRows(y, r.trans);
    ScatterRows((u.array() * s.array().exp() + t.array()).matrix(), r.trans, &y);
    ld += s.colwise().sum().transpose();
  }
  if (logdet) *logdet = ld;
  return y;
}

Eigen::MatrixXd FlowModel::InverseBatch(const Eigen::MatrixXd &z) const {
  CheckDim(z.rows());
  if (kind_ == FlowKind::kLinear) {
    Eigen::Map<const Eigen::VectorXd> b(params_.data() + dim_ * dim_, dim_);
    return lu_.solve(z.colwise() - b);
  }
  Eigen::MatrixXd y = z;
  Eigen::MatrixXd hid, s, t;
  Eigen::ArrayXXd th;
  for (int blk = num_blocks() - 1; blk >= 0; --blk) {
    const CouplingRoute &r = routes_[blk];
    Conditioner(blk, GatherRows(y, r.cond), &hid, &th, &s, &t);
    const Eigen::MatrixXd u2 = GatherRows(y, r.trans);
    ScatterRows(((u2 - t).array() * (-s.array()).exp()).matrix(), r.trans, &y);
  }
  return y;
}

FlowModel::ForwardResult FlowModel::Forward(std::span<const double> x) const {
  CheckDim(x.size());
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), x.size());
  Eigen::VectorXd ld;
  Eigen::MatrixXd z = ForwardBatch(xv, &ld);
  ForwardResult r;
  r.z.assign(z.data(), z.data() + z.size());
  r.logdet = ld[0];
  return r;
}

std::vector<double> FlowModel::Inverse(std::span<const double> z) const {
  CheckDim(z.size());
  Eigen::Map<const Eigen::VectorXd> zv(z.data(), z.size());
  Eigen::MatrixXd x = InverseBatch(zv);
  return {x.data(), x.data() + x.size()};
}

double FlowModel::Llr(std::span<const double> x) const {
  return Forward(x).z[0];
}

std::vector<double> FlowModel::Protect(std::span<const double> x,
                                       double target_llr) const {
  std::vector<double> z = Forward(x).z;
  z[0] = target_llr;
  return Inverse(z);
}

double FlowModel::Nll(const Eigen::MatrixXd &x, std::span<const int> classes,
                      Eigen::VectorXd *grad) const {
  CheckDim(x.rows());
  const Eigen::Index n = x.cols();
  if (n == 0) throw DataError("flow: empty batch");
  if (static_cast<std::size_t>(n) != classes.size())
    throw DomainError("flow: batch and class list differ in length");
  const double inv_n = 1.0 / static_cast<double>(n);

  // Forward pass, caching block inputs for the gradient.
  std::vector<Eigen::MatrixXd> block_in;
  Eigen::MatrixXd z;
  Eigen::VectorXd logdet;
  if (kind_ == FlowKind::kLinear || grad == nullptr) {
    z = ForwardBatch(x, &logdet);
  } else {
    z = x;
    logdet = Eigen::VectorXd::Zero(n);
    block_in.reserve(num_blocks());
    Eigen::MatrixXd hid, s, t;
    Eigen::ArrayXXd th;
    for (int blk = 0; blk < num_blocks(); ++blk) {
      block_in.push_back(z);
      const CouplingRoute &r = routes_[blk];
      Conditioner(blk, GatherRows(z, r.cond), &hid, &th, &s, &t);
      const Eigen::MatrixXd u = GatherRows(z, r.trans);
      ScatterRows((u.array() * s.array().exp() + t.array()).matrix(), r.trans, &z);
      logdet += s.colwise().sum().transpose();
    }
  }

  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const int c = classes[j];
    if (c != 0 && c != 1) throw DomainError("flow: class must be 0 or 1");
    double lp = LogNormal(z(0, j), ClassMean(c, delta_), delta_);
    for (int k = 1; k < dim_; ++k) lp += LogNormal(z(k, j), 0.0, 1.0);
    lp += logdet[j];
    if (!std::isfinite(lp))
      throw NumericError("flow: non-finite log-likelihood at batch index " +
                         std::to_string(j));
    total += lp;
  }
  const double nll = -total * inv_n;
  if (grad == nullptr) return nll;

  // dL/dz, already scaled by 1/n.
  Eigen::MatrixXd gz = z * inv_n;
  for (Eigen::Index j = 0; j < n; ++j)
    gz(0, j) = (z(0, j) - ClassMean(classes[j], delta_)) / delta_ * inv_n;

  grad->setZero(params_.size());
  if (kind_ == FlowKind::kLinear) {
    Eigen::Map<Eigen::MatrixXd> ga(grad->data(), dim_, dim_);
    Eigen::Map<Eigen::VectorXd> gb(grad->data() + dim_ * dim_, dim_);
    ga = gz * x.transpose() - lu_.inverse().transpose();
    gb = gz.rowwise().sum();
    return nll;
  }

  Eigen::MatrixXd gy = gz;
  Eigen::MatrixXd hid, s, t;
  Eigen::ArrayXXd th;
  for (int blk = num_blocks() - 1; blk >= 0; --blk) {
    const CouplingRoute &r = routes_[blk];
    const BlockLayout l = Layout(blk);
    const Eigen::Index na = r.cond.size(), nb = r.trans.size(), h = hidden_;
    Eigen::Map<const Eigen::MatrixXd> w1(params_.data() + l.w1, h, na);
    Eigen::Map<const Eigen::MatrixXd> ws(params_.data() + l.ws, nb, h);
    Eigen::Map<const Eigen::MatrixXd> wt(params_.data() + l.wt, nb, h);
    const Eigen::MatrixXd a = GatherRows(block_in[blk], r.cond);
    const Eigen::MatrixXd u = GatherRows(block_in[blk], r.trans);
    Conditioner(blk, a, &hid, &th, &s, &t);
    const Eigen::ArrayXXd es = s.array().exp();

    const Eigen::ArrayXXd g_u2 = GatherRows(gy, r.trans).array();
    const Eigen::MatrixXd g_a_out = GatherRows(gy, r.cond);
    // The -logdet term contributes -1/n to every scale entry.
    const Eigen::ArrayXXd g_s = g_u2 * u.array() * es - inv_n;
    const Eigen::MatrixXd g_raw = (g_s * (1.0 - th * th)).matrix();
    const Eigen::MatrixXd g_t = g_u2.matrix();

    Eigen::Map<Eigen::MatrixXd>(grad->data() + l.ws, nb, h) = g_raw * hid.transpose();
    Eigen::Map<Eigen::VectorXd>(grad->data() + l.cs, nb) = g_raw.rowwise().sum();
    Eigen::Map<Eigen::MatrixXd>(grad->data() + l.wt, nb, h) = g_t * hid.transpose();
    Eigen::Map<Eigen::VectorXd>(grad->data() + l.ct, nb) = g_t.rowwise().sum();

    const Eigen::MatrixXd g_hid = ws.transpose() * g_raw + wt.transpose() * g_t;
    const Eigen::MatrixXd g_pre =
        (g_hid.array() * (1.0 - hid.array() * hid.array())).matrix();
    Eigen::Map<Eigen::MatrixXd>(grad->data() + l.w1, h, na) = g_pre * a.transpose();
    Eigen::Map<Eigen::VectorXd>(grad->data() + l.c1, h) = g_pre.rowwise().sum();

    ScatterRows(g_a_out + w1.transpose() * g_pre, r.cond, &gy);
    ScatterRows((g_u2 * es).matrix(), r.trans, &gy);
  }
  return nll;
}

std::vector<double> GlobalMean(const Dataset &train) {
  if (!train.HasBothSexes())
    throw DataError("flow: global mean needs both sexes");
  const std::size_t d = train.dim();
  // Per-speaker sums, keyed by id so the reduction order is fixed.
  std::map<std::string, std::pair<std::vector<double>, std::size_t>> spk;
  std::map<std::string, Sex> spk_sex;
  for (const auto &r : train.records()) {
    auto &[sum, count] = spk[r.spk_id];
    if (sum.empty()) sum.assign(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) sum[k] += r.vec[k];
    ++count;
    spk_sex[r.spk_id] = r.sex;
  }
  std::vector<double> sex_sum[2] = {std::vector<double>(d, 0.0),
                                    std::vector<double>(d, 0.0)};
  std::size_t sex_count[2] = {0, 0};
  for (const auto &[id, entry] : spk) {
    const int c = SexClass(spk_sex[id]);
    for (std::size_t k = 0; k < d; ++k)
      sex_sum[c][k] += entry.first[k] / static_cast<double>(entry.second);
    ++sex_count[c];
  }
  std::vector<double> mean(d);
  for (std::size_t k = 0; k < d; ++k)
    mean[k] = 0.5 * (sex_sum[0][k] / static_cast<double>(sex_count[0]) +
                     sex_sum[1][k] / static_cast<double>(sex_count[1]));
  return mean;
}

Dataset ApplyGlobal(const Dataset &ds, std::span<const double> mean) {
  if (!ds.empty() && mean.size() != ds.dim())
    throw DomainError("flow: global mean dimension mismatch");
  std::vector<double> m(mean.begin(), mean.end());
  return ds.Transform([&m](const EmbeddingRecord &) { return m; });
}

}  // namespace zevox
