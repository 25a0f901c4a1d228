// src/flow-io.cc

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
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "zevox/errors.h"
#include "zevox/flow.h"

namespace zevox {

namespace {

constexpr char kMagic[4] = {'Z', 'E', 'V', 'F'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint32_t kMaxDim = 1u << 16;

class ByteWriter {
 public:
  template <typename T>
  void Put(T v) {
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
      std::reverse(raw, raw + sizeof(T));
    bytes_.insert(bytes_.end(), raw, raw + sizeof(T));
  }
  void PutRaw(const char *p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  std::vector<std::uint8_t> Take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T Get(const char *what) {
    if (pos_ + sizeof(T) > bytes_.size())
      throw FormatError(std::string("flow: truncated model file while reading ") +
                        what);
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
      std::reverse(raw, raw + sizeof(T));
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, raw, sizeof(T));
    return v;
  }
  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> SerializeModel(const FlowModel &model) {
  ByteWriter w;
  w.PutRaw(kMagic, 4);
  w.Put<std::uint16_t>(kVersion);
  w.Put<std::uint8_t>(static_cast<std::uint8_t>(model.kind()));
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(model.dim()));
  w.Put<double>(model.delta());
  if (model.kind() == FlowKind::kCoupling) {
    w.Put<std::uint32_t>(static_cast<std::uint32_t>(model.num_blocks()));
    w.Put<std::uint32_t>(static_cast<std::uint32_t>(model.hidden()));
    w.Put<double>(model.scale_clamp());
    for (const auto &r : model.routes()) {
      w.Put<std::uint32_t>(static_cast<std::uint32_t>(r.cond.size()));
      for (int k : r.cond) w.Put<std::uint32_t>(static_cast<std::uint32_t>(k));
      for (int k : r.trans) w.Put<std::uint32_t>(static_cast<std::uint32_t>(k));
    }
  }
  const Eigen::VectorXd &p = model.parameters();
  w.Put<std::uint64_t>(static_cast<std::uint64_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) w.Put<double>(p[i]);
  return w.Take();
}

FlowModel LoadModelFromBytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("flow: bad magic, expected \"ZEVF\"");
  ByteReader r(bytes.subspan(4));
  const auto version = r.Get<std::uint16_t>("version");
  if (version != kVersion)
    throw FormatError("flow: unsupported model version " + std::to_string(version));
  const auto kind = r.Get<std::uint8_t>("kind");
  if (kind > 1) throw FormatError("flow: unknown model kind " + std::to_string(kind));
  const auto dim = r.Get<std::uint32_t>("dimension");
  if (dim < 1 || dim > kMaxDim)
    throw FormatError("flow: bad dimension " + std::to_string(dim));
  const double delta = r.Get<double>("delta");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw FormatError("flow: bad delta in model file");

  if (kind == static_cast<std::uint8_t>(FlowKind::kLinear)) {
    const auto n = r.Get<std::uint64_t>("parameter count");
    if (n != static_cast<std::uint64_t>(dim) * dim + dim)
      throw FormatError("flow: parameter count does not match dimension");
    Eigen::MatrixXd a(dim, dim);
    Eigen::VectorXd b(dim);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = r.Get<double>("parameters");
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = r.Get<double>("parameters");
    if (!r.AtEnd()) throw FormatError("flow: trailing bytes in model file");
    return FlowModel::Linear(a, b, delta);
  }

  const auto blocks = r.Get<std::uint32_t>("block count");
  const auto hidden = r.Get<std::uint32_t>("hidden width");
  const double clamp = r.Get<double>("scale clamp");
  if (blocks < 1 || blocks > 4096 || hidden < 1 || hidden > kMaxDim)
    throw FormatError("flow: bad coupling shape");
  std::vector<CouplingRoute> routes(blocks);
  for (auto &route : routes) {
    const auto ncond = r.Get<std::uint32_t>("route");
    if (ncond < 1 || ncond >= dim) throw FormatError("flow: bad coupling route");
    for (std::uint32_t k = 0; k < dim; ++k) {
      const auto idx = r.Get<std::uint32_t>("route");
      if (idx >= dim) throw FormatError("flow: bad coupling route index");
      (k < ncond ? route.cond : route.trans).push_back(static_cast<int>(idx));
    }
  }
  const auto n = r.Get<std::uint64_t>("parameter count");
  if (n > (std::uint64_t{1} << 32)) throw FormatError("flow: bad parameter count");
  Eigen::VectorXd p(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = r.Get<double>("parameters");
  if (!r.AtEnd()) throw FormatError("flow: trailing bytes in model file");
  try {
    return MakeCouplingModel(static_cast<int>(dim), delta, static_cast<int>(hidden),
                             clamp, std::move(routes), p);
  } catch (const FormatError &) {
    throw;
  } catch (const Error &e) {
    throw FormatError(std::string("flow: inconsistent model file: ") + e.what());
  }
}

void SaveModel(const FlowModel &model, const std::filesystem::path &path) {
  const auto bytes = SerializeModel(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("flow: cannot write " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("flow: write failed for " + path.string());
}

FlowModel LoadModel(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("flow: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return LoadModelFromBytes(bytes);
}

}  // namespace zevox
