#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "relnet/common.hpp"

namespace relnet {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Row-wise softmax, stabilized by the row maximum.
template <typename Derived>
MatrixX<typename Derived::Scalar> softmax_rows(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> out = logits;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    out.row(r).array() -= out.row(r).maxCoeff();
    out.row(r) = out.row(r).array().exp();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

/// log Σ exp(x), stabilized.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::MatrixBase<Derived>& x) {
  using std::exp;
  using std::log;
  const auto m = x.maxCoeff();
  return m + log((x.array() - m).exp().sum());
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  using std::exp;
  return x >= 0 ? Scalar(1) / (Scalar(1) + exp(-x)) : exp(x) / (Scalar(1) + exp(x));
}

/// Glorot-uniform initialization of a parameter segment.
template <typename Derived>
void glorot_init(Eigen::MatrixBase<Derived>&& block, int fan_in, int fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-limit, limit);
  for (Eigen::Index i = 0; i < block.size(); ++i) block(i) = static_cast<typename Derived::Scalar>(u(rng));
}

/// The most frequent characters (code points) of a set of names. Index 0 is
/// padding, 1 is the out-of-alphabet symbol.
class CharAlphabet {
 public:
  static constexpr int kPad = 0;
  static constexpr int kOutOfAlphabet = 1;

  CharAlphabet() = default;
  static CharAlphabet build(const std::vector<std::string>& names, std::size_t max_chars = 300);
  static CharAlphabet from_chars(std::vector<std::string> chars);

  int size() const { return static_cast<int>(chars_.size()) + 2; }
  const std::vector<std::string>& chars() const { return chars_; }

  /// Lowercased characters, right-padded to at least `min_length`.
  std::vector<int> encode(const std::string& name, std::size_t min_length = 5) const;

 private:
  std::vector<std::string> chars_;
  std::unordered_map<std::string, int> index_;
};

/// Splits UTF-8 text into code point strings.
std::vector<std::string> utf8_chars(const std::string& s);

struct CharEncoderShape {
  int alphabet = 302;
  int embed_dim = 32;
  std::array<int, 3> kernel_sizes = {3, 4, 5};
  std::array<int, 3> filters = {256, 256, 256};

  int output_dim() const { return filters[0] + filters[1] + filters[2]; }
  int max_kernel() const { return *std::max_element(kernel_sizes.begin(), kernel_sizes.end()); }
};

/// Character embedding, three 1-d convolution banks with rectifier, max-pooled
/// over positions and concatenated. Parameters live in a caller-owned flat
/// vector starting at `offset`: the embedding (embed_dim x alphabet, one
/// column per character), then per bank its filters (filters x k*embed_dim)
/// and biases.
template <typename Scalar>
class CharEncoder {
 public:
  using Vec = VectorX<Scalar>;
  using Mat = MatrixX<Scalar>;

  struct Cache {
    std::vector<int> ids;
    Mat x;  // embed_dim x length
    std::array<std::vector<Eigen::Index>, 3> argmax;
    Vec out;
  };

  CharEncoder() = default;
  CharEncoder(const CharEncoderShape& shape, Eigen::Index offset) : shape_(shape), offset_(offset) {
    Eigen::Index at = offset + static_cast<Eigen::Index>(shape.embed_dim) * shape.alphabet;
    for (int b = 0; b < 3; ++b) {
      weight_offset_[b] = at;
      at += static_cast<Eigen::Index>(shape.filters[b]) * shape.kernel_sizes[b] * shape.embed_dim;
      bias_offset_[b] = at;
      at += shape.filters[b];
    }
    end_ = at;
  }

  const CharEncoderShape& shape() const { return shape_; }
  Eigen::Index offset() const { return offset_; }
  Eigen::Index end() const { return end_; }
  Eigen::Index size() const { return end_ - offset_; }

  void init(Vec& params, std::mt19937_64& rng) const {
    std::normal_distribution<double> n(0.0, 0.1);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(shape_.embed_dim) * shape_.alphabet; ++i)
      params(offset_ + i) = static_cast<Scalar>(n(rng));
    for (int b = 0; b < 3; ++b) {
      const int fan_in = shape_.kernel_sizes[b] * shape_.embed_dim;
      glorot_init(weight(params, b), fan_in, shape_.filters[b], rng);
      bias(params, b).setZero();
    }
  }

  void forward(const Vec& params, const std::vector<int>& ids, Cache& cache) const {
    const auto e = shape_.embed_dim;
    if (ids.size() < static_cast<std::size_t>(shape_.max_kernel()))
      throw Error("character sequence shorter than the widest kernel");
    cache.ids = ids;
    cache.x.resize(e, static_cast<Eigen::Index>(ids.size()));
    const auto emb = embedding(params);
    for (std::size_t t = 0; t < ids.size(); ++t) {
      if (ids[t] < 0 || ids[t] >= shape_.alphabet) throw Error("character id out of range");
      cache.x.col(static_cast<Eigen::Index>(t)) = emb.col(ids[t]);
    }
    cache.out.resize(shape_.output_dim());
    Eigen::Index at = 0;
    for (int b = 0; b < 3; ++b) {
      const int k = shape_.kernel_sizes[b];
      const Eigen::Index positions = static_cast<Eigen::Index>(ids.size()) - k + 1;
      Eigen::Map<const Mat, 0, Eigen::OuterStride<>> patches(cache.x.data(), k * e, positions, Eigen::OuterStride<>(e));
      Mat z = weight(params, b) * patches;
      z.colwise() += bias(params, b);
      auto& am = cache.argmax[b];
      am.assign(static_cast<std::size_t>(shape_.filters[b]), 0);
      for (Eigen::Index c = 0; c < z.rows(); ++c) {
        Eigen::Index best = 0;
        const Scalar m = z.row(c).maxCoeff(&best);
        am[static_cast<std::size_t>(c)] = best;
        cache.out(at + c) = m > Scalar(0) ? m : Scalar(0);
      }
      at += shape_.filters[b];
    }
  }

  /// Accumulates d loss / d params into `grad` given d loss / d output.
  template <typename Derived>
  void backward(const Vec& params, const Cache& cache, const Eigen::MatrixBase<Derived>& dout, Vec& grad) const {
    const auto e = shape_.embed_dim;
    Mat dx = Mat::Zero(e, cache.x.cols());
    Eigen::Index at = 0;
    for (int b = 0; b < 3; ++b) {
      const int k = shape_.kernel_sizes[b];
      const auto w = weight(params, b);
      auto gw = weight(grad, b);
      auto gb = bias(grad, b);
      for (Eigen::Index c = 0; c < shape_.filters[b]; ++c) {
        const Scalar g = dout(at + c);
        if (cache.out(at + c) <= Scalar(0) || g == Scalar(0)) continue;
        const Eigen::Index t = cache.argmax[b][static_cast<std::size_t>(c)];
        Eigen::Map<const Vec> patch(cache.x.data() + t * e, k * e);
        gb(c) += g;
        gw.row(c) += g * patch.transpose();
        Eigen::Map<Vec> dpatch(dx.data() + t * e, k * e);
        dpatch += g * w.row(c).transpose();
      }
      at += shape_.filters[b];
    }
    auto gemb = embedding(grad);
    for (std::size_t t = 0; t < cache.ids.size(); ++t) gemb.col(cache.ids[t]) += dx.col(static_cast<Eigen::Index>(t));
  }

 private:
  template <typename V>
  auto embedding(V& params) const {
    using M = std::conditional_t<std::is_const_v<V>, const Mat, Mat>;
    return Eigen::Map<M>(params.data() + offset_, shape_.embed_dim, shape_.alphabet);
  }
  template <typename V>
  auto weight(V& params, int b) const {
    using M = std::conditional_t<std::is_const_v<V>, const Mat, Mat>;
    return Eigen::Map<M>(params.data() + weight_offset_[b], shape_.filters[b], shape_.kernel_sizes[b] * shape_.embed_dim);
  }
  template <typename V>
  auto bias(V& params, int b) const {
    using VV = std::conditional_t<std::is_const_v<V>, const Vec, Vec>;
    return Eigen::Map<VV>(params.data() + bias_offset_[b], shape_.filters[b]);
  }

  CharEncoderShape shape_;
  Eigen::Index offset_ = 0;
  Eigen::Index end_ = 0;
  std::array<Eigen::Index, 3> weight_offset_{};
  std::array<Eigen::Index, 3> bias_offset_{};
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  int warmup_steps = 0;
};

/// Adam with decoupled weight decay and linear warmup.
class Adam {
 public:
  Adam(const AdamConfig& config, Eigen::Index size)
      : config_(config), m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    ++t_;
    const double warm = config_.warmup_steps > 0 ? std::min(1.0, static_cast<double>(t_) / config_.warmup_steps) : 1.0;
    const double lr = config_.lr * warm;
    m_ = config_.beta1 * m_ + (1.0 - config_.beta1) * grad;
    v_ = config_.beta2 * v_ + (1.0 - config_.beta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    params.array() -= lr * ((m_.array() / c1) / ((v_.array() / c2).sqrt() + config_.eps) +
                            config_.weight_decay * params.array());
  }

  long steps() const { return t_; }

 private:
  AdamConfig config_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  long t_ = 0;
};

}  // namespace relnet
