#pragma once

#include <array>
#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "relnet/common.hpp"
#include "relnet/features.hpp"
#include "relnet/nn.hpp"

namespace relnet {

// Splits

enum class Partition : int { Train = 0, Validation = 1, Test = 2 };

std::string_view partition_name(Partition p);

struct SplitPlan {
  std::vector<Partition> assignment;  // one per dyad
  std::string mode = "imbalanced";
  std::uint64_t seed = 0;
  std::array<std::size_t, 3> counts{};
  std::size_t components = 0;
  std::vector<std::string> warnings;

  std::vector<std::size_t> members(Partition p) const;
};

/// Assigns whole connected components of the user-sharing graph to
/// partitions, largest first, each to the partition furthest below its
/// target share. With `strata` (one label per dyad) the shares are filled
/// separately per stratum, so small classes reach every partition.
SplitPlan split_user_disjoint(const std::vector<std::pair<std::string, std::string>>& dyad_users,
                              std::array<double, 3> ratios = {8, 1, 1}, std::uint64_t seed = 0,
                              const std::vector<int>& strata = {});

struct BalancedSets {
  std::vector<std::size_t> train;  // may repeat indices (upsampling)
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Train: per-class sample of `per_class_train_n` (without replacement when
/// the class is large enough, otherwise all members plus draws with
/// replacement). Test: every class downsampled to the rarest class count.
BalancedSets make_balanced_sets(const SplitPlan& plan, const std::vector<int>& labels, std::size_t per_class_train_n,
                                std::uint64_t seed, int num_classes = kNumCategories);

// Gradient checking

template <typename M, typename B>
concept Differentiable = requires(M m, const M cm, const B& b) {
  { m.parameters() } -> std::same_as<typename M::Vec&>;
  { cm.loss(b) } -> std::convertible_to<typename M::Scalar>;
  { cm.gradient(b) } -> std::convertible_to<typename M::Vec>;
};

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t worst_index = 0;
};

/// Central differences on up to `num_params` randomly chosen parameters;
/// relative error |ga - gn| / max(|ga|, |gn|, 1e-12).
template <typename Model, typename Batch>
  requires Differentiable<Model, Batch>
GradientCheckResult gradient_check(Model& model, const Batch& batch, double epsilon = 1e-5,
                                   std::size_t num_params = 200, std::uint64_t seed = 0) {
  using Scalar = typename Model::Scalar;
  using std::abs;
  const Scalar base = model.loss(batch);
  if (!std::isfinite(static_cast<double>(base))) throw Error("gradient check at a non-finite loss");
  const auto analytic = model.gradient(batch);
  if (!analytic.allFinite()) throw Error("non-finite analytic gradient");
  auto& params = model.parameters();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(params.size()));
  for (Eigen::Index i = 0; i < params.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 rng(seed);
  if (idx.size() > num_params) {
    for (std::size_t i = 0; i < num_params; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
      std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(num_params);
  }
  GradientCheckResult r;
  const Scalar eps = static_cast<Scalar>(epsilon);
  for (Eigen::Index i : idx) {
    const Scalar saved = params(i);
    params(i) = saved + eps;
    const Scalar up = model.loss(batch);
    params(i) = saved - eps;
    const Scalar down = model.loss(batch);
    params(i) = saved;
    const Scalar numeric = (up - down) / (Scalar(2) * eps);
    if (!std::isfinite(static_cast<double>(numeric))) throw Error("non-finite numerical gradient");
    const Scalar ga = analytic(i);
    const Scalar denom = std::max({abs(ga), abs(numeric), Scalar(1e-12)});
    const double rel = static_cast<double>(abs(ga - numeric) / denom);
    if (rel > r.max_relative_error) {
      r.max_relative_error = rel;
      r.worst_index = static_cast<std::size_t>(i);
    }
    ++r.checked;
  }
  return r;
}

// Multinomial linear model

struct LinearBatch {
  SparseRows x;
  std::vector<int> labels;
};

/// Softmax regression over max-abs scaled features. Parameters are one flat
/// vector: the C x D weight matrix (column-major) followed by the C biases.
template <typename ScalarT = double>
class LinearModel {
 public:
  using Scalar = ScalarT;
  using Vec = VectorX<Scalar>;
  using Mat = MatrixX<Scalar>;
  using Sparse = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

  LinearModel() = default;
  LinearModel(int classes, int dim, Scalar l2 = Scalar(0))
      : classes_(classes), dim_(dim), params_(Vec::Zero(static_cast<Eigen::Index>(classes) * dim + classes)),
        inv_scale_(Vec::Ones(dim)), l2_(l2) {}

  int classes() const { return classes_; }
  int dim() const { return dim_; }
  Scalar l2() const { return l2_; }
  Vec& parameters() { return params_; }
  const Vec& parameters() const { return params_; }
  Vec& inverse_scale() { return inv_scale_; }
  const Vec& inverse_scale() const { return inv_scale_; }

  Eigen::Map<const Mat> weights() const { return {params_.data(), classes_, dim_}; }
  Eigen::Map<const Vec> bias() const { return {params_.data() + static_cast<Eigen::Index>(classes_) * dim_, classes_}; }

  Mat logits(const SparseRows& x) const {
    if (x.cols() != dim_) throw Error("feature dimension mismatch");
    const Sparse xs = scaled(x);
    Mat out = xs * weights().transpose();
    out.rowwise() += bias().transpose();
    return out;
  }

  Mat predict_proba(const SparseRows& x) const { return softmax_rows(logits(x)); }

  std::vector<int> predict(const SparseRows& x) const {
    const Mat l = logits(x);
    std::vector<int> out(static_cast<std::size_t>(l.rows()));
    for (Eigen::Index r = 0; r < l.rows(); ++r) l.row(r).maxCoeff(&out[static_cast<std::size_t>(r)]);
    return out;
  }

  /// Mean cross-entropy plus (l2 / 2) ||W||^2; fills `grad` when given.
  Scalar loss_and_gradient(const LinearBatch& batch, Vec* grad) const {
    using std::log;
    const Eigen::Index n = batch.x.rows();
    if (n == 0 || static_cast<std::size_t>(n) != batch.labels.size()) throw Error("bad linear batch");
    const Sparse xs = scaled(batch.x);
    Mat l = xs * weights().transpose();
    l.rowwise() += bias().transpose();
    Scalar total(0);
    Mat g = softmax_rows(l);
    for (Eigen::Index r = 0; r < n; ++r) {
      const int y = batch.labels[static_cast<std::size_t>(r)];
      if (y < 0 || y >= classes_) throw Error("label out of range");
      total += log_sum_exp(l.row(r)) - l(r, y);
      g(r, y) -= Scalar(1);
    }
    const Scalar nn = static_cast<Scalar>(n);
    const Scalar loss = total / nn + l2_ / Scalar(2) * weights().squaredNorm();
    if (grad) {
      grad->resize(params_.size());
      Eigen::Map<Mat> gw(grad->data(), classes_, dim_);
      gw = (g.transpose() * xs) / nn;
      gw += l2_ * weights();
      grad->tail(classes_) = g.colwise().sum().transpose() / nn;
    }
    return loss;
  }

  Scalar loss(const LinearBatch& batch) const { return loss_and_gradient(batch, nullptr); }
  Vec gradient(const LinearBatch& batch) const {
    Vec g;
    loss_and_gradient(batch, &g);
    return g;
  }

  template <typename NewScalar>
  LinearModel<NewScalar> cast() const {
    LinearModel<NewScalar> m(classes_, dim_, static_cast<NewScalar>(l2_));
    m.parameters() = params_.template cast<NewScalar>();
    m.inverse_scale() = inv_scale_.template cast<NewScalar>();
    return m;
  }

 private:
  Sparse scaled(const SparseRows& x) const {
    if constexpr (std::is_same_v<Scalar, double>) {
      return x * inv_scale_.asDiagonal();
    } else {
      return Sparse(x.template cast<Scalar>()) * inv_scale_.asDiagonal();
    }
  }

  int classes_ = 0;
  int dim_ = 0;
  Vec params_;
  Vec inv_scale_;
  Scalar l2_ = Scalar(0);
};

struct LinearTrainConfig {
  double lr = 0.5;
  int epochs = 30;
  int batch = 64;
  std::uint64_t seed = 0;
  double l2 = 1e-4;
  int classes = kNumCategories;
};

struct LinearTrainResult {
  LinearModel<double> model;
  std::vector<double> epoch_losses;  // full-data loss after each epoch
};

/// Seeded mini-batch gradient descent on the cross-entropy. Features are
/// scaled by their training max-abs. Throws on a non-finite loss.
LinearTrainResult train_linear(const SparseRows& x, const std::vector<int>& labels, const LinearTrainConfig& config);

void save_linear_model(std::ostream& os, const LinearModel<double>& m, std::uint64_t seed);
LinearModel<double> load_linear_model(std::istream& is);

// Character CNN classifier

struct CharCnnConfig {
  CharEncoderShape encoder;
  int names = 4;
  int dense_dim = 0;
  int hidden = 768;
  int classes = kNumCategories;
  double dropout = 0.1;
};

struct CharSample {
  std::vector<std::vector<int>> names;  // encoded, each padded to >= 5
  Eigen::VectorXd dense;
  int label = 0;
};

/// Shared char encoder over each name, concatenated with dense features,
/// then affine -> rectifier -> dropout -> affine -> softmax.
template <typename ScalarT = double>
class CharCnnModel {
 public:
  using Scalar = ScalarT;
  using Vec = VectorX<Scalar>;
  using Mat = MatrixX<Scalar>;
  using Batch = std::vector<CharSample>;

  CharCnnModel() = default;
  explicit CharCnnModel(const CharCnnConfig& config) : config_(config), encoder_(config.encoder, 0) {
    if (config.dropout < 0.0 || config.dropout >= 1.0) throw ConfigError("dropout must lie in [0, 1)");
    in_dim_ = config.names * config.encoder.output_dim() + config.dense_dim;
    w1_ = encoder_.end();
    b1_ = w1_ + static_cast<Eigen::Index>(config.hidden) * in_dim_;
    w2_ = b1_ + config.hidden;
    b2_ = w2_ + static_cast<Eigen::Index>(config.classes) * config.hidden;
    params_ = Vec::Zero(b2_ + config.classes);
  }

  const CharCnnConfig& config() const { return config_; }
  Vec& parameters() { return params_; }
  const Vec& parameters() const { return params_; }

  void init(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    encoder_.init(params_, rng);
    glorot_init(w1(params_), in_dim_, config_.hidden, rng);
    glorot_init(w2(params_), config_.hidden, config_.classes, rng);
    params_.segment(b1_, config_.hidden).setZero();
    params_.tail(config_.classes).setZero();
  }

  /// Mean cross-entropy; dropout is active only when `dropout_rng` is given.
  Scalar loss_and_gradient(const Batch& batch, Vec* grad, std::mt19937_64* dropout_rng) const {
    using std::log;
    if (batch.empty()) throw Error("empty batch");
    if (grad) *grad = Vec::Zero(params_.size());
    const Scalar inv_n = Scalar(1) / static_cast<Scalar>(batch.size());
    const bool drop = dropout_rng && config_.dropout > 0.0;
    std::bernoulli_distribution keep(1.0 - config_.dropout);
    const Scalar keep_scale = drop ? Scalar(1) / static_cast<Scalar>(1.0 - config_.dropout) : Scalar(1);
    Scalar total(0);
    std::vector<typename CharEncoder<Scalar>::Cache> caches(static_cast<std::size_t>(config_.names));
    for (const auto& s : batch) {
      Vec features = encode(s, caches);
      const Vec a1 = w1(params_) * features + params_.segment(b1_, config_.hidden);
      Vec mask = Vec::Ones(config_.hidden);
      if (drop)
        for (Eigen::Index i = 0; i < mask.size(); ++i) mask(i) = keep(*dropout_rng) ? keep_scale : Scalar(0);
      const Vec r = a1.cwiseMax(Scalar(0)).cwiseProduct(mask);
      const Vec logits = w2(params_) * r + params_.tail(config_.classes);
      if (s.label < 0 || s.label >= config_.classes) throw Error("label out of range");
      total += log_sum_exp(logits) - logits(s.label);
      if (!grad) continue;
      Vec dl = softmax_rows(logits.transpose()).transpose();
      dl(s.label) -= Scalar(1);
      dl *= inv_n;
      w2(*grad) += dl * r.transpose();
      grad->tail(config_.classes) += dl;
      Vec da = (w2(params_).transpose() * dl).cwiseProduct(mask);
      for (Eigen::Index i = 0; i < da.size(); ++i)
        if (a1(i) <= Scalar(0)) da(i) = Scalar(0);
      w1(*grad) += da * features.transpose();
      grad->segment(b1_, config_.hidden) += da;
      const Vec df = w1(params_).transpose() * da;
      const int d = config_.encoder.output_dim();
      for (int j = 0; j < config_.names; ++j)
        encoder_.backward(params_, caches[static_cast<std::size_t>(j)], df.segment(static_cast<Eigen::Index>(j) * d, d),
                          *grad);
    }
    return total * inv_n;
  }

  Scalar loss(const Batch& batch) const { return loss_and_gradient(batch, nullptr, nullptr); }
  Vec gradient(const Batch& batch) const {
    Vec g;
    loss_and_gradient(batch, &g, nullptr);
    return g;
  }

  Mat predict_proba(const Batch& batch) const {
    Mat out(static_cast<Eigen::Index>(batch.size()), config_.classes);
    std::vector<typename CharEncoder<Scalar>::Cache> caches(static_cast<std::size_t>(config_.names));
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const Vec features = encode(batch[i], caches);
      const Vec r = (w1(params_) * features + params_.segment(b1_, config_.hidden)).cwiseMax(Scalar(0));
      const Vec logits = w2(params_) * r + params_.tail(config_.classes);
      out.row(static_cast<Eigen::Index>(i)) = softmax_rows(logits.transpose());
    }
    return out;
  }

  std::vector<int> predict(const Batch& batch) const {
    const Mat p = predict_proba(batch);
    std::vector<int> out(batch.size());
    for (Eigen::Index r = 0; r < p.rows(); ++r) p.row(r).maxCoeff(&out[static_cast<std::size_t>(r)]);
    return out;
  }

  template <typename NewScalar>
  CharCnnModel<NewScalar> cast() const {
    CharCnnModel<NewScalar> m(config_);
    m.parameters() = params_.template cast<NewScalar>();
    return m;
  }

 private:
  Vec encode(const CharSample& s, std::vector<typename CharEncoder<Scalar>::Cache>& caches) const {
    if (static_cast<int>(s.names.size()) != config_.names) throw Error("wrong number of name strings");
    if (s.dense.size() != config_.dense_dim) throw Error("wrong dense feature width");
    const int d = config_.encoder.output_dim();
    Vec features(in_dim_);
    for (int j = 0; j < config_.names; ++j) {
      auto& cache = caches[static_cast<std::size_t>(j)];
      encoder_.forward(params_, s.names[static_cast<std::size_t>(j)], cache);
      features.segment(static_cast<Eigen::Index>(j) * d, d) = cache.out;
    }
    features.tail(config_.dense_dim) = s.dense.template cast<Scalar>();
    return features;
  }

  template <typename V>
  auto w1(V& p) const {
    using M = std::conditional_t<std::is_const_v<V>, const Mat, Mat>;
    return Eigen::Map<M>(p.data() + w1_, config_.hidden, in_dim_);
  }
  template <typename V>
  auto w2(V& p) const {
    using M = std::conditional_t<std::is_const_v<V>, const Mat, Mat>;
    return Eigen::Map<M>(p.data() + w2_, config_.classes, config_.hidden);
  }

  CharCnnConfig config_;
  CharEncoder<Scalar> encoder_;
  int in_dim_ = 0;
  Eigen::Index w1_ = 0, b1_ = 0, w2_ = 0, b2_ = 0;
  Vec params_;
};

struct CharCnnTrainConfig {
  AdamConfig adam{1e-3, 0.9, 0.999, 1e-8, 0.0, 100};
  int epochs = 5;
  int batch = 32;
  std::uint64_t seed = 0;
};

CharCnnModel<double> train_charcnn(const std::vector<CharSample>& samples, const CharCnnConfig& model_config,
                                   const CharCnnTrainConfig& config);

void save_charcnn_model(std::ostream& os, const CharCnnModel<double>& m, const CharAlphabet& alphabet,
                        std::uint64_t seed);
CharCnnModel<double> load_charcnn_model(std::istream& is, CharAlphabet* alphabet);

// Evaluation

struct EvalReport {
  Eigen::MatrixXi confusion;  // rows: true class, columns: predicted class
  Eigen::VectorXd precision;
  Eigen::VectorXd recall;
  Eigen::VectorXd f1;
  Eigen::VectorXi support;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
};

/// Classes never predicted get precision 0; classes absent from the truth
/// get recall 0; F1 is 0 whenever precision + recall is 0.
EvalReport evaluate(const std::vector<int>& predicted, const std::vector<int>& truth, int num_classes = kNumCategories);

std::vector<int> uniform_random_predictions(std::size_t n, int num_classes, std::uint64_t seed);
/// Draws classes with the given prevalences.
std::vector<int> proportional_random_predictions(std::size_t n, const std::vector<double>& prevalence,
                                                 std::uint64_t seed);
std::vector<int> majority_predictions(std::size_t n, int majority_class);

std::vector<double> class_prevalence(const std::vector<int>& labels, int num_classes = kNumCategories);

/// Human-readable table with one row per class.
std::string format_eval_table(const std::string& title, const EvalReport& r);
/// Machine-readable rows: "model<TAB>class<TAB>precision<TAB>recall<TAB>f1<TAB>support".
std::vector<std::string> eval_rows(const std::string& model, const EvalReport& r);

}  // namespace relnet
