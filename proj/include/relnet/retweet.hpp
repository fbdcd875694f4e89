#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "relnet/common.hpp"
#include "relnet/corpus.hpp"
#include "relnet/extract.hpp"
#include "relnet/features.hpp"
#include "relnet/learn.hpp"
#include "relnet/nn.hpp"

namespace relnet {

struct RetweetSample {
  std::string source_tweet_id;
  std::string author_id;
  std::string candidate_id;
  Category category = Category::Social;
  std::string phrase;
  std::string text;
  std::int64_t created_at = 0;
  bool has_url = false;
  double log_followers_author = 0.0;  // ln(1 + followers)
  double log_followers_candidate = 0.0;
  bool label = false;
  std::size_t pair = 0;  // positive and its negative share this id
  Partition partition = Partition::Train;

  bool operator==(const RetweetSample&) const = default;
};

struct RetweetDatasetConfig {
  std::size_t per_category_n = 10000;  // samples per category, half of them positive
  std::int64_t window_seconds = 7 * 86400;
  std::array<double, 3> ratios = {8, 1, 1};
  std::uint64_t seed = 0;
  int workers = 1;
};

struct RetweetDataset {
  std::vector<RetweetSample> samples;
  std::size_t positives_found = 0;
  std::size_t discarded_no_negative = 0;
  std::map<Category, std::size_t> pairs_available;
  std::size_t pairs_per_category = 0;
  std::vector<std::string> warnings;
};

/// A tweet is eligible as a source when it is an original with no mentions.
bool retweet_source_eligible(const Tweet& t);

/// Positives: eligible tweets by one dyad member retweeted by the other.
/// Each pairs with the author's eligible tweet nearest in time within the
/// window that the partner did not retweet (ties toward the earlier one,
/// each negative used once). Every category contributes the same number of
/// pairs; pairs are split per category by the given ratios.
RetweetDataset build_retweet_dataset(const std::vector<LabeledDyad>& dyads, const std::vector<Tweet>& tweets,
                                     const ProfileIndex& profiles, const RetweetDatasetConfig& config);

std::string serialize_retweet_sample(const RetweetSample& s);
RetweetSample parse_retweet_sample(std::string_view line, std::size_t line_no = 0);
std::vector<RetweetSample> read_retweet_samples_file(const std::string& path);

enum class RetweetVariant { Baseline, Aware };
std::string_view retweet_variant_name(RetweetVariant v);

struct RetweetInput {
  std::vector<std::pair<int, double>> text;  // n-gram counts
  Eigen::Vector3d extras;                    // log followers (author, candidate), URL flag
  int category = 0;
  std::vector<int> phrase;  // encoded characters
  double label = 0.0;
};

/// Text n-grams plus extras; phrase characters are encoded only when an
/// alphabet is supplied.
RetweetInput featurize_retweet(const RetweetSample& s, const FeatureSpace& space, const CharAlphabet* alphabet);

struct RetweetModelConfig {
  RetweetVariant variant = RetweetVariant::Baseline;
  int text_dim = 0;
  int text_proj = 768;
  int relation_embed = 256;
  CharEncoderShape phrase_encoder;
  int hidden = 768;
};

/// Concatenates a linear projection of the text features, the scaled extras
/// and, for the aware variant, the relationship one-hot, a learned category
/// embedding and the char-CNN phrase encoding; then affine, rectifier,
/// affine to a scalar and logistic output.
template <typename ScalarT = double>
class RetweetModel {
 public:
  using Scalar = ScalarT;
  using Vec = VectorX<Scalar>;
  using Mat = MatrixX<Scalar>;
  using Batch = std::vector<RetweetInput>;

  RetweetModel() = default;
  explicit RetweetModel(const RetweetModelConfig& c) : config_(c) {
    const bool aware = c.variant == RetweetVariant::Aware;
    Eigen::Index at = 0;
    proj_w_ = at;
    at += static_cast<Eigen::Index>(c.text_proj) * c.text_dim;
    proj_b_ = at;
    at += c.text_proj;
    concat_ = c.text_proj + 3;
    if (aware) {
      embed_ = at;
      at += static_cast<Eigen::Index>(c.relation_embed) * kNumCategories;
      encoder_ = CharEncoder<Scalar>(c.phrase_encoder, at);
      at = encoder_.end();
      concat_ += kNumCategories + c.relation_embed + c.phrase_encoder.output_dim();
    }
    w1_ = at;
    at += static_cast<Eigen::Index>(c.hidden) * concat_;
    b1_ = at;
    at += c.hidden;
    w2_ = at;
    at += c.hidden;
    b2_ = at;
    at += 1;
    params_ = Vec::Zero(at);
    extra_scale_ = Vec::Ones(3);
  }

  const RetweetModelConfig& config() const { return config_; }
  bool aware() const { return config_.variant == RetweetVariant::Aware; }
  Vec& parameters() { return params_; }
  const Vec& parameters() const { return params_; }
  Vec& extra_scale() { return extra_scale_; }
  const Vec& extra_scale() const { return extra_scale_; }

  void init(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    glorot_init(mat(params_, proj_w_, config_.text_proj, config_.text_dim), config_.text_dim, config_.text_proj, rng);
    if (aware()) {
      std::normal_distribution<double> n(0.0, 0.1);
      for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(config_.relation_embed) * kNumCategories; ++i)
        params_(embed_ + i) = static_cast<Scalar>(n(rng));
      encoder_.init(params_, rng);
    }
    glorot_init(mat(params_, w1_, config_.hidden, concat_), concat_, config_.hidden, rng);
    glorot_init(mat(params_, w2_, 1, config_.hidden), config_.hidden, 1, rng);
  }

  /// Mean binary cross-entropy over the batch.
  Scalar loss_and_gradient(const Batch& batch, Vec* grad) const {
    if (batch.empty()) throw Error("empty batch");
    if (grad) *grad = Vec::Zero(params_.size());
    const Scalar inv_n = Scalar(1) / static_cast<Scalar>(batch.size());
    Scalar total(0);
    PhraseCache cache;
    for (const auto& s : batch) {
      Vec c, a;
      const Scalar z = forward(s, c, a, cache);
      const Scalar y = static_cast<Scalar>(s.label);
      total += softplus(z) - y * z;
      if (!grad) continue;
      const Scalar dz = (sigmoid(z) - y) * inv_n;
      backward(s, c, a, dz, cache, *grad);
    }
    if (grad) flush_phrase_grads(cache, *grad);
    return total * inv_n;
  }

  Scalar loss(const Batch& batch) const { return loss_and_gradient(batch, nullptr); }
  Vec gradient(const Batch& batch) const {
    Vec g;
    loss_and_gradient(batch, &g);
    return g;
  }

  std::vector<double> predict_proba(const Batch& batch) const {
    std::vector<double> out;
    out.reserve(batch.size());
    PhraseCache cache;
    Vec c, a;
    for (const auto& s : batch) out.push_back(static_cast<double>(sigmoid(forward(s, c, a, cache))));
    return out;
  }

  template <typename NewScalar>
  RetweetModel<NewScalar> cast() const {
    RetweetModel<NewScalar> m(config_);
    m.parameters() = params_.template cast<NewScalar>();
    m.extra_scale() = extra_scale_.template cast<NewScalar>();
    return m;
  }

 private:
  // Phrase encodings are computed once per distinct phrase in a batch and
  // their gradients accumulated before a single backward pass.
  struct PhraseEntry {
    typename CharEncoder<Scalar>::Cache cache;
    Vec grad_out;
  };
  using PhraseCache = std::map<std::vector<int>, PhraseEntry>;

  static Scalar softplus(Scalar z) {
    using std::exp;
    using std::log1p;
    return z > Scalar(0) ? z + log1p(exp(-z)) : log1p(exp(z));
  }

  template <typename V>
  auto mat(V& p, Eigen::Index offset, Eigen::Index rows, Eigen::Index cols) const {
    using M = std::conditional_t<std::is_const_v<V>, const Mat, Mat>;
    return Eigen::Map<M>(p.data() + offset, rows, cols);
  }

  Scalar forward(const RetweetInput& s, Vec& c, Vec& a, PhraseCache& cache) const {
    c.resize(concat_);
    const auto proj = mat(params_, proj_w_, config_.text_proj, config_.text_dim);
    Vec t = params_.segment(proj_b_, config_.text_proj);
    for (const auto& [i, v] : s.text) {
      if (i < 0 || i >= config_.text_dim) throw Error("text feature index out of range");
      t += static_cast<Scalar>(v) * proj.col(i);
    }
    Eigen::Index at = 0;
    c.segment(at, config_.text_proj) = t;
    at += config_.text_proj;
    for (int k = 0; k < 3; ++k) c(at + k) = static_cast<Scalar>(s.extras(k)) * extra_scale_(k);
    at += 3;
    if (aware()) {
      if (s.category < 0 || s.category >= kNumCategories) throw Error("category out of range");
      c.segment(at, kNumCategories).setZero();
      c(at + s.category) = Scalar(1);
      at += kNumCategories;
      c.segment(at, config_.relation_embed) = mat(params_, embed_, config_.relation_embed, kNumCategories).col(s.category);
      at += config_.relation_embed;
      auto [it, fresh] = cache.try_emplace(s.phrase);
      if (fresh) {
        encoder_.forward(params_, s.phrase, it->second.cache);
        it->second.grad_out = Vec::Zero(config_.phrase_encoder.output_dim());
      }
      c.segment(at, config_.phrase_encoder.output_dim()) = it->second.cache.out;
    }
    a = mat(params_, w1_, config_.hidden, concat_) * c + params_.segment(b1_, config_.hidden);
    return params_.segment(w2_, config_.hidden).dot(a.cwiseMax(Scalar(0))) + params_(b2_);
  }

  void backward(const RetweetInput& s, const Vec& c, const Vec& a, Scalar dz, PhraseCache& cache, Vec& grad) const {
    const Vec r = a.cwiseMax(Scalar(0));
    grad.segment(w2_, config_.hidden) += dz * r;
    grad(b2_) += dz;
    Vec da = dz * params_.segment(w2_, config_.hidden);
    for (Eigen::Index i = 0; i < da.size(); ++i)
      if (a(i) <= Scalar(0)) da(i) = Scalar(0);
    mat(grad, w1_, config_.hidden, concat_) += da * c.transpose();
    grad.segment(b1_, config_.hidden) += da;
    const Vec dc = mat(params_, w1_, config_.hidden, concat_).transpose() * da;
    const Vec dt = dc.head(config_.text_proj);
    auto gproj = mat(grad, proj_w_, config_.text_proj, config_.text_dim);
    for (const auto& [i, v] : s.text) gproj.col(i) += static_cast<Scalar>(v) * dt;
    grad.segment(proj_b_, config_.text_proj) += dt;
    if (aware()) {
      Eigen::Index at = config_.text_proj + 3 + kNumCategories;
      mat(grad, embed_, config_.relation_embed, kNumCategories).col(s.category) += dc.segment(at, config_.relation_embed);
      at += config_.relation_embed;
      cache.at(s.phrase).grad_out += dc.segment(at, config_.phrase_encoder.output_dim());
    }
  }

  void flush_phrase_grads(const PhraseCache& cache, Vec& grad) const {
    if (!aware()) return;
    for (const auto& [ids, entry] : cache) encoder_.backward(params_, entry.cache, entry.grad_out, grad);
  }

  RetweetModelConfig config_;
  CharEncoder<Scalar> encoder_;
  Eigen::Index proj_w_ = 0, proj_b_ = 0, embed_ = 0, w1_ = 0, b1_ = 0, w2_ = 0, b2_ = 0;
  int concat_ = 0;
  Vec params_;
  Vec extra_scale_;
};

struct BinaryCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  double precision() const { return tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0; }
  double recall() const { return tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0; }
  double f1() const {
    const double p = precision(), r = recall();
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  std::size_t total() const { return tp + fp + fn + tn; }
  BinaryCounts& operator+=(const BinaryCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
};

struct RetweetEval {
  BinaryCounts overall;
  std::array<BinaryCounts, 2> by_url;  // [no URL, URL]
  std::array<BinaryCounts, kNumCategories> by_category;
  std::array<std::array<BinaryCounts, kNumCategories>, 2> by_url_category;
};

/// Threshold 0.5 on the predicted probabilities.
RetweetEval evaluate_retweet(const std::vector<RetweetSample>& samples, const std::vector<double>& proba);

struct RetweetTrainConfig {
  AdamConfig adam{1e-3, 0.9, 0.999, 1e-8, 0.0, 0};
  int epochs = 10;
  int batch = 64;
  int eval_every = 0;  // steps between validation checks; 0 means once per epoch
  std::uint64_t seed = 0;
  int text_min_freq = 5;
  int workers = 1;
};

struct RetweetRun {
  RetweetVariant variant = RetweetVariant::Baseline;
  FeatureSpace space;
  CharAlphabet alphabet;
  RetweetModel<double> model;
  double best_validation_f1 = -1.0;
  int best_step = 0;
  RetweetEval test;
  std::vector<double> test_proba;
};

/// Trains on the train partition with binary cross-entropy and Adam, keeps
/// the parameters with the best validation F1, and evaluates on the test
/// partition.
RetweetRun train_and_evaluate_retweet(const std::vector<RetweetSample>& samples, const RetweetModelConfig& model_config,
                                      const RetweetTrainConfig& config);

/// Rows "variant<TAB>url<TAB>category<TAB>precision<TAB>recall<TAB>f1<TAB>tp<TAB>fp<TAB>fn<TAB>tn",
/// with "all" for the url and category aggregates.
std::vector<std::string> retweet_eval_rows(const std::string& variant, const RetweetEval& e);
std::string retweet_eval_header();

void save_retweet_model(std::ostream& os, const RetweetRun& run, std::uint64_t seed);

}  // namespace relnet
