#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "relnet/bootstrap.hpp"

namespace relnet {

struct Vocabulary {
  std::vector<std::string> words;  // sorted
  std::unordered_map<std::string, int> index;

  int size() const { return static_cast<int>(words.size()); }
  int id(const std::string& w) const {
    auto it = index.find(w);
    return it == index.end() ? -1 : it->second;
  }
};

const std::set<std::string>& default_stopwords();

/// Tokens occurring at least `min_count` times, excluding stopwords.
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs, int min_count,
                            const std::set<std::string>& stopwords = default_stopwords());

/// Out-of-vocabulary tokens are dropped.
std::vector<int> encode(const std::vector<std::string>& tokens, const Vocabulary& vocab);

struct LdaConfig {
  int topics = 100;
  double alpha = 0.1;
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 0;
};

/// Collapsed Gibbs state. Count matrices are column-major with one column
/// per document (doc_topic) or per word (topic_word).
struct TopicModel {
  int topics = 0;
  double alpha = 0.1;
  double beta = 0.01;
  std::uint64_t seed = 0;
  Vocabulary vocab;
  Eigen::MatrixXi topic_word;   // K x V
  Eigen::VectorXi topic_totals; // K
  Eigen::MatrixXi doc_topic;    // K x D, training documents only
  std::vector<std::vector<int>> assignments;

  int vocab_size() const { return static_cast<int>(topic_word.cols()); }
};

/// Fits by collapsed Gibbs sampling; each token is resampled from
/// p(k) ∝ (n_dk + α)(n_kw + β) / (n_k + Vβ) with its own assignment removed.
TopicModel fit_lda(const std::vector<std::vector<int>>& docs, int vocab_size, const LdaConfig& config);

/// Held-out Gibbs on a new document with the model counts frozen.
/// Returns θ_k ∝ n_dk + α from the final state.
Eigen::VectorXd infer_topic_distribution(const TopicModel& model, const std::vector<int>& doc, int passes,
                                         std::uint64_t seed);

/// Natural-log Shannon entropy.
template <typename Derived>
double entropy(const Eigen::MatrixBase<Derived>& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) > 0) h -= p(i) * std::log(p(i));
  return h;
}

struct DyadTopicDiversity {
  Eigen::VectorXd mean_distribution;
  double entropy = 0.0;
  int tweets_used = 0;
};

struct TopicInferenceConfig {
  int passes = 20;
  std::size_t tweet_cap = 5;
  std::uint64_t seed = 0;
};

/// Mean of per-tweet topic distributions over up to `tweet_cap` tweets with
/// in-vocabulary tokens; nullopt when no tweet has any.
std::optional<DyadTopicDiversity> dyad_topic_entropy(const TopicModel& model, const std::vector<std::string>& texts,
                                                     const TopicInferenceConfig& config);

struct EntropySummary {
  double mean = 0.0;
  Interval ci;
  std::size_t dyads = 0;
};

std::map<std::string, std::optional<EntropySummary>> category_entropy_report(
    const std::map<std::string, std::vector<double>>& entropies, const BootstrapConfig& bootstrap);

void save_topic_model(std::ostream& os, const TopicModel& model);
TopicModel load_topic_model(std::istream& is);

}  // namespace relnet
