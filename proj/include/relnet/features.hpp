#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "relnet/common.hpp"
#include "relnet/corpus.hpp"
#include "relnet/graph.hpp"

namespace relnet {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Uni-, bi- and trigrams of a token sequence, joined by single spaces.
std::vector<std::string> ngrams(const std::vector<std::string>& tokens, int max_n = 3);

struct FeatureSpace {
  std::vector<std::string> ngram_vocab;  // sorted; index = position
  std::unordered_map<std::string, int> ngram_index;
  Lexicon lexicon;
  std::vector<std::string> lexicon_categories;
  std::vector<std::string> dense_names;

  int num_ngrams() const { return static_cast<int>(ngram_vocab.size()); }
  int sparse_dim() const { return num_ngrams() + static_cast<int>(lexicon_categories.size()); }
  int num_dense() const { return static_cast<int>(dense_names.size()); }
  /// sparse | dense values | dense presence flags
  int dim() const { return sparse_dim() + 2 * num_dense(); }
};

struct FeatureSpaceConfig {
  int min_freq = 10000;
  bool include_reciprocity = false;
  bool network_features = true;
};

/// Keeps n-grams with training-corpus frequency >= min_freq. Throws when
/// nothing survives.
FeatureSpace build_feature_space(const std::vector<std::string>& train_texts, const Lexicon& lexicon,
                                 const FeatureSpaceConfig& config);

struct FeatureVector {
  std::vector<std::pair<int, double>> sparse;  // sorted by index
  Eigen::VectorXd dense;
  Eigen::VectorXd present;  // 1 where the dense value was defined
  std::optional<int> label;
};

/// Sparse n-gram and lexicon-category counts over all texts plus the network
/// statistics; undefined statistics become 0 with a cleared presence flag.
FeatureVector featurize_dyad(const std::vector<std::string>& texts, const FeatureSpace& space,
                             const DyadNetworkStats& stats, std::optional<int> label = std::nullopt);

/// Sparse n-gram counts only, for single tweets.
std::vector<std::pair<int, double>> ngram_features(std::string_view text, const FeatureSpace& space);

/// Rows laid out as FeatureSpace::dim().
SparseRows to_matrix(const std::vector<FeatureVector>& rows, const FeatureSpace& space);

std::vector<int> labels_of(const std::vector<FeatureVector>& rows);

/// "label idx:count ... # dense v1 .. vn f1 .. fn"; label -1 when absent.
std::string format_feature_row(const FeatureVector& v);
FeatureVector parse_feature_row(const std::string& line, std::size_t line_no = 0);

/// Sidecar listing every feature index; the lexicon must be supplied on load.
void save_feature_space(std::ostream& os, const FeatureSpace& space);
FeatureSpace load_feature_space(std::istream& is, const Lexicon& lexicon);

}  // namespace relnet
