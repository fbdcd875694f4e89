#include <doctest.h>

#include <sstream>

#include "relnet/features.hpp"

using namespace relnet;

namespace {

Lexicon lex() {
  std::istringstream in("[swear]\ndamn\n[work]\noffice\n");
  return load_lexicon(in);
}

}  // namespace

TEST_CASE("n-gram space") {
  FeatureSpaceConfig c;
  c.min_freq = 2;
  const auto s = build_feature_space({"a b a b"}, lex(), c);
  CHECK(s.ngram_index.count("a") == 1);
  CHECK(s.ngram_index.count("b") == 1);
  CHECK(s.ngram_index.count("a b") == 1);
  CHECK(s.ngram_index.count("b a") == 0);
  CHECK(s.lexicon_categories == std::vector<std::string>{"swear", "work"});
  c.min_freq = 5;
  CHECK_THROWS_AS(build_feature_space({"a b a b"}, lex(), c), Error);
}

TEST_CASE("dyad featurization") {
  FeatureSpaceConfig c;
  c.min_freq = 1;
  const auto s = build_feature_space({"a b"}, lex(), c);
  const auto counts = ngram_features("a b", s);
  CHECK(counts.size() == 3);
  for (const auto& [i, v] : counts) CHECK(v == 1.0);

  DyadNetworkStats stats;
  stats.jaccard_z = 1.5;
  stats.mention_prob_ab = 0.25;
  auto f = featurize_dyad({"zzz damn", "damn office"}, s, stats, 2);
  for (const auto& [i, v] : f.sparse) CHECK(i >= s.num_ngrams());
  REQUIRE(f.sparse.size() == 2);
  CHECK(f.sparse[0].second == 2.0);
  CHECK(f.dense.size() == s.num_dense());
  CHECK(f.present.sum() == 2.0);
  CHECK(f.label == std::optional<int>(2));

  // Order-independent over the tweet multiset.
  const auto g = featurize_dyad({"damn office", "zzz damn"}, s, stats, 2);
  CHECK(g.sparse == f.sparse);

  const auto back = parse_feature_row(format_feature_row(f));
  CHECK(back.sparse == f.sparse);
  CHECK(back.dense == f.dense);
  CHECK(back.present == f.present);
  CHECK(back.label == f.label);
}

TEST_CASE("reciprocity is off by default") {
  FeatureSpaceConfig c;
  c.min_freq = 1;
  const auto s = build_feature_space({"a"}, lex(), c);
  CHECK(s.num_dense() == 4);
  c.include_reciprocity = true;
  CHECK(build_feature_space({"a"}, lex(), c).num_dense() == 5);
  c.network_features = false;
  CHECK(build_feature_space({"a"}, lex(), c).num_dense() == 0);
}

TEST_CASE("matrix layout and space persistence") {
  FeatureSpaceConfig c;
  c.min_freq = 1;
  const auto s = build_feature_space({"a b c"}, lex(), c);
  DyadNetworkStats stats;
  stats.reciprocity = 1.0;
  stats.adamic_adar_z = -0.5;
  const auto rows = std::vector<FeatureVector>{featurize_dyad({"a c"}, s, stats, 0), featurize_dyad({"b"}, s, {}, 1)};
  const auto x = to_matrix(rows, s);
  CHECK(x.rows() == 2);
  CHECK(x.cols() == s.dim());
  CHECK(labels_of(rows) == std::vector<int>{0, 1});
  std::stringstream ss;
  save_feature_space(ss, s);
  const auto back = load_feature_space(ss, lex());
  CHECK(back.ngram_vocab == s.ngram_vocab);
  CHECK(back.dense_names == s.dense_names);
}
