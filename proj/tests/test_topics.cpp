#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "relnet/common.hpp"
#include "relnet/topics.hpp"

using namespace relnet;

namespace {

// Word w of planted topic t is "t<t>w<w>".
std::string planted_word(int t, int w) { return "t" + std::to_string(t) + "w" + std::to_string(w); }

std::string planted_tweet(int topic, int len, std::mt19937_64& rng) {
  std::string s;
  for (int i = 0; i < len; ++i) s += (i ? " " : "") + planted_word(topic, static_cast<int>(rng() % 10));
  return s;
}

}  // namespace

TEST_CASE("vocabulary and encoding") {
  const std::vector<std::vector<std::string>> docs = {{"x", "y", "the"}, {"x", "z", "the"}, {"x", "y"}};
  const auto v = build_vocabulary(docs, 2);
  CHECK(v.words == std::vector<std::string>{"x", "y"});
  CHECK(encode({"y", "zzz", "x"}, v) == std::vector<int>{1, 0});
}

TEST_CASE("lda separates two disjoint planted topics") {
  std::mt19937_64 rng(3);
  std::vector<std::vector<int>> docs;
  std::vector<int> planted;
  for (int d = 0; d < 200; ++d) {
    const int t = d % 2;
    std::vector<int> doc;
    for (int i = 0; i < 10; ++i) doc.push_back(t * 20 + static_cast<int>(rng() % 20));
    docs.push_back(doc);
    planted.push_back(t);
  }
  const auto m = fit_lda(docs, 40, {2, 0.1, 0.01, 200, 5});
  // Purity: tokens whose assigned topic matches the majority topic of their planted topic.
  long counts[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t d = 0; d < docs.size(); ++d)
    for (int z : m.assignments[d]) ++counts[planted[d]][z];
  const long agree = std::max(counts[0][0] + counts[1][1], counts[0][1] + counts[1][0]);
  CHECK(static_cast<double>(agree) / 2000.0 >= 0.9);

  // Count consistency.
  CHECK(m.topic_word.rowwise().sum() == m.topic_totals);
  CHECK(m.topic_totals.sum() == 2000);
  for (std::size_t d = 0; d < docs.size(); ++d)
    CHECK(m.doc_topic.col(static_cast<Eigen::Index>(d)).sum() == static_cast<int>(docs[d].size()));
}

// With one word type the sampler is a Polya urn over topics; the stationary
// chance that all n tokens share a topic is 2 G(2a) G(n+a) / (G(a) G(n+2a)).
static double collapse_probability(double a, int n) {
  return 2 * std::exp(std::lgamma(2 * a) + std::lgamma(n + a) - std::lgamma(a) - std::lgamma(n + 2 * a));
}

TEST_CASE("one repeated word collapses to one topic") {
  const std::vector<std::vector<int>> docs = {std::vector<int>(30, 0)};
  auto rate = [&](double alpha, int seeds) {
    int collapsed = 0;
    for (int seed = 0; seed < seeds; ++seed) {
      const auto m = fit_lda(docs, 1, {2, alpha, 0.01, 200, static_cast<std::uint64_t>(seed)});
      collapsed += m.doc_topic.col(0).maxCoeff() == 30;
    }
    return static_cast<double>(collapsed) / seeds;
  };
  CHECK(collapse_probability(0.01, 30) > 0.95);
  CHECK(rate(0.01, 100) >= 0.95);
  const double p = collapse_probability(0.1, 30);
  CHECK(std::abs(rate(0.1, 300) - p) < 4 * std::sqrt(p * (1 - p) / 300));
}

TEST_CASE("lda preconditions and determinism") {
  const std::vector<std::vector<int>> docs = {{0, 1, 2}, {2, 1}};
  CHECK_THROWS_AS(fit_lda(docs, 3, {2, 0.1, 0.01, 0, 1}), ConfigError);
  CHECK_THROWS_AS(fit_lda(docs, 0, {2, 0.1, 0.01, 5, 1}), Error);
  const auto a = fit_lda(docs, 3, {2, 0.1, 0.01, 30, 8});
  const auto b = fit_lda(docs, 3, {2, 0.1, 0.01, 30, 8});
  CHECK(a.assignments == b.assignments);
  CHECK(a.topic_word == b.topic_word);
}

TEST_CASE("entropy bounds") {
  CHECK(entropy(Eigen::VectorXd::Constant(20, 1.0 / 20)) == doctest::Approx(std::log(20.0)));
  Eigen::VectorXd one = Eigen::VectorXd::Zero(20);
  one(3) = 1.0;
  CHECK(entropy(one) == 0.0);
}

TEST_CASE("mixture dyads have higher topic entropy than single-topic dyads") {
  std::mt19937_64 rng(17);
  std::vector<std::vector<std::string>> train;
  for (int d = 0; d < 600; ++d) {
    const std::string t = planted_tweet(d % 10, 8, rng);
    std::vector<std::string> toks;
    std::istringstream in(t);
    for (std::string w; in >> w;) toks.push_back(w);
    train.push_back(toks);
  }
  const auto vocab = build_vocabulary(train, 2);
  std::vector<std::vector<int>> docs;
  for (const auto& t : train) docs.push_back(encode(t, vocab));
  auto model = fit_lda(docs, vocab.size(), {10, 0.1, 0.01, 150, 2});
  model.vocab = vocab;

  std::map<std::string, std::vector<double>> groups;
  for (int d = 0; d < 60; ++d) {
    std::vector<std::string> mixed, single;
    const int base = static_cast<int>(rng() % 10);
    for (int i = 0; i < 5; ++i) {
      mixed.push_back(planted_tweet((base + 2 * i) % 10, 8, rng));
      single.push_back(planted_tweet(base, 8, rng));
    }
    const TopicInferenceConfig ic{20, 5, static_cast<std::uint64_t>(d)};
    const auto m = dyad_topic_entropy(model, mixed, ic);
    const auto s = dyad_topic_entropy(model, single, ic);
    REQUIRE(m);
    REQUIRE(s);
    CHECK(m->mean_distribution.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(m->entropy <= std::log(10.0) + 1e-12);
    groups["mixed"].push_back(m->entropy);
    groups["single"].push_back(s->entropy);
  }
  const auto r = category_entropy_report(groups, {500, 0.95, 1});
  CHECK(r.at("mixed")->ci.low > r.at("single")->ci.high);
  CHECK(!dyad_topic_entropy(model, {"nothing known here"}, {20, 5, 1}));
}

TEST_CASE("entropy report edge cases") {
  const auto r = category_entropy_report({{"same", {1.0, 1.0, 1.0}}, {"one", {0.4}}, {"none", {}}}, {100, 0.95, 0});
  CHECK(r.at("same")->ci.low == 1.0);
  CHECK(r.at("same")->ci.high == 1.0);
  CHECK(r.at("one")->mean == 0.4);
  CHECK(!r.at("none"));
}

TEST_CASE("topic model persistence") {
  const std::vector<std::vector<int>> docs = {{0, 1, 2}, {2, 1}};
  auto m = fit_lda(docs, 3, {2, 0.1, 0.01, 10, 8});
  std::stringstream ss;
  CHECK_THROWS_AS(save_topic_model(ss, m), Error);
  m.vocab = build_vocabulary({{"x", "y", "z"}}, 1);
  save_topic_model(ss, m);
  const auto back = load_topic_model(ss);
  CHECK(back.topic_word == m.topic_word);
  CHECK(back.vocab.words == m.vocab.words);
}
