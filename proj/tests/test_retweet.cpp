#include <doctest.h>

#include <cmath>
#include <map>

#include "relnet/retweet.hpp"
#include "relnet/synth.hpp"

using namespace relnet;

namespace {

Tweet original(std::string id, std::string author, std::int64_t at, std::string text = "plain words") {
  Tweet t;
  t.tweet_id = std::move(id);
  t.author_id = std::move(author);
  t.created_at = at;
  t.text = std::move(text);
  return t;
}

Tweet retweet_of(std::string id, std::string by, const Tweet& src) {
  Tweet t = original(std::move(id), std::move(by), src.created_at + 10, "RT " + src.text);
  t.retweet_of = RetweetRef{src.tweet_id, src.author_id};
  return t;
}

LabeledDyad dyad(std::string a, std::string b, Category c, std::string phrase = "friend") {
  LabeledDyad d;
  d.user_a = std::move(a);
  d.user_b = std::move(b);
  d.declarer = d.user_a;
  d.category = c;
  d.phrase = std::move(phrase);
  return d;
}

RetweetDatasetConfig small_config() {
  RetweetDatasetConfig c;
  c.per_category_n = 2;
  c.ratios = {1, 0.0001, 0.0001};
  return c;
}

}  // namespace

TEST_CASE("one retweeted and one plain tweet make one pair") {
  const Tweet src = original("s1", "a", 1000, "look https://x.y");
  std::vector<Tweet> tweets = {src, original("s2", "a", 2000), retweet_of("r1", "b", src)};
  ProfileIndex profiles;
  profiles["a"] = {"a", "a", "A", "", 0};
  profiles["b"] = {"b", "b", "B", "", 99};
  const auto ds = build_retweet_dataset({dyad("a", "b", Category::Social)}, tweets, profiles, small_config());
  REQUIRE(ds.samples.size() == 2);
  CHECK(ds.samples[0].label);
  CHECK(ds.samples[0].source_tweet_id == "s1");
  CHECK(ds.samples[0].has_url);
  CHECK(ds.samples[0].log_followers_author == 0.0);
  CHECK(ds.samples[0].log_followers_candidate == std::log(100.0));
  CHECK(!ds.samples[1].label);
  CHECK(ds.samples[1].source_tweet_id == "s2");
  CHECK(ds.samples[1].candidate_id == "b");
  CHECK(ds.samples[0].pair == ds.samples[1].pair);
  CHECK(parse_retweet_sample(serialize_retweet_sample(ds.samples[0])).source_tweet_id == "s1");
}

TEST_CASE("tweets with mentions are never sources") {
  Tweet with_mention = original("s1", "a", 1000, "hi @b");
  with_mention.mentions = {{"b", 3}};
  CHECK(!retweet_source_eligible(with_mention));
  const std::vector<Tweet> tweets = {with_mention, original("s2", "a", 1100), retweet_of("r1", "b", with_mention)};
  const auto ds = build_retweet_dataset({dyad("a", "b", Category::Social)}, tweets, {}, small_config());
  CHECK(ds.samples.empty());
  CHECK(ds.positives_found == 0);
}

TEST_CASE("nearest negative within the window, ties toward the earlier tweet") {
  const Tweet src = original("s", "a", 10000);
  std::vector<Tweet> tweets = {src, original("early", "a", 9000), original("late", "a", 11000),
                               original("far", "a", 10000 + 8 * 86400), retweet_of("r", "b", src)};
  auto ds = build_retweet_dataset({dyad("a", "b", Category::Family)}, tweets, {}, small_config());
  REQUIRE(ds.samples.size() == 2);
  CHECK(ds.samples[1].source_tweet_id == "early");

  // Only a tweet outside the window: the positive is discarded.
  tweets = {src, original("far", "a", 10000 + 8 * 86400), retweet_of("r", "b", src)};
  ds = build_retweet_dataset({dyad("a", "b", Category::Family)}, tweets, {}, small_config());
  CHECK(ds.samples.empty());
  CHECK(ds.positives_found == 1);
  CHECK(ds.discarded_no_negative == 1);
}

TEST_CASE("synthetic dataset is balanced and well formed") {
  SynthConfig sc;
  sc.dyads = {400, 300, 200, 150, 150};
  sc.seed = 4;
  const auto corpus = generate_corpus(sc);
  std::vector<LabeledDyad> dyads;
  for (const auto& t : corpus.truth) {
    LabeledDyad d = dyad(t.user_a, t.user_b, t.category, t.phrase);
    d.declarer = t.declarer;
    dyads.push_back(d);
  }
  RetweetDatasetConfig c;
  c.per_category_n = 200;
  c.seed = 2;
  const auto ds = build_retweet_dataset(dyads, corpus.tweets, index_profiles(corpus.profiles), c);
  REQUIRE(!ds.samples.empty());
  std::map<Category, std::array<int, 2>> labels;
  std::map<std::size_t, std::vector<const RetweetSample*>> pairs;
  std::map<std::string, const Tweet*> by_id;
  for (const auto& t : corpus.tweets) by_id[t.tweet_id] = &t;
  for (const auto& s : ds.samples) {
    ++labels[s.category][s.label ? 1 : 0];
    pairs[s.pair].push_back(&s);
    CHECK(retweet_source_eligible(*by_id.at(s.source_tweet_id)));
  }
  for (const auto& [cat, n] : labels) {
    CHECK(n[0] == n[1]);
    CHECK(static_cast<std::size_t>(n[1]) == ds.pairs_per_category);
  }
  for (const auto& [id, members] : pairs) {
    REQUIRE(members.size() == 2);
    CHECK(members[0]->label != members[1]->label);
    CHECK(members[0]->author_id == members[1]->author_id);
    CHECK(members[0]->partition == members[1]->partition);
    CHECK(std::llabs(members[0]->created_at - members[1]->created_at) <= c.window_seconds);
  }
  const auto again = build_retweet_dataset(dyads, corpus.tweets, index_profiles(corpus.profiles), [&] {
    auto c4 = c;
    c4.workers = 4;
    return c4;
  }());
  REQUIRE(again.samples.size() == ds.samples.size());
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    CHECK(serialize_retweet_sample(again.samples[i]) == serialize_retweet_sample(ds.samples[i]));
}

TEST_CASE("per-category counts add up to the overall counts") {
  std::vector<RetweetSample> samples;
  std::vector<double> proba;
  for (int i = 0; i < 50; ++i) {
    RetweetSample s;
    s.category = category_from_index(i % 5);
    s.label = i % 3 == 0;
    s.has_url = i % 4 == 0;
    samples.push_back(s);
    proba.push_back((i % 7) / 6.0);
  }
  const auto e = evaluate_retweet(samples, proba);
  BinaryCounts sum, url_sum;
  for (const auto& b : e.by_category) sum += b;
  for (const auto& b : e.by_url) url_sum += b;
  CHECK(sum.tp == e.overall.tp);
  CHECK(sum.fp == e.overall.fp);
  CHECK(sum.fn == e.overall.fn);
  CHECK(sum.tn == e.overall.tn);
  CHECK(url_sum.total() == 50);
  CHECK(retweet_eval_rows("baseline", e).size() > 5);
}

TEST_CASE("baseline ignores the relationship, aware does not") {
  FeatureSpaceConfig fc;
  fc.min_freq = 1;
  fc.network_features = false;
  const auto space = build_feature_space({"plain words here"}, Lexicon{}, fc);
  const auto alphabet = CharAlphabet::build({"best friend", "boss"});
  RetweetSample s;
  s.text = "plain words";
  s.phrase = "best friend";
  s.log_followers_author = 1.0;
  RetweetSample t = s;
  t.category = Category::Organizational;
  t.phrase = "boss";
  for (auto variant : {RetweetVariant::Baseline, RetweetVariant::Aware}) {
    RetweetModelConfig mc;
    mc.variant = variant;
    mc.text_dim = space.num_ngrams();
    mc.text_proj = 4;
    mc.relation_embed = 3;
    mc.hidden = 6;
    mc.phrase_encoder = {alphabet.size(), 3, {3, 4, 5}, {2, 2, 2}};
    RetweetModel<double> m(mc);
    m.init(1);
    const auto p = m.predict_proba({featurize_retweet(s, space, &alphabet), featurize_retweet(t, space, &alphabet)});
    CHECK(p.size() == 2);
    CHECK(p[0] > 0.0);
    CHECK(p[0] < 1.0);
    if (variant == RetweetVariant::Baseline) CHECK(p[0] == p[1]);
    else CHECK(p[0] != p[1]);
  }
}

TEST_CASE("training needs both labels") {
  std::vector<RetweetSample> samples(6);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i].text = "same text";
    samples[i].label = true;
    samples[i].partition = static_cast<Partition>(i % 3);
  }
  RetweetModelConfig mc;
  RetweetTrainConfig tc;
  tc.text_min_freq = 1;
  CHECK_THROWS_AS(train_and_evaluate_retweet(samples, mc, tc), Error);
}
