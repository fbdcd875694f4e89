#include <doctest.h>

#include <sstream>

#include <random>

#include "relnet/extract.hpp"

using namespace relnet;

namespace {

// Mentions are recorded for every "@name" token (ASCII text).
Tweet tw(std::string id, std::string author, std::string text, std::int64_t at = 0) {
  Tweet t;
  t.tweet_id = std::move(id);
  t.author_id = std::move(author);
  t.created_at = at;
  t.text = std::move(text);
  for (std::size_t i = 0; i < t.text.size(); ++i)
    if (t.text[i] == '@' && (i == 0 || t.text[i - 1] == ' ')) {
      std::size_t e = i + 1;
      while (e < t.text.size() && std::isalnum(static_cast<unsigned char>(t.text[e]))) ++e;
      t.mentions.push_back({t.text.substr(i + 1, e - i - 1), i});
    }
  return t;
}

}  // namespace

TEST_CASE("declaration grammar") {
  auto d = scan_tweet(tw("1", "bob", "my best friend @alice is great"));
  REQUIRE(d.size() == 1);
  CHECK(d[0].declarer == "bob");
  CHECK(d[0].target == "alice");
  CHECK(d[0].phrase == "best friend");

  d = scan_tweet(tw("2", "carol", "My dear husband @u is home"));
  REQUIRE(d.size() == 1);
  CHECK(d[0].phrase == "dear husband");

  CHECK(scan_tweet(tw("3", "bob", "my really very best friend @alice")).empty());
  CHECK(scan_tweet(tw("4", "bob", "my @alice")).empty());
  // The handle must be a recorded mention.
  Tweet t = tw("5", "bob", "my boss @dave");
  t.mentions.clear();
  CHECK(scan_tweet(t).empty());
  // Trailing punctuation on phrase words is stripped.
  d = scan_tweet(tw("6", "bob", "love my sister, @eve"));
  REQUIRE(d.size() == 1);
  CHECK(d[0].phrase == "sister");
}

TEST_CASE("phrases always have one to three words") {
  std::mt19937_64 rng(4);
  const std::vector<std::string> words = {"my", "best", "friend", "@x", "@y", "so", "my,", "MY", "dear", "!"};
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    const int n = 1 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n; ++i) text += (i ? " " : "") + words[rng() % words.size()];
    for (const auto& d : scan_tweet(tw("t", "z", text))) {
      const auto spaces = std::count(d.phrase.begin(), d.phrase.end(), ' ');
      CHECK(spaces <= 2);
      CHECK(!d.phrase.empty());
      CHECK(d.declarer != d.target);
    }
  }
}

TEST_CASE("frequency threshold is inclusive") {
  std::vector<RelationshipDeclaration> decls;
  for (int i = 0; i < 1000; ++i) decls.push_back({"a" + std::to_string(i), "b", "mom", "t", 0});
  for (int i = 0; i < 999; ++i) decls.push_back({"a" + std::to_string(i), "b", "dad", "t", 0});
  const auto keep = filter_phrases_by_frequency(decls, 1000);
  CHECK(keep.count("mom") == 1);
  CHECK(keep.count("dad") == 0);
  CHECK(retain_phrases(decls, keep).size() == 1000);
}

TEST_CASE("labeling keeps one declaration per pair") {
  const PhraseMap pm = {{"best friend", Category::Social}, {"husband", Category::Romance}};
  const std::vector<RelationshipDeclaration> decls = {{"a", "b", "best friend", "1", 0},
                                                      {"b", "a", "husband", "2", 0},
                                                      {"c", "d", "neighbor", "3", 0},
                                                      {"e", "c", "husband", "4", 0}};
  std::set<Category> seen;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto dyads = label_dyads(decls, pm, seed);
    REQUIRE(dyads.size() == 2);
    CHECK(dyads[0].user_a == "a");
    CHECK(dyads[0].user_b == "b");
    seen.insert(dyads[0].category);
    CHECK(dyads[1].user_a == "c");
    CHECK(dyads[1].user_b == "e");
    CHECK(dyads[1].category == Category::Romance);
    CHECK(dyads[1].declarer == "e");
    CHECK(label_dyads(decls, pm, seed) == dyads);
  }
  CHECK(seen.size() == 2);
}

TEST_CASE("phrase map with a conflicting category") {
  std::istringstream ok("best friend\tsocial\nboss\torganizational\n");
  CHECK(load_phrase_map(ok).size() == 2);
  std::istringstream bad("boss\torganizational\nboss\tsocial\n");
  CHECK_THROWS_AS(load_phrase_map(bad), ConfigError);
}

TEST_CASE("follower filter") {
  ProfileIndex profiles;
  profiles["star"] = {"star", "star", "Star", "", 5000000};
  profiles["small"] = {"small", "small", "Small", "", 500};
  auto dyad = [](std::string declarer, std::string target, Category c) {
    LabeledDyad d;
    d.user_a = std::min(declarer, target);
    d.user_b = std::max(declarer, target);
    d.declarer = declarer;
    d.category = c;
    return d;
  };
  const std::vector<LabeledDyad> dyads = {dyad("fan1", "star", Category::Romance),
                                          dyad("fan2", "star", Category::Parasocial),
                                          dyad("kid", "small", Category::Family),
                                          dyad("x", "ghost", Category::Social)};
  const auto r = filter_parasocial_targets(dyads, profiles, 10000);
  CHECK(r.removed == 1);
  REQUIRE(r.kept.size() == 3);
  CHECK(r.kept[0].category == Category::Parasocial);
  CHECK(r.unknown_profiles == std::vector<std::string>{"ghost"});
}

TEST_CASE("dyad tweet sampling caps and leakage") {
  std::vector<Tweet> tweets;
  tweets.push_back(tw("decl", "bob", "my best friend @alice rocks", 100));
  for (int i = 0; i < 9; ++i) tweets.push_back(tw("dm" + std::to_string(i), "bob", "@alice hello there", 200 + i));
  for (int i = 0; i < 7; ++i) tweets.push_back(tw("pm" + std::to_string(i), "bob", "lunch with @alice", 300 + i));
  for (int i = 0; i < 6; ++i) {
    Tweet rt = tw("rt" + std::to_string(i), "bob", "RT something", 400 + i);
    rt.retweet_of = RetweetRef{"src" + std::to_string(i), "alice"};
    tweets.push_back(rt);
  }
  tweets.push_back(tw("leak", "bob", "@alice you are my best friend", 500));
  tweets.push_back(tw("a1", "alice", "@bob hi", 600));
  tweets.push_back(tw("a2", "alice", "saw @bob at the park", 601));

  LabeledDyad d;
  d.user_a = "alice";
  d.user_b = "bob";
  d.declarer = "bob";
  d.phrase = "best friend";
  d.category = Category::Social;
  d.source_tweet_ids = {"decl"};
  const TweetIndex index(tweets);
  const auto s = prepare_dyad_tweets(d, 0, index, 5, 15);
  CHECK(s.a.user == "alice");
  CHECK(s.a.total() == 2);
  CHECK(s.b.directed.size() == 5);
  CHECK(s.b.public_mentions.size() == 5);
  CHECK(s.b.retweets.size() == 5);
  // Newest first.
  CHECK(tweets[s.b.directed.front()].tweet_id == "dm8");
  for (std::size_t i : s.all()) {
    CHECK(tweets[i].tweet_id != "decl");
    CHECK(tweets[i].tweet_id != "leak");
    CHECK(!leaks_label(tweets[i], d));
  }
  const auto capped = prepare_dyad_tweets(d, 0, index, 5, 12);
  CHECK(capped.b.total() == 12);
}

TEST_CASE("dyad records round-trip") {
  LabeledDyad d;
  d.user_a = "a";
  d.user_b = "b";
  d.category = Category::Family;
  d.phrase = "little brother";
  d.declarer = "b";
  d.source_tweet_ids = {"1", "2"};
  CHECK(parse_dyad_record(serialize_dyad(d)) == d);
}
