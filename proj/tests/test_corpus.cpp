#include <doctest.h>

#include <sstream>

#include "relnet/corpus.hpp"

using namespace relnet;

namespace {

Tweet make(std::string text, std::vector<Mention> mentions = {}) {
  Tweet t;
  t.tweet_id = "1";
  t.author_id = "bob";
  t.created_at = 1000;
  t.text = std::move(text);
  t.mentions = std::move(mentions);
  return t;
}

}  // namespace

TEST_CASE("tweet record with every field") {
  const std::string line =
      R"({"tweet_id":"7","author_id":"u1","created_at":1600000000,"utc_offset_minutes":-300,)"
      R"("text":"@alice hi","mentions":[{"user_id":"u2","offset":0}],"retweet_of":null,"lang":"en","extra":1})";
  const Tweet t = parse_tweet_record(line, 3);
  CHECK(t.tweet_id == "7");
  CHECK(t.author_id == "u1");
  CHECK(t.created_at == 1600000000);
  REQUIRE(t.utc_offset_minutes);
  CHECK(*t.utc_offset_minutes == -300);
  CHECK(t.mentions.size() == 1);
  CHECK(t.mentions[0].user_id == "u2");
  CHECK(!t.retweet_of);
  CHECK(t.lang == std::optional<std::string>("en"));
  CHECK(parse_tweet_record(serialize_tweet(t)) == t);
}

TEST_CASE("missing utc offset stays absent") {
  const Tweet t = parse_tweet_record(
      R"({"tweet_id":"7","author_id":"u1","created_at":5,"text":"x","mentions":[],"retweet_of":null,"lang":null})");
  CHECK(!t.utc_offset_minutes);
  CHECK(!t.lang);
}

TEST_CASE("malformed and invalid records") {
  try {
    parse_tweet_record("{not json", 12);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 12);
  }
  CHECK_THROWS_AS(parse_tweet_record(R"({"tweet_id":"7","author_id":"u1","created_at":5,"text":"ab",)"
                                     R"("mentions":[{"user_id":"u2","offset":9}]})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_tweet_record(R"({"tweet_id":"7","author_id":"u1","created_at":5,"text":"x",)"
                                     R"("mentions":[],"retweet_of":{"tweet_id":"3","author_id":"u1"}})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_tweet_record(R"({"tweet_id":"7","author_id":"u1","created_at":5,"text":"x",)"
                                     R"("utc_offset_minutes":900,"mentions":[]})"),
                  ValidationError);
}

TEST_CASE("mention offsets count code points") {
  const Tweet t = parse_tweet_record(
      R"({"tweet_id":"7","author_id":"u1","created_at":5,"text":"é @bo","mentions":[{"user_id":"u2","offset":2}]})");
  CHECK(t.mentions[0].offset == 2);
}

TEST_CASE("interaction kinds") {
  Tweet rt = make("RT something");
  rt.retweet_of = RetweetRef{"9", "alice"};
  CHECK(classify_interaction(rt) == InteractionKind::Retweet);
  CHECK(classify_interaction(make("@alice how are you", {{"alice", 0}})) == InteractionKind::DirectedMention);
  CHECK(classify_interaction(make("met @alice today", {{"alice", 4}})) == InteractionKind::PublicMention);
  CHECK(classify_interaction(make("just words")) == InteractionKind::Other);
}

TEST_CASE("url detection") {
  CHECK(detect_url("see https://t.co/x"));
  CHECK(!detect_url("no links here"));
  CHECK(detect_url("HTTP://A.B"));
  CHECK(!detect_url("httpx://a"));
}

TEST_CASE("lexicon files") {
  std::istringstream in("[swear]\ndamn\nf*\n");
  const Lexicon lex = load_lexicon(in);
  REQUIRE(lex.categories.size() == 1);
  const auto& p = lex.patterns("swear");
  REQUIRE(p.size() == 2);
  CHECK(p[1].prefix);
  CHECK(p[1].matches("fudge"));
  CHECK(!p[0].matches("damnit"));

  std::istringstream bad("[swear]\nf*ck\n");
  CHECK_THROWS_AS(load_lexicon(bad), Error);
  std::istringstream dup("[a]\nx\n[a]\ny\n");
  CHECK_THROWS_AS(load_lexicon(dup), Error);
  std::istringstream empty("[a]\n[b]\ny\n");
  CHECK_THROWS_AS(load_lexicon(empty), Error);

  std::istringstream other("[family]\nmom\n");
  const Lexicon merged = merge_lexicons(lex, load_lexicon(other));
  CHECK(merged.category_names() == std::vector<std::string>{"family", "swear"});
  CHECK_THROWS_AS(merge_lexicons(lex, lex), Error);
}

TEST_CASE("lexicon serialization round-trips") {
  std::istringstream in("[love]\nlove*\nbabe\n[work]\noffice\n");
  const Lexicon lex = load_lexicon(in);
  std::istringstream again(serialize_lexicon(lex));
  CHECK(load_lexicon(again).categories == lex.categories);
}
