#include <doctest.h>

#include <random>
#include <sstream>

#include "relnet/bootstrap.hpp"
#include "relnet/lexical.hpp"

using namespace relnet;

namespace {

Lexicon lexicon(const std::string& text) {
  std::istringstream in(text);
  return load_lexicon(in);
}

}  // namespace

TEST_CASE("category membership") {
  const auto lex = lexicon("[we]\nwe\nus\nour*\n[swear]\ndamn\nass\n");
  CHECK(contains_category("we did it", lex, "we"));
  CHECK(contains_category("ourselves", lex, "we"));
  CHECK(!contains_category("hour", lex, "we"));
  CHECK(contains_category("#Damn!", lex, "swear"));
  CHECK_THROWS_AS(contains_category("x", lex, "nope"), Error);

  // Adding patterns never turns a match off.
  const auto wider = lexicon("[we]\nwe\nus\nour*\nhou*\n");
  for (const char* t : {"we did it", "ourselves", "hour", "nothing"})
    if (contains_category(t, lex, "we")) CHECK(contains_category(t, wider, "we"));
}

TEST_CASE("category probability") {
  const auto lex = lexicon("[swear]\ndamn\n");
  std::map<Category, std::vector<std::string>> texts;
  for (int i = 0; i < 10; ++i) texts[Category::Social].push_back(i < 3 ? "damn it" : "fine");
  for (int i = 0; i < 4; ++i) texts[Category::Family].push_back("hello");
  const auto r = category_probability(texts, lex, "swear", {200, 0.95, 1});
  REQUIRE(r.at(Category::Social));
  CHECK(r.at(Category::Social)->probability == doctest::Approx(0.3));
  CHECK(r.at(Category::Social)->ci.low <= 0.3);
  CHECK(r.at(Category::Social)->ci.high >= 0.3);
  const auto& fam = *r.at(Category::Family);
  CHECK(fam.probability == 0.0);
  CHECK(fam.ci.low == 0.0);
  CHECK(fam.ci.high == 0.0);
  CHECK(r.count(Category::Romance) == 0);
  texts[Category::Romance] = {};
  CHECK(!category_probability(texts, lex, "swear", {200, 0.95, 1}).at(Category::Romance));
}

TEST_CASE("top words") {
  const auto lex = lexicon("[swear]\ndamn\nass\nshit*\n");
  const auto top = top_words({"damn damn ass"}, lex, "swear", 5);
  REQUIRE(top.size() == 2);
  CHECK(top[0].first == "damn");
  CHECK(top[0].second == doctest::Approx(2.0 / 3));
  CHECK(top[1].first == "ass");
  const auto tie = top_words({"shitty ass"}, lex, "swear", 1);
  REQUIRE(tie.size() == 1);
  CHECK(tie[0].first == "ass");
  CHECK(top_words({"clean"}, lex, "swear", 3).empty());
  double sum = 0;
  for (const auto& [w, s] : top_words({"damn ass shit shitty damn"}, lex, "swear", 10)) sum += s;
  CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("bootstrap intervals") {
  const std::vector<double> constant(20, 0.5);
  auto ci = bootstrap_ci(constant, {});
  CHECK(ci.low == 0.5);
  CHECK(ci.high == 0.5);
  ci = bootstrap_ci(std::vector<double>{0.7}, {});
  CHECK(ci.low == 0.7);
  CHECK(ci.high == 0.7);
  CHECK_THROWS_AS(bootstrap_ci(std::vector<double>{}, {}), Error);

  std::vector<double> v = {1, 5, 2, 8, 3};
  const auto a = bootstrap_ci(v, {500, 0.95, 9});
  const auto b = bootstrap_ci(v, {500, 0.95, 9});
  CHECK(a.low == b.low);
  CHECK(a.high == b.high);
  CHECK(a.low <= 3.8);
  CHECK(a.high >= 3.8);
}

TEST_CASE("bootstrap coverage on normal samples") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  int covered = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> x(200);
    for (auto& v : x) v = n(rng);
    const auto ci = bootstrap_ci(x, {400, 0.95, static_cast<std::uint64_t>(t)});
    covered += ci.low <= 0.0 && 0.0 <= ci.high;
  }
  const double rate = covered / static_cast<double>(trials);
  CHECK(rate >= 0.92);
  CHECK(rate <= 0.98);
}

TEST_CASE("empirical quantile interpolates") {
  const std::vector<double> s = {0, 10, 20, 30};
  CHECK(empirical_quantile(s, 0.0) == 0.0);
  CHECK(empirical_quantile(s, 1.0) == 30.0);
  CHECK(empirical_quantile(s, 0.5) == doctest::Approx(15.0));
}
