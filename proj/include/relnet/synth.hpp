#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "relnet/common.hpp"
#include "relnet/corpus.hpp"
#include "relnet/extract.hpp"

namespace relnet {

/// Per relationship category (indexed like Category).
template <typename T>
using PerCategory = std::array<T, kNumCategories>;

struct SynthConfig {
  /// Ground-truth dyads per category; defaults follow the observed category
  /// proportions at a total of 10,000.
  PerCategory<std::size_t> dyads = {6821, 2377, 335, 95, 372};

  // Lexicon usage: probability that a directed mention of a category
  // contains a word of each synthetic lexicon category
  // (swear, family, love, work, fan).
  PerCategory<std::array<double, 5>> lexicon_rates = {{
      {0.20, 0.03, 0.06, 0.03, 0.03},
      {0.08, 0.03, 0.45, 0.02, 0.03},
      {0.03, 0.45, 0.10, 0.02, 0.02},
      {0.02, 0.01, 0.01, 0.45, 0.02},
      {0.05, 0.01, 0.15, 0.02, 0.45},
  }};

  // Topics. Topic 0 is "personal", topic 1 "news"; conversation topics of a
  // dyad are drawn from the remaining ones.
  int topics = 14;
  int words_per_topic = 25;
  int topic_words_per_tweet = 4;
  int filler_words_per_tweet = 3;
  PerCategory<int> topic_breadth = {5, 3, 2, 1, 1};

  // Local-hour activity of mentions per category; normalized on use.
  PerCategory<std::array<double, 24>> hour_profiles = default_hour_profiles();
  double null_offset_rate = 0.1;

  // Network: communities of a single category. Parasocial dyads attach fans
  // to hubs instead.
  PerCategory<int> block_size = {6, 2, 5, 6, 0};
  PerCategory<double> block_density = {0.7, 1.0, 0.9, 0.6, 0.0};
  int fans_per_hub = 20;
  int hubs = 0;  // 0 derives the count from fans_per_hub
  std::int64_t hub_min_followers = 20000;
  std::int64_t user_max_followers = 5000;
  /// Mention volume of the non-declaring side relative to the declarer.
  PerCategory<double> reciprocity = {0.9, 0.95, 0.8, 0.7, 0.0};

  // Interaction volume per dyad direction and per user.
  int dm_min = 3, dm_max = 8;
  int pm_min = 1, pm_max = 2;
  int originals_per_user = 12;
  int days = 90;
  std::int64_t start_time = 1546300800;  // 2019-01-01T00:00:00Z

  // Retweets of a partner's original tweets.
  double personal_share = 0.25;
  double news_share = 0.25;
  double url_rate = 0.3;
  double retweet_base_personal = 0.02;
  double retweet_base_news = 0.60;
  double retweet_base_misc = 0.02;
  double retweet_url_bonus = 0.05;
  /// Added to the retweet probability of personal-topic tweets for the
  /// categories flagged in `interaction_categories`.
  double interaction = 0.6;
  PerCategory<bool> interaction_categories = {true, false, false, false, false};

  // Declarations and noise.
  double second_declaration_rate = 0.3;  // partner declares back
  double leak_rate = 0.3;                // declarer repeats the phrase in a directed mention
  double hub_noise_rate = 0.02;          // non-parasocial declarations toward hubs, per dyad
  int rare_phrase_occurrences = 3;
  int unmapped_declarations = 50;
  int min_phrase_count = 10;  // suggested extraction threshold; rare phrases stay below it

  std::uint64_t seed = 0;
  int workers = 1;

  static PerCategory<std::array<double, 24>> default_hour_profiles();
};

/// Throws ConfigError on out-of-range rates, infeasible hub counts and
/// similar problems.
void validate_synth_config(const SynthConfig& c);

struct TruthDyad {
  std::string user_a;
  std::string user_b;
  Category category = Category::Social;
  std::string phrase;
  std::string declarer;
  std::vector<int> topics;  // conversation topics
};

struct SynthCorpus {
  std::vector<Tweet> tweets;
  std::vector<UserProfile> profiles;
  std::vector<TruthDyad> truth;
  std::vector<std::string> hubs;
  Lexicon lexicon;
  PhraseMap phrase_map;
  std::size_t hub_noise_declarations = 0;
  std::size_t rare_declarations = 0;
  std::size_t unmapped_declarations = 0;
  std::size_t leak_tweets = 0;
  /// Every planted parameter as one JSON document.
  std::string truth_json;
};

/// The synthetic lexicon: five categories with prefix and exact patterns.
Lexicon synthetic_lexicon();
std::vector<std::string> synthetic_lexicon_categories();
/// Mapped phrases per category, plus phrases kept rare and unmapped ones.
PerCategory<std::vector<std::string>> synthetic_phrases();

/// Deterministic in (config, seed) and independent of the worker count.
SynthCorpus generate_corpus(const SynthConfig& config);

/// Writes tweets.ndjson, profiles.ndjson, lexicon.txt, phrase_map.tsv,
/// truth_dyads.ndjson and truth.json into `dir`, each text file preceded by
/// `header` lines.
void write_synth_corpus(const SynthCorpus& corpus, const std::string& dir, const std::string& header);

std::string serialize_truth_dyad(const TruthDyad& d);
TruthDyad parse_truth_dyad(std::string_view line, std::size_t line_no = 0);

}  // namespace relnet
