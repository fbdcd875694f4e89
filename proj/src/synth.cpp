#include "relnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "relnet/parallel.hpp"
#include "relnet/text.hpp"

namespace relnet {

namespace {

constexpr std::array<const char*, 5> kLexCats = {"swear", "family", "love", "work", "fan"};

// Patterns and the words emitted for each synthetic lexicon category.
const std::array<std::vector<std::string>, 5>& lexicon_patterns() {
  static const std::array<std::vector<std::string>, 5> p = {{
      {"damn", "shit*", "hell", "crap"},
      {"fam", "dinner", "grandma", "home*"},
      {"love*", "babe", "kiss*", "heart"},
      {"meeting*", "office", "deadline*", "project*"},
      {"fan*", "concert*", "album*", "stan"},
  }};
  return p;
}

const std::array<std::vector<std::string>, 5>& lexicon_words() {
  static const std::array<std::vector<std::string>, 5> w = {{
      {"damn", "shit", "shitty", "hell", "crap"},
      {"fam", "dinner", "grandma", "home", "homemade"},
      {"love", "lovely", "babe", "kisses", "heart"},
      {"meeting", "meetings", "office", "deadline", "project"},
      {"fan", "fans", "concert", "album", "stan"},
  }};
  return w;
}

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> w = {
      "just", "so",    "the",  "and",  "you",   "are",  "this", "that", "today", "really", "lol",  "now",
      "what", "it",    "is",   "was",  "with",  "for",  "to",   "be",   "all",   "out",    "up",   "get",
      "got",  "see",   "back", "time", "good",  "new",  "one",  "day",  "know",  "think",  "still", "here",
      "too",  "oh",    "yes",  "wait", "there", "when", "why",  "how",  "can",   "will",   "not",  "about"};
  return w;
}

const std::vector<std::string>& rare_phrases() {
  static const std::vector<std::string> p = {"partner in crime", "main squeeze", "second mom", "work wife",
                                             "ultimate idol"};
  return p;
}

const std::vector<Category>& rare_phrase_categories() {
  static const std::vector<Category> c = {Category::Social, Category::Romance, Category::Family,
                                          Category::Organizational, Category::Parasocial};
  return c;
}

const std::vector<std::string>& unmapped_phrases() {
  static const std::vector<std::string> p = {"neighbor", "dentist", "landlord", "old roommate"};
  return p;
}

std::string pseudo_word(std::mt19937_64& rng, int syllables) {
  static const std::string consonants = "bdgkmnprtvz";
  static const std::string vowels = "aeiou";
  std::uniform_int_distribution<std::size_t> c(0, consonants.size() - 1), v(0, vowels.size() - 1);
  std::string w;
  for (int i = 0; i < syllables; ++i) {
    w += consonants[c(rng)];
    w += vowels[v(rng)];
  }
  return w;
}

bool matches_lexicon(const Lexicon& lex, std::string_view text) {
  for (const auto& tok : alnum_tokens(text))
    for (const auto& [name, patterns] : lex.categories)
      for (const auto& p : patterns)
        if (p.matches(tok)) return true;
  return false;
}

std::array<double, 24> bumps(std::initializer_list<std::pair<double, double>> centers_weights, double width,
                             double floor) {
  std::array<double, 24> h{};
  for (int i = 0; i < 24; ++i) {
    h[i] = floor;
    for (auto [c, w] : centers_weights) {
      double d = std::abs(i + 0.5 - c);
      d = std::min(d, 24.0 - d);
      h[i] += w * std::exp(-0.5 * d * d / (width * width));
    }
  }
  return h;
}

std::array<double, 24> normalized(const std::array<double, 24>& h) {
  const double s = std::accumulate(h.begin(), h.end(), 0.0);
  std::array<double, 24> out{};
  for (int i = 0; i < 24; ++i) out[i] = h[i] / s;
  return out;
}

constexpr std::array<int, 11> kOffsets = {-480, -420, -360, -300, -240, 0, 60, 120, 330, 480, 540};

struct SynthUser {
  std::string id;
  std::string username;
  std::string display_name;
  std::int64_t followers = 0;
  int offset = 0;
  bool offset_known = true;
};

struct BlockPlan {
  Category category = Category::Social;
  int users = 0;
  bool hub_block = false;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::string> phrases;  // one per edge
};

struct Original {
  std::size_t tweet = 0;
  int topic = 0;
  bool url = false;
};

struct BlockOutput {
  std::vector<Tweet> tweets;
  std::vector<UserProfile> profiles;
  std::vector<TruthDyad> truth;
  std::vector<std::string> hubs;
  std::size_t leaks = 0;
};

class TweetFactory {
 public:
  TweetFactory(const SynthConfig& c, const std::vector<std::vector<std::string>>& topic_vocab, std::mt19937_64& rng,
               std::string prefix)
      : c_(c), vocab_(topic_vocab), rng_(rng), prefix_(std::move(prefix)) {
    for (int k = 0; k < kNumCategories; ++k) {
      const auto p = normalized(c.hour_profiles[static_cast<std::size_t>(k)]);
      hours_[static_cast<std::size_t>(k)] = std::discrete_distribution<int>(p.begin(), p.end());
    }
  }

  std::int64_t mention_time(Category cat, const SynthUser& author) {
    std::uniform_int_distribution<int> day(0, c_.days - 1), sec(0, 3599);
    const int hour = hours_[static_cast<std::size_t>(category_index(cat))](rng_);
    return c_.start_time + static_cast<std::int64_t>(day(rng_)) * 86400 + hour * 3600 + sec(rng_) -
           static_cast<std::int64_t>(author.offset) * 60;
  }

  std::int64_t uniform_time(const SynthUser& author) {
    std::uniform_int_distribution<std::int64_t> t(0, static_cast<std::int64_t>(c_.days) * 86400 - 1);
    return c_.start_time + t(rng_) - static_cast<std::int64_t>(author.offset) * 60;
  }

  std::vector<std::string> fillers(int n) {
    const auto& f = filler_words();
    std::uniform_int_distribution<std::size_t> pick(0, f.size() - 1);
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(f[pick(rng_)]);
    return out;
  }

  std::vector<std::string> topic_words(int topic, int n) {
    const auto& v = vocab_[static_cast<std::size_t>(topic)];
    std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(v[pick(rng_)]);
    return out;
  }

  std::vector<std::string> conversation_words(Category cat, const std::vector<int>& topics) {
    std::uniform_int_distribution<std::size_t> t(0, topics.size() - 1);
    auto words = fillers(c_.filler_words_per_tweet);
    auto tw = topic_words(topics[t(rng_)], c_.topic_words_per_tweet);
    words.insert(words.end(), tw.begin(), tw.end());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t l = 0; l < 5; ++l) {
      if (u(rng_) < c_.lexicon_rates[static_cast<std::size_t>(category_index(cat))][l]) {
        const auto& lw = lexicon_words()[l];
        std::uniform_int_distribution<std::size_t> pick(0, lw.size() - 1);
        words.push_back(lw[pick(rng_)]);
      }
    }
    std::shuffle(words.begin(), words.end(), rng_);
    return words;
  }

  Tweet make(const SynthUser& author, std::int64_t created_at, std::string text) {
    Tweet t;
    t.tweet_id = prefix_ + std::to_string(counter_++);
    t.author_id = author.id;
    t.created_at = created_at;
    if (author.offset_known) t.utc_offset_minutes = author.offset;
    t.text = std::move(text);
    t.lang = "en";
    return t;
  }

  Tweet directed(const SynthUser& author, const SynthUser& partner, Category cat, const std::vector<int>& topics,
                 const std::string* leak_phrase = nullptr) {
    std::string text = "@" + partner.username;
    for (const auto& w : conversation_words(cat, topics)) text += " " + w;
    if (leak_phrase) text += " my " + *leak_phrase;
    Tweet t = make(author, mention_time(cat, author), std::move(text));
    t.mentions.push_back({partner.id, 0});
    return t;
  }

  Tweet public_mention(const SynthUser& author, const SynthUser& partner, Category cat,
                       const std::vector<int>& topics) {
    auto words = conversation_words(cat, topics);
    std::uniform_int_distribution<std::size_t> at(1, words.size());
    const std::size_t pos = at(rng_);
    std::string text;
    std::size_t offset = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) text += ' ';
      if (i == pos) {
        offset = utf8_length(text);
        text += "@" + partner.username + " ";
      }
      text += words[i];
    }
    if (pos == words.size()) {
      text += ' ';
      offset = utf8_length(text);
      text += "@" + partner.username;
    }
    Tweet t = make(author, mention_time(cat, author), std::move(text));
    t.mentions.push_back({partner.id, offset});
    return t;
  }

  Tweet declaration(const SynthUser& author, const SynthUser& target, Category cat, const std::string& phrase,
                    bool category_time = true) {
    auto f = fillers(3);
    std::string text = f[0] + " my " + phrase + " ";
    const std::size_t offset = utf8_length(text);
    text += "@" + target.username + " " + f[1] + " " + f[2];
    Tweet t = make(author, category_time ? mention_time(cat, author) : uniform_time(author), std::move(text));
    t.mentions.push_back({target.id, offset});
    return t;
  }

  Tweet original(const SynthUser& author, int topic, bool url) {
    auto words = topic_words(topic, c_.topic_words_per_tweet);
    auto f = fillers(1);
    words.insert(words.end(), f.begin(), f.end());
    std::shuffle(words.begin(), words.end(), rng_);
    std::string text;
    for (std::size_t i = 0; i < words.size(); ++i) text += (i ? " " : "") + words[i];
    const std::string id = prefix_ + std::to_string(counter_);
    if (url) text += " https://t.co/" + id;
    return make(author, uniform_time(author), std::move(text));
  }

  Tweet retweet(const SynthUser& retweeter, const Tweet& source) {
    std::uniform_int_distribution<std::int64_t> delay(60, 2 * 86400);
    Tweet t = make(retweeter, source.created_at + delay(rng_), source.text);
    t.retweet_of = RetweetRef{source.tweet_id, source.author_id};
    return t;
  }

 private:
  const SynthConfig& c_;
  const std::vector<std::vector<std::string>>& vocab_;
  std::mt19937_64& rng_;
  std::string prefix_;
  std::size_t counter_ = 0;
  std::array<std::discrete_distribution<int>, kNumCategories> hours_;
};

double retweet_probability(const SynthConfig& c, Category cat, int topic, bool url) {
  double p = topic == 0 ? c.retweet_base_personal : topic == 1 ? c.retweet_base_news : c.retweet_base_misc;
  if (url) p += c.retweet_url_bonus;
  if (topic == 0 && c.interaction_categories[static_cast<std::size_t>(category_index(cat))]) p += c.interaction;
  return std::clamp(p, 0.0, 1.0);
}

int draw_original_topic(const SynthConfig& c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng);
  if (x < c.personal_share) return 0;
  if (x < c.personal_share + c.news_share) return 1;
  std::uniform_int_distribution<int> misc(2, c.topics - 1);
  return misc(rng);
}

UserProfile profile_of(const SynthUser& u) {
  UserProfile p;
  p.user_id = u.id;
  p.username = u.username;
  p.display_name = u.display_name;
  p.follower_count = u.followers;
  return p;
}

SynthUser make_user(std::string id, std::string tag, bool hub, const SynthConfig& c, std::mt19937_64& rng) {
  SynthUser u;
  u.id = std::move(id);
  const std::string a = pseudo_word(rng, 2), b = pseudo_word(rng, 2);
  u.username = a + tag;
  u.display_name = a + " " + b;
  u.display_name[0] = static_cast<char>(u.display_name[0] - 'a' + 'A');
  std::uniform_int_distribution<std::int64_t> f(hub ? c.hub_min_followers : 10,
                                                hub ? c.hub_min_followers * 250 : c.user_max_followers);
  u.followers = f(rng);
  std::uniform_int_distribution<std::size_t> off(0, kOffsets.size() - 1);
  u.offset = kOffsets[off(rng)];
  std::uniform_real_distribution<double> x(0.0, 1.0);
  u.offset_known = x(rng) >= c.null_offset_rate;
  return u;
}

BlockOutput generate_block(const SynthConfig& c, const BlockPlan& plan, std::size_t b,
                           const std::vector<std::vector<std::string>>& vocab,
                           const PerCategory<std::vector<std::string>>& phrases) {
  std::mt19937_64 rng(derive_seed(c.seed, "block", b));
  BlockOutput out;
  std::vector<SynthUser> users;
  for (int i = 0; i < plan.users; ++i) {
    const bool hub = plan.hub_block && i == 0;
    users.push_back(make_user("b" + std::to_string(b) + "u" + std::to_string(i),
                              std::to_string(b) + "_" + std::to_string(i), hub, c, rng));
    out.profiles.push_back(profile_of(users.back()));
    if (hub) out.hubs.push_back(users.back().id);
  }
  TweetFactory f(c, vocab, rng, "t" + std::to_string(b) + "_");
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Category cat = plan.category;
  const std::size_t ci = static_cast<std::size_t>(category_index(cat));

  std::vector<std::vector<Original>> originals(users.size());
  for (std::size_t i = 0; i < users.size(); ++i)
    for (int k = 0; k < c.originals_per_user; ++k) {
      const int topic = draw_original_topic(c, rng);
      const bool url = u01(rng) < c.url_rate;
      originals[i].push_back({out.tweets.size(), topic, url});
      out.tweets.push_back(f.original(users[i], topic, url));
    }

  std::vector<int> misc(static_cast<std::size_t>(c.topics - 2));
  std::iota(misc.begin(), misc.end(), 2);
  for (std::size_t e = 0; e < plan.edges.size(); ++e) {
    auto [x, y] = plan.edges[e];
    int declarer = x, target = y;
    if (!plan.hub_block && u01(rng) < 0.5) std::swap(declarer, target);
    const SynthUser& D = users[static_cast<std::size_t>(declarer)];
    const SynthUser& T = users[static_cast<std::size_t>(target)];
    TruthDyad truth;
    truth.user_a = std::min(D.id, T.id);
    truth.user_b = std::max(D.id, T.id);
    truth.category = cat;
    truth.phrase = plan.phrases[e];
    truth.declarer = D.id;
    std::shuffle(misc.begin(), misc.end(), rng);
    truth.topics.assign(misc.begin(), misc.begin() + c.topic_breadth[ci]);
    std::sort(truth.topics.begin(), truth.topics.end());

    out.tweets.push_back(f.declaration(D, T, cat, truth.phrase));
    if (cat != Category::Parasocial && u01(rng) < c.second_declaration_rate) {
      const auto& list = phrases[ci];
      std::uniform_int_distribution<std::size_t> pick(0, list.size() - 1);
      out.tweets.push_back(f.declaration(T, D, cat, list[pick(rng)]));
    }
    std::uniform_int_distribution<int> dm(c.dm_min, c.dm_max), pm(c.pm_min, c.pm_max);
    for (int side = 0; side < 2; ++side) {
      const SynthUser& A = side == 0 ? D : T;
      const SynthUser& P = side == 0 ? T : D;
      const double keep = side == 0 ? 1.0 : c.reciprocity[ci];
      const int n_dm = dm(rng), n_pm = pm(rng);
      for (int k = 0; k < n_dm; ++k)
        if (u01(rng) < keep) out.tweets.push_back(f.directed(A, P, cat, truth.topics));
      for (int k = 0; k < n_pm; ++k)
        if (u01(rng) < keep) out.tweets.push_back(f.public_mention(A, P, cat, truth.topics));
    }
    if (u01(rng) < c.leak_rate) {
      out.tweets.push_back(f.directed(D, T, cat, truth.topics, &truth.phrase));
      ++out.leaks;
    }
    for (int side = 0; side < 2; ++side) {
      const int a = side == 0 ? declarer : target;
      const int p = side == 0 ? target : declarer;
      for (const auto& o : originals[static_cast<std::size_t>(a)]) {
        if (u01(rng) < retweet_probability(c, cat, o.topic, o.url)) {
          Tweet rt = f.retweet(users[static_cast<std::size_t>(p)], out.tweets[o.tweet]);
          out.tweets.push_back(std::move(rt));
        }
      }
    }
    out.truth.push_back(std::move(truth));
  }
  return out;
}

}  // namespace

PerCategory<std::array<double, 24>> SynthConfig::default_hour_profiles() {
  return {
      bumps({{21.5, 1.0}, {13.0, 0.4}}, 2.0, 0.05),
      bumps({{22.5, 1.0}, {8.0, 0.5}}, 1.8, 0.05),
      bumps({{19.0, 1.0}, {12.5, 0.6}}, 2.0, 0.05),
      bumps({{10.0, 1.0}, {14.5, 1.0}}, 2.0, 0.03),
      bumps({{20.0, 1.0}, {1.0, 0.5}}, 2.2, 0.05),
  };
}

Lexicon synthetic_lexicon() {
  Lexicon lex;
  for (std::size_t l = 0; l < 5; ++l)
    for (const auto& p : lexicon_patterns()[l]) lex.categories[kLexCats[l]].push_back(parse_lexicon_pattern(p));
  return lex;
}

std::vector<std::string> synthetic_lexicon_categories() { return {kLexCats.begin(), kLexCats.end()}; }

PerCategory<std::vector<std::string>> synthetic_phrases() {
  return {{
      {"best friend", "friend", "bestie", "buddy", "homie", "bff"},
      {"boyfriend", "girlfriend", "husband", "wife", "dear husband", "fiance"},
      {"mom", "dad", "sister", "brother", "little brother", "cousin"},
      {"boss", "coworker", "manager", "colleague", "team lead"},
      {"idol", "favorite singer", "celebrity crush", "hero", "queen"},
  }};
}

void validate_synth_config(const SynthConfig& c) {
  auto rate = [](double r, const char* what) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError(std::string(what) + " must lie in [0, 1]");
  };
  for (const auto& row : c.lexicon_rates)
    for (double r : row) rate(r, "lexicon rate");
  for (double r : c.block_density) rate(r, "block density");
  for (double r : c.reciprocity) rate(r, "reciprocity");
  for (double r : {c.null_offset_rate, c.personal_share, c.news_share, c.url_rate, c.retweet_base_personal,
                   c.retweet_base_news, c.retweet_base_misc, c.retweet_url_bonus, c.second_declaration_rate,
                   c.leak_rate, c.hub_noise_rate})
    rate(r, "synth rate");
  if (c.interaction < -1.0 || c.interaction > 1.0) throw ConfigError("interaction must lie in [-1, 1]");
  if (c.personal_share + c.news_share > 1.0) throw ConfigError("personal and news shares exceed 1");
  if (c.topics < 3) throw ConfigError("synth needs at least 3 topics");
  if (c.words_per_topic < 1 || c.topic_words_per_tweet < 1 || c.filler_words_per_tweet < 3)
    throw ConfigError("word counts too small (fillers must be >= 3)");
  for (Category cat : kAllCategories) {
    const auto i = static_cast<std::size_t>(category_index(cat));
    if (c.topic_breadth[i] < 1 || c.topic_breadth[i] > c.topics - 2)
      throw ConfigError("topic breadth must lie in [1, topics - 2]");
    double s = 0;
    for (double h : c.hour_profiles[i]) {
      if (!(h >= 0.0)) throw ConfigError("hour profile entries must be non-negative");
      s += h;
    }
    if (!(s > 0.0)) throw ConfigError("hour profile sums to zero");
    if (cat != Category::Parasocial && c.dyads[i] > 0 && (c.block_size[i] < 2 || !(c.block_density[i] > 0.0)))
      throw ConfigError("blocks need at least 2 users and positive density");
  }
  if (c.dm_min < 1 || c.dm_max < c.dm_min || c.pm_min < 0 || c.pm_max < c.pm_min)
    throw ConfigError("bad mention count range");
  if (c.days < 1 || c.originals_per_user < 0) throw ConfigError("bad time span or original count");
  if (c.fans_per_hub < 1) throw ConfigError("fans_per_hub must be >= 1");
  const std::size_t para = c.dyads[static_cast<std::size_t>(category_index(Category::Parasocial))];
  if (c.hubs < 0 || static_cast<std::size_t>(c.hubs) > para)
    throw ConfigError("hub count exceeds the parasocial dyad count");
  if (c.hub_min_followers <= 10000) throw ConfigError("hubs need more than 10,000 followers");
  if (c.user_max_followers > 10000 || c.user_max_followers < 10) throw ConfigError("user followers must stay in [10, 10000]");
  if (c.rare_phrase_occurrences < 0 || c.rare_phrase_occurrences >= c.min_phrase_count)
    throw ConfigError("rare phrases must occur fewer than min_phrase_count times");
}

SynthCorpus generate_corpus(const SynthConfig& c) {
  validate_synth_config(c);
  SynthCorpus corpus;
  corpus.lexicon = synthetic_lexicon();
  const auto phrases = synthetic_phrases();
  for (Category cat : kAllCategories)
    for (const auto& p : phrases[static_cast<std::size_t>(category_index(cat))]) corpus.phrase_map[p] = cat;
  for (std::size_t i = 0; i < rare_phrases().size(); ++i) corpus.phrase_map[rare_phrases()[i]] = rare_phrase_categories()[i];

  // Vocabulary shared by every block.
  std::mt19937_64 vocab_rng(derive_seed(c.seed, "vocab"));
  std::set<std::string> used(filler_words().begin(), filler_words().end());
  std::vector<std::vector<std::string>> vocab(static_cast<std::size_t>(c.topics));
  for (auto& words : vocab)
    while (static_cast<int>(words.size()) < c.words_per_topic) {
      auto w = pseudo_word(vocab_rng, 3);
      if (used.insert(w).second) words.push_back(w);
    }
  for (const auto& w : used)
    if (matches_lexicon(corpus.lexicon, w)) throw Error("synthetic vocabulary word '" + w + "' matches the lexicon");
  for (const auto& [p, cat] : corpus.phrase_map)
    if (matches_lexicon(corpus.lexicon, p)) throw Error("phrase '" + p + "' matches the lexicon");
  for (const auto& p : unmapped_phrases())
    if (matches_lexicon(corpus.lexicon, p)) throw Error("phrase '" + p + "' matches the lexicon");

  // Block plans.
  std::mt19937_64 plan_rng(derive_seed(c.seed, "plan"));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<BlockPlan> plans;
  for (Category cat : kAllCategories) {
    const auto ci = static_cast<std::size_t>(category_index(cat));
    std::size_t remaining = c.dyads[ci];
    std::vector<BlockPlan> mine;
    if (cat == Category::Parasocial) {
      if (remaining == 0) continue;
      const std::size_t hubs =
          c.hubs > 0 ? static_cast<std::size_t>(c.hubs)
                     : (remaining + static_cast<std::size_t>(c.fans_per_hub) - 1) / static_cast<std::size_t>(c.fans_per_hub);
      for (std::size_t h = 0; h < hubs; ++h) {
        const std::size_t fans = remaining / hubs + (h < remaining % hubs ? 1 : 0);
        BlockPlan p;
        p.category = cat;
        p.hub_block = true;
        p.users = static_cast<int>(fans) + 1;
        for (std::size_t j = 1; j <= fans; ++j) p.edges.emplace_back(0, static_cast<int>(j));
        mine.push_back(std::move(p));
      }
    } else {
      while (remaining > 0) {
        BlockPlan p;
        p.category = cat;
        p.users = c.block_size[ci];
        for (int i = 0; i < p.users; ++i)
          for (int j = i + 1; j < p.users; ++j)
            if (u01(plan_rng) < c.block_density[ci]) p.edges.emplace_back(i, j);
        if (p.edges.empty()) p.edges.emplace_back(0, 1);
        if (p.edges.size() > remaining) {
          std::shuffle(p.edges.begin(), p.edges.end(), plan_rng);
          p.edges.resize(remaining);
          std::sort(p.edges.begin(), p.edges.end());
        }
        remaining -= p.edges.size();
        mine.push_back(std::move(p));
      }
    }
    // Phrases rotate through a shuffled list so every phrase is used evenly.
    auto list = phrases[ci];
    std::shuffle(list.begin(), list.end(), plan_rng);
    std::size_t k = 0;
    for (auto& p : mine)
      for (std::size_t e = 0; e < p.edges.size(); ++e) p.phrases.push_back(list[k++ % list.size()]);
    for (auto& p : mine) plans.push_back(std::move(p));
  }

  std::vector<BlockOutput> outputs(plans.size());
  parallel_for(plans.size(), c.workers,
               [&](std::size_t b) { outputs[b] = generate_block(c, plans[b], b, vocab, phrases); });
  for (auto& o : outputs) {
    for (auto& t : o.tweets) corpus.tweets.push_back(std::move(t));
    for (auto& p : o.profiles) corpus.profiles.push_back(std::move(p));
    for (auto& t : o.truth) corpus.truth.push_back(std::move(t));
    for (auto& h : o.hubs) corpus.hubs.push_back(std::move(h));
    corpus.leak_tweets += o.leaks;
  }
  for (const auto& p : corpus.profiles)
    if (matches_lexicon(corpus.lexicon, "@" + p.username))
      throw Error("username '" + p.username + "' matches the lexicon");

  // Noise declarations from users outside every block.
  std::mt19937_64 noise_rng(derive_seed(c.seed, "noise"));
  std::vector<SynthUser> block_users;
  for (const auto& p : corpus.profiles) {
    SynthUser u;
    u.id = p.user_id;
    u.username = p.username;
    block_users.push_back(u);
  }
  TweetFactory nf(c, vocab, noise_rng, "n");
  std::size_t noise_users = 0;
  auto new_noise_user = [&] {
    SynthUser u = make_user("n" + std::to_string(noise_users), "n" + std::to_string(noise_users), false, c, noise_rng);
    ++noise_users;
    corpus.profiles.push_back(profile_of(u));
    return u;
  };
  std::size_t total_dyads = 0;
  for (auto n : c.dyads) total_dyads += n;
  if (!corpus.hubs.empty()) {
    const auto n = static_cast<std::size_t>(std::llround(c.hub_noise_rate * static_cast<double>(total_dyads)));
    std::uniform_int_distribution<std::size_t> hub(0, corpus.hubs.size() - 1);
    std::uniform_int_distribution<int> cat(0, kNumCategories - 2);
    for (std::size_t i = 0; i < n; ++i) {
      const SynthUser fan = new_noise_user();
      const std::string& hub_id = corpus.hubs[hub(noise_rng)];
      const auto it = std::find_if(corpus.profiles.begin(), corpus.profiles.end(),
                                   [&](const UserProfile& p) { return p.user_id == hub_id; });
      SynthUser target;
      target.id = it->user_id;
      target.username = it->username;
      const Category k = category_from_index(cat(noise_rng));
      const auto& list = phrases[static_cast<std::size_t>(category_index(k))];
      std::uniform_int_distribution<std::size_t> pick(0, list.size() - 1);
      corpus.tweets.push_back(nf.declaration(fan, target, k, list[pick(noise_rng)], false));
      ++corpus.hub_noise_declarations;
    }
  }
  if (!block_users.empty()) {
    std::uniform_int_distribution<std::size_t> anyone(0, block_users.size() - 1);
    for (const auto& phrase : rare_phrases())
      for (int i = 0; i < c.rare_phrase_occurrences; ++i) {
        const SynthUser from = new_noise_user();
        corpus.tweets.push_back(nf.declaration(from, block_users[anyone(noise_rng)], Category::Social, phrase, false));
        ++corpus.rare_declarations;
      }
    std::uniform_int_distribution<std::size_t> which(0, unmapped_phrases().size() - 1);
    for (int i = 0; i < c.unmapped_declarations; ++i) {
      const SynthUser from = new_noise_user();
      corpus.tweets.push_back(
          nf.declaration(from, block_users[anyone(noise_rng)], Category::Social, unmapped_phrases()[which(noise_rng)], false));
      ++corpus.unmapped_declarations;
    }
  }

  // Ground-truth parameter dump.
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["tweets"] = corpus.tweets.size();
  j["profiles"] = corpus.profiles.size();
  auto per_cat = [](const auto& arr) {
    nlohmann::ordered_json o;
    for (Category cat : kAllCategories) o[std::string(category_name(cat))] = arr[static_cast<std::size_t>(category_index(cat))];
    return o;
  };
  j["dyads"] = per_cat(c.dyads);
  nlohmann::ordered_json rates;
  for (Category cat : kAllCategories) {
    nlohmann::ordered_json r;
    for (std::size_t l = 0; l < 5; ++l) r[kLexCats[l]] = c.lexicon_rates[static_cast<std::size_t>(category_index(cat))][l];
    rates[std::string(category_name(cat))] = r;
  }
  j["lexicon_rates"] = rates;
  j["topics"] = c.topics;
  j["topic_breadth"] = per_cat(c.topic_breadth);
  j["topic_vocabulary"] = vocab;
  nlohmann::ordered_json hours;
  for (Category cat : kAllCategories)
    hours[std::string(category_name(cat))] = normalized(c.hour_profiles[static_cast<std::size_t>(category_index(cat))]);
  j["hour_profiles"] = hours;
  j["null_offset_rate"] = c.null_offset_rate;
  j["block_size"] = per_cat(c.block_size);
  j["block_density"] = per_cat(c.block_density);
  j["reciprocity"] = per_cat(c.reciprocity);
  j["hubs"] = corpus.hubs;
  j["hub_min_followers"] = c.hub_min_followers;
  j["mentions"] = {{"dm_min", c.dm_min}, {"dm_max", c.dm_max}, {"pm_min", c.pm_min}, {"pm_max", c.pm_max}};
  j["originals_per_user"] = c.originals_per_user;
  j["days"] = c.days;
  j["start_time"] = c.start_time;
  j["retweet"] = {{"personal_share", c.personal_share},
                  {"news_share", c.news_share},
                  {"url_rate", c.url_rate},
                  {"base_personal", c.retweet_base_personal},
                  {"base_news", c.retweet_base_news},
                  {"base_misc", c.retweet_base_misc},
                  {"url_bonus", c.retweet_url_bonus},
                  {"interaction", c.interaction},
                  {"interaction_categories", per_cat(c.interaction_categories)}};
  j["declarations"] = {{"second_declaration_rate", c.second_declaration_rate},
                       {"leak_rate", c.leak_rate},
                       {"leak_tweets", corpus.leak_tweets},
                       {"hub_noise_rate", c.hub_noise_rate},
                       {"hub_noise_declarations", corpus.hub_noise_declarations},
                       {"rare_phrases", rare_phrases()},
                       {"rare_phrase_occurrences", c.rare_phrase_occurrences},
                       {"unmapped_phrases", unmapped_phrases()},
                       {"unmapped_declarations", corpus.unmapped_declarations},
                       {"suggested_min_phrase_count", c.min_phrase_count}};
  corpus.truth_json = j.dump(2);
  return corpus;
}

std::string serialize_truth_dyad(const TruthDyad& d) {
  nlohmann::ordered_json j;
  j["user_a"] = d.user_a;
  j["user_b"] = d.user_b;
  j["category"] = std::string(category_name(d.category));
  j["phrase"] = d.phrase;
  j["declarer"] = d.declarer;
  j["topics"] = d.topics;
  return j.dump();
}

TruthDyad parse_truth_dyad(std::string_view line, std::size_t line_no) {
  auto j = nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError(line_no, "malformed truth record");
  try {
    TruthDyad d;
    d.user_a = j.at("user_a").get<std::string>();
    d.user_b = j.at("user_b").get<std::string>();
    auto cat = parse_category(j.at("category").get<std::string>());
    if (!cat) throw ParseError(line_no, "unknown category");
    d.category = *cat;
    d.phrase = j.at("phrase").get<std::string>();
    d.declarer = j.at("declarer").get<std::string>();
    d.topics = j.at("topics").get<std::vector<int>>();
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(line_no, e.what());
  }
}

void write_synth_corpus(const SynthCorpus& corpus, const std::string& dir, const std::string& header) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name, bool with_header = true) {
    std::ofstream os(dir + "/" + name, std::ios::binary);
    if (!os) throw Error("cannot write " + dir + "/" + name);
    if (with_header) os << header;
    return os;
  };
  {
    auto os = open("tweets.ndjson");
    for (const auto& t : corpus.tweets) os << serialize_tweet(t) << '\n';
  }
  {
    auto os = open("profiles.ndjson");
    for (const auto& p : corpus.profiles) os << serialize_profile(p) << '\n';
  }
  {
    auto os = open("lexicon.txt");
    os << serialize_lexicon(corpus.lexicon);
  }
  {
    auto os = open("phrase_map.tsv");
    os << serialize_phrase_map(corpus.phrase_map);
  }
  {
    auto os = open("truth_dyads.ndjson");
    for (const auto& d : corpus.truth) os << serialize_truth_dyad(d) << '\n';
  }
  {
    auto os = open("truth.json", false);
    auto doc = nlohmann::ordered_json::parse(corpus.truth_json);
    std::string line = header;
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
    doc["header"] = line;
    os << doc.dump(2) << '\n';
  }
}

}  // namespace relnet
