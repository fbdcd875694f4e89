#include "relnet/extract.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <random>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "relnet/parallel.hpp"
#include "relnet/text.hpp"

namespace relnet {

namespace {

bool is_ascii_punct(char c) {
  auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

}  // namespace

std::vector<RelationshipDeclaration> scan_tweet(const Tweet& t) {
  std::vector<RelationshipDeclaration> out;
  if (t.mentions.empty()) return out;
  const auto tokens = whitespace_tokens(t.text);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (to_lower(tokens[i].text) != "my") continue;
    std::vector<std::string> words;
    for (std::size_t k = i + 1; k < tokens.size() && k <= i + 4; ++k) {
      const Token& tok = tokens[k];
      if (tok.text.front() == '@') {
        if (words.empty()) break;
        auto m = std::find_if(t.mentions.begin(), t.mentions.end(),
                              [&](const Mention& mm) { return mm.offset == tok.offset; });
        if (m == t.mentions.end() || m->user_id == t.author_id) break;
        std::string phrase;
        for (const auto& w : words) phrase += (phrase.empty() ? "" : " ") + w;
        out.push_back({t.author_id, m->user_id, std::move(phrase), t.tweet_id, t.created_at});
        break;
      }
      if (words.size() == 3) break;
      std::string w = to_lower(tok.text);
      while (!w.empty() && is_ascii_punct(w.back())) w.pop_back();
      if (w.empty()) break;
      words.push_back(std::move(w));
    }
  }
  return out;
}

std::vector<RelationshipDeclaration> scan_declarations(const std::vector<Tweet>& tweets, int workers) {
  std::vector<std::vector<RelationshipDeclaration>> shards(chunk_count(tweets.size(), workers));
  parallel_chunks(tweets.size(), workers, [&](std::size_t c, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      for (auto& d : scan_tweet(tweets[i])) shards[c].push_back(std::move(d));
  });
  std::vector<RelationshipDeclaration> out;
  for (auto& s : shards)
    for (auto& d : s) out.push_back(std::move(d));
  return out;
}

std::set<std::string> filter_phrases_by_frequency(const std::vector<RelationshipDeclaration>& decls, int min_count) {
  if (min_count < 1) throw ConfigError("min_phrase_count must be >= 1");
  std::map<std::string, int> counts;
  for (const auto& d : decls) ++counts[d.phrase];
  std::set<std::string> out;
  for (const auto& [phrase, n] : counts)
    if (n >= min_count) out.insert(phrase);
  return out;
}

std::vector<RelationshipDeclaration> retain_phrases(const std::vector<RelationshipDeclaration>& decls,
                                                    const std::set<std::string>& keep) {
  std::vector<RelationshipDeclaration> out;
  std::copy_if(decls.begin(), decls.end(), std::back_inserter(out),
               [&](const RelationshipDeclaration& d) { return keep.count(d.phrase) > 0; });
  return out;
}

PhraseMap load_phrase_map(std::istream& in) {
  PhraseMap out;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(no, "expected 'phrase<TAB>category'");
    const std::string phrase = to_lower(line.substr(0, tab));
    auto cat = parse_category(line.substr(tab + 1));
    if (!cat) throw ParseError(no, "unknown category '" + line.substr(tab + 1) + "'");
    auto [it, inserted] = out.emplace(phrase, *cat);
    if (!inserted && it->second != *cat) throw ConfigError("phrase '" + phrase + "' mapped to two categories");
  }
  return out;
}

PhraseMap load_phrase_map_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return load_phrase_map(in);
}

std::string serialize_phrase_map(const PhraseMap& m) {
  std::string out;
  for (const auto& [phrase, cat] : m) out += phrase + "\t" + std::string(category_name(cat)) + "\n";
  return out;
}

std::vector<LabeledDyad> label_dyads(const std::vector<RelationshipDeclaration>& decls, const PhraseMap& phrase_map,
                                     std::uint64_t seed) {
  std::map<std::pair<std::string, std::string>, std::vector<const RelationshipDeclaration*>> groups;
  for (const auto& d : decls) {
    if (!phrase_map.count(d.phrase) || d.declarer == d.target) continue;
    auto key = d.declarer < d.target ? std::make_pair(d.declarer, d.target) : std::make_pair(d.target, d.declarer);
    groups[key].push_back(&d);
  }
  std::vector<LabeledDyad> out;
  out.reserve(groups.size());
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(), [](const auto* x, const auto* y) {
      return std::tie(x->tweet_id, x->declarer, x->target, x->phrase) <
             std::tie(y->tweet_id, y->declarer, y->target, y->phrase);
    });
    std::mt19937_64 rng(derive_seed(seed, key.first, key.second));
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    const RelationshipDeclaration& chosen = *members[pick(rng)];
    LabeledDyad dyad;
    dyad.user_a = key.first;
    dyad.user_b = key.second;
    dyad.category = phrase_map.at(chosen.phrase);
    dyad.phrase = chosen.phrase;
    dyad.declarer = chosen.declarer;
    for (const auto* m : members) dyad.source_tweet_ids.push_back(m->tweet_id);
    out.push_back(std::move(dyad));
  }
  return out;
}

ParasocialFilterResult filter_parasocial_targets(const std::vector<LabeledDyad>& dyads, const ProfileIndex& profiles,
                                                 std::int64_t follower_threshold) {
  if (follower_threshold < 0) throw ConfigError("follower threshold must be >= 0");
  ParasocialFilterResult out;
  for (const auto& d : dyads) {
    if (d.category != Category::Parasocial) {
      auto it = profiles.find(d.target());
      if (it == profiles.end()) {
        out.unknown_profiles.push_back(d.target());
      } else if (it->second.follower_count > follower_threshold) {
        ++out.removed;
        continue;
      }
    }
    out.kept.push_back(d);
  }
  return out;
}

TweetIndex::TweetIndex(const std::vector<Tweet>& tweets) : tweets_(&tweets) {
  kinds_.reserve(tweets.size());
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    by_author_[tweets[i].author_id].push_back(i);
    kinds_.push_back(classify_interaction(tweets[i]));
  }
}

const std::vector<std::size_t>& TweetIndex::by_author(const std::string& user) const {
  auto it = by_author_.find(user);
  return it == by_author_.end() ? empty_ : it->second;
}

std::vector<std::size_t> interactions_toward(const TweetIndex& index, const std::string& author,
                                             const std::string& partner, InteractionKind kind) {
  std::vector<std::size_t> out;
  const auto& tweets = index.tweets();
  for (std::size_t i : index.by_author(author)) {
    if (index.kinds()[i] != kind) continue;
    const Tweet& t = tweets[i];
    bool hit = false;
    switch (kind) {
      case InteractionKind::DirectedMention:
        hit = t.mentions.front().user_id == partner;
        break;
      case InteractionKind::PublicMention:
        hit = std::any_of(t.mentions.begin(), t.mentions.end(), [&](const Mention& m) { return m.user_id == partner; });
        break;
      case InteractionKind::Retweet:
        hit = t.retweet_of->author_id == partner;
        break;
      case InteractionKind::Other:
        break;
    }
    if (hit) out.push_back(i);
  }
  return out;
}

bool leaks_label(const Tweet& t, const LabeledDyad& dyad) {
  if (std::find(dyad.source_tweet_ids.begin(), dyad.source_tweet_ids.end(), t.tweet_id) != dyad.source_tweet_ids.end())
    return true;
  const auto phrase = alnum_tokens(dyad.phrase);
  if (phrase.empty()) return false;
  const auto words = alnum_tokens(t.text);
  return std::search(words.begin(), words.end(), phrase.begin(), phrase.end()) != words.end();
}

std::vector<std::size_t> UserTweetSample::all() const {
  std::vector<std::size_t> out = directed;
  out.insert(out.end(), public_mentions.begin(), public_mentions.end());
  out.insert(out.end(), retweets.begin(), retweets.end());
  return out;
}

std::vector<std::size_t> DyadTweetSample::all() const {
  std::vector<std::size_t> out = a.all();
  auto rest = b.all();
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

namespace {

UserTweetSample sample_user(const LabeledDyad& dyad, const std::string& user, const TweetIndex& index,
                            std::size_t per_kind_cap, std::size_t per_user_cap) {
  const auto& tweets = index.tweets();
  auto newest_first = [&](std::size_t x, std::size_t y) {
    if (tweets[x].created_at != tweets[y].created_at) return tweets[x].created_at > tweets[y].created_at;
    return tweets[x].tweet_id < tweets[y].tweet_id;
  };
  const std::string& partner = dyad.partner_of(user);
  auto pick = [&](InteractionKind kind) {
    auto ids = interactions_toward(index, user, partner, kind);
    std::erase_if(ids, [&](std::size_t i) { return leaks_label(tweets[i], dyad); });
    std::sort(ids.begin(), ids.end(), newest_first);
    if (ids.size() > per_kind_cap) ids.resize(per_kind_cap);
    return ids;
  };
  UserTweetSample s;
  s.user = user;
  s.directed = pick(InteractionKind::DirectedMention);
  s.public_mentions = pick(InteractionKind::PublicMention);
  s.retweets = pick(InteractionKind::Retweet);
  if (s.total() > per_user_cap) {
    auto merged = s.all();
    std::sort(merged.begin(), merged.end(), newest_first);
    std::unordered_set<std::size_t> keep(merged.begin(), merged.begin() + static_cast<std::ptrdiff_t>(per_user_cap));
    for (auto* list : {&s.directed, &s.public_mentions, &s.retweets})
      std::erase_if(*list, [&](std::size_t i) { return !keep.count(i); });
  }
  return s;
}

}  // namespace

DyadTweetSample prepare_dyad_tweets(const LabeledDyad& dyad, std::size_t dyad_index, const TweetIndex& index,
                                    std::size_t per_kind_cap, std::size_t per_user_cap) {
  if (per_kind_cap < 1 || per_user_cap < 1) throw ConfigError("tweet caps must be >= 1");
  DyadTweetSample s;
  s.dyad = dyad_index;
  s.a = sample_user(dyad, dyad.user_a, index, per_kind_cap, per_user_cap);
  s.b = sample_user(dyad, dyad.user_b, index, per_kind_cap, per_user_cap);
  return s;
}

ExtractResult run_extraction(const std::vector<Tweet>& tweets, const PhraseMap& phrase_map,
                             const ProfileIndex& profiles, const ExtractConfig& config) {
  ExtractResult r;
  r.declarations = scan_declarations(tweets, config.workers);
  r.frequent_phrases = filter_phrases_by_frequency(r.declarations, config.min_phrase_count);
  auto labeled = label_dyads(retain_phrases(r.declarations, r.frequent_phrases), phrase_map, config.seed);
  r.labeled_before_filter = labeled.size();
  auto filtered = filter_parasocial_targets(labeled, profiles, config.follower_threshold);
  r.removed_by_follower_filter = filtered.removed;
  r.unknown_profiles = filtered.unknown_profiles.size();
  r.dyads = std::move(filtered.kept);
  TweetIndex index(tweets);
  r.samples.resize(r.dyads.size());
  parallel_for(r.dyads.size(), config.workers, [&](std::size_t i) {
    r.samples[i] = prepare_dyad_tweets(r.dyads[i], i, index, config.per_kind_cap, config.per_user_cap);
  });
  return r;
}

std::string serialize_dyad(const LabeledDyad& d) {
  nlohmann::ordered_json j;
  j["user_a"] = d.user_a;
  j["user_b"] = d.user_b;
  j["category"] = std::string(category_name(d.category));
  j["phrase"] = d.phrase;
  j["declarer"] = d.declarer;
  j["source_tweet_ids"] = d.source_tweet_ids;
  return j.dump();
}

LabeledDyad parse_dyad_record(std::string_view line, std::size_t line_no) {
  auto j = nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError(line_no, "malformed dyad record");
  try {
    LabeledDyad d;
    d.user_a = j.at("user_a").get<std::string>();
    d.user_b = j.at("user_b").get<std::string>();
    auto cat = parse_category(j.at("category").get<std::string>());
    if (!cat) throw ParseError(line_no, "unknown category");
    d.category = *cat;
    d.phrase = j.at("phrase").get<std::string>();
    d.declarer = j.at("declarer").get<std::string>();
    d.source_tweet_ids = j.at("source_tweet_ids").get<std::vector<std::string>>();
    if (!(d.user_a < d.user_b)) throw ParseError(line_no, "dyad users not in canonical order");
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(line_no, e.what());
  }
}

std::vector<LabeledDyad> read_dyads_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<LabeledDyad> out;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (line.empty() || line.front() == '#') continue;
    out.push_back(parse_dyad_record(line, no));
  }
  return out;
}

}  // namespace relnet
