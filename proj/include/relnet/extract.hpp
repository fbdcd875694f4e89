#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "relnet/common.hpp"
#include "relnet/corpus.hpp"

namespace relnet {

struct RelationshipDeclaration {
  std::string declarer;
  std::string target;
  std::string phrase;  // 1-3 lowercase words
  std::string tweet_id;
  std::int64_t created_at = 0;

  bool operator==(const RelationshipDeclaration&) const = default;
};

struct LabeledDyad {
  std::string user_a;  // user_a < user_b
  std::string user_b;
  Category category = Category::Social;
  std::string phrase;
  std::vector<std::string> source_tweet_ids;  // every declaration tweet of the pair
  std::string declarer;

  const std::string& target() const { return declarer == user_a ? user_b : user_a; }
  const std::string& partner_of(const std::string& u) const { return u == user_a ? user_b : user_a; }
  bool operator==(const LabeledDyad&) const = default;
};

/// Declarations found in one tweet: "my" + 1-3 words + a recorded mention.
std::vector<RelationshipDeclaration> scan_tweet(const Tweet& t);

std::vector<RelationshipDeclaration> scan_declarations(const std::vector<Tweet>& tweets, int workers = 1);

/// Phrases occurring at least `min_count` times.
std::set<std::string> filter_phrases_by_frequency(const std::vector<RelationshipDeclaration>& decls, int min_count);

/// Keeps declarations whose phrase is in `keep`.
std::vector<RelationshipDeclaration> retain_phrases(const std::vector<RelationshipDeclaration>& decls,
                                                    const std::set<std::string>& keep);

using PhraseMap = std::map<std::string, Category>;

/// Tab-separated "phrase<TAB>category". A phrase mapped to two categories is a ConfigError.
PhraseMap load_phrase_map(std::istream& in);
PhraseMap load_phrase_map_file(const std::string& path);
std::string serialize_phrase_map(const PhraseMap& m);

/// Drops unmapped phrases, then keeps one uniformly chosen declaration per
/// canonical pair. Output is sorted by (user_a, user_b).
std::vector<LabeledDyad> label_dyads(const std::vector<RelationshipDeclaration>& decls, const PhraseMap& phrase_map,
                                     std::uint64_t seed);

struct ParasocialFilterResult {
  std::vector<LabeledDyad> kept;
  std::size_t removed = 0;
  std::vector<std::string> unknown_profiles;  // targets with no profile; their dyads are kept
};

/// Removes non-parasocial dyads whose declaration target has more than
/// `follower_threshold` followers.
ParasocialFilterResult filter_parasocial_targets(const std::vector<LabeledDyad>& dyads, const ProfileIndex& profiles,
                                                 std::int64_t follower_threshold);

/// Per-author tweet lists for fast per-dyad lookups.
class TweetIndex {
 public:
  explicit TweetIndex(const std::vector<Tweet>& tweets);

  const std::vector<Tweet>& tweets() const { return *tweets_; }
  /// Indices of tweets authored by `user`, in corpus order.
  const std::vector<std::size_t>& by_author(const std::string& user) const;
  const std::vector<InteractionKind>& kinds() const { return kinds_; }

 private:
  const std::vector<Tweet>* tweets_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_author_;
  std::vector<InteractionKind> kinds_;
  std::vector<std::size_t> empty_;
};

/// Interactions from `author` toward `partner` of one kind: directed mentions
/// whose first mention is the partner, public mentions that mention the
/// partner, retweets of the partner's tweets.
std::vector<std::size_t> interactions_toward(const TweetIndex& index, const std::string& author,
                                             const std::string& partner, InteractionKind kind);

/// True when a tweet must not be shown to models for this dyad.
bool leaks_label(const Tweet& t, const LabeledDyad& dyad);

struct UserTweetSample {
  std::string user;
  std::vector<std::size_t> directed;
  std::vector<std::size_t> public_mentions;
  std::vector<std::size_t> retweets;

  std::size_t total() const { return directed.size() + public_mentions.size() + retweets.size(); }
  std::vector<std::size_t> all() const;
};

struct DyadTweetSample {
  std::size_t dyad = 0;  // index into the dyad list
  UserTweetSample a;
  UserTweetSample b;

  std::vector<std::size_t> all() const;
};

/// Newest-first capped sample of each user's interactions with the partner,
/// with label-leaking tweets removed.
DyadTweetSample prepare_dyad_tweets(const LabeledDyad& dyad, std::size_t dyad_index, const TweetIndex& index,
                                    std::size_t per_kind_cap = 5, std::size_t per_user_cap = 15);

struct ExtractConfig {
  int min_phrase_count = 1000;
  std::int64_t follower_threshold = 10000;
  std::size_t per_kind_cap = 5;
  std::size_t per_user_cap = 15;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct ExtractResult {
  std::vector<RelationshipDeclaration> declarations;
  std::set<std::string> frequent_phrases;
  std::vector<LabeledDyad> dyads;
  std::vector<DyadTweetSample> samples;
  std::size_t labeled_before_filter = 0;
  std::size_t removed_by_follower_filter = 0;
  std::size_t unknown_profiles = 0;
};

/// Full cascade: scan, frequency filter, label, follower filter, sampling.
ExtractResult run_extraction(const std::vector<Tweet>& tweets, const PhraseMap& phrase_map,
                             const ProfileIndex& profiles, const ExtractConfig& config);

std::string serialize_dyad(const LabeledDyad& d);
LabeledDyad parse_dyad_record(std::string_view line, std::size_t line_no = 0);
std::vector<LabeledDyad> read_dyads_file(const std::string& path);

}  // namespace relnet
