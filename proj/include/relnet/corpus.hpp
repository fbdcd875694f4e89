#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "relnet/common.hpp"

namespace relnet {

struct Mention {
  std::string user_id;
  std::size_t offset = 0;  // code points into Tweet::text

  bool operator==(const Mention&) const = default;
};

struct RetweetRef {
  std::string tweet_id;
  std::string author_id;

  bool operator==(const RetweetRef&) const = default;
};

struct Tweet {
  std::string tweet_id;
  std::string author_id;
  std::int64_t created_at = 0;  // UTC epoch seconds
  std::optional<int> utc_offset_minutes;
  std::string text;
  std::vector<Mention> mentions;
  std::optional<RetweetRef> retweet_of;
  std::optional<std::string> lang;

  bool operator==(const Tweet&) const = default;
};

struct UserProfile {
  std::string user_id;
  std::string username;
  std::string display_name;
  std::string bio;
  std::int64_t follower_count = 0;

  bool operator==(const UserProfile&) const = default;
};

enum class InteractionKind { DirectedMention, PublicMention, Retweet, Other };

std::string_view interaction_kind_name(InteractionKind k);

/// Throws ValidationError when a tweet breaks a record invariant.
void validate_tweet(const Tweet& t);

/// Parses one newline-delimited record. `line_no` is used in error messages.
Tweet parse_tweet_record(std::string_view line, std::size_t line_no = 0);
std::string serialize_tweet(const Tweet& t);

UserProfile parse_profile_record(std::string_view line, std::size_t line_no = 0);
std::string serialize_profile(const UserProfile& p);

/// Reads every record; blank lines and lines starting with '#' are skipped.
std::vector<Tweet> read_tweets(std::istream& in, int workers = 1);
std::vector<Tweet> read_tweets_file(const std::string& path, int workers = 1);
std::vector<UserProfile> read_profiles(std::istream& in);
std::vector<UserProfile> read_profiles_file(const std::string& path);

using ProfileIndex = std::unordered_map<std::string, UserProfile>;
ProfileIndex index_profiles(const std::vector<UserProfile>& profiles);

InteractionKind classify_interaction(const Tweet& t);

bool detect_url(std::string_view text);

// Lexicons

struct LexiconPattern {
  std::string stem;
  bool prefix = false;  // written with a trailing '*'

  bool matches(std::string_view token) const {
    return prefix ? token.substr(0, stem.size()) == stem : token == stem;
  }
  bool operator==(const LexiconPattern&) const = default;
};

struct Lexicon {
  std::map<std::string, std::vector<LexiconPattern>> categories;

  bool has(const std::string& category) const { return categories.count(category) > 0; }
  /// Throws Error for unknown categories.
  const std::vector<LexiconPattern>& patterns(const std::string& category) const;
  std::vector<std::string> category_names() const;
};

LexiconPattern parse_lexicon_pattern(std::string_view raw);

/// Format: "[category]" header lines, each followed by one pattern per line.
Lexicon load_lexicon(std::istream& in);
Lexicon load_lexicon_file(const std::string& path);

/// Union of lexicons with disjoint categories; shared categories are an error.
Lexicon merge_lexicons(const Lexicon& a, const Lexicon& b);

std::string serialize_lexicon(const Lexicon& lex);

}  // namespace relnet
