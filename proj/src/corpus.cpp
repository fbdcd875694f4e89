#include "relnet/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "relnet/parallel.hpp"
#include "relnet/text.hpp"

namespace relnet {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view category_name(Category c) {
  switch (c) {
    case Category::Social: return "social";
    case Category::Romance: return "romance";
    case Category::Family: return "family";
    case Category::Organizational: return "organizational";
    case Category::Parasocial: return "parasocial";
  }
  return "unknown";
}

std::optional<Category> parse_category(std::string_view name) {
  const std::string lower = to_lower(name);
  for (Category c : kAllCategories)
    if (category_name(c) == lower) return c;
  return std::nullopt;
}

std::string_view interaction_kind_name(InteractionKind k) {
  switch (k) {
    case InteractionKind::DirectedMention: return "directed";
    case InteractionKind::PublicMention: return "public";
    case InteractionKind::Retweet: return "retweet";
    case InteractionKind::Other: return "other";
  }
  return "other";
}

void validate_tweet(const Tweet& t) {
  if (t.tweet_id.empty()) throw ValidationError("empty tweet_id");
  if (t.author_id.empty()) throw ValidationError("empty author_id");
  if (t.utc_offset_minutes && (*t.utc_offset_minutes < -720 || *t.utc_offset_minutes > 840))
    throw ValidationError("utc_offset_minutes out of [-720, 840]: " + std::to_string(*t.utc_offset_minutes));
  const std::size_t len = utf8_length(t.text);
  for (std::size_t i = 0; i < t.mentions.size(); ++i) {
    const auto& m = t.mentions[i];
    if (m.user_id.empty()) throw ValidationError("mention with empty user_id");
    if (m.offset >= len)
      throw ValidationError("mention offset " + std::to_string(m.offset) + " beyond text length " +
                            std::to_string(len));
    if (i > 0 && m.offset <= t.mentions[i - 1].offset)
      throw ValidationError("mention offsets not strictly increasing");
  }
  if (t.retweet_of) {
    if (t.retweet_of->author_id == t.author_id) throw ValidationError("retweet of own tweet");
    if (t.retweet_of->tweet_id.empty()) throw ValidationError("retweet_of with empty tweet_id");
  }
}

namespace {

json parse_object(std::string_view line, std::size_t line_no) {
  json j = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ParseError(line_no, "malformed JSON record");
  if (!j.is_object()) throw ParseError(line_no, "record is not an object");
  return j;
}

std::string get_string(const json& j, const char* key, std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw ParseError(line_no, std::string("missing or non-string field '") + key + "'");
  return it->get<std::string>();
}

std::int64_t get_int(const json& j, const char* key, std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer())
    throw ParseError(line_no, std::string("missing or non-integer field '") + key + "'");
  return it->get<std::int64_t>();
}

const json* get_nullable(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

}  // namespace

Tweet parse_tweet_record(std::string_view line, std::size_t line_no) {
  const json j = parse_object(line, line_no);
  Tweet t;
  t.tweet_id = get_string(j, "tweet_id", line_no);
  t.author_id = get_string(j, "author_id", line_no);
  t.created_at = get_int(j, "created_at", line_no);
  if (const json* off = get_nullable(j, "utc_offset_minutes")) {
    if (!off->is_number_integer()) throw ParseError(line_no, "utc_offset_minutes is not an integer");
    t.utc_offset_minutes = off->get<int>();
  }
  t.text = get_string(j, "text", line_no);
  auto mentions = j.find("mentions");
  if (mentions == j.end() || !mentions->is_array()) throw ParseError(line_no, "missing or non-array field 'mentions'");
  for (const auto& m : *mentions) {
    if (!m.is_object()) throw ParseError(line_no, "mention is not an object");
    auto off = m.find("offset");
    if (off == m.end() || !off->is_number_integer() || off->get<std::int64_t>() < 0)
      throw ParseError(line_no, "mention offset must be a nonnegative integer");
    t.mentions.push_back({get_string(m, "user_id", line_no), off->get<std::size_t>()});
  }
  if (const json* rt = get_nullable(j, "retweet_of")) {
    if (!rt->is_object()) throw ParseError(line_no, "retweet_of is not an object");
    t.retweet_of = RetweetRef{get_string(*rt, "tweet_id", line_no), get_string(*rt, "author_id", line_no)};
  }
  if (const json* lang = get_nullable(j, "lang")) {
    if (!lang->is_string()) throw ParseError(line_no, "lang is not a string");
    t.lang = lang->get<std::string>();
  }
  try {
    validate_tweet(t);
  } catch (const ValidationError& e) {
    throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
  }
  return t;
}

std::string serialize_tweet(const Tweet& t) {
  ordered_json j;
  j["tweet_id"] = t.tweet_id;
  j["author_id"] = t.author_id;
  j["created_at"] = t.created_at;
  j["utc_offset_minutes"] = t.utc_offset_minutes ? ordered_json(*t.utc_offset_minutes) : ordered_json(nullptr);
  j["text"] = t.text;
  ordered_json mentions = ordered_json::array();
  for (const auto& m : t.mentions) {
    ordered_json mj;
    mj["user_id"] = m.user_id;
    mj["offset"] = m.offset;
    mentions.push_back(std::move(mj));
  }
  j["mentions"] = std::move(mentions);
  if (t.retweet_of) {
    ordered_json rt;
    rt["tweet_id"] = t.retweet_of->tweet_id;
    rt["author_id"] = t.retweet_of->author_id;
    j["retweet_of"] = std::move(rt);
  } else {
    j["retweet_of"] = nullptr;
  }
  j["lang"] = t.lang ? ordered_json(*t.lang) : ordered_json(nullptr);
  return j.dump();
}

UserProfile parse_profile_record(std::string_view line, std::size_t line_no) {
  const json j = parse_object(line, line_no);
  UserProfile p;
  p.user_id = get_string(j, "user_id", line_no);
  p.username = get_string(j, "username", line_no);
  p.display_name = get_string(j, "display_name", line_no);
  p.bio = get_string(j, "bio", line_no);
  p.follower_count = get_int(j, "follower_count", line_no);
  if (p.username.empty()) throw ValidationError("line " + std::to_string(line_no) + ": empty username");
  if (p.follower_count < 0) throw ValidationError("line " + std::to_string(line_no) + ": negative follower_count");
  return p;
}

std::string serialize_profile(const UserProfile& p) {
  ordered_json j;
  j["user_id"] = p.user_id;
  j["username"] = p.username;
  j["display_name"] = p.display_name;
  j["bio"] = p.bio;
  j["follower_count"] = p.follower_count;
  return j.dump();
}

namespace {

bool skip_line(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return in;
}

}  // namespace

std::vector<Tweet> read_tweets(std::istream& in, int workers) {
  std::vector<std::string> lines;
  std::vector<std::size_t> numbers;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (skip_line(line)) continue;
    lines.push_back(std::move(line));
    numbers.push_back(no);
  }
  std::vector<Tweet> out(lines.size());
  parallel_for(lines.size(), workers, [&](std::size_t i) { out[i] = parse_tweet_record(lines[i], numbers[i]); });
  return out;
}

std::vector<Tweet> read_tweets_file(const std::string& path, int workers) {
  auto in = open_or_throw(path);
  return read_tweets(in, workers);
}

std::vector<UserProfile> read_profiles(std::istream& in) {
  std::vector<UserProfile> out;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (skip_line(line)) continue;
    out.push_back(parse_profile_record(line, no));
  }
  return out;
}

std::vector<UserProfile> read_profiles_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_profiles(in);
}

ProfileIndex index_profiles(const std::vector<UserProfile>& profiles) {
  ProfileIndex idx;
  idx.reserve(profiles.size());
  for (const auto& p : profiles) idx[p.user_id] = p;
  return idx;
}

InteractionKind classify_interaction(const Tweet& t) {
  if (t.retweet_of) return InteractionKind::Retweet;
  if (t.mentions.empty()) return InteractionKind::Other;
  if (t.mentions.front().offset == 0) return InteractionKind::DirectedMention;
  return InteractionKind::PublicMention;
}

bool detect_url(std::string_view text) { return contains_url(text); }

const std::vector<LexiconPattern>& Lexicon::patterns(const std::string& category) const {
  auto it = categories.find(category);
  if (it == categories.end()) throw Error("unknown lexicon category '" + category + "'");
  return it->second;
}

std::vector<std::string> Lexicon::category_names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : categories) out.push_back(name);
  return out;
}

LexiconPattern parse_lexicon_pattern(std::string_view raw) {
  std::string p = to_lower(raw);
  LexiconPattern out;
  if (!p.empty() && p.back() == '*') {
    out.prefix = true;
    p.pop_back();
  }
  if (p.empty()) throw ValidationError("empty lexicon pattern");
  if (p.find('*') != std::string::npos)
    throw ValidationError("wildcard only allowed in terminal position: '" + std::string(raw) + "'");
  out.stem = std::move(p);
  return out;
}

Lexicon load_lexicon(std::istream& in) {
  Lexicon lex;
  std::string line;
  std::string current;
  std::size_t no = 0;
  auto close_current = [&] {
    if (!current.empty() && lex.categories[current].empty())
      throw ParseError(no, "empty lexicon category '" + current + "'");
  };
  while (std::getline(in, line)) {
    ++no;
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    const std::string item = line.substr(b, e - b + 1);
    if (item.front() == '#') continue;
    if (item.front() == '[') {
      if (item.back() != ']' || item.size() < 3) throw ParseError(no, "malformed category header '" + item + "'");
      close_current();
      current = to_lower(item.substr(1, item.size() - 2));
      if (lex.categories.count(current)) throw ParseError(no, "duplicate lexicon category '" + current + "'");
      lex.categories[current];
      continue;
    }
    if (current.empty()) throw ParseError(no, "pattern before any category header");
    try {
      lex.categories[current].push_back(parse_lexicon_pattern(item));
    } catch (const ValidationError& err) {
      throw ParseError(no, err.what());
    }
  }
  close_current();
  return lex;
}

Lexicon load_lexicon_file(const std::string& path) {
  auto in = open_or_throw(path);
  return load_lexicon(in);
}

Lexicon merge_lexicons(const Lexicon& a, const Lexicon& b) {
  Lexicon out = a;
  for (const auto& [name, patterns] : b.categories) {
    if (out.categories.count(name)) throw ConfigError("lexicon category '" + name + "' defined twice");
    out.categories[name] = patterns;
  }
  return out;
}

std::string serialize_lexicon(const Lexicon& lex) {
  std::ostringstream os;
  for (const auto& [name, patterns] : lex.categories) {
    os << '[' << name << "]\n";
    for (const auto& p : patterns) os << p.stem << (p.prefix ? "*" : "") << '\n';
  }
  return os.str();
}

}  // namespace relnet
