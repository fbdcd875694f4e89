#include "relnet/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "relnet/corpus.hpp"
#include "relnet/features.hpp"
#include "relnet/graph.hpp"
#include "relnet/learn.hpp"
#include "relnet/lexical.hpp"
#include "relnet/parallel.hpp"
#include "relnet/retweet.hpp"
#include "relnet/text.hpp"
#include "relnet/topics.hpp"

namespace fs = std::filesystem;

namespace relnet {

namespace {

// key, default
const std::vector<std::pair<std::string, std::string>>& default_settings() {
  static const std::vector<std::pair<std::string, std::string>> d = {
      {"out", "out"},
      {"seed", "0"},
      {"workers", "1"},
      {"corpus.tweets", ""},
      {"corpus.profiles", ""},
      {"corpus.lexicons", ""},
      {"corpus.phrase_map", ""},
      {"bootstrap.resamples", "1000"},
      {"bootstrap.level", "0.95"},
      {"synth.dyads", "6821,2377,335,95,372"},
      {"synth.lexicon_rates.social", "0.20,0.03,0.06,0.03,0.03"},
      {"synth.lexicon_rates.romance", "0.08,0.03,0.45,0.02,0.03"},
      {"synth.lexicon_rates.family", "0.03,0.45,0.10,0.02,0.02"},
      {"synth.lexicon_rates.organizational", "0.02,0.01,0.01,0.45,0.02"},
      {"synth.lexicon_rates.parasocial", "0.05,0.01,0.15,0.02,0.45"},
      {"synth.topics", "14"},
      {"synth.words_per_topic", "25"},
      {"synth.topic_breadth", "5,3,2,1,1"},
      {"synth.null_offset_rate", "0.1"},
      {"synth.fans_per_hub", "20"},
      {"synth.hub_min_followers", "20000"},
      {"synth.user_max_followers", "5000"},
      {"synth.reciprocity", "0.9,0.95,0.8,0.7,0"},
      {"synth.dm_min", "3"},
      {"synth.dm_max", "8"},
      {"synth.pm_min", "1"},
      {"synth.pm_max", "2"},
      {"synth.originals_per_user", "12"},
      {"synth.days", "90"},
      {"synth.url_rate", "0.3"},
      {"synth.retweet_base_personal", "0.02"},
      {"synth.retweet_base_news", "0.60"},
      {"synth.retweet_base_misc", "0.02"},
      {"synth.retweet_url_bonus", "0.05"},
      {"synth.interaction", "0.6"},
      {"synth.interaction_categories", "social"},
      {"synth.second_declaration_rate", "0.3"},
      {"synth.leak_rate", "0.3"},
      {"synth.hub_noise_rate", "0.02"},
      {"synth.unmapped_declarations", "50"},
      {"extract.min_phrase_count", "10"},
      {"extract.follower_threshold", "10000"},
      {"extract.per_kind_cap", "5"},
      {"extract.per_user_cap", "15"},
      {"graph.neighbor_sample", "10"},
      {"lexical.categories", ""},
      {"lexical.top_k", "5"},
      {"topics.k", "20"},
      {"topics.alpha", "0.1"},
      {"topics.beta", "0.01"},
      {"topics.iterations", "200"},
      {"topics.min_count", "5"},
      {"topics.max_docs", "50000"},
      {"topics.passes", "20"},
      {"topics.tweet_cap", "5"},
      {"diurnal.min_activity", "5"},
      {"split.ratios", "8,1,1"},
      {"split.stratify", "true"},
      {"features.min_freq", "5"},
      {"features.include_reciprocity", "false"},
      {"features.network", "true"},
      {"learn.model", "linear"},
      {"learn.mode", "imbalanced"},
      {"learn.per_class_train_n", "1000"},
      {"learn.lr", "0.5"},
      {"learn.epochs", "30"},
      {"learn.batch", "64"},
      {"learn.l2", "0.0001"},
      {"learn.cnn.lr", "0.001"},
      {"learn.cnn.epochs", "5"},
      {"learn.cnn.batch", "32"},
      {"learn.cnn.hidden", "128"},
      {"learn.cnn.embed_dim", "16"},
      {"learn.cnn.filters", "64"},
      {"learn.cnn.dropout", "0.1"},
      {"learn.cnn.max_chars", "300"},
      {"retweet.per_category_n", "10000"},
      {"retweet.window_seconds", "604800"},
      {"retweet.variants", "baseline,aware"},
      {"retweet.lr", "0.001"},
      {"retweet.epochs", "5"},
      {"retweet.batch", "64"},
      {"retweet.eval_every", "0"},
      {"retweet.text_min_freq", "5"},
      {"retweet.text_proj", "64"},
      {"retweet.relation_embed", "16"},
      {"retweet.hidden", "64"},
      {"retweet.phrase_embed_dim", "16"},
      {"retweet.phrase_filters", "32"},
  };
  return d;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError(key + ": not a number: '" + v + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw ConfigError(key + ": not a number: '" + v + "'");
    return d;
  } catch (const std::logic_error&) {
    throw ConfigError(key + ": not a number: '" + v + "'");
  }
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt_exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Artifacts

std::string artifact(const RunConfig& c, const std::string& rel) { return (fs::path(c.out_dir()) / rel).string(); }

void require(const std::string& path, const std::string& stage) {
  if (!fs::exists(path)) throw MissingArtifactError(path, stage);
}

/// Contents after the leading "# relnet " header lines.
std::string read_artifact(const std::string& path, const std::string& stage) {
  require(path, stage);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  std::size_t pos = 0;
  while (s.compare(pos, 9, "# relnet ") == 0) {
    const auto nl = s.find('\n', pos);
    pos = nl == std::string::npos ? s.size() : nl + 1;
  }
  return s.substr(pos);
}

std::vector<std::string> artifact_lines(const std::string& path, const std::string& stage) {
  std::istringstream in(read_artifact(path, stage));
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line.front() != '#') lines.push_back(line);
  return lines;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

class Writer {
 public:
  Writer(const RunConfig& c, const std::string& rel, StageResult& result) : path_(artifact(c, rel)) {
    fs::create_directories(fs::path(path_).parent_path());
    os_.open(path_, std::ios::binary);
    if (!os_) throw Error("cannot write " + path_);
    os_ << c.header() << '\n';
    result.outputs.push_back(path_);
  }
  std::ofstream& stream() { return os_; }
  template <typename T>
  Writer& operator<<(const T& v) {
    os_ << v;
    return *this;
  }

 private:
  std::string path_;
  std::ofstream os_;
};

// Corpus inputs

std::string corpus_path(const RunConfig& c, const std::string& key, const std::string& synth_file) {
  const std::string& set = c.get(key);
  if (!set.empty()) {
    if (!fs::exists(set)) throw ConfigError(key + ": no such file: " + set);
    return set;
  }
  const std::string p = artifact(c, "synth/" + synth_file);
  if (!fs::exists(p)) throw MissingArtifactError(p + " (or set " + key + ")", "synth");
  return p;
}

std::vector<Tweet> load_tweets(const RunConfig& c) {
  return read_tweets_file(corpus_path(c, "corpus.tweets", "tweets.ndjson"), c.workers());
}

ProfileIndex load_profiles(const RunConfig& c) {
  return index_profiles(read_profiles_file(corpus_path(c, "corpus.profiles", "profiles.ndjson")));
}

Lexicon load_lexicons(const RunConfig& c) {
  auto files = c.get_list("corpus.lexicons");
  if (files.empty()) files.push_back(corpus_path(c, "corpus.lexicons", "lexicon.txt"));
  Lexicon lex;
  for (const auto& f : files) {
    if (!fs::exists(f)) throw ConfigError("corpus.lexicons: no such file: " + f);
    lex = merge_lexicons(lex, load_lexicon_file(f));
  }
  return lex;
}

std::vector<LabeledDyad> load_dyads(const RunConfig& c) {
  std::vector<LabeledDyad> out;
  std::size_t n = 0;
  for (const auto& line : artifact_lines(artifact(c, "extract/dyads.ndjson"), "extract"))
    out.push_back(parse_dyad_record(line, ++n));
  return out;
}

const char* kind_tag(int k) {
  static const char* tags[] = {"directed", "public", "retweet"};
  return tags[k];
}

std::vector<DyadTweetSample> load_samples(const RunConfig& c, const std::vector<LabeledDyad>& dyads,
                                          const std::vector<Tweet>& tweets) {
  std::unordered_map<std::string, std::size_t> by_id;
  by_id.reserve(tweets.size());
  for (std::size_t i = 0; i < tweets.size(); ++i) by_id.emplace(tweets[i].tweet_id, i);
  std::vector<DyadTweetSample> out(dyads.size());
  for (std::size_t i = 0; i < dyads.size(); ++i) {
    out[i].dyad = i;
    out[i].a.user = dyads[i].user_a;
    out[i].b.user = dyads[i].user_b;
  }
  const std::string path = artifact(c, "extract/samples.tsv");
  auto lines = artifact_lines(path, "extract");
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {  // first line: column names
    const auto f = split_tabs(lines[ln]);
    if (f.size() != 4) throw ParseError(ln, path + ": expected 4 columns");
    const auto d = parse_number<std::size_t>("dyad", f[0]);
    if (d >= out.size()) throw ParseError(ln, path + ": dyad index out of range");
    auto it = by_id.find(f[3]);
    if (it == by_id.end()) throw Error(path + ": tweet " + f[3] + " is not in the corpus");
    UserTweetSample& u = f[1] == "a" ? out[d].a : out[d].b;
    if (f[2] == "directed") u.directed.push_back(it->second);
    else if (f[2] == "public") u.public_mentions.push_back(it->second);
    else if (f[2] == "retweet") u.retweets.push_back(it->second);
    else throw ParseError(ln, path + ": unknown kind " + f[2]);
  }
  return out;
}

std::vector<std::string> sample_texts(const DyadTweetSample& s, const std::vector<Tweet>& tweets) {
  std::vector<std::string> out;
  for (std::size_t i : s.all()) out.push_back(tweets[i].text);
  return out;
}

std::vector<DyadNetworkStats> load_dyad_stats(const RunConfig& c, std::size_t expected) {
  const std::string path = artifact(c, "graph/dyad_stats.tsv");
  auto lines = artifact_lines(path, "graph-stats");
  std::vector<DyadNetworkStats> out;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const auto f = split_tabs(lines[ln]);
    if (f.size() != 8) throw ParseError(ln, path + ": expected 8 columns");
    out.push_back({parse_optional(f[3]), parse_optional(f[4]), parse_optional(f[5]), parse_optional(f[6]),
                   parse_optional(f[7])});
  }
  if (out.size() != expected) throw Error(path + " does not match the extracted dyads; rerun 'graph-stats'");
  return out;
}

SplitPlan load_split(const RunConfig& c, std::size_t expected) {
  const std::string path = artifact(c, "split/assignment.tsv");
  auto lines = artifact_lines(path, "split");
  SplitPlan plan;
  plan.seed = c.seed();
  plan.mode = c.get("learn.mode");
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const auto f = split_tabs(lines[ln]);
    if (f.size() != 5) throw ParseError(ln, path + ": expected 5 columns");
    Partition p = Partition::Train;
    if (f[4] == "validation") p = Partition::Validation;
    else if (f[4] == "test") p = Partition::Test;
    else if (f[4] != "train") throw ParseError(ln, path + ": unknown partition " + f[4]);
    plan.assignment.push_back(p);
    ++plan.counts[static_cast<std::size_t>(p)];
  }
  if (plan.assignment.size() != expected) throw Error(path + " does not match the extracted dyads; rerun 'split'");
  return plan;
}

std::vector<FeatureVector> load_feature_rows(const RunConfig& c, std::size_t expected) {
  const std::string path = artifact(c, "features/rows.txt");
  auto lines = artifact_lines(path, "featurize");
  std::vector<FeatureVector> rows;
  rows.reserve(lines.size());
  for (std::size_t ln = 0; ln < lines.size(); ++ln) rows.push_back(parse_feature_row(lines[ln], ln + 1));
  if (rows.size() != expected) throw Error(path + " does not match the extracted dyads; rerun 'featurize'");
  return rows;
}

FeatureSpace load_space(const RunConfig& c, const Lexicon& lex) {
  std::istringstream in(read_artifact(artifact(c, "features/space.txt"), "featurize"));
  return load_feature_space(in, lex);
}

BootstrapConfig bootstrap_config(const RunConfig& c, std::string_view stage) {
  return {c.get_int("bootstrap.resamples"), c.get_double("bootstrap.level"), derive_seed(c.seed(), stage)};
}

std::vector<int> category_labels(const std::vector<LabeledDyad>& dyads) {
  std::vector<int> y;
  y.reserve(dyads.size());
  for (const auto& d : dyads) y.push_back(category_index(d.category));
  return y;
}

template <typename T>
std::vector<T> pick(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(v[i]);
  return out;
}

// Training and test index sets of the relationship classifier.
struct RelSets {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

RelSets rel_sets(const RunConfig& c, const SplitPlan& plan, const std::vector<int>& labels) {
  const std::string mode = c.get("learn.mode");
  if (mode == "balanced") {
    auto sets = make_balanced_sets(plan, labels, static_cast<std::size_t>(c.get_int64("learn.per_class_train_n")),
                                   derive_seed(c.seed(), "balanced"));
    return {sets.train, sets.test};
  }
  if (mode != "imbalanced") throw ConfigError("learn.mode must be 'balanced' or 'imbalanced'");
  return {plan.members(Partition::Train), plan.members(Partition::Test)};
}

CharEncoderShape cnn_shape(const RunConfig& c, int alphabet) {
  CharEncoderShape s;
  s.alphabet = alphabet;
  s.embed_dim = c.get_int("learn.cnn.embed_dim");
  const int f = c.get_int("learn.cnn.filters");
  s.filters = {f, f, f};
  return s;
}

std::vector<CharSample> char_samples(const std::vector<std::size_t>& idx, const std::vector<LabeledDyad>& dyads,
                                     const ProfileIndex& profiles, const std::vector<FeatureVector>& rows,
                                     const CharAlphabet& alphabet) {
  std::vector<CharSample> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) {
    CharSample s;
    for (const auto* u : {&dyads[i].user_a, &dyads[i].user_b}) {
      auto it = profiles.find(*u);
      const std::string username = it == profiles.end() ? "" : it->second.username;
      const std::string display = it == profiles.end() ? "" : it->second.display_name;
      s.names.push_back(alphabet.encode(username));
      s.names.push_back(alphabet.encode(display));
    }
    s.dense.resize(rows[i].dense.size() + rows[i].present.size());
    s.dense << rows[i].dense, rows[i].present;
    s.label = category_index(dyads[i].category);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> name_strings(const std::vector<std::size_t>& idx, const std::vector<LabeledDyad>& dyads,
                                      const ProfileIndex& profiles) {
  std::vector<std::string> out;
  for (std::size_t i : idx)
    for (const auto* u : {&dyads[i].user_a, &dyads[i].user_b}) {
      auto it = profiles.find(*u);
      if (it == profiles.end()) continue;
      out.push_back(it->second.username);
      out.push_back(it->second.display_name);
    }
  return out;
}

RetweetVariant parse_variant(const std::string& v) {
  if (v == "baseline") return RetweetVariant::Baseline;
  if (v == "aware") return RetweetVariant::Aware;
  throw ConfigError("retweet.variants: unknown variant '" + v + "'");
}

std::array<double, 3> split_ratios(const RunConfig& c) {
  const auto r = c.get_doubles("split.ratios");
  if (r.size() != 3) throw ConfigError("split.ratios needs three values");
  return {r[0], r[1], r[2]};
}

// Stages

StageResult stage_synth(const RunConfig& c) {
  StageResult res;
  const auto corpus = generate_corpus(synth_config_from(c));
  const std::string dir = artifact(c, "synth");
  write_synth_corpus(corpus, dir, c.header() + "\n");
  for (const char* f : {"tweets.ndjson", "profiles.ndjson", "lexicon.txt", "phrase_map.tsv", "truth_dyads.ndjson",
                        "truth.json"})
    res.outputs.push_back((fs::path(dir) / f).string());
  res.summary.push_back("tweets\t" + std::to_string(corpus.tweets.size()));
  res.summary.push_back("profiles\t" + std::to_string(corpus.profiles.size()));
  res.summary.push_back("planted_dyads\t" + std::to_string(corpus.truth.size()));
  return res;
}

StageResult stage_extract(const RunConfig& c) {
  StageResult res;
  const auto tweets = load_tweets(c);
  const auto profiles = load_profiles(c);
  const auto phrase_map = load_phrase_map_file(corpus_path(c, "corpus.phrase_map", "phrase_map.tsv"));
  ExtractConfig ec;
  ec.min_phrase_count = c.get_int("extract.min_phrase_count");
  ec.follower_threshold = c.get_int64("extract.follower_threshold");
  ec.per_kind_cap = static_cast<std::size_t>(c.get_int64("extract.per_kind_cap"));
  ec.per_user_cap = static_cast<std::size_t>(c.get_int64("extract.per_user_cap"));
  ec.seed = derive_seed(c.seed(), "extract");
  ec.workers = c.workers();
  const auto r = run_extraction(tweets, phrase_map, profiles, ec);

  {
    Writer w(c, "extract/dyads.ndjson", res);
    for (const auto& d : r.dyads) w << serialize_dyad(d) << '\n';
  }
  {
    Writer w(c, "extract/samples.tsv", res);
    w << "dyad\tside\tkind\ttweet_id\n";
    for (const auto& s : r.samples) {
      const std::pair<const char*, const UserTweetSample*> sides[] = {{"a", &s.a}, {"b", &s.b}};
      for (const auto& [side, u] : sides) {
        const std::vector<std::size_t>* lists[] = {&u->directed, &u->public_mentions, &u->retweets};
        for (int k = 0; k < 3; ++k)
          for (std::size_t t : *lists[k])
            w << s.dyad << '\t' << side << '\t' << kind_tag(k) << '\t' << tweets[t].tweet_id << '\n';
      }
    }
  }
  std::map<std::string, std::size_t> phrase_counts;
  for (const auto& d : r.declarations) ++phrase_counts[d.phrase];
  {
    Writer w(c, "extract/phrases.tsv", res);
    w << "phrase\tdeclarations\tcategory\n";
    for (const auto& p : r.frequent_phrases) {
      auto it = phrase_map.find(p);
      w << p << '\t' << phrase_counts[p] << '\t'
        << (it == phrase_map.end() ? std::string("unmapped") : std::string(category_name(it->second))) << '\n';
    }
  }
  std::array<std::size_t, kNumCategories> per{};
  for (const auto& d : r.dyads) ++per[static_cast<std::size_t>(category_index(d.category))];
  std::vector<std::pair<std::string, std::string>> rows = {
      {"tweets", std::to_string(tweets.size())},
      {"declarations", std::to_string(r.declarations.size())},
      {"frequent_phrases", std::to_string(r.frequent_phrases.size())},
      {"labeled_before_filter", std::to_string(r.labeled_before_filter)},
      {"removed_by_follower_filter", std::to_string(r.removed_by_follower_filter)},
      {"unknown_profiles", std::to_string(r.unknown_profiles)},
      {"dyads", std::to_string(r.dyads.size())}};
  for (Category cat : kAllCategories)
    rows.emplace_back("dyads_" + std::string(category_name(cat)),
                      std::to_string(per[static_cast<std::size_t>(category_index(cat))]));
  Writer w(c, "extract/summary.tsv", res);
  w << "key\tvalue\n";
  for (const auto& [k, v] : rows) {
    w << k << '\t' << v << '\n';
    res.summary.push_back(k + "\t" + v);
  }
  return res;
}

StageResult stage_graph(const RunConfig& c) {
  StageResult res;
  const auto tweets = load_tweets(c);
  const auto dyads = load_dyads(c);
  const auto g = build_graph(tweets, c.workers());
  const auto stats = all_dyad_stats(g, dyads, static_cast<std::size_t>(c.get_int64("graph.neighbor_sample")),
                                    derive_seed(c.seed(), "graph"), c.workers());
  std::uint64_t corpus_hash = 0xcbf29ce484222325ULL;
  for (const auto& t : tweets) corpus_hash = mix64(corpus_hash ^ stable_hash(t.tweet_id));
  {
    Writer w(c, "graph/edges.txt", res);
    write_edge_list(w.stream(), g, hex64(corpus_hash));
  }
  {
    Writer w(c, "graph/dyad_stats.tsv", res);
    w << dyad_stats_header() << '\n';
    for (std::size_t i = 0; i < dyads.size(); ++i) w << dyad_stats_row(dyads[i], stats[i]) << '\n';
  }
  // Mean of each statistic per category over the dyads where it is defined.
  Writer w(c, "graph/summary.tsv", res);
  w << "category\tstatistic\tmean\tdefined\n";
  const char* names[] = {"jaccard_z", "adamic_adar_z", "mention_prob_ab", "mention_prob_ba", "reciprocity"};
  for (Category cat : kAllCategories)
    for (int s = 0; s < 5; ++s) {
      double sum = 0.0;
      std::size_t n = 0;
      for (std::size_t i = 0; i < dyads.size(); ++i) {
        if (dyads[i].category != cat) continue;
        const std::optional<double>* vals[] = {&stats[i].jaccard_z, &stats[i].adamic_adar_z,
                                               &stats[i].mention_prob_ab, &stats[i].mention_prob_ba,
                                               &stats[i].reciprocity};
        if (*vals[s]) {
          sum += **vals[s];
          ++n;
        }
      }
      w << category_name(cat) << '\t' << names[s] << '\t' << (n ? fmt(sum / static_cast<double>(n)) : "NA") << '\t'
        << n << '\n';
    }
  res.summary.push_back("nodes\t" + std::to_string(g.num_nodes()));
  res.summary.push_back("edges\t" + std::to_string(g.num_edges()));
  return res;
}

StageResult stage_lexical(const RunConfig& c) {
  StageResult res;
  const auto tweets = load_tweets(c);
  const auto dyads = load_dyads(c);
  const auto lex = load_lexicons(c);
  const TweetIndex index(tweets);
  const auto texts = directed_texts_by_category(index, dyads);
  auto cats = c.get_list("lexical.categories");
  if (cats.empty()) cats = lex.category_names();
  const auto bc = bootstrap_config(c, "lexical");
  const auto k = static_cast<std::size_t>(c.get_int64("lexical.top_k"));

  Writer rates(c, "lexical/rates.tsv", res);
  rates << category_stat_header() << "\ttweets\n";
  Writer top(c, "lexical/top_words.tsv", res);
  top << "relationship_category\tlexicon_category\trank\tword\tshare\n";
  for (const auto& lc : cats) {
    if (!lex.has(lc)) throw ConfigError("lexical.categories: unknown lexicon category '" + lc + "'");
    const auto stats = category_probability(texts, lex, lc, bc);
    for (Category cat : kAllCategories) {
      auto it = stats.find(cat);
      if (it == stats.end() || !it->second) {
        rates << category_name(cat) << '\t' << lc << "\tNA\tNA\tNA\t0\n";
        continue;
      }
      rates << category_stat_row(*it->second) << '\t' << it->second->tweets << '\n';
      res.summary.push_back(std::string(category_name(cat)) + "\t" + lc + "\t" + fmt(it->second->probability));
      auto tt = texts.find(cat);
      if (tt == texts.end()) continue;
      const auto words = top_words(tt->second, lex, lc, k);
      for (std::size_t r = 0; r < words.size(); ++r)
        top << category_name(cat) << '\t' << lc << '\t' << (r + 1) << '\t' << words[r].first << '\t'
            << fmt(words[r].second) << '\n';
    }
  }
  return res;
}

StageResult stage_topics(const RunConfig& c) {
  StageResult res;
  const auto tweets = load_tweets(c);
  const auto dyads = load_dyads(c);
  const auto samples = load_samples(c, dyads, tweets);

  std::set<std::size_t> used;
  for (const auto& s : samples)
    for (std::size_t i : s.all()) used.insert(i);
  std::vector<std::size_t> doc_ids(used.begin(), used.end());
  const auto max_docs = static_cast<std::size_t>(c.get_int64("topics.max_docs"));
  if (max_docs > 0 && doc_ids.size() > max_docs) {
    std::mt19937_64 rng(derive_seed(c.seed(), "topic-docs"));
    std::shuffle(doc_ids.begin(), doc_ids.end(), rng);
    doc_ids.resize(max_docs);
    std::sort(doc_ids.begin(), doc_ids.end());
  }
  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(doc_ids.size());
  for (std::size_t i : doc_ids) tokens.push_back(content_tokens(tweets[i].text));
  const auto vocab = build_vocabulary(tokens, c.get_int("topics.min_count"));
  if (vocab.size() == 0) throw Error("topic vocabulary is empty; lower topics.min_count");
  std::vector<std::vector<int>> docs;
  docs.reserve(tokens.size());
  for (const auto& t : tokens) docs.push_back(encode(t, vocab));

  LdaConfig lc;
  lc.topics = c.get_int("topics.k");
  lc.alpha = c.get_double("topics.alpha");
  lc.beta = c.get_double("topics.beta");
  lc.iterations = c.get_int("topics.iterations");
  lc.seed = derive_seed(c.seed(), "lda");
  auto model = fit_lda(docs, vocab.size(), lc);
  model.vocab = vocab;

  TopicInferenceConfig ic;
  ic.passes = c.get_int("topics.passes");
  ic.tweet_cap = static_cast<std::size_t>(c.get_int64("topics.tweet_cap"));
  std::vector<std::optional<DyadTopicDiversity>> div(dyads.size());
  parallel_for(dyads.size(), c.workers(), [&](std::size_t i) {
    TopicInferenceConfig local = ic;
    local.seed = derive_seed(c.seed(), "topic-infer", static_cast<std::uint64_t>(i));
    div[i] = dyad_topic_entropy(model, sample_texts(samples[i], tweets), local);
  });

  {
    Writer w(c, "topics/model.txt", res);
    save_topic_model(w.stream(), model);
  }
  std::map<std::string, std::vector<double>> by_cat;
  {
    Writer w(c, "topics/entropy.tsv", res);
    w << "user_a\tuser_b\tcategory\tentropy\ttweets_used\n";
    for (std::size_t i = 0; i < dyads.size(); ++i) {
      w << dyads[i].user_a << '\t' << dyads[i].user_b << '\t' << category_name(dyads[i].category) << '\t';
      if (div[i]) {
        w << fmt_exact(div[i]->entropy) << '\t' << div[i]->tweets_used << '\n';
        by_cat[std::string(category_name(dyads[i].category))].push_back(div[i]->entropy);
      } else {
        w << "NA\t0\n";
      }
    }
  }
  for (Category cat : kAllCategories) by_cat[std::string(category_name(cat))];
  const auto report = category_entropy_report(by_cat, bootstrap_config(c, "topics"));
  Writer w(c, "topics/summary.tsv", res);
  w << "category\tmean_entropy\tci_low\tci_high\tdyads\n";
  for (Category cat : kAllCategories) {
    const std::string name(category_name(cat));
    const auto& e = report.at(name);
    if (!e) {
      w << name << "\tNA\tNA\tNA\t0\n";
      continue;
    }
    w << name << '\t' << fmt(e->mean) << '\t' << fmt(e->ci.low) << '\t' << fmt(e->ci.high) << '\t' << e->dyads << '\n';
    res.summary.push_back(name + "\tentropy\t" + fmt(e->mean));
  }
  return res;
}

StageResult stage_diurnal(const RunConfig& c) {
  StageResult res;
  const auto tweets = load_tweets(c);
  const auto dyads = load_dyads(c);
  const TweetIndex index(tweets);
  const auto inputs =
      diurnal_inputs(index, dyads, static_cast<std::size_t>(c.get_int64("diurnal.min_activity")));
  if (inputs.empty()) throw Error("no dyad direction reaches diurnal.min_activity");
  const auto agg = aggregate_and_center(inputs, bootstrap_config(c, "diurnal"));
  {
    Writer w(c, "diurnal/profiles.tsv", res);
    w << diurnal_header() << '\n';
    for (const auto& row : diurnal_rows(agg)) w << row << '\n';
  }
  Writer w(c, "diurnal/summary.tsv", res);
  w << "group\tdistributions\tpeak_hour\tcentered_mass_9_16\n";
  for (const auto& [name, g] : agg.groups) {
    Eigen::Index peak = 0;
    g.mean.maxCoeff(&peak);
    const double work = g.centered.segment(9, 8).sum();
    w << name << '\t' << g.members << '\t' << peak << '\t' << fmt(work) << '\n';
    res.summary.push_back(name + "\tcentered_mass_9_16\t" + fmt(work));
  }
  return res;
}

StageResult stage_split(const RunConfig& c) {
  StageResult res;
  const auto dyads = load_dyads(c);
  std::vector<std::pair<std::string, std::string>> users;
  users.reserve(dyads.size());
  for (const auto& d : dyads) users.emplace_back(d.user_a, d.user_b);
  const auto labels = category_labels(dyads);
  const auto plan = split_user_disjoint(users, split_ratios(c), derive_seed(c.seed(), "split"),
                                        c.get_bool("split.stratify") ? labels : std::vector<int>{});
  {
    Writer w(c, "split/assignment.tsv", res);
    w << "dyad\tuser_a\tuser_b\tcategory\tpartition\n";
    for (std::size_t i = 0; i < dyads.size(); ++i)
      w << i << '\t' << dyads[i].user_a << '\t' << dyads[i].user_b << '\t' << category_name(dyads[i].category)
        << '\t' << partition_name(plan.assignment[i]) << '\n';
  }
  // Exact disjointness of the partition user sets.
  std::array<std::set<std::string>, 3> user_sets;
  for (std::size_t i = 0; i < dyads.size(); ++i) {
    auto& s = user_sets[static_cast<std::size_t>(plan.assignment[i])];
    s.insert(dyads[i].user_a);
    s.insert(dyads[i].user_b);
  }
  std::size_t overlap = 0;
  for (int p = 0; p < 3; ++p)
    for (int q = p + 1; q < 3; ++q)
      for (const auto& u : user_sets[p]) overlap += user_sets[q].count(u);

  Writer w(c, "split/summary.tsv", res);
  w << "key\tvalue\n";
  auto put = [&](const std::string& k, const std::string& v) {
    w << k << '\t' << v << '\n';
    res.summary.push_back(k + "\t" + v);
  };
  put("components", std::to_string(plan.components));
  for (int p = 0; p < 3; ++p) {
    const auto part = static_cast<Partition>(p);
    const std::string pn(partition_name(part));
    put(pn, std::to_string(plan.counts[static_cast<std::size_t>(p)]));
    put(pn + "_share", fmt(dyads.empty() ? 0.0
                                         : static_cast<double>(plan.counts[static_cast<std::size_t>(p)]) /
                                               static_cast<double>(dyads.size())));
    for (Category cat : kAllCategories) {
      std::size_t n = 0;
      for (std::size_t i = 0; i < dyads.size(); ++i) n += plan.assignment[i] == part && dyads[i].category == cat;
      put(pn + "_" + std::string(category_name(cat)), std::to_string(n));
    }
  }
  put("user_overlap", std::to_string(overlap));
  for (const auto& warn : plan.warnings) put("warning", warn);
  return res;
}

StageResult stage_featurize(const RunConfig& c) {
  StageResult res;
  const auto tweets = load_tweets(c);
  const auto dyads = load_dyads(c);
  const auto samples = load_samples(c, dyads, tweets);
  const auto stats = load_dyad_stats(c, dyads.size());
  const auto plan = load_split(c, dyads.size());
  const auto lex = load_lexicons(c);

  std::vector<std::string> train_texts;
  for (std::size_t i : plan.members(Partition::Train))
    for (auto& t : sample_texts(samples[i], tweets)) train_texts.push_back(std::move(t));
  FeatureSpaceConfig fc;
  fc.min_freq = c.get_int("features.min_freq");
  fc.include_reciprocity = c.get_bool("features.include_reciprocity");
  fc.network_features = c.get_bool("features.network");
  const auto space = build_feature_space(train_texts, lex, fc);

  std::vector<std::string> rows(dyads.size());
  parallel_for(dyads.size(), c.workers(), [&](std::size_t i) {
    rows[i] = format_feature_row(
        featurize_dyad(sample_texts(samples[i], tweets), space, stats[i], category_index(dyads[i].category)));
  });
  {
    Writer w(c, "features/space.txt", res);
    save_feature_space(w.stream(), space);
  }
  Writer w(c, "features/rows.txt", res);
  for (const auto& r : rows) w << r << '\n';
  res.summary.push_back("ngrams\t" + std::to_string(space.num_ngrams()));
  res.summary.push_back("dimension\t" + std::to_string(space.dim()));
  return res;
}

StageResult stage_train_rel(const RunConfig& c) {
  StageResult res;
  const auto dyads = load_dyads(c);
  const auto plan = load_split(c, dyads.size());
  const auto rows = load_feature_rows(c, dyads.size());
  const auto labels = category_labels(dyads);
  const auto sets = rel_sets(c, plan, labels);
  const std::string kind = c.get("learn.model");
  if (kind == "linear") {
    const auto space = load_space(c, load_lexicons(c));
    LinearTrainConfig tc;
    tc.lr = c.get_double("learn.lr");
    tc.epochs = c.get_int("learn.epochs");
    tc.batch = c.get_int("learn.batch");
    tc.l2 = c.get_double("learn.l2");
    tc.seed = derive_seed(c.seed(), "train-rel");
    const auto r = train_linear(to_matrix(pick(rows, sets.train), space), pick(labels, sets.train), tc);
    {
      Writer w(c, "rel/model.txt", res);
      save_linear_model(w.stream(), r.model, tc.seed);
    }
    Writer w(c, "rel/train_log.tsv", res);
    w << "epoch\tloss\n";
    for (std::size_t e = 0; e < r.epoch_losses.size(); ++e) w << e << '\t' << fmt_exact(r.epoch_losses[e]) << '\n';
    if (!r.epoch_losses.empty()) res.summary.push_back("final_loss\t" + fmt(r.epoch_losses.back()));
  } else if (kind == "charcnn") {
    const auto profiles = load_profiles(c);
    const auto alphabet = CharAlphabet::build(name_strings(plan.members(Partition::Train), dyads, profiles),
                                              static_cast<std::size_t>(c.get_int64("learn.cnn.max_chars")));
    const auto train = char_samples(sets.train, dyads, profiles, rows, alphabet);
    CharCnnConfig mc;
    mc.encoder = cnn_shape(c, alphabet.size());
    mc.dense_dim = train.empty() ? 0 : static_cast<int>(train.front().dense.size());
    mc.hidden = c.get_int("learn.cnn.hidden");
    mc.dropout = c.get_double("learn.cnn.dropout");
    CharCnnTrainConfig tc;
    tc.adam.lr = c.get_double("learn.cnn.lr");
    tc.epochs = c.get_int("learn.cnn.epochs");
    tc.batch = c.get_int("learn.cnn.batch");
    tc.seed = derive_seed(c.seed(), "train-rel");
    const auto model = train_charcnn(train, mc, tc);
    Writer w(c, "rel/model.txt", res);
    save_charcnn_model(w.stream(), model, alphabet, tc.seed);
  } else {
    throw ConfigError("learn.model must be 'linear' or 'charcnn'");
  }
  res.summary.push_back("model\t" + kind);
  res.summary.push_back("train_size\t" + std::to_string(sets.train.size()));
  return res;
}

StageResult stage_eval_rel(const RunConfig& c) {
  StageResult res;
  const std::string model_text = read_artifact(artifact(c, "rel/model.txt"), "train-rel");
  const auto dyads = load_dyads(c);
  const auto plan = load_split(c, dyads.size());
  const auto rows = load_feature_rows(c, dyads.size());
  const auto labels = category_labels(dyads);
  const auto sets = rel_sets(c, plan, labels);
  if (sets.test.empty()) throw Error("the test partition is empty");
  const auto truth = pick(labels, sets.test);

  std::istringstream in(model_text);
  std::vector<int> pred;
  std::string kind;
  if (model_text.rfind("relnet-linear", 0) == 0) {
    kind = "linear";
    const auto model = load_linear_model(in);
    const auto space = load_space(c, load_lexicons(c));
    pred = model.predict(to_matrix(pick(rows, sets.test), space));
  } else if (model_text.rfind("relnet-charcnn", 0) == 0) {
    kind = "charcnn";
    CharAlphabet alphabet;
    const auto model = load_charcnn_model(in, &alphabet);
    pred = model.predict(char_samples(sets.test, dyads, load_profiles(c), rows, alphabet));
  } else {
    throw Error("unrecognized model file; rerun 'train-rel'");
  }

  const auto prevalence = class_prevalence(pick(labels, sets.train));
  const int majority =
      static_cast<int>(std::max_element(prevalence.begin(), prevalence.end()) - prevalence.begin());
  const std::vector<std::pair<std::string, EvalReport>> reports = {
      {kind, evaluate(pred, truth)},
      {"majority", evaluate(majority_predictions(truth.size(), majority), truth)},
      {"uniform_random",
       evaluate(uniform_random_predictions(truth.size(), kNumCategories, derive_seed(c.seed(), "eval-uniform")),
                truth)},
      {"proportional_random",
       evaluate(proportional_random_predictions(truth.size(), prevalence, derive_seed(c.seed(), "eval-prop")),
                truth)}};
  {
    Writer w(c, "rel/eval.tsv", res);
    w << "model\tclass\tprecision\trecall\tf1\tsupport\n";
    for (const auto& [name, r] : reports)
      for (const auto& row : eval_rows(name, r)) w << row << '\n';
  }
  {
    Writer w(c, "rel/eval.txt", res);
    for (const auto& [name, r] : reports) w << format_eval_table(name, r) << '\n';
  }
  Writer w(c, "rel/summary.tsv", res);
  w << "key\tvalue\n";
  auto put = [&](const std::string& k, const std::string& v) {
    w << k << '\t' << v << '\n';
    res.summary.push_back(k + "\t" + v);
  };
  put("mode", c.get("learn.mode"));
  put("train_size", std::to_string(sets.train.size()));
  put("test_size", std::to_string(sets.test.size()));
  for (const auto& [name, r] : reports) put(name + "_macro_f1", fmt(r.macro_f1));
  put(kind + "_accuracy", fmt(reports.front().second.accuracy));
  return res;
}

StageResult stage_train_rt(const RunConfig& c) {
  StageResult res;
  const auto tweets = load_tweets(c);
  const auto dyads = load_dyads(c);
  const auto profiles = load_profiles(c);
  RetweetDatasetConfig dc;
  dc.per_category_n = static_cast<std::size_t>(c.get_int64("retweet.per_category_n"));
  dc.window_seconds = c.get_int64("retweet.window_seconds");
  dc.ratios = split_ratios(c);
  dc.seed = derive_seed(c.seed(), "retweet-dataset");
  dc.workers = c.workers();
  const auto data = build_retweet_dataset(dyads, tweets, profiles, dc);
  {
    Writer w(c, "retweet/dataset.ndjson", res);
    for (const auto& s : data.samples) w << serialize_retweet_sample(s) << '\n';
  }
  {
    Writer w(c, "retweet/dataset_summary.tsv", res);
    w << "key\tvalue\n";
    w << "samples\t" << data.samples.size() << '\n';
    w << "positives_found\t" << data.positives_found << '\n';
    w << "discarded_no_negative\t" << data.discarded_no_negative << '\n';
    w << "pairs_per_category\t" << data.pairs_per_category << '\n';
    for (const auto& [cat, n] : data.pairs_available) w << "pairs_available_" << category_name(cat) << '\t' << n << '\n';
    for (const auto& warn : data.warnings) w << "warning\t" << warn << '\n';
  }
  res.summary.push_back("samples\t" + std::to_string(data.samples.size()));

  for (const auto& vname : c.get_list("retweet.variants")) {
    RetweetModelConfig mc;
    mc.variant = parse_variant(vname);
    mc.text_proj = c.get_int("retweet.text_proj");
    mc.relation_embed = c.get_int("retweet.relation_embed");
    mc.hidden = c.get_int("retweet.hidden");
    mc.phrase_encoder.embed_dim = c.get_int("retweet.phrase_embed_dim");
    const int f = c.get_int("retweet.phrase_filters");
    mc.phrase_encoder.filters = {f, f, f};
    RetweetTrainConfig tc;
    tc.adam.lr = c.get_double("retweet.lr");
    tc.epochs = c.get_int("retweet.epochs");
    tc.batch = c.get_int("retweet.batch");
    tc.eval_every = c.get_int("retweet.eval_every");
    tc.text_min_freq = c.get_int("retweet.text_min_freq");
    tc.seed = derive_seed(c.seed(), "train-rt");
    tc.workers = c.workers();
    const auto run = train_and_evaluate_retweet(data.samples, mc, tc);
    {
      Writer w(c, "retweet/model_" + vname + ".txt", res);
      save_retweet_model(w.stream(), run, tc.seed);
    }
    Writer w(c, "retweet/predictions_" + vname + ".tsv", res);
    w << "sample\tlabel\tproba\n";
    std::size_t k = 0;
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
      if (data.samples[i].partition != Partition::Test) continue;
      w << i << '\t' << (data.samples[i].label ? 1 : 0) << '\t' << fmt_exact(run.test_proba[k++]) << '\n';
    }
    res.summary.push_back(vname + "_best_validation_f1\t" + fmt(run.best_validation_f1));
  }
  return res;
}

StageResult stage_eval_rt(const RunConfig& c) {
  StageResult res;
  const std::string dpath = artifact(c, "retweet/dataset.ndjson");
  std::vector<RetweetSample> samples;
  {
    std::size_t n = 0;
    for (const auto& line : artifact_lines(dpath, "train-rt")) samples.push_back(parse_retweet_sample(line, ++n));
  }
  std::vector<std::pair<std::string, RetweetEval>> evals;
  for (const auto& vname : c.get_list("retweet.variants")) {
    parse_variant(vname);
    const std::string path = artifact(c, "retweet/predictions_" + vname + ".tsv");
    auto lines = artifact_lines(path, "train-rt");
    std::vector<RetweetSample> test;
    std::vector<double> proba;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
      const auto f = split_tabs(lines[ln]);
      if (f.size() != 3) throw ParseError(ln, path + ": expected 3 columns");
      const auto i = parse_number<std::size_t>("sample", f[0]);
      if (i >= samples.size()) throw Error(path + " does not match the dataset; rerun 'train-rt'");
      test.push_back(samples[i]);
      proba.push_back(parse_double("proba", f[2]));
    }
    evals.emplace_back(vname, evaluate_retweet(test, proba));
  }
  {
    Writer w(c, "retweet/eval.tsv", res);
    w << retweet_eval_header() << '\n';
    for (const auto& [v, e] : evals)
      for (const auto& row : retweet_eval_rows(v, e)) w << row << '\n';
  }
  Writer w(c, "retweet/summary.tsv", res);
  w << "variant\turl\tprecision\trecall\tf1\n";
  for (const auto& [v, e] : evals) {
    const std::pair<std::string, const BinaryCounts*> parts[] = {
        {"all", &e.overall}, {"no", &e.by_url[0]}, {"yes", &e.by_url[1]}};
    for (const auto& [url, b] : parts)
      w << v << '\t' << url << '\t' << fmt(b->precision()) << '\t' << fmt(b->recall()) << '\t' << fmt(b->f1()) << '\n';
    res.summary.push_back(v + "_f1\t" + fmt(e.overall.f1()));
  }
  return res;
}

StageResult stage_report(const RunConfig& c) {
  StageResult res;
  static const std::vector<std::pair<std::string, std::string>> sections = {
      {"extract", "extract/summary.tsv"},      {"graph-stats", "graph/summary.tsv"},
      {"lexical", "lexical/rates.tsv"},        {"topics", "topics/summary.tsv"},
      {"diurnal", "diurnal/summary.tsv"},      {"split", "split/summary.tsv"},
      {"eval-rel", "rel/summary.tsv"},         {"eval-rt", "retweet/summary.tsv"},
      {"train-rt", "retweet/dataset_summary.tsv"}};
  std::ostringstream body;
  std::size_t found = 0;
  for (const auto& [stage, rel] : sections) {
    const std::string path = artifact(c, rel);
    if (!fs::exists(path)) continue;
    ++found;
    body << "[" << stage << "]\n" << read_artifact(path, stage) << '\n';
  }
  if (found == 0)
    throw Error("nothing to report in " + c.out_dir() + ": no stage outputs found (run 'extract' or later stages)");
  Writer w(c, "report.txt", res);
  w << body.str();
  res.summary.push_back("sections\t" + std::to_string(found));
  return res;
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& [k, v] : default_settings()) values_[k] = v;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  RunConfig c;
  c.load(in, path);
  return c;
}

void RunConfig::load(std::istream& in, const std::string& origin) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ":" + std::to_string(n) + ": expected key = value");
    try {
      set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(n) + ": " + e.what());
    }
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second = value;
}

void RunConfig::assign(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

int RunConfig::get_int(const std::string& key) const { return parse_number<int>(key, get(key)); }
std::int64_t RunConfig::get_int64(const std::string& key) const { return parse_number<std::int64_t>(key, get(key)); }
std::uint64_t RunConfig::get_u64(const std::string& key) const { return parse_number<std::uint64_t>(key, get(key)); }
double RunConfig::get_double(const std::string& key) const { return parse_double(key, get(key)); }

bool RunConfig::get_bool(const std::string& key) const {
  const std::string v = to_lower(get(key));
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + get(key) + "'");
}

std::vector<std::string> RunConfig::get_list(const std::string& key) const {
  std::vector<std::string> out;
  std::istringstream in(get(key));
  for (std::string item; std::getline(in, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> RunConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : get_list(key)) out.push_back(parse_double(key, item));
  return out;
}

std::string RunConfig::dump() const {
  std::string s;
  for (const auto& [k, v] : values_) s += k + " = " + v + "\n";
  return s;
}

std::string RunConfig::hash() const {
  std::string s;
  for (const auto& [k, v] : values_)
    if (k != "out" && k != "workers") s += k + "=" + v + "\n";
  return hex64(stable_hash(s));
}

std::string RunConfig::header() const {
  return "# relnet " + std::string(kVersion) + " config=" + hash() + " seed=" + get("seed");
}

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names = {"synth", "extract", "graph-stats", "lexical", "topics",
                                                 "diurnal", "split",   "featurize",   "train-rel", "eval-rel",
                                                 "train-rt", "eval-rt", "report"};
  return names;
}

StageResult run_stage(const std::string& stage, const RunConfig& config) {
  static const std::map<std::string, std::function<StageResult(const RunConfig&)>> stages = {
      {"synth", stage_synth},         {"extract", stage_extract},     {"graph-stats", stage_graph},
      {"lexical", stage_lexical},     {"topics", stage_topics},       {"diurnal", stage_diurnal},
      {"split", stage_split},         {"featurize", stage_featurize}, {"train-rel", stage_train_rel},
      {"eval-rel", stage_eval_rel},   {"train-rt", stage_train_rt},   {"eval-rt", stage_eval_rt},
      {"report", stage_report}};
  auto it = stages.find(stage);
  if (it == stages.end()) throw ConfigError("unknown stage '" + stage + "'");
  if (config.workers() < 1) throw ConfigError("workers must be >= 1");
  return it->second(config);
}

SynthConfig synth_config_from(const RunConfig& c) {
  SynthConfig s;
  auto per_category = [&](const std::string& key) {
    const auto v = c.get_doubles(key);
    if (v.size() != kNumCategories) throw ConfigError(key + " needs one value per category");
    return v;
  };
  const auto dyads = per_category("synth.dyads");
  const auto breadth = per_category("synth.topic_breadth");
  const auto recip = per_category("synth.reciprocity");
  for (int k = 0; k < kNumCategories; ++k) {
    s.dyads[k] = static_cast<std::size_t>(dyads[k]);
    s.topic_breadth[k] = static_cast<int>(breadth[k]);
    s.reciprocity[k] = recip[k];
    std::string key = "synth.lexicon_rates." + to_lower(category_name(category_from_index(k)));
    const auto rates = c.get_doubles(key);
    if (rates.size() != 5) throw ConfigError(key + " needs five rates");
    std::copy(rates.begin(), rates.end(), s.lexicon_rates[k].begin());
  }
  s.topics = c.get_int("synth.topics");
  s.words_per_topic = c.get_int("synth.words_per_topic");
  s.null_offset_rate = c.get_double("synth.null_offset_rate");
  s.fans_per_hub = c.get_int("synth.fans_per_hub");
  s.hub_min_followers = c.get_int64("synth.hub_min_followers");
  s.user_max_followers = c.get_int64("synth.user_max_followers");
  s.dm_min = c.get_int("synth.dm_min");
  s.dm_max = c.get_int("synth.dm_max");
  s.pm_min = c.get_int("synth.pm_min");
  s.pm_max = c.get_int("synth.pm_max");
  s.originals_per_user = c.get_int("synth.originals_per_user");
  s.days = c.get_int("synth.days");
  s.url_rate = c.get_double("synth.url_rate");
  s.retweet_base_personal = c.get_double("synth.retweet_base_personal");
  s.retweet_base_news = c.get_double("synth.retweet_base_news");
  s.retweet_base_misc = c.get_double("synth.retweet_base_misc");
  s.retweet_url_bonus = c.get_double("synth.retweet_url_bonus");
  s.interaction = c.get_double("synth.interaction");
  s.interaction_categories = {};
  for (const auto& name : c.get_list("synth.interaction_categories")) {
    const auto cat = parse_category(name);
    if (!cat) throw ConfigError("synth.interaction_categories: unknown category '" + name + "'");
    s.interaction_categories[static_cast<std::size_t>(category_index(*cat))] = true;
  }
  s.second_declaration_rate = c.get_double("synth.second_declaration_rate");
  s.leak_rate = c.get_double("synth.leak_rate");
  s.hub_noise_rate = c.get_double("synth.hub_noise_rate");
  s.unmapped_declarations = c.get_int("synth.unmapped_declarations");
  s.min_phrase_count = c.get_int("extract.min_phrase_count");
  s.seed = derive_seed(c.seed(), "synth");
  s.workers = c.workers();
  validate_synth_config(s);
  return s;
}

std::map<Category, std::vector<std::string>> directed_texts_by_category(const TweetIndex& index,
                                                                        const std::vector<LabeledDyad>& dyads) {
  std::map<Category, std::vector<std::string>> out;
  const auto& tweets = index.tweets();
  for (const auto& d : dyads) {
    auto& bucket = out[d.category];
    for (const auto* from : {&d.user_a, &d.user_b})
      for (std::size_t i : interactions_toward(index, *from, d.partner_of(*from), InteractionKind::DirectedMention))
        if (!leaks_label(tweets[i], d)) bucket.push_back(tweets[i].text);
  }
  return out;
}

std::map<std::string, std::vector<HourVector>> diurnal_inputs(const TweetIndex& index,
                                                              const std::vector<LabeledDyad>& dyads,
                                                              std::size_t min_activity) {
  std::map<std::string, std::vector<HourVector>> out;
  const auto& tweets = index.tweets();
  for (const auto& d : dyads)
    for (const auto* from : {&d.user_a, &d.user_b}) {
      std::vector<const Tweet*> mentions;
      for (auto kind : {InteractionKind::DirectedMention, InteractionKind::PublicMention})
        for (std::size_t i : interactions_toward(index, *from, d.partner_of(*from), kind))
          if (!leaks_label(tweets[i], d)) mentions.push_back(&tweets[i]);
      if (auto h = dyad_hour_distribution(mentions, min_activity))
        out[std::string(category_name(d.category))].push_back(h->t);
    }
  return out;
}

}  // namespace relnet
