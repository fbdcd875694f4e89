#include "relnet/retweet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "relnet/parallel.hpp"

namespace relnet {

bool retweet_source_eligible(const Tweet& t) { return !t.retweet_of && t.mentions.empty(); }

namespace {

struct PairRecord {
  std::size_t dyad = 0;
  std::size_t positive = 0;  // tweet indices
  std::size_t negative = 0;
  std::string author;
  std::string candidate;
};

double log_followers(const ProfileIndex& profiles, const std::string& user) {
  auto it = profiles.find(user);
  return it == profiles.end() ? 0.0 : std::log1p(static_cast<double>(std::max<std::int64_t>(0, it->second.follower_count)));
}

std::string retweet_key(const std::string& retweeter, const std::string& tweet_id) {
  std::string k = retweeter;
  k.push_back('\x1f');
  k += tweet_id;
  return k;
}

}  // namespace

RetweetDataset build_retweet_dataset(const std::vector<LabeledDyad>& dyads, const std::vector<Tweet>& tweets,
                                     const ProfileIndex& profiles, const RetweetDatasetConfig& config) {
  if (config.per_category_n < 1) throw ConfigError("retweet per_category_n must be >= 1");
  if (config.window_seconds < 0) throw ConfigError("retweet window must be non-negative");
  std::unordered_map<std::string, std::vector<std::size_t>> eligible_by_author;
  std::unordered_set<std::string> retweeted;
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    const auto& t = tweets[i];
    if (t.retweet_of) retweeted.insert(retweet_key(t.author_id, t.retweet_of->tweet_id));
    else if (t.mentions.empty()) eligible_by_author[t.author_id].push_back(i);
  }
  for (auto& [author, list] : eligible_by_author)
    std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      if (tweets[a].created_at != tweets[b].created_at) return tweets[a].created_at < tweets[b].created_at;
      return tweets[a].tweet_id < tweets[b].tweet_id;
    });

  std::vector<std::vector<PairRecord>> per_dyad(dyads.size());
  std::vector<std::size_t> discarded(dyads.size(), 0), found(dyads.size(), 0);
  parallel_for(dyads.size(), config.workers, [&](std::size_t d) {
    const auto& dyad = dyads[d];
    for (const auto* author : {&dyad.user_a, &dyad.user_b}) {
      const std::string& candidate = dyad.partner_of(*author);
      auto it = eligible_by_author.find(*author);
      if (it == eligible_by_author.end()) continue;
      const auto& list = it->second;
      std::vector<char> is_pos(list.size(), 0), used(list.size(), 0);
      for (std::size_t i = 0; i < list.size(); ++i)
        is_pos[i] = retweeted.count(retweet_key(candidate, tweets[list[i]].tweet_id)) ? 1 : 0;
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (!is_pos[i]) continue;
        ++found[d];
        const std::int64_t t0 = tweets[list[i]].created_at;
        std::size_t best = SIZE_MAX;
        std::int64_t best_gap = 0;
        // list is time-ordered, so scanning upward keeps the earlier tweet on ties
        for (std::size_t j = 0; j < list.size(); ++j) {
          if (is_pos[j] || used[j]) continue;
          const std::int64_t gap = std::llabs(tweets[list[j]].created_at - t0);
          if (gap > config.window_seconds) continue;
          if (best == SIZE_MAX || gap < best_gap) {
            best = j;
            best_gap = gap;
          }
        }
        if (best == SIZE_MAX) {
          ++discarded[d];
          continue;
        }
        used[best] = 1;
        per_dyad[d].push_back({d, list[i], list[best], *author, candidate});
      }
    }
  });

  RetweetDataset ds;
  std::array<std::vector<PairRecord>, kNumCategories> by_cat;
  for (std::size_t d = 0; d < dyads.size(); ++d) {
    ds.positives_found += found[d];
    ds.discarded_no_negative += discarded[d];
    auto& dest = by_cat[static_cast<std::size_t>(category_index(dyads[d].category))];
    for (auto& p : per_dyad[d]) dest.push_back(std::move(p));
  }
  std::size_t want = std::max<std::size_t>(1, config.per_category_n / 2);
  for (Category c : kAllCategories) {
    const std::size_t n = by_cat[static_cast<std::size_t>(category_index(c))].size();
    ds.pairs_available[c] = n;
    if (n == 0) {
      ds.warnings.push_back("no retweet pairs for category " + std::string(category_name(c)));
      continue;
    }
    if (n < want) {
      ds.warnings.push_back("category " + std::string(category_name(c)) + " has only " + std::to_string(n) +
                            " pairs; every category reduced to match");
      want = n;
    }
  }
  ds.pairs_per_category = want;

  const double ratio_sum = config.ratios[0] + config.ratios[1] + config.ratios[2];
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(want) * config.ratios[0] / ratio_sum));
  const auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(want) * config.ratios[1] / ratio_sum));
  std::size_t pair_id = 0;
  for (Category c : kAllCategories) {
    auto pool = by_cat[static_cast<std::size_t>(category_index(c))];
    if (pool.empty()) continue;
    std::mt19937_64 rng(derive_seed(config.seed, "retweet-sample", category_name(c)));
    for (std::size_t i = 0; i < want; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    for (std::size_t i = 0; i < want; ++i) {
      const auto& p = pool[i];
      const Partition part = i < n_train ? Partition::Train : i < n_train + n_val ? Partition::Validation : Partition::Test;
      for (bool positive : {true, false}) {
        const Tweet& t = tweets[positive ? p.positive : p.negative];
        RetweetSample s;
        s.source_tweet_id = t.tweet_id;
        s.author_id = p.author;
        s.candidate_id = p.candidate;
        s.category = c;
        s.phrase = dyads[p.dyad].phrase;
        s.text = t.text;
        s.created_at = t.created_at;
        s.has_url = detect_url(t.text);
        s.log_followers_author = log_followers(profiles, p.author);
        s.log_followers_candidate = log_followers(profiles, p.candidate);
        s.label = positive;
        s.pair = pair_id;
        s.partition = part;
        ds.samples.push_back(std::move(s));
      }
      ++pair_id;
    }
  }
  return ds;
}

std::string serialize_retweet_sample(const RetweetSample& s) {
  nlohmann::ordered_json j;
  j["source_tweet_id"] = s.source_tweet_id;
  j["author_id"] = s.author_id;
  j["candidate_id"] = s.candidate_id;
  j["category"] = std::string(category_name(s.category));
  j["phrase"] = s.phrase;
  j["text"] = s.text;
  j["created_at"] = s.created_at;
  j["has_url"] = s.has_url;
  j["log_followers_author"] = s.log_followers_author;
  j["log_followers_candidate"] = s.log_followers_candidate;
  j["label"] = s.label;
  j["pair"] = s.pair;
  j["partition"] = std::string(partition_name(s.partition));
  return j.dump();
}

RetweetSample parse_retweet_sample(std::string_view line, std::size_t line_no) {
  auto j = nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError(line_no, "malformed retweet sample");
  try {
    RetweetSample s;
    s.source_tweet_id = j.at("source_tweet_id").get<std::string>();
    s.author_id = j.at("author_id").get<std::string>();
    s.candidate_id = j.at("candidate_id").get<std::string>();
    auto cat = parse_category(j.at("category").get<std::string>());
    if (!cat) throw ParseError(line_no, "unknown category");
    s.category = *cat;
    s.phrase = j.at("phrase").get<std::string>();
    s.text = j.at("text").get<std::string>();
    s.created_at = j.at("created_at").get<std::int64_t>();
    s.has_url = j.at("has_url").get<bool>();
    s.log_followers_author = j.at("log_followers_author").get<double>();
    s.log_followers_candidate = j.at("log_followers_candidate").get<double>();
    s.label = j.at("label").get<bool>();
    s.pair = j.at("pair").get<std::size_t>();
    const auto part = j.at("partition").get<std::string>();
    if (part == "train") s.partition = Partition::Train;
    else if (part == "validation") s.partition = Partition::Validation;
    else if (part == "test") s.partition = Partition::Test;
    else throw ParseError(line_no, "unknown partition '" + part + "'");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(line_no, e.what());
  }
}

std::vector<RetweetSample> read_retweet_samples_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<RetweetSample> out;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (line.empty() || line.front() == '#') continue;
    out.push_back(parse_retweet_sample(line, no));
  }
  return out;
}

std::string_view retweet_variant_name(RetweetVariant v) { return v == RetweetVariant::Aware ? "aware" : "baseline"; }

RetweetInput featurize_retweet(const RetweetSample& s, const FeatureSpace& space, const CharAlphabet* alphabet) {
  RetweetInput in;
  in.text = ngram_features(s.text, space);
  in.extras = Eigen::Vector3d(s.log_followers_author, s.log_followers_candidate, s.has_url ? 1.0 : 0.0);
  in.category = category_index(s.category);
  if (alphabet) in.phrase = alphabet->encode(s.phrase, 5);
  in.label = s.label ? 1.0 : 0.0;
  return in;
}

RetweetEval evaluate_retweet(const std::vector<RetweetSample>& samples, const std::vector<double>& proba) {
  if (samples.size() != proba.size()) throw Error("prediction count does not match the samples");
  if (samples.empty()) throw Error("empty test set");
  RetweetEval e;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    BinaryCounts one;
    const bool pred = proba[i] >= 0.5;
    if (pred && samples[i].label) one.tp = 1;
    else if (pred) one.fp = 1;
    else if (samples[i].label) one.fn = 1;
    else one.tn = 1;
    const auto u = static_cast<std::size_t>(samples[i].has_url);
    const auto c = static_cast<std::size_t>(category_index(samples[i].category));
    e.overall += one;
    e.by_url[u] += one;
    e.by_category[c] += one;
    e.by_url_category[u][c] += one;
  }
  return e;
}

namespace {

std::vector<double> predict_all(const RetweetModel<double>& model, const std::vector<RetweetInput>& inputs, int workers) {
  std::vector<double> out(inputs.size());
  parallel_chunks(inputs.size(), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    constexpr std::size_t kStep = 256;
    for (std::size_t b = begin; b < end; b += kStep) {
      const std::size_t e = std::min(end, b + kStep);
      const std::vector<RetweetInput> batch(inputs.begin() + static_cast<std::ptrdiff_t>(b),
                                            inputs.begin() + static_cast<std::ptrdiff_t>(e));
      const auto p = model.predict_proba(batch);
      std::copy(p.begin(), p.end(), out.begin() + static_cast<std::ptrdiff_t>(b));
    }
  });
  return out;
}

}  // namespace

RetweetRun train_and_evaluate_retweet(const std::vector<RetweetSample>& samples, const RetweetModelConfig& model_config,
                                      const RetweetTrainConfig& config) {
  if (config.batch < 1 || config.epochs < 0) throw ConfigError("batch must be >= 1 and epochs >= 0");
  std::array<std::vector<const RetweetSample*>, 3> parts;
  for (const auto& s : samples) parts[static_cast<std::size_t>(s.partition)].push_back(&s);
  const auto& train = parts[0];
  bool pos = false, neg = false;
  for (const auto* s : train) (s->label ? pos : neg) = true;
  if (!pos || !neg) throw Error("retweet training set needs both labels");
  if (parts[1].empty() || parts[2].empty()) throw Error("retweet validation and test partitions must be non-empty");

  RetweetRun run;
  run.variant = model_config.variant;
  std::vector<std::string> texts;
  for (const auto* s : train) texts.push_back(s->text);
  FeatureSpaceConfig fcfg;
  fcfg.min_freq = config.text_min_freq;
  fcfg.network_features = false;
  run.space = build_feature_space(texts, Lexicon{}, fcfg);

  RetweetModelConfig mc = model_config;
  mc.text_dim = run.space.num_ngrams();
  const bool aware = mc.variant == RetweetVariant::Aware;
  if (aware) {
    std::vector<std::string> phrases;
    for (const auto* s : train) phrases.push_back(s->phrase);
    run.alphabet = CharAlphabet::build(phrases, 300);
    mc.phrase_encoder.alphabet = run.alphabet.size();
  }

  std::array<std::vector<RetweetInput>, 3> inputs;
  for (int p = 0; p < 3; ++p) {
    inputs[p].resize(parts[p].size());
    parallel_for(parts[p].size(), config.workers, [&](std::size_t i) {
      inputs[p][i] = featurize_retweet(*parts[p][i], run.space, aware ? &run.alphabet : nullptr);
    });
  }

  run.model = RetweetModel<double>(mc);
  auto& model = run.model;
  model.init(derive_seed(config.seed, "retweet-init", retweet_variant_name(mc.variant)));
  Eigen::Vector3d max_abs = Eigen::Vector3d::Zero();
  for (const auto& in : inputs[0]) max_abs = max_abs.cwiseMax(in.extras.cwiseAbs());
  for (int k = 0; k < 3; ++k) model.extra_scale()(k) = max_abs(k) > 0 ? 1.0 / max_abs(k) : 1.0;

  std::vector<RetweetSample> val_samples, test_samples;
  for (const auto* s : parts[1]) val_samples.push_back(*s);
  for (const auto* s : parts[2]) test_samples.push_back(*s);

  Eigen::VectorXd best = model.parameters();
  auto check = [&](int step) {
    const double f1 = evaluate_retweet(val_samples, predict_all(model, inputs[1], config.workers)).overall.f1();
    if (f1 > run.best_validation_f1) {
      run.best_validation_f1 = f1;
      run.best_step = step;
      best = model.parameters();
    }
  };

  Adam adam(config.adam, model.parameters().size());
  std::mt19937_64 rng(derive_seed(config.seed, "retweet-order", retweet_variant_name(mc.variant)));
  std::vector<std::size_t> order(inputs[0].size());
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd grad;
  std::vector<RetweetInput> batch;
  int step = 0;
  check(0);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch));
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(inputs[0][order[i]]);
      const double l = model.loss_and_gradient(batch, &grad);
      if (!std::isfinite(l) || !grad.allFinite())
        throw Error("non-finite retweet loss at epoch " + std::to_string(epoch));
      adam.step(model.parameters(), grad);
      ++step;
      if (config.eval_every > 0 && step % config.eval_every == 0) check(step);
    }
    if (config.eval_every <= 0) check(step);
  }
  model.parameters() = best;
  run.test_proba = predict_all(model, inputs[2], config.workers);
  run.test = evaluate_retweet(test_samples, run.test_proba);
  return run;
}

std::string retweet_eval_header() {
  return "variant\turl\tcategory\tprecision\trecall\tf1\ttp\tfp\tfn\ttn";
}

std::vector<std::string> retweet_eval_rows(const std::string& variant, const RetweetEval& e) {
  std::vector<std::string> rows;
  auto row = [&](std::string_view url, std::string_view cat, const BinaryCounts& b) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "\t%.6f\t%.6f\t%.6f\t%zu\t%zu\t%zu\t%zu", b.precision(), b.recall(), b.f1(), b.tp, b.fp,
                  b.fn, b.tn);
    rows.push_back(variant + '\t' + std::string(url) + '\t' + std::string(cat) + buf);
  };
  row("all", "all", e.overall);
  const char* url_names[2] = {"no", "yes"};
  for (int u = 0; u < 2; ++u) row(url_names[u], "all", e.by_url[static_cast<std::size_t>(u)]);
  for (Category c : kAllCategories) row("all", category_name(c), e.by_category[static_cast<std::size_t>(category_index(c))]);
  for (int u = 0; u < 2; ++u)
    for (Category c : kAllCategories)
      row(url_names[u], category_name(c),
          e.by_url_category[static_cast<std::size_t>(u)][static_cast<std::size_t>(category_index(c))]);
  return rows;
}

void save_retweet_model(std::ostream& os, const RetweetRun& run, std::uint64_t seed) {
  const auto& c = run.model.config();
  char buf[40];
  os << "relnet-retweet 1\nseed " << seed << "\nvariant " << retweet_variant_name(c.variant) << "\ntext_dim "
     << c.text_dim << "\ntext_proj " << c.text_proj << "\nrelation_embed " << c.relation_embed << "\nphrase_embed_dim "
     << c.phrase_encoder.embed_dim << "\nphrase_filters " << c.phrase_encoder.filters[0] << ' '
     << c.phrase_encoder.filters[1] << ' ' << c.phrase_encoder.filters[2] << "\nhidden " << c.hidden << "\nbest_step "
     << run.best_step << "\nngrams " << run.space.ngram_vocab.size() << '\n';
  for (const auto& g : run.space.ngram_vocab) os << g << '\n';
  os << "chars " << run.alphabet.chars().size() << '\n';
  for (const auto& ch : run.alphabet.chars()) {
    for (unsigned char b : ch) {
      std::snprintf(buf, sizeof buf, "%02x", b);
      os << buf;
    }
    os << '\n';
  }
  os << "extra_scale\n";
  for (Eigen::Index i = 0; i < run.model.extra_scale().size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", run.model.extra_scale()(i));
    os << buf << '\n';
  }
  os << "parameters\n";
  for (Eigen::Index i = 0; i < run.model.parameters().size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", run.model.parameters()(i));
    os << buf << '\n';
  }
}

}  // namespace relnet
