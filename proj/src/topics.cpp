#include "relnet/topics.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "relnet/common.hpp"
#include "relnet/text.hpp"

namespace relnet {

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = {
      "a",   "an",   "and",  "are", "as",   "at",   "be",   "but",  "by",   "for", "from", "have", "he",
      "her", "his",  "i",    "if",  "in",   "is",   "it",   "its",  "me",   "my",  "no",   "not",  "of",
      "on",  "or",   "rt",   "so",  "that", "the",  "they", "this", "to",   "u",   "was",  "we",   "what",
      "with", "you", "your", "im",  "just", "lol",  "be",   "do",   "all",  "can", "will", "our",  "us"};
  return words;
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs, int min_count,
                            const std::set<std::string>& stopwords) {
  std::map<std::string, int> counts;
  for (const auto& doc : docs)
    for (const auto& tok : doc)
      if (!stopwords.count(tok)) ++counts[tok];
  Vocabulary v;
  for (const auto& [w, n] : counts)
    if (n >= min_count) {
      v.index[w] = static_cast<int>(v.words.size());
      v.words.push_back(w);
    }
  return v;
}

std::vector<int> encode(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
  std::vector<int> out;
  for (const auto& t : tokens) {
    int id = vocab.id(t);
    if (id >= 0) out.push_back(id);
  }
  return out;
}

namespace {

int sample_discrete(std::vector<double>& weights, std::mt19937_64& rng) {
  double total = 0.0;
  for (double& w : weights) {
    total += w;
    w = total;
  }
  std::uniform_real_distribution<double> u(0.0, total);
  const double x = u(rng);
  for (std::size_t k = 0; k + 1 < weights.size(); ++k)
    if (x < weights[k]) return static_cast<int>(k);
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace

TopicModel fit_lda(const std::vector<std::vector<int>>& docs, int vocab_size, const LdaConfig& config) {
  if (vocab_size <= 0) throw Error("LDA needs a non-empty vocabulary");
  if (config.topics < 2) throw ConfigError("LDA needs at least 2 topics");
  if (config.iterations < 1) throw ConfigError("LDA needs at least 1 iteration");
  if (!(config.alpha > 0 && config.beta > 0)) throw ConfigError("LDA priors must be positive");
  std::size_t tokens = 0;
  for (const auto& d : docs) {
    tokens += d.size();
    for (int w : d)
      if (w < 0 || w >= vocab_size) throw Error("word id out of vocabulary range");
  }
  if (tokens == 0) throw Error("LDA corpus has no tokens");

  const int K = config.topics;
  const auto D = static_cast<Eigen::Index>(docs.size());
  TopicModel m;
  m.topics = K;
  m.alpha = config.alpha;
  m.beta = config.beta;
  m.seed = config.seed;
  m.topic_word = Eigen::MatrixXi::Zero(K, vocab_size);
  m.topic_totals = Eigen::VectorXi::Zero(K);
  m.doc_topic = Eigen::MatrixXi::Zero(K, D);
  m.assignments.resize(docs.size());

  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<int> initial(0, K - 1);
  for (Eigen::Index d = 0; d < D; ++d) {
    const auto& doc = docs[static_cast<std::size_t>(d)];
    auto& z = m.assignments[static_cast<std::size_t>(d)];
    z.resize(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
      z[i] = initial(rng);
      ++m.doc_topic(z[i], d);
      ++m.topic_word(z[i], doc[i]);
      ++m.topic_totals(z[i]);
    }
  }

  const double vbeta = vocab_size * config.beta;
  std::vector<double> weights(static_cast<std::size_t>(K));
  for (int it = 0; it < config.iterations; ++it) {
    for (Eigen::Index d = 0; d < D; ++d) {
      const auto& doc = docs[static_cast<std::size_t>(d)];
      auto& z = m.assignments[static_cast<std::size_t>(d)];
      for (std::size_t i = 0; i < doc.size(); ++i) {
        const int w = doc[i];
        const int old = z[i];
        --m.doc_topic(old, d);
        --m.topic_word(old, w);
        --m.topic_totals(old);
        for (int k = 0; k < K; ++k)
          weights[static_cast<std::size_t>(k)] = (m.doc_topic(k, d) + config.alpha) *
                                                 (m.topic_word(k, w) + config.beta) / (m.topic_totals(k) + vbeta);
        const int k_new = sample_discrete(weights, rng);
        z[i] = k_new;
        ++m.doc_topic(k_new, d);
        ++m.topic_word(k_new, w);
        ++m.topic_totals(k_new);
      }
    }
  }
  return m;
}

Eigen::VectorXd infer_topic_distribution(const TopicModel& model, const std::vector<int>& doc, int passes,
                                         std::uint64_t seed) {
  if (passes < 1) throw ConfigError("inference needs at least 1 pass");
  const int K = model.topics;
  const double vbeta = model.vocab_size() * model.beta;
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(K);
  std::vector<int> z(doc.size());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> initial(0, K - 1);
  for (auto& k : z) ++counts(k = initial(rng));
  std::vector<double> weights(static_cast<std::size_t>(K));
  for (int p = 0; p < passes; ++p) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      --counts(z[i]);
      for (int k = 0; k < K; ++k)
        weights[static_cast<std::size_t>(k)] = (counts(k) + model.alpha) *
                                               (model.topic_word(k, doc[i]) + model.beta) /
                                               (model.topic_totals(k) + vbeta);
      z[i] = sample_discrete(weights, rng);
      ++counts(z[i]);
    }
  }
  Eigen::VectorXd theta = counts.cast<double>().array() + model.alpha;
  return theta / theta.sum();
}

std::optional<DyadTopicDiversity> dyad_topic_entropy(const TopicModel& model, const std::vector<std::string>& texts,
                                                     const TopicInferenceConfig& config) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(model.topics);
  int used = 0;
  for (std::size_t i = 0; i < texts.size() && static_cast<std::size_t>(used) < config.tweet_cap; ++i) {
    const auto doc = encode(content_tokens(texts[i]), model.vocab);
    if (doc.empty()) continue;
    sum += infer_topic_distribution(model, doc, config.passes, derive_seed(config.seed, i));
    ++used;
  }
  if (used == 0) return std::nullopt;
  DyadTopicDiversity out;
  out.mean_distribution = sum / static_cast<double>(used);
  out.entropy = entropy(out.mean_distribution);
  out.tweets_used = used;
  return out;
}

std::map<std::string, std::optional<EntropySummary>> category_entropy_report(
    const std::map<std::string, std::vector<double>>& entropies, const BootstrapConfig& bootstrap) {
  std::map<std::string, std::optional<EntropySummary>> out;
  for (const auto& [group, values] : entropies) {
    if (values.empty()) {
      out[group] = std::nullopt;
      continue;
    }
    EntropySummary s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    BootstrapConfig cfg = bootstrap;
    cfg.seed = derive_seed(bootstrap.seed, group);
    s.ci = bootstrap_ci(values, cfg);
    s.dyads = values.size();
    out[group] = s;
  }
  return out;
}

void save_topic_model(std::ostream& os, const TopicModel& model) {
  if (static_cast<int>(model.vocab.words.size()) != model.topic_word.cols())
    throw Error("topic model vocabulary does not match its counts");
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g %llu", model.topics, model.vocab_size(), model.alpha, model.beta,
                static_cast<unsigned long long>(model.seed));
  os << "relnet-lda 1\n" << buf << '\n';
  for (const auto& w : model.vocab.words) os << w << '\n';
  for (int k = 0; k < model.topics; ++k) {
    for (int w = 0; w < model.vocab_size(); ++w) os << (w ? " " : "") << model.topic_word(k, w);
    os << '\n';
  }
}

TopicModel load_topic_model(std::istream& is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "relnet-lda" || version != 1) throw Error("not a relnet-lda model");
  TopicModel m;
  int V = 0;
  unsigned long long seed = 0;
  if (!(is >> m.topics >> V >> m.alpha >> m.beta >> seed) || m.topics < 2 || V < 1) throw Error("bad LDA header");
  m.seed = seed;
  for (int i = 0; i < V; ++i) {
    std::string w;
    if (!(is >> w)) throw Error("truncated LDA vocabulary");
    m.vocab.index[w] = i;
    m.vocab.words.push_back(w);
  }
  m.topic_word.resize(m.topics, V);
  for (int k = 0; k < m.topics; ++k)
    for (int w = 0; w < V; ++w)
      if (!(is >> m.topic_word(k, w)) || m.topic_word(k, w) < 0) throw Error("truncated LDA counts");
  m.topic_totals = m.topic_word.rowwise().sum();
  return m;
}

}  // namespace relnet
