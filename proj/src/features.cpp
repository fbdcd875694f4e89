#include "relnet/features.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "relnet/lexical.hpp"
#include "relnet/text.hpp"

namespace relnet {

std::vector<std::string> ngrams(const std::vector<std::string>& tokens, int max_n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string g;
    for (int n = 0; n < max_n && i + static_cast<std::size_t>(n) < tokens.size(); ++n) {
      if (n) g.push_back(' ');
      g += tokens[i + static_cast<std::size_t>(n)];
      out.push_back(g);
    }
  }
  return out;
}

namespace {

std::vector<std::string> dense_names_for(const FeatureSpaceConfig& config) {
  if (!config.network_features) return {};
  std::vector<std::string> names = {"adamic_adar_z", "jaccard_z", "mention_prob_ab", "mention_prob_ba"};
  if (config.include_reciprocity) names.push_back("reciprocity");
  return names;
}

}  // namespace

FeatureSpace build_feature_space(const std::vector<std::string>& train_texts, const Lexicon& lexicon,
                                 const FeatureSpaceConfig& config) {
  if (config.min_freq < 1) throw ConfigError("n-gram min_freq must be >= 1");
  std::map<std::string, int> counts;
  for (const auto& text : train_texts)
    for (auto& g : ngrams(content_tokens(text))) ++counts[g];
  FeatureSpace s;
  for (const auto& [g, n] : counts)
    if (n >= config.min_freq) {
      s.ngram_index[g] = static_cast<int>(s.ngram_vocab.size());
      s.ngram_vocab.push_back(g);
    }
  if (s.ngram_vocab.empty()) throw Error("no n-gram reaches the minimum frequency");
  s.lexicon = lexicon;
  s.lexicon_categories = lexicon.category_names();
  s.dense_names = dense_names_for(config);
  return s;
}

std::vector<std::pair<int, double>> ngram_features(std::string_view text, const FeatureSpace& space) {
  std::map<int, double> acc;
  for (const auto& g : ngrams(content_tokens(text))) {
    auto it = space.ngram_index.find(g);
    if (it != space.ngram_index.end()) acc[it->second] += 1.0;
  }
  return {acc.begin(), acc.end()};
}

FeatureVector featurize_dyad(const std::vector<std::string>& texts, const FeatureSpace& space,
                             const DyadNetworkStats& stats, std::optional<int> label) {
  std::map<int, double> acc;
  std::vector<int> lex_counts(space.lexicon_categories.size(), 0);
  for (const auto& text : texts) {
    for (const auto& [i, n] : ngram_features(text, space)) acc[i] += n;
    if (space.lexicon_categories.empty()) continue;
    const auto tokens = alnum_tokens(text);
    for (std::size_t c = 0; c < space.lexicon_categories.size(); ++c)
      lex_counts[c] += count_category_tokens(tokens, space.lexicon.patterns(space.lexicon_categories[c]));
  }
  for (std::size_t c = 0; c < lex_counts.size(); ++c)
    if (lex_counts[c] > 0) acc[space.num_ngrams() + static_cast<int>(c)] = lex_counts[c];

  FeatureVector v;
  v.sparse.assign(acc.begin(), acc.end());
  v.dense = Eigen::VectorXd::Zero(space.num_dense());
  v.present = Eigen::VectorXd::Zero(space.num_dense());
  for (int i = 0; i < space.num_dense(); ++i) {
    const auto& name = space.dense_names[static_cast<std::size_t>(i)];
    std::optional<double> value;
    if (name == "adamic_adar_z") value = stats.adamic_adar_z;
    else if (name == "jaccard_z") value = stats.jaccard_z;
    else if (name == "mention_prob_ab") value = stats.mention_prob_ab;
    else if (name == "mention_prob_ba") value = stats.mention_prob_ba;
    else if (name == "reciprocity") value = stats.reciprocity;
    if (value) {
      v.dense(i) = *value;
      v.present(i) = 1.0;
    }
  }
  v.label = label;
  return v;
}

SparseRows to_matrix(const std::vector<FeatureVector>& rows, const FeatureSpace& space) {
  std::vector<Eigen::Triplet<double>> triplets;
  const int base = space.sparse_dim();
  const int nd = space.num_dense();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto row = static_cast<int>(r);
    for (const auto& [i, x] : rows[r].sparse) triplets.emplace_back(row, i, x);
    for (int i = 0; i < nd; ++i) {
      if (rows[r].dense(i) != 0.0) triplets.emplace_back(row, base + i, rows[r].dense(i));
      if (rows[r].present(i) != 0.0) triplets.emplace_back(row, base + nd + i, rows[r].present(i));
    }
  }
  SparseRows m(static_cast<Eigen::Index>(rows.size()), space.dim());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

std::vector<int> labels_of(const std::vector<FeatureVector>& rows) {
  std::vector<int> out;
  for (const auto& r : rows) {
    if (!r.label) throw Error("feature row without a label");
    out.push_back(*r.label);
  }
  return out;
}

std::string format_feature_row(const FeatureVector& v) {
  std::string out = std::to_string(v.label.value_or(-1));
  char buf[64];
  for (const auto& [i, x] : v.sparse) {
    std::snprintf(buf, sizeof buf, " %d:%.17g", i, x);
    out += buf;
  }
  out += " # dense";
  for (Eigen::Index i = 0; i < v.dense.size(); ++i) {
    std::snprintf(buf, sizeof buf, " %.17g", v.dense(i));
    out += buf;
  }
  for (Eigen::Index i = 0; i < v.present.size(); ++i) out += v.present(i) != 0.0 ? " 1" : " 0";
  return out;
}

FeatureVector parse_feature_row(const std::string& line, std::size_t line_no) {
  const auto hash = line.find(" # dense");
  if (hash == std::string::npos) throw ParseError(line_no, "feature row without dense section");
  std::istringstream head(line.substr(0, hash));
  FeatureVector v;
  int label = -1;
  if (!(head >> label)) throw ParseError(line_no, "feature row without label");
  if (label >= 0) v.label = label;
  std::string item;
  while (head >> item) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw ParseError(line_no, "bad sparse item '" + item + "'");
    v.sparse.emplace_back(std::stoi(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
  }
  std::istringstream tail(line.substr(hash + 8));
  std::vector<double> values;
  double x = 0;
  while (tail >> x) values.push_back(x);
  if (values.size() % 2) throw ParseError(line_no, "dense section must hold values and flags");
  const auto nd = static_cast<Eigen::Index>(values.size() / 2);
  v.dense = Eigen::Map<Eigen::VectorXd>(values.data(), nd);
  v.present = Eigen::Map<Eigen::VectorXd>(values.data() + nd, nd);
  return v;
}

void save_feature_space(std::ostream& os, const FeatureSpace& space) {
  os << "# relnet-features ngrams=" << space.num_ngrams() << " lexicon=" << space.lexicon_categories.size()
     << " dense=" << space.num_dense() << '\n';
  int idx = 0;
  for (const auto& g : space.ngram_vocab) os << idx++ << "\tngram\t" << g << '\n';
  for (const auto& c : space.lexicon_categories) os << idx++ << "\tlexicon\t" << c << '\n';
  for (const auto& d : space.dense_names) os << idx++ << "\tdense\t" << d << '\n';
  for (const auto& d : space.dense_names) os << idx++ << "\tpresent\t" << d << '\n';
}

FeatureSpace load_feature_space(std::istream& is, const Lexicon& lexicon) {
  FeatureSpace s;
  s.lexicon = lexicon;
  std::string line;
  for (std::size_t no = 1; std::getline(is, line); ++no) {
    if (line.empty() || line.front() == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) throw ParseError(no, "bad vocabulary line");
    const std::string kind = line.substr(t1 + 1, t2 - t1 - 1);
    const std::string name = line.substr(t2 + 1);
    if (kind == "ngram") {
      s.ngram_index[name] = static_cast<int>(s.ngram_vocab.size());
      s.ngram_vocab.push_back(name);
    } else if (kind == "lexicon") {
      lexicon.patterns(name);
      s.lexicon_categories.push_back(name);
    } else if (kind == "dense") {
      s.dense_names.push_back(name);
    } else if (kind != "present") {
      throw ParseError(no, "unknown feature kind '" + kind + "'");
    }
  }
  return s;
}

}  // namespace relnet
