#include "relnet/lexical.hpp"

#include <algorithm>
#include <cstdio>

#include "relnet/text.hpp"

namespace relnet {

bool matches_any(const std::string& token, const std::vector<LexiconPattern>& patterns) {
  return std::any_of(patterns.begin(), patterns.end(), [&](const LexiconPattern& p) { return p.matches(token); });
}

bool contains_category(std::string_view text, const Lexicon& lexicon, const std::string& category) {
  const auto& patterns = lexicon.patterns(category);
  for (const auto& tok : alnum_tokens(text))
    if (matches_any(tok, patterns)) return true;
  return false;
}

int count_category_tokens(const std::vector<std::string>& tokens, const std::vector<LexiconPattern>& patterns) {
  int n = 0;
  for (const auto& tok : tokens)
    if (matches_any(tok, patterns)) ++n;
  return n;
}

std::map<Category, std::optional<CategoryStat>> category_probability(
    const std::map<Category, std::vector<std::string>>& texts_by_category, const Lexicon& lexicon,
    const std::string& lexicon_category, const BootstrapConfig& bootstrap) {
  lexicon.patterns(lexicon_category);
  std::map<Category, std::optional<CategoryStat>> out;
  for (const auto& [cat, texts] : texts_by_category) {
    if (texts.empty()) {
      out[cat] = std::nullopt;
      continue;
    }
    std::vector<double> indicators;
    indicators.reserve(texts.size());
    for (const auto& t : texts) indicators.push_back(contains_category(t, lexicon, lexicon_category) ? 1.0 : 0.0);
    double hits = 0.0;
    for (double x : indicators) hits += x;
    BootstrapConfig cfg = bootstrap;
    cfg.seed = derive_seed(bootstrap.seed, category_name(cat), lexicon_category);
    CategoryStat s;
    s.relationship = cat;
    s.lexicon_category = lexicon_category;
    s.probability = hits / static_cast<double>(texts.size());
    s.ci = bootstrap_ci(indicators, cfg);
    s.tweets = texts.size();
    out[cat] = s;
  }
  return out;
}

std::vector<std::pair<std::string, double>> top_words(const std::vector<std::string>& texts, const Lexicon& lexicon,
                                                      const std::string& lexicon_category, std::size_t k) {
  if (k < 1) throw ConfigError("top_words needs k >= 1");
  const auto& patterns = lexicon.patterns(lexicon_category);
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& text : texts)
    for (const auto& tok : alnum_tokens(text))
      if (matches_any(tok, patterns)) {
        ++counts[tok];
        ++total;
      }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
  if (ranked.size() > k) ranked.resize(k);
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [w, n] : ranked) out.emplace_back(w, static_cast<double>(n) / static_cast<double>(total));
  return out;
}

std::string category_stat_header() { return "relationship_category\tlexicon_category\tprobability\tci_low\tci_high"; }

std::string category_stat_row(const CategoryStat& s) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "\t%.6f\t%.6f\t%.6f", s.probability, s.ci.low, s.ci.high);
  return std::string(category_name(s.relationship)) + "\t" + s.lexicon_category + buf;
}

}  // namespace relnet
