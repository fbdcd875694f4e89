#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relnet/bootstrap.hpp"
#include "relnet/common.hpp"
#include "relnet/corpus.hpp"

namespace relnet {

bool matches_any(const std::string& token, const std::vector<LexiconPattern>& patterns);

/// True iff any alphanumeric token of the text matches a pattern of the category.
bool contains_category(std::string_view text, const Lexicon& lexicon, const std::string& category);

/// Number of tokens of the text matching the category.
int count_category_tokens(const std::vector<std::string>& tokens, const std::vector<LexiconPattern>& patterns);

struct CategoryStat {
  Category relationship = Category::Social;
  std::string lexicon_category;
  double probability = 0.0;
  Interval ci;
  std::size_t tweets = 0;
};

/// Fraction of tweets in each relationship group containing the lexicon
/// category, with a bootstrap interval over tweet-level indicators. Empty
/// groups map to nullopt.
std::map<Category, std::optional<CategoryStat>> category_probability(
    const std::map<Category, std::vector<std::string>>& texts_by_category, const Lexicon& lexicon,
    const std::string& lexicon_category, const BootstrapConfig& bootstrap);

/// The k most frequent matching tokens with their share of all matches,
/// descending, ties broken lexicographically.
std::vector<std::pair<std::string, double>> top_words(const std::vector<std::string>& texts, const Lexicon& lexicon,
                                                      const std::string& lexicon_category, std::size_t k = 5);

std::string category_stat_header();
std::string category_stat_row(const CategoryStat& s);

}  // namespace relnet
