#include "relnet/nn.hpp"

#include <map>

#include "relnet/text.hpp"

namespace relnet {

std::vector<std::string> utf8_chars(const std::string& s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (c >= 0xF0) len = 4;
    else if (c >= 0xE0) len = 3;
    else if (c >= 0xC0) len = 2;
    len = std::min(len, s.size() - i);
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

CharAlphabet CharAlphabet::build(const std::vector<std::string>& names, std::size_t max_chars) {
  std::map<std::string, std::size_t> counts;
  for (const auto& n : names)
    for (auto& ch : utf8_chars(to_lower(n))) ++counts[ch];
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > max_chars) ranked.resize(max_chars);
  std::vector<std::string> chars;
  chars.reserve(ranked.size());
  for (auto& [ch, n] : ranked) chars.push_back(ch);
  return from_chars(std::move(chars));
}

CharAlphabet CharAlphabet::from_chars(std::vector<std::string> chars) {
  CharAlphabet a;
  a.chars_ = std::move(chars);
  for (std::size_t i = 0; i < a.chars_.size(); ++i) {
    if (!a.index_.emplace(a.chars_[i], static_cast<int>(i) + 2).second)
      throw ConfigError("duplicate alphabet character");
  }
  return a;
}

std::vector<int> CharAlphabet::encode(const std::string& name, std::size_t min_length) const {
  std::vector<int> ids;
  for (auto& ch : utf8_chars(to_lower(name))) {
    auto it = index_.find(ch);
    ids.push_back(it == index_.end() ? kOutOfAlphabet : it->second);
  }
  if (ids.size() < min_length) ids.resize(min_length, kPad);
  return ids;
}

}  // namespace relnet
