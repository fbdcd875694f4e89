#include "relnet/text.hpp"

#include <cctype>

namespace relnet {

namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_ascii_alnum(unsigned char c) { return c < 0x80 && std::isalnum(c); }

bool is_ascii_punct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

}  // namespace

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if (!is_continuation(c)) ++n;
  return n;
}

std::size_t utf8_byte_offset(std::string_view s, std::size_t cp) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (is_continuation(static_cast<unsigned char>(s[i]))) continue;
    if (seen == cp) return i;
    ++seen;
  }
  return s.size();
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x80) c = static_cast<char>(std::tolower(u));
  }
  return out;
}

bool contains_url(std::string_view text) {
  const std::string lower = to_lower(text);
  return lower.find("http://") != std::string::npos || lower.find("https://") != std::string::npos;
}

std::vector<Token> whitespace_tokens(std::string_view text) {
  std::vector<Token> out;
  std::size_t cp = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      ++i;
      ++cp;
      continue;
    }
    Token tok{{}, cp};
    while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) {
      if (!is_continuation(static_cast<unsigned char>(text[i]))) ++cp;
      tok.text.push_back(text[i]);
      ++i;
    }
    out.push_back(std::move(tok));
  }
  return out;
}

std::vector<std::string> alnum_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_ascii_alnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<std::string> content_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& tok : whitespace_tokens(text)) {
    if (tok.text.front() == '@' || contains_url(tok.text)) continue;
    for (auto& t : alnum_tokens(tok.text)) out.push_back(std::move(t));
  }
  return out;
}

std::string normalize_phrase_text(std::string_view text) {
  std::string out;
  for (const auto& tok : whitespace_tokens(text)) {
    std::string w = to_lower(tok.text);
    while (!w.empty() && is_ascii_punct(static_cast<unsigned char>(w.back()))) w.pop_back();
    if (w.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

}  // namespace relnet
