#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace relnet {

// Text offsets are counted in Unicode code points of the UTF-8 text.

std::size_t utf8_length(std::string_view s);

/// Byte offset of code point `cp`; returns s.size() when cp == length.
std::size_t utf8_byte_offset(std::string_view s, std::size_t cp);

/// ASCII lowercasing; non-ASCII bytes pass through unchanged.
std::string to_lower(std::string_view s);

bool contains_url(std::string_view text);

struct Token {
  std::string text;
  std::size_t offset;  // code point offset of the first character
};

/// Whitespace-separated tokens with their code point offsets.
std::vector<Token> whitespace_tokens(std::string_view text);

/// Maximal runs of ASCII alphanumerics, lowercased.
std::vector<std::string> alnum_tokens(std::string_view text);

/// Tokens for n-gram and topic features: whitespace split, @mentions and
/// URLs dropped, then alphanumeric runs, lowercased.
std::vector<std::string> content_tokens(std::string_view text);

/// Lowercased whitespace tokens with trailing ASCII punctuation removed,
/// joined by single spaces.
std::string normalize_phrase_text(std::string_view text);

}  // namespace relnet
