#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace relnet {

inline constexpr std::string_view kVersion = "0.1.0";

/// The five relationship categories; the numeric value is the class index.
enum class Category : int { Social = 0, Romance = 1, Family = 2, Organizational = 3, Parasocial = 4 };

inline constexpr int kNumCategories = 5;

inline constexpr std::array<Category, kNumCategories> kAllCategories = {
    Category::Social, Category::Romance, Category::Family, Category::Organizational,
    Category::Parasocial};

std::string_view category_name(Category c);

/// Case-insensitive; nullopt for unknown names.
std::optional<Category> parse_category(std::string_view name);

inline int category_index(Category c) { return static_cast<int>(c); }
inline Category category_from_index(int i) { return static_cast<Category>(i); }

// Errors. Not-applicable results are modelled with std::optional instead.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A quantity whose defining formula has a zero denominator.
class UndefinedValueError : public Error {
 public:
  using Error::Error;
};

// Seeds

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a, stable across platforms (std::hash is not).
inline std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t seed) { return mix64(seed); }

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t seed, std::string_view part, Rest&&... rest);

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t part, Rest&&... rest) {
  return derive_seed(mix64(seed ^ mix64(part)), std::forward<Rest>(rest)...);
}

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t seed, std::string_view part, Rest&&... rest) {
  return derive_seed(mix64(seed ^ stable_hash(part)), std::forward<Rest>(rest)...);
}

}  // namespace relnet
