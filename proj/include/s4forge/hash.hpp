#pragma once

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace s4forge {

constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive combination of two 64-bit values. Used for per-page seeds
// so that a page's seed does not depend on which worker processes it.
constexpr std::uint64_t hash64(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (b + 0x632be59bd9b4e019ULL));
}

inline std::string to_hex16(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
    v >>= 4;
  }
  return out;
}

inline std::optional<std::uint64_t> parse_hex16(std::string_view s) {
  if (s.size() != 16) return std::nullopt;
  std::uint64_t v = 0;
  for (char c : s) {
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else return std::nullopt;
    v = (v << 4) | static_cast<std::uint64_t>(d);
  }
  return v;
}

/// Lowercases scheme and host and strips the fragment. Path, query and
/// userinfo keep their case.
inline std::string normalize_url(std::string_view url) {
  std::string out(url.substr(0, url.find('#')));
  const auto scheme_end = out.find("://");
  if (scheme_end == std::string::npos) return out;
  for (std::size_t i = 0; i < scheme_end; ++i)
    out[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[i])));
  const std::size_t auth_begin = scheme_end + 3;
  std::size_t auth_end = out.find_first_of("/?", auth_begin);
  if (auth_end == std::string::npos) auth_end = out.size();
  std::size_t host_begin = auth_begin;
  if (const auto at = out.find('@', auth_begin); at != std::string::npos && at < auth_end)
    host_begin = at + 1;
  for (std::size_t i = host_begin; i < auth_end; ++i)
    out[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[i])));
  return out;
}

inline std::uint64_t url_hash(std::string_view url) { return fnv1a64(normalize_url(url)); }

}  // namespace s4forge
