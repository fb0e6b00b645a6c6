#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "s4forge/error.hpp"

namespace s4forge {

namespace detail {

inline std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xe) return 3;
  if ((lead >> 3) == 0x1e) return 4;
  return 1;
}

}  // namespace detail

/// Sentence-piece style vocabulary, loaded from the text `.vocab` layout:
/// one `piece<TAB>score` per line (score optional), ids are line numbers.
/// U+2581 ("▁") marks the start of a word, and <unk>, <s>, </s>, <pad> are
/// control pieces that never match text.
class Vocabulary {
 public:
  static constexpr std::string_view kWordBoundary = "\xe2\x96\x81";

  Vocabulary() = default;

  static Vocabulary load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw VocabMissing("cannot open vocabulary file " + path.string());
    Vocabulary v;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto tab = line.find('\t');
      std::string piece = line.substr(0, tab);
      double score = 0.0;
      if (tab != std::string::npos) score = std::stod(line.substr(tab + 1));
      v.add(std::move(piece), score);
    }
    if (v.empty()) throw VocabMissing("vocabulary file " + path.string() + " has no pieces");
    return v;
  }

  void add(std::string piece, double score) {
    const int id = static_cast<int>(pieces_.size());
    if (piece == "<unk>") unk_id_ = id;
    const bool control = piece == "<unk>" || piece == "<s>" || piece == "</s>" || piece == "<pad>";
    if (!control && !piece.empty()) {
      max_piece_bytes_ = std::max(max_piece_bytes_, piece.size());
      lookup_.emplace(piece, id);
    }
    pieces_.push_back({std::move(piece), score});
  }

  bool empty() const { return pieces_.empty(); }
  std::size_t size() const { return pieces_.size(); }
  int unk_id() const { return unk_id_ >= 0 ? unk_id_ : static_cast<int>(pieces_.size()); }
  const std::string& piece(int id) const { return pieces_.at(static_cast<std::size_t>(id)).text; }

  /// True when "▁" + token segments into known pieces with no unknown
  /// fallback.
  bool representable(std::string_view token) const {
    const std::string s = std::string(kWordBoundary) + std::string(token);
    std::vector<char> reach(s.size() + 1, 0);
    reach[0] = 1;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!reach[i]) continue;
      const std::size_t limit = std::min(max_piece_bytes_, s.size() - i);
      for (std::size_t len = 1; len <= limit; ++len)
        if (lookup_.count(std::string_view(s).substr(i, len))) reach[i + len] = 1;
    }
    return reach[s.size()] != 0;
  }

  /// Max-score segmentation of whitespace-separated text. Characters no piece
  /// covers become one unk id each.
  std::vector<int> encode(std::string_view text) const {
    std::vector<int> ids;
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && is_space(text[i])) ++i;
      std::size_t j = i;
      while (j < text.size() && !is_space(text[j])) ++j;
      if (j > i) encode_word(std::string(kWordBoundary) + std::string(text.substr(i, j - i)), ids);
      i = j;
    }
    return ids;
  }

 private:
  struct Piece {
    std::string text;
    double score;
  };

  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

  void encode_word(const std::string& s, std::vector<int>& ids) const {
    constexpr double kUnkPenalty = -100.0;
    const double neg_inf = -std::numeric_limits<double>::infinity();
    const std::size_t n = s.size();
    std::vector<double> best(n + 1, neg_inf);
    std::vector<std::size_t> from(n + 1, 0);
    std::vector<int> via(n + 1, -1);
    best[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (best[i] == neg_inf) continue;
      const std::size_t limit = std::min(max_piece_bytes_, n - i);
      for (std::size_t len = 1; len <= limit; ++len) {
        auto it = lookup_.find(std::string_view(s).substr(i, len));
        if (it == lookup_.end()) continue;
        const double cand = best[i] + pieces_[static_cast<std::size_t>(it->second)].score;
        if (cand > best[i + len]) {
          best[i + len] = cand;
          from[i + len] = i;
          via[i + len] = it->second;
        }
      }
      const std::size_t ch = std::min(detail::utf8_length(static_cast<unsigned char>(s[i])), n - i);
      const double unk = best[i] + kUnkPenalty;
      if (unk > best[i + ch]) {
        best[i + ch] = unk;
        from[i + ch] = i;
        via[i + ch] = unk_id();
      }
    }
    std::vector<int> rev;
    for (std::size_t pos = n; pos > 0; pos = from[pos]) rev.push_back(via[pos]);
    ids.insert(ids.end(), rev.rbegin(), rev.rend());
  }

  std::vector<Piece> pieces_;
  std::unordered_map<std::string, int, StringHash, std::equal_to<>> lookup_;
  std::size_t max_piece_bytes_ = 0;
  int unk_id_ = -1;
};

}  // namespace s4forge
