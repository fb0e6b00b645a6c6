#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "s4forge/error.hpp"
#include "s4forge/geometry.hpp"

namespace s4forge {

inline constexpr int kCoordTokenCount = 1000;

class CoordToken {
 public:
  explicit CoordToken(int value) : value_(value) {
    if (value < 0 || value >= kCoordTokenCount)
      throw BadExtent("coordinate token out of range: " + std::to_string(value));
  }
  int value() const { return value_; }
  std::string str() const { return "<" + std::to_string(value_) + ">"; }
  friend bool operator==(const CoordToken&, const CoordToken&) = default;
  friend auto operator<=>(const CoordToken&, const CoordToken&) = default;

 private:
  int value_;
};

/// floor(clamp(v, 0, extent) / extent * 1000), with the top edge folded into
/// the last of the 1000 tokens. Throws BadExtent unless extent > 0.
inline CoordToken quantize_coord(double v, double extent) {
  if (!(extent > 0.0) || !std::isfinite(extent))
    throw BadExtent("extent must be positive, got " + std::to_string(extent));
  if (std::isnan(v)) throw BadExtent("coordinate is NaN");
  const double clamped = std::clamp(v, 0.0, extent);
  const auto cell = static_cast<int>(std::floor(clamped * kCoordTokenCount / extent));
  return CoordToken(std::min(cell, kCoordTokenCount - 1));
}

// Center of the token's cell, so requantizing is exact despite rounding.
inline double dequantize_coord(CoordToken t, double extent) {
  return (static_cast<double>(t.value()) + 0.5) * extent / kCoordTokenCount;
}

inline std::string bbox_tokens(const BBox& b, const Viewport& vp) {
  const double w = vp.width_px, h = vp.height_px;
  return quantize_coord(b.x_min, w).str() + quantize_coord(b.y_min, h).str() +
         quantize_coord(b.x_max, w).str() + quantize_coord(b.y_max, h).str();
}

/// Parses "<k>" at `pos`; on success advances `pos` past it. Only plain
/// decimal integers of at most four digits are accepted.
inline std::optional<int> parse_coord_token(std::string_view s, std::size_t& pos) {
  if (pos >= s.size() || s[pos] != '<') return std::nullopt;
  std::size_t i = pos + 1;
  int v = 0;
  std::size_t digits = 0;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9' && digits < 5) {
    v = v * 10 + (s[i] - '0');
    ++i;
    ++digits;
  }
  if (digits == 0 || digits > 4 || i >= s.size() || s[i] != '>') return std::nullopt;
  pos = i + 1;
  return v;
}

/// Every "<k>" run in `s`, in order. Used to check targets carry only
/// in-range tokens.
inline std::vector<int> extract_coord_tokens(std::string_view s) {
  std::vector<int> out;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t p = i;
    if (auto v = parse_coord_token(s, p)) {
      out.push_back(*v);
      i = p;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace s4forge
