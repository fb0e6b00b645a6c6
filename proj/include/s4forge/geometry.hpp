#pragma once

#include <algorithm>
#include <cmath>

namespace s4forge {

struct Viewport {
  int width_px = 1280;
  int height_px = 1280;

  bool valid() const { return width_px > 0 && height_px > 0; }
  friend bool operator==(const Viewport&, const Viewport&) = default;
};

/// Axis-aligned rectangle in CSS pixels, min corner inclusive.
struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool zero_area() const { return !(width() > 0.0 && height() > 0.0); }

  bool finite() const {
    return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
           std::isfinite(y_max);
  }
  bool ordered() const { return x_min <= x_max && y_min <= y_max; }

  double center_x() const { return 0.5 * (x_min + x_max); }
  double center_y() const { return 0.5 * (y_min + y_max); }

  // `other` lies inside this box grown by `eps` on every side.
  bool contains(const BBox& other, double eps = 0.0) const {
    return other.x_min >= x_min - eps && other.y_min >= y_min - eps &&
           other.x_max <= x_max + eps && other.y_max <= y_max + eps;
  }
  bool contains_point(double x, double y) const {
    return x >= x_min && x < x_max && y >= y_min && y < y_max;
  }

  BBox united(const BBox& o) const {
    return {std::min(x_min, o.x_min), std::min(y_min, o.y_min), std::max(x_max, o.x_max),
            std::max(y_max, o.y_max)};
  }

  BBox clipped(const Viewport& vp) const {
    const auto w = static_cast<double>(vp.width_px);
    const auto h = static_cast<double>(vp.height_px);
    return {std::clamp(x_min, 0.0, w), std::clamp(y_min, 0.0, h), std::clamp(x_max, 0.0, w),
            std::clamp(y_max, 0.0, h)};
  }

  bool within(const Viewport& vp) const {
    return x_min >= 0.0 && y_min >= 0.0 && x_max <= vp.width_px && y_max <= vp.height_px;
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

}  // namespace s4forge
