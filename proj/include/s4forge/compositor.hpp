#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "s4forge/error.hpp"
#include "s4forge/raster.hpp"
#include "s4forge/task.hpp"

namespace s4forge {

struct CompositorStyle {
  Rgb mask{255, 255, 255};
  Rgb primary_outline{255, 0, 0};
  Rgb secondary_outline{0, 0, 255};
  int outline_px = 3;
};

struct PixelRect {
  int x0, y0, x1, y1;  // half-open
};

/// Pixels touched by `r`: floor of the min corner to ceil of the max corner,
/// clipped to the image. Throws BadRect when nothing is left.
inline PixelRect to_pixels(const BBox& r, int width, int height) {
  if (!r.finite()) throw BadRect("non-finite directive rect");
  PixelRect p{static_cast<int>(std::floor(r.x_min)), static_cast<int>(std::floor(r.y_min)),
              static_cast<int>(std::ceil(r.x_max)), static_cast<int>(std::ceil(r.y_max))};
  p.x0 = std::clamp(p.x0, 0, width);
  p.y0 = std::clamp(p.y0, 0, height);
  p.x1 = std::clamp(p.x1, 0, width);
  p.y1 = std::clamp(p.y1, 0, height);
  if (p.x1 <= p.x0 || p.y1 <= p.y0) throw BadRect("directive rect is empty after clipping");
  return p;
}

/// Applies directives in order to a copy of `img`. Masks fill their rect;
/// outlines paint a band `outline_px` wide just inside the rect, so nothing
/// outside a directive's rect changes.
inline RasterImage apply_directives(const RasterImage& img, std::span<const RenderDirective> ds,
                                    const CompositorStyle& style = {}) {
  RasterImage out = img;
  for (const auto& d : ds) {
    const PixelRect p = to_pixels(d.rect, out.width(), out.height());
    if (d.op == DirectiveOp::MaskRect) {
      out.fill_rect(p.x0, p.y0, p.x1, p.y1, style.mask);
      continue;
    }
    const Rgb c = d.style == OutlineStyle::Secondary ? style.secondary_outline : style.primary_outline;
    const int t = style.outline_px;
    out.fill_rect(p.x0, p.y0, p.x1, std::min(p.y0 + t, p.y1), c);
    out.fill_rect(p.x0, std::max(p.y1 - t, p.y0), p.x1, p.y1, c);
    out.fill_rect(p.x0, p.y0, std::min(p.x0 + t, p.x1), p.y1, c);
    out.fill_rect(std::max(p.x1 - t, p.x0), p.y0, p.x1, p.y1, c);
  }
  return out;
}

}  // namespace s4forge
