#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include "hwforge/error.hpp"
#include "hwforge/font_face.hpp"
#include "hwforge/image.hpp"
#include "hwforge/utf8.hpp"

namespace hwforge {

// Pen position of one glyph. origin_y is the shared baseline (0 in layout
// space); +y points down.
struct GlyphPlacement {
    char32_t code_point = 0;
    double origin_x = 0.0;
    double origin_y = 0.0;
};

// Per-sample rendering parameters drawn by the corpus builder.
struct RenderSpec {
    int font_id = -1;
    int font_size_px = 64;
    int kerning_px = 0;   // uniform extra gap between consecutive glyphs
    int stroke_delta = 0; // morphological grow(+)/shrink(-) radius
};

struct Layout {
    std::vector<GlyphPlacement> placements;
    // Tight box around all glyph outlines, baseline-relative, half-open.
    // Empty (has_outline == false) when no glyph produces any outline.
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    bool has_outline = false;

    int width() const { return has_outline ? max_x - min_x : 0; }
    int height() const { return has_outline ? max_y - min_y : 0; }
};

namespace detail {
inline double frac_shift(double pen_x) { return pen_x - std::floor(pen_x); }
} // namespace detail

// Places each glyph at the previous pen position advanced by the glyph's
// advance width plus the uniform kerning offset. All glyphs share the
// baseline.
inline Layout layout(std::string_view word, const Face& face, const RenderSpec& spec) {
    if (word.empty()) throw DataError(Errc::empty_word, "layout: empty word");
    const auto cps = utf8_decode(word);
    for (char32_t cp : cps)
        if (!face.has_glyph(cp))
            throw DataError(Errc::missing_glyph, "layout: glyph missing from font");

    Layout out;
    out.placements.reserve(cps.size());
    double pen_x = 0.0;
    for (std::size_t i = 0; i < cps.size(); ++i) {
        out.placements.push_back(GlyphPlacement{cps[i], pen_x, 0.0});
        const GlyphBox box =
            face.raster_box(cps[i], spec.font_size_px, detail::frac_shift(pen_x));
        if (box.x1 > box.x0 && box.y1 > box.y0) {
            const int base_x = static_cast<int>(std::floor(pen_x));
            if (!out.has_outline) {
                out.min_x = base_x + box.x0;
                out.max_x = base_x + box.x1;
                out.min_y = box.y0;
                out.max_y = box.y1;
                out.has_outline = true;
            } else {
                out.min_x = std::min(out.min_x, base_x + box.x0);
                out.max_x = std::max(out.max_x, base_x + box.x1);
                out.min_y = std::min(out.min_y, box.y0);
                out.max_y = std::max(out.max_y, box.y1);
            }
        }
        if (i + 1 < cps.size())
            pen_x += face.advance_px(cps[i], spec.font_size_px) + spec.kerning_px;
    }
    return out;
}

// Renders anti-aliased coverage for every placement, thresholds at coverage
// >= 0.5 (byte value 128), and crops to the tight ink box plus a one-pixel
// blank margin on every side.
inline BinaryMask rasterize(const Layout& lay, const Face& face, int font_size_px) {
    if (lay.placements.empty())
        throw DataError(Errc::invalid_argument, "rasterize: no placements");
    if (!lay.has_outline)
        throw DataError(Errc::zero_ink, "rasterize: word has no renderable outline");

    const int w = lay.width();
    const int h = lay.height();
    std::vector<std::uint8_t> canvas(static_cast<std::size_t>(w) * h, 0);
    for (const auto& p : lay.placements) {
        const GlyphRaster g =
            face.raster(p.code_point, font_size_px, detail::frac_shift(p.origin_x));
        if (g.width == 0 || g.height == 0) continue;
        const int dst_x = static_cast<int>(std::floor(p.origin_x)) + g.left - lay.min_x;
        const int dst_y = g.top - lay.min_y;
        for (int y = 0; y < g.height; ++y) {
            const int cy = dst_y + y;
            if (cy < 0 || cy >= h) continue;
            for (int x = 0; x < g.width; ++x) {
                const int cx = dst_x + x;
                if (cx < 0 || cx >= w) continue;
                auto& dst = canvas[static_cast<std::size_t>(cy) * w + cx];
                dst = std::max(dst, g.coverage[static_cast<std::size_t>(y) * g.width + x]);
            }
        }
    }

    // Tight box of thresholded ink.
    int ix0 = w, iy0 = h, ix1 = 0, iy1 = 0;
    bool any = false;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (canvas[static_cast<std::size_t>(y) * w + x] >= 128) {
                ix0 = std::min(ix0, x);
                iy0 = std::min(iy0, y);
                ix1 = std::max(ix1, x + 1);
                iy1 = std::max(iy1, y + 1);
                any = true;
            }
        }
    }
    if (!any) throw DataError(Errc::zero_ink, "rasterize: no foreground pixels");

    BinaryMask mask(ix1 - ix0 + 2, iy1 - iy0 + 2, false);
    for (int y = iy0; y < iy1; ++y)
        for (int x = ix0; x < ix1; ++x)
            if (canvas[static_cast<std::size_t>(y) * w + x] >= 128)
                mask.set(x - ix0 + 1, y - iy0 + 1, true);
    return mask;
}

// Stroke-width variation as binary morphology with a square structuring
// element of radius |stroke_delta|; positive grows, negative shrinks.
// The window is clipped at the borders and dimensions never change.
inline BinaryMask adjust_stroke(const BinaryMask& mask, int stroke_delta) {
    if (stroke_delta == 0) return mask;
    const int r = std::abs(stroke_delta);
    const bool dilate = stroke_delta > 0;

    auto pass = [r, dilate](const BinaryMask& src, bool horizontal) {
        BinaryMask dst(src.width, src.height, false);
        for (int y = 0; y < src.height; ++y) {
            for (int x = 0; x < src.width; ++x) {
                const int limit = horizontal ? src.width : src.height;
                const int center = horizontal ? x : y;
                const int lo = std::max(0, center - r);
                const int hi = std::min(limit - 1, center + r);
                bool acc = !dilate;
                for (int t = lo; t <= hi; ++t) {
                    const bool v = horizontal ? src.get(t, y) : src.get(x, t);
                    acc = dilate ? (acc || v) : (acc && v);
                    if (acc == dilate) break;
                }
                dst.set(x, y, acc);
            }
        }
        return dst;
    };

    return pass(pass(mask, true), false);
}

} // namespace hwforge
