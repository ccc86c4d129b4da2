#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>

#include "hwforge/appearance.hpp"
#include "hwforge/error.hpp"
#include "hwforge/image.hpp"
#include "hwforge/rng.hpp"

namespace hwforge {

// The paper's "+/-0.5 degrees" shear is ambiguous between a shear angle and
// a dimensionless factor, so both readings are supported.
enum class ShearUnit { degrees, factor };

inline ShearUnit parse_shear_unit(const std::string& s) {
    if (s == "degrees") return ShearUnit::degrees;
    if (s == "factor") return ShearUnit::factor;
    throw DataError(Errc::bad_config_value, "shear_unit must be 'degrees' or 'factor', got: " + s);
}

struct AugmentRanges {
    double rot_min = -5.0;
    double rot_max = 5.0;
    double shear_min = -0.5;
    double shear_max = 0.5;
    ShearUnit shear_unit = ShearUnit::degrees;
    int pad_max = 8;

    void validate() const {
        if (rot_min > rot_max || shear_min > shear_max || pad_max < 0)
            throw DataError(Errc::invalid_range, "augment ranges invalid (min > max)");
    }
};

struct AugmentParams {
    double rotation_deg = 0.0;
    double shear = 0.0;
    int pad_left = 0;
    int pad_right = 0;
    int pad_top = 0;
    int pad_bottom = 0;
};

// Each field drawn uniformly and independently, in a fixed order:
// rotation, shear, then the four pads (left, right, top, bottom).
inline AugmentParams sample_augment(const AugmentRanges& config, Rng& stream) {
    config.validate();
    AugmentParams p;
    p.rotation_deg = stream.uniform_real(config.rot_min, config.rot_max);
    p.shear = stream.uniform_real(config.shear_min, config.shear_max);
    p.pad_left = static_cast<int>(stream.uniform_int(0, config.pad_max));
    p.pad_right = static_cast<int>(stream.uniform_int(0, config.pad_max));
    p.pad_top = static_cast<int>(stream.uniform_int(0, config.pad_max));
    p.pad_bottom = static_cast<int>(stream.uniform_int(0, config.pad_max));
    return p;
}

namespace detail {

// Forward map about the image center: rotate(rotation_deg) o shear_x(s),
// with shear_x: (x, y) -> (x + s*y, y). Positive rotation turns the image
// counter-clockwise as displayed (y axis points down).
struct AffineMap {
    double m00, m01, m10, m11; // forward
    double i00, i01, i10, i11; // inverse, composed analytically

    AffineMap(double rotation_deg, double shear, ShearUnit unit) {
        const double theta = rotation_deg * std::numbers::pi / 180.0;
        const double s = unit == ShearUnit::degrees
                             ? std::tan(shear * std::numbers::pi / 180.0)
                             : shear;
        const double c = std::cos(theta);
        const double n = std::sin(theta);
        m00 = c;
        m01 = c * s + n;
        m10 = -n;
        m11 = c - n * s;
        // inverse = shear^-1 o rotate^-1 (exact identity when theta = s = 0)
        i00 = c - s * n;
        i01 = -n - s * c;
        i10 = n;
        i11 = c;
    }
};

// Output canvas: tight integer bounding box of the four transformed corner
// offsets (+-w/2, +-h/2). The box is symmetric, so the extent is twice the
// maximum transformed offset; a 1e-6 px epsilon absorbs floating-point fuzz
// from angles like 90 degrees before the ceiling.
inline void affine_canvas(const AffineMap& map, int w, int h, int& out_w, int& out_h) {
    const double hw = w / 2.0;
    const double hh = h / 2.0;
    double max_x = 0.0, max_y = 0.0;
    for (const double sx : {-1.0, 1.0}) {
        for (const double sy : {-1.0, 1.0}) {
            const double x = map.m00 * (sx * hw) + map.m01 * (sy * hh);
            const double y = map.m10 * (sx * hw) + map.m11 * (sy * hh);
            max_x = std::max(max_x, std::abs(x));
            max_y = std::max(max_y, std::abs(y));
        }
    }
    out_w = std::max(1, static_cast<int>(std::ceil(2.0 * max_x - 1e-6)));
    out_h = std::max(1, static_cast<int>(std::ceil(2.0 * max_y - 1e-6)));
}

// Shared core: inverse-mapped bilinear resampling. `fill` is called once per
// output pixel whose 4-tap footprint leaves the source image (row-major
// order), which keeps model-sampled fill deterministic.
template <typename FillFn>
GrayImage affine_resample(const GrayImage& img, double rotation_deg, double shear,
                          ShearUnit unit, FillFn&& fill) {
    const AffineMap map(rotation_deg, shear, unit);
    int out_w, out_h;
    affine_canvas(map, img.width, img.height, out_w, out_h);

    const double src_cx = (img.width - 1) / 2.0;
    const double src_cy = (img.height - 1) / 2.0;
    const double dst_cx = (out_w - 1) / 2.0;
    const double dst_cy = (out_h - 1) / 2.0;

    GrayImage out(out_w, out_h);
    for (int yo = 0; yo < out_h; ++yo) {
        for (int xo = 0; xo < out_w; ++xo) {
            const double dx = xo - dst_cx;
            const double dy = yo - dst_cy;
            const double sx = map.i00 * dx + map.i01 * dy + src_cx;
            const double sy = map.i10 * dx + map.i11 * dy + src_cy;
            const int x0 = static_cast<int>(std::floor(sx));
            const int y0 = static_cast<int>(std::floor(sy));
            const double fx = sx - x0;
            const double fy = sy - y0;

            const bool fully_inside = x0 >= 0 && y0 >= 0 && x0 + 1 < img.width &&
                                      y0 + 1 < img.height;
            double fill_value = 0.0;
            if (!fully_inside) fill_value = fill();

            auto tap = [&](int x, int y) -> double {
                if (x < 0 || y < 0 || x >= img.width || y >= img.height) return fill_value;
                return img.at(x, y);
            };
            const double v = (1.0 - fx) * (1.0 - fy) * tap(x0, y0) +
                             fx * (1.0 - fy) * tap(x0 + 1, y0) +
                             (1.0 - fx) * fy * tap(x0, y0 + 1) +
                             fx * fy * tap(x0 + 1, y0 + 1);
            out.at(xo, yo) = quantize_intensity(v);
        }
    }
    return out;
}

} // namespace detail

// Affine distortion with a constant fill intensity for samples that fall
// outside the source.
inline GrayImage apply_affine(const GrayImage& img, double rotation_deg, double shear,
                              std::uint8_t fill, ShearUnit unit = ShearUnit::degrees) {
    return detail::affine_resample(img, rotation_deg, shear, unit,
                                   [fill] { return static_cast<double>(fill); });
}

// Pipeline variant: out-of-source pixels are drawn from the model's
// background Gaussian, so corners blend into padded background statistics
// instead of forming detectable constant rectangles.
inline GrayImage apply_affine(const GrayImage& img, double rotation_deg, double shear,
                              const PixelModel& model, Rng& stream,
                              ShearUnit unit = ShearUnit::degrees) {
    return detail::affine_resample(img, rotation_deg, shear, unit, [&] {
        return static_cast<double>(quantize_intensity(stream.gaussian(model.bg_mean, model.bg_std)));
    });
}

// Rescales to the target height with the aspect ratio preserved (bilinear,
// border-clamped). target_height equal to the input height with the implied
// width unchanged is the bit-exact identity.
inline GrayImage resize_to_height(const GrayImage& img, int target_height) {
    if (target_height < 1)
        throw DataError(Errc::invalid_argument, "resize_to_height: target must be >= 1");
    const int out_h = target_height;
    const int out_w = std::max<int>(
        1, static_cast<int>(std::lround(static_cast<double>(img.width) * out_h / img.height)));
    const double sx = static_cast<double>(img.width) / out_w;
    const double sy = static_cast<double>(img.height) / out_h;

    GrayImage out(out_w, out_h);
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            const double src_x = (x + 0.5) * sx - 0.5;
            const double src_y = (y + 0.5) * sy - 0.5;
            const int x0 = static_cast<int>(std::floor(src_x));
            const int y0 = static_cast<int>(std::floor(src_y));
            const double fx = src_x - x0;
            const double fy = src_y - y0;
            auto tap = [&](int px, int py) -> double {
                return img.at(std::clamp(px, 0, img.width - 1), std::clamp(py, 0, img.height - 1));
            };
            const double v = (1.0 - fx) * (1.0 - fy) * tap(x0, y0) +
                             fx * (1.0 - fy) * tap(x0 + 1, y0) +
                             (1.0 - fx) * fy * tap(x0, y0 + 1) +
                             fx * fy * tap(x0 + 1, y0 + 1);
            out.at(x, y) = quantize_intensity(v);
        }
    }
    return out;
}

// Four-sided padding simulating loose word segmentation. New pixels are
// drawn from the model's background Gaussian in row-major output order.
inline GrayImage pad(const GrayImage& img, const AugmentParams& params, const PixelModel& model,
                     Rng& stream) {
    if (params.pad_left < 0 || params.pad_right < 0 || params.pad_top < 0 ||
        params.pad_bottom < 0)
        throw DataError(Errc::negative_pad, "pad: negative padding");
    if (params.pad_left == 0 && params.pad_right == 0 && params.pad_top == 0 &&
        params.pad_bottom == 0)
        return img;

    GrayImage out(img.width + params.pad_left + params.pad_right,
                  img.height + params.pad_top + params.pad_bottom);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const int sx = x - params.pad_left;
            const int sy = y - params.pad_top;
            if (sx >= 0 && sx < img.width && sy >= 0 && sy < img.height)
                out.at(x, y) = img.at(sx, sy);
            else
                out.at(x, y) = quantize_intensity(stream.gaussian(model.bg_mean, model.bg_std));
        }
    }
    return out;
}

} // namespace hwforge
