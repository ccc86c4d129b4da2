#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "hwforge/error.hpp"
#include "hwforge/image.hpp"
#include "hwforge/rng.hpp"

namespace hwforge {

using Histogram = std::array<std::uint64_t, 256>;

inline Histogram intensity_histogram(const GrayImage& img) {
    Histogram h{};
    for (auto v : img.pixels) ++h[v];
    return h;
}

// Otsu's threshold: the split t maximizing between-class variance, ties
// broken toward the smallest t. Pixels <= t are foreground (the darker
// class). The score keeps all pre-division arithmetic in exact integers, so
// equal splits score identically and the tie-break is well defined.
inline int otsu_threshold(const Histogram& histogram) {
    std::uint64_t total = 0, total_sum = 0;
    int distinct = 0;
    for (int i = 0; i < 256; ++i) {
        if (histogram[i] > 0) ++distinct;
        total += histogram[i];
        total_sum += static_cast<std::uint64_t>(i) * histogram[i];
    }
    if (distinct < 2)
        throw DataError(Errc::degenerate_histogram,
                        "otsu_threshold: fewer than 2 distinct intensities");

    int best_t = -1;
    long double best_score = -1.0L;
    std::uint64_t w0 = 0, s0 = 0;
    for (int t = 0; t < 255; ++t) {
        w0 += histogram[t];
        s0 += static_cast<std::uint64_t>(t) * histogram[t];
        if (w0 == 0) continue;
        const std::uint64_t w1 = total - w0;
        if (w1 == 0) break;
        const std::uint64_t s1 = total_sum - s0;
        const long double a = static_cast<long double>(s0) * w1 - static_cast<long double>(s1) * w0;
        const long double score = (a * a) / (static_cast<long double>(w0) * w1);
        if (score > best_score) {
            best_score = score;
            best_t = t;
        }
    }
    return best_t;
}

// Foreground/background Gaussian intensity statistics (the ink and paper
// appearance of the reference corpus).
struct PixelModel {
    double fg_mean = 0.0;
    double fg_std = 0.0;
    double bg_mean = 0.0;
    double bg_std = 0.0;
    std::string source = "manual";

    static PixelModel create(double fg_mean, double fg_std, double bg_mean, double bg_std,
                             std::string source = "manual") {
        PixelModel m{fg_mean, fg_std, bg_mean, bg_std, std::move(source)};
        m.validate();
        return m;
    }

    void validate() const {
        const bool finite = std::isfinite(fg_mean) && std::isfinite(fg_std) &&
                            std::isfinite(bg_mean) && std::isfinite(bg_std);
        if (!finite || fg_std < 0.0 || bg_std < 0.0 || fg_mean < 0.0 || fg_mean > 255.0 ||
            bg_mean < 0.0 || bg_mean > 255.0)
            throw DataError(Errc::invalid_model, "pixel model values out of range");
        if (!(fg_mean < bg_mean))
            throw DataError(Errc::invalid_model,
                            "pixel model requires fg_mean < bg_mean (ink darker than paper)");
    }
};

// Pools every foreground pixel across the reference images into one sample
// and every background pixel into another (split per image by Otsu), then
// takes means and population standard deviations.
inline PixelModel estimate_pixel_model(std::span<const GrayImage> reference_images,
                                       std::string source = "estimated",
                                       std::vector<std::string>* warnings = nullptr) {
    if (reference_images.empty())
        throw DataError(Errc::empty_reference, "estimate_pixel_model: no reference images");

    double fg_n = 0, fg_s = 0, fg_s2 = 0;
    double bg_n = 0, bg_s = 0, bg_s2 = 0;
    std::size_t degenerate = 0;
    for (std::size_t i = 0; i < reference_images.size(); ++i) {
        const GrayImage& img = reference_images[i];
        const Histogram h = intensity_histogram(img);
        int t;
        try {
            t = otsu_threshold(h);
        } catch (const DataError&) {
            ++degenerate;
            if (warnings)
                warnings->push_back("reference image " + std::to_string(i) +
                                    " is degenerate (single intensity); skipped");
            continue;
        }
        for (int v = 0; v < 256; ++v) {
            const auto count = static_cast<double>(h[v]);
            if (count == 0) continue;
            const double value = v;
            if (v <= t) {
                fg_n += count;
                fg_s += count * value;
                fg_s2 += count * value * value;
            } else {
                bg_n += count;
                bg_s += count * value;
                bg_s2 += count * value * value;
            }
        }
    }
    if (degenerate == reference_images.size())
        throw DataError(Errc::all_degenerate,
                        "estimate_pixel_model: every reference image is degenerate");

    const double fg_mean = fg_s / fg_n;
    const double bg_mean = bg_s / bg_n;
    const double fg_var = std::max(0.0, fg_s2 / fg_n - fg_mean * fg_mean);
    const double bg_var = std::max(0.0, bg_s2 / bg_n - bg_mean * bg_mean);
    return PixelModel::create(fg_mean, std::sqrt(fg_var), bg_mean, std::sqrt(bg_var),
                              std::move(source));
}

// Replaces mask pixels with independent draws: foreground from
// Gaussian(fg_mean, fg_std), background from Gaussian(bg_mean, bg_std),
// row-major order, rounded and clamped to [0, 255].
inline GrayImage apply_pixel_model(const BinaryMask& mask, const PixelModel& model, Rng& stream) {
    model.validate();
    GrayImage out(mask.width, mask.height);
    const std::size_t n = mask.bits.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double v = mask.bits[i] ? stream.gaussian(model.fg_mean, model.fg_std)
                                      : stream.gaussian(model.bg_mean, model.bg_std);
        out.pixels[i] = quantize_intensity(v);
    }
    return out;
}

// Separable Gaussian blur: 1-D kernel truncated at radius ceil(3*sigma) and
// renormalized to sum 1, edge handling by replication, float intermediates,
// one final round-and-clamp.
inline GrayImage gaussian_smooth(const GrayImage& img, double sigma) {
    if (sigma < 0.0) throw DataError(Errc::negative_sigma, "gaussian_smooth: sigma < 0");
    if (sigma == 0.0) return img;

    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (auto& v : kernel) v /= sum;

    const int w = img.width;
    const int h = img.height;
    std::vector<double> tmp(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int sx = std::clamp(x + i, 0, w - 1);
                acc += kernel[static_cast<std::size_t>(i + radius)] * img.at(sx, y);
            }
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int sy = std::clamp(y + i, 0, h - 1);
                acc += kernel[static_cast<std::size_t>(i + radius)] * tmp[static_cast<std::size_t>(sy) * w + x];
            }
            out.at(x, y) = quantize_intensity(acc);
        }
    }
    return out;
}

// --- pixel model file format: five "key=value" lines, reals to 6 digits ---

inline std::string serialize_pixel_model(const PixelModel& model) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "fg_mean=%.6f\nfg_std=%.6f\nbg_mean=%.6f\nbg_std=%.6f\n",
                  model.fg_mean, model.fg_std, model.bg_mean, model.bg_std);
    return std::string(buf) + "source=" + model.source + "\n";
}

inline void save_pixel_model(const std::filesystem::path& path, const PixelModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write pixel model: " + path.string());
    out << serialize_pixel_model(model);
    if (!out.flush()) throw IoError("write failed: " + path.string());
}

inline PixelModel load_pixel_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read pixel model: " + path.string());
    PixelModel m;
    std::string line;
    bool have[4] = {false, false, false, false};
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError(Errc::invalid_model, "bad pixel model line: " + line);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "source") {
            m.source = value;
            continue;
        }
        double num;
        try {
            num = std::stod(value);
        } catch (const std::exception&) {
            throw DataError(Errc::invalid_model, "bad pixel model value: " + line);
        }
        if (key == "fg_mean") m.fg_mean = num, have[0] = true;
        else if (key == "fg_std") m.fg_std = num, have[1] = true;
        else if (key == "bg_mean") m.bg_mean = num, have[2] = true;
        else if (key == "bg_std") m.bg_std = num, have[3] = true;
        else throw DataError(Errc::invalid_model, "unknown pixel model key: " + key);
    }
    if (!(have[0] && have[1] && have[2] && have[3]))
        throw DataError(Errc::invalid_model, "pixel model file is missing fields");
    m.validate();
    return m;
}

} // namespace hwforge
