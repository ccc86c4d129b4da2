#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <stb_truetype.hpp>

#include "hwforge/error.hpp"
#include "hwforge/image.hpp"
#include "hwforge/utf8.hpp"

namespace hwforge {

// One rasterized glyph. `left`/`top` position the bitmap relative to
// (floor(pen_x), baseline); +y points down.
struct GlyphRaster {
    int left = 0;
    int top = 0;
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> coverage; // anti-aliased, 0..255
};

struct GlyphBox {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0; // half-open pixel box, baseline-relative
};

// A loaded scalable font. Implementations must be safe for concurrent const
// calls; workers share one immutable Face per catalog entry.
class Face {
public:
    virtual ~Face() = default;

    virtual bool has_glyph(char32_t cp) const = 0;
    virtual double advance_px(char32_t cp, int font_size_px) const = 0;
    // Pixel box the glyph would cover when rendered with the pen at
    // fractional offset x_shift in [0, 1).
    virtual GlyphBox raster_box(char32_t cp, int font_size_px, double x_shift) const = 0;
    virtual GlyphRaster raster(char32_t cp, int font_size_px, double x_shift) const = 0;
    virtual std::vector<char32_t> glyph_coverage() const = 0; // sorted
    virtual int units_per_em() const = 0;
    virtual const std::string& family_name() const = 0;
};

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return data;
}

inline std::uint16_t be16(const std::uint8_t* p) { return std::uint16_t(p[0] << 8 | p[1]); }
inline std::uint32_t be32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

// Bounds-checked sfnt table directory. stb_truetype does no range checking,
// so corrupt or truncated files must be rejected here, before it ever sees
// them.
struct SfntDirectory {
    const std::uint8_t* data;
    std::size_t size;
    std::uint32_t font_start = 0;
    std::map<std::string, std::pair<std::uint32_t, std::uint32_t>> tables; // tag -> (offset, length)

    SfntDirectory(const std::uint8_t* bytes, std::size_t n) : data(bytes), size(n) {
        if (size < 12) throw DataError(Errc::invalid_argument, "file too small to be a font");
        if (std::memcmp(data, "ttcf", 4) == 0) {
            // TrueType collection: use the first face.
            if (size < 16) throw DataError(Errc::invalid_argument, "truncated TTC header");
            const std::uint32_t count = be32(data + 8);
            if (count == 0 || size < 12 + 4)
                throw DataError(Errc::invalid_argument, "empty TTC");
            font_start = be32(data + 12);
            if (font_start + 12 > size)
                throw DataError(Errc::invalid_argument, "TTC face offset out of range");
        }
        const std::uint8_t* base = data + font_start;
        const std::uint32_t tag = be32(base);
        const bool sfnt = tag == 0x00010000u || tag == 0x74727565u /*true*/ ||
                          tag == 0x4F54544Fu /*OTTO*/;
        if (!sfnt) throw DataError(Errc::invalid_argument, "not a TrueType/OpenType font");
        const std::uint16_t num_tables = be16(base + 4);
        if (font_start + 12 + 16u * num_tables > size)
            throw DataError(Errc::invalid_argument, "truncated table directory");
        for (std::uint16_t i = 0; i < num_tables; ++i) {
            const std::uint8_t* rec = base + 12 + 16 * i;
            const std::uint32_t off = be32(rec + 8);
            const std::uint32_t len = be32(rec + 12);
            if (off > size || len > size - off)
                throw DataError(Errc::invalid_argument, "table extends past end of file");
            tables.emplace(std::string(reinterpret_cast<const char*>(rec), 4),
                           std::make_pair(off, len));
        }
        for (const char* req : {"cmap", "head", "hhea", "hmtx", "maxp"}) {
            if (!tables.count(req))
                throw DataError(Errc::invalid_argument,
                                std::string("missing required table: ") + req);
        }
        if (!tables.count("glyf") && !tables.count("CFF "))
            throw DataError(Errc::invalid_argument, "no glyph outlines (glyf or CFF)");
        if (tables.count("glyf") && !tables.count("loca"))
            throw DataError(Errc::invalid_argument, "glyf without loca");
    }

    const std::uint8_t* table(const std::string& tag, std::uint32_t* len = nullptr) const {
        auto it = tables.find(tag);
        if (it == tables.end()) return nullptr;
        if (len) *len = it->second.second;
        return data + it->second.first;
    }
};

inline std::string utf16be_to_utf8(const std::uint8_t* p, std::size_t byte_len) {
    std::string out;
    std::size_t i = 0;
    auto emit = [&out](char32_t cp) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    };
    while (i + 1 < byte_len) {
        char32_t u = be16(p + i);
        i += 2;
        if (u >= 0xD800 && u <= 0xDBFF && i + 1 < byte_len) {
            const char32_t lo = be16(p + i);
            if (lo >= 0xDC00 && lo <= 0xDFFF) {
                u = 0x10000 + ((u - 0xD800) << 10) + (lo - 0xDC00);
                i += 2;
            }
        }
        emit(u);
    }
    return out;
}

// Family name (name ID 1), preferring Windows Unicode entries.
inline std::string parse_family_name(const SfntDirectory& dir) {
    std::uint32_t len = 0;
    const std::uint8_t* name = dir.table("name", &len);
    if (!name || len < 6) return {};
    const std::uint16_t count = be16(name + 2);
    const std::uint32_t string_off = be16(name + 4);
    std::string best;
    int best_rank = -1;
    for (std::uint16_t i = 0; i < count; ++i) {
        const std::uint8_t* rec = name + 6 + 12 * i;
        if (6u + 12u * (i + 1) > len) break;
        const std::uint16_t platform = be16(rec);
        const std::uint16_t encoding = be16(rec + 2);
        const std::uint16_t language = be16(rec + 4);
        const std::uint16_t name_id = be16(rec + 6);
        const std::uint16_t str_len = be16(rec + 8);
        const std::uint16_t str_off = be16(rec + 10);
        if (name_id != 1) continue;
        if (string_off + str_off + str_len > len) continue;
        const std::uint8_t* s = name + string_off + str_off;
        int rank = -1;
        std::string decoded;
        if (platform == 3 && (encoding == 1 || encoding == 10)) {
            rank = language == 0x409 ? 3 : 2;
            decoded = utf16be_to_utf8(s, str_len);
        } else if (platform == 0) {
            rank = 2;
            decoded = utf16be_to_utf8(s, str_len);
        } else if (platform == 1 && encoding == 0) {
            rank = 1;
            decoded.reserve(str_len);
            for (std::uint16_t k = 0; k < str_len; ++k)
                decoded.push_back(s[k] < 0x80 ? static_cast<char>(s[k]) : '?');
        }
        if (rank > best_rank && !decoded.empty()) {
            best_rank = rank;
            best = std::move(decoded);
        }
    }
    return best;
}

} // namespace detail

// A TrueType/OpenType font backed by the vendored stb_truetype port. The
// parsed handle is a small value struct of table offsets; const methods work
// on a local copy, so one TrueTypeFace serves any number of worker threads.
class TrueTypeFace final : public Face {
public:
    static std::shared_ptr<TrueTypeFace> load(const std::filesystem::path& path) {
        auto data = detail::read_file_bytes(path);
        return from_bytes(std::move(data), path.stem().string());
    }

    static std::shared_ptr<TrueTypeFace> from_bytes(std::vector<std::uint8_t> data,
                                                    const std::string& fallback_name) {
        auto face = std::shared_ptr<TrueTypeFace>(new TrueTypeFace());
        face->data_ = std::move(data);
        detail::SfntDirectory dir(face->data_.data(), face->data_.size());
        if (!face->tt_.ReadBytes(face->data_.data() + dir.font_start))
            throw DataError(Errc::invalid_argument, "font tables not parseable");
        const std::uint8_t* head = dir.table("head");
        face->units_per_em_ = detail::be16(head + 18);
        if (face->units_per_em_ == 0)
            throw DataError(Errc::invalid_argument, "unitsPerEm is zero");
        face->family_ = detail::parse_family_name(dir);
        if (face->family_.empty()) face->family_ = fallback_name;
        face->coverage_ = face->enumerate_cmap();
        if (face->coverage_.empty())
            throw DataError(Errc::invalid_argument, "font maps no code points");
        return face;
    }

    bool has_glyph(char32_t cp) const override {
        return std::binary_search(coverage_.begin(), coverage_.end(), cp);
    }

    double advance_px(char32_t cp, int font_size_px) const override {
        stb::TrueType tt = tt_;
        const int gi = tt.FindGlyphIndex(static_cast<int>(cp));
        if (gi == 0) throw DataError(Errc::missing_glyph, "no glyph for code point");
        return tt.GetGlyphHorMetrics(gi).advance * scale(font_size_px);
    }

    GlyphBox raster_box(char32_t cp, int font_size_px, double x_shift) const override {
        stb::TrueType tt = tt_;
        const int gi = tt.FindGlyphIndex(static_cast<int>(cp));
        if (gi == 0) throw DataError(Errc::missing_glyph, "no glyph for code point");
        const float s = scale(font_size_px);
        const stb::Box b = tt.GetGlyphBitmapBox(gi, s, s, static_cast<float>(x_shift), 0.0f);
        return GlyphBox{b.x0, b.y0, b.x1, b.y1};
    }

    GlyphRaster raster(char32_t cp, int font_size_px, double x_shift) const override {
        stb::TrueType tt = tt_;
        const int gi = tt.FindGlyphIndex(static_cast<int>(cp));
        if (gi == 0) throw DataError(Errc::missing_glyph, "no glyph for code point");
        const float s = scale(font_size_px);
        const stb::Box b = tt.GetGlyphBitmapBox(gi, s, s, static_cast<float>(x_shift), 0.0f);
        GlyphRaster g;
        g.left = b.x0;
        g.top = b.y0;
        g.width = b.x1 - b.x0;
        g.height = b.y1 - b.y0;
        if (g.width > 0 && g.height > 0) {
            g.coverage.assign(static_cast<std::size_t>(g.width) * g.height, 0);
            tt.MakeGlyphBitmap(g.coverage.data(), gi, g.width, g.height, g.width, s, s,
                               static_cast<float>(x_shift), 0.0f);
        } else {
            g.width = g.height = 0; // empty outline (e.g. space)
        }
        return g;
    }

    std::vector<char32_t> glyph_coverage() const override { return coverage_; }
    int units_per_em() const override { return units_per_em_; }
    const std::string& family_name() const override { return family_; }

private:
    TrueTypeFace() = default;

    float scale(int font_size_px) const {
        // Nominal em size in pixels: scale maps font units to pixels.
        return static_cast<float>(font_size_px) / static_cast<float>(units_per_em_);
    }

    // Walks the chosen cmap subtable for candidate ranges, then confirms each
    // code point through FindGlyphIndex (which is authoritative for formats
    // with glyph-id indirection).
    std::vector<char32_t> enumerate_cmap() const {
        std::vector<char32_t> out;
        stb::TrueType tt = tt_;
        const std::uint8_t* data = tt.fi.data;
        const std::uint32_t map = static_cast<std::uint32_t>(tt.fi.index_map);
        const std::uint16_t format = detail::be16(data + map);
        auto probe_range = [&](char32_t lo, char32_t hi) {
            for (char32_t cp = lo; cp <= hi; ++cp) {
                if (cp == 0) continue;
                if (tt.FindGlyphIndex(static_cast<int>(cp)) != 0) out.push_back(cp);
            }
        };
        switch (format) {
        case 0:
            probe_range(0, 255);
            break;
        case 4: {
            const std::uint16_t seg_count = detail::be16(data + map + 6) / 2;
            for (std::uint16_t s = 0; s < seg_count; ++s) {
                const std::uint32_t end = detail::be16(data + map + 14 + 2 * s);
                const std::uint32_t start = detail::be16(data + map + 16 + seg_count * 2 + 2 * s);
                if (start <= end) probe_range(start, end);
            }
            break;
        }
        case 6: {
            const std::uint32_t first = detail::be16(data + map + 6);
            const std::uint32_t count = detail::be16(data + map + 8);
            if (count > 0) probe_range(first, first + count - 1);
            break;
        }
        case 12:
        case 13: {
            const std::uint32_t n_groups = detail::be32(data + map + 12);
            for (std::uint32_t g = 0; g < n_groups; ++g) {
                const std::uint32_t start = detail::be32(data + map + 16 + 12 * g);
                const std::uint32_t end = detail::be32(data + map + 16 + 12 * g + 4);
                if (start > 0x10FFFF) continue;
                probe_range(start, std::min<std::uint32_t>(end, 0x10FFFF));
            }
            break;
        }
        default: // unknown subtable: scan the BMP
            probe_range(0, 0xFFFF);
            break;
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    std::vector<std::uint8_t> data_;
    stb::TrueType tt_;
    int units_per_em_ = 0;
    std::string family_;
    std::vector<char32_t> coverage_;
};

// Plain-text fixture font (.gridfont). Pixel-native: glyphs render as fixed
// `advance` x `height` cells of '#'/'.' regardless of the requested size, so
// tests can state exact layout arithmetic without a real rasterizer.
class GridFace final : public Face {
public:
    static std::shared_ptr<GridFace> load(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open file: " + path.string());
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path.stem().string());
    }

    static std::shared_ptr<GridFace> parse(const std::string& text, const std::string& name) {
        auto face = std::shared_ptr<GridFace>(new GridFace());
        face->family_ = name;
        std::istringstream in(text);
        std::string line;
        if (!std::getline(in, line))
            throw DataError(Errc::invalid_argument, "empty gridfont");
        int advance = 0, height = 0;
        if (std::sscanf(line.c_str(), "advance=%d height=%d", &advance, &height) != 2 ||
            advance < 1 || height < 1)
            throw DataError(Errc::invalid_argument, "bad gridfont header: " + line);
        face->advance_ = advance;
        face->height_ = height;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (line.rfind("glyph=", 0) != 0)
                throw DataError(Errc::invalid_argument, "expected glyph= line, got: " + line);
            const auto cps = utf8_decode(line.substr(6));
            if (cps.size() != 1)
                throw DataError(Errc::invalid_argument, "glyph= needs exactly one character");
            Grid grid;
            grid.rows.reserve(height);
            for (int r = 0; r < height; ++r) {
                if (!std::getline(in, line))
                    throw DataError(Errc::invalid_argument, "truncated glyph grid");
                if (static_cast<int>(line.size()) != advance)
                    throw DataError(Errc::invalid_argument, "glyph row width mismatch");
                for (char c : line)
                    if (c != '#' && c != '.')
                        throw DataError(Errc::invalid_argument, "glyph rows must be '#' or '.'");
                grid.rows.push_back(line);
            }
            if (!face->glyphs_.emplace(cps[0], std::move(grid)).second)
                throw DataError(Errc::invalid_argument, "duplicate glyph in gridfont");
        }
        if (face->glyphs_.empty())
            throw DataError(Errc::invalid_argument, "gridfont defines no glyphs");
        return face;
    }

    bool has_glyph(char32_t cp) const override { return glyphs_.count(cp) != 0; }

    double advance_px(char32_t cp, int) const override {
        require(cp);
        return advance_;
    }

    GlyphBox raster_box(char32_t cp, int, double) const override {
        require(cp);
        return GlyphBox{0, -height_, advance_, 0};
    }

    GlyphRaster raster(char32_t cp, int, double) const override {
        const Grid& grid = require(cp);
        GlyphRaster g;
        g.left = 0;
        g.top = -height_;
        g.width = advance_;
        g.height = height_;
        g.coverage.assign(static_cast<std::size_t>(advance_) * height_, 0);
        for (int r = 0; r < height_; ++r)
            for (int c = 0; c < advance_; ++c)
                if (grid.rows[r][c] == '#') g.coverage[static_cast<std::size_t>(r) * advance_ + c] = 255;
        return g;
    }

    std::vector<char32_t> glyph_coverage() const override {
        std::vector<char32_t> cps;
        cps.reserve(glyphs_.size());
        for (const auto& [cp, _] : glyphs_) cps.push_back(cp);
        return cps; // std::map iterates sorted
    }

    int units_per_em() const override { return height_; }
    const std::string& family_name() const override { return family_; }

private:
    struct Grid {
        std::vector<std::string> rows;
    };

    GridFace() = default;

    const Grid& require(char32_t cp) const {
        auto it = glyphs_.find(cp);
        if (it == glyphs_.end())
            throw DataError(Errc::missing_glyph, "gridfont has no glyph for code point");
        return it->second;
    }

    int advance_ = 0;
    int height_ = 0;
    std::string family_;
    std::map<char32_t, Grid> glyphs_;
};

// Dispatches on extension: .gridfont fixtures load through GridFace,
// everything else is handed to the TrueType/OpenType loader.
inline std::shared_ptr<Face> load_font_file(const std::filesystem::path& path) {
    if (path.extension() == ".gridfont") return GridFace::load(path);
    return TrueTypeFace::load(path);
}

} // namespace hwforge
