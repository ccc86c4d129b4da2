#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hwforge/digest.hpp"
#include "hwforge/error.hpp"
#include "hwforge/font_face.hpp"
#include "hwforge/rng.hpp"
#include "hwforge/utf8.hpp"

namespace hwforge {

// One validated font of the pool. `id` equals the entry's position under the
// canonical ordering (lexicographic by source_path), so ids are stable across
// scans and machines.
struct FontEntry {
    int id = -1;
    std::string source_path;
    std::string family_name;
    std::vector<char32_t> glyph_set; // sorted unique code points
    int units_per_em = 0;
    std::shared_ptr<const Face> face;

    bool has_code_point(char32_t cp) const {
        return std::binary_search(glyph_set.begin(), glyph_set.end(), cp);
    }
};

struct FontCatalog {
    std::vector<FontEntry> entries;
    std::vector<std::pair<std::string, std::string>> skipped; // (path, reason)

    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }

    // Canonicalizes (sort by path, assign dense ids). Also the hook tests use
    // to build synthetic catalogs without touching the filesystem.
    static FontCatalog from_faces(
        std::vector<std::pair<std::string, std::shared_ptr<const Face>>> faces) {
        std::sort(faces.begin(), faces.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        FontCatalog cat;
        cat.entries.reserve(faces.size());
        for (auto& [path, face] : faces) {
            FontEntry e;
            e.id = static_cast<int>(cat.entries.size());
            e.source_path = path;
            e.family_name = face->family_name();
            e.glyph_set = face->glyph_coverage();
            e.units_per_em = face->units_per_em();
            e.face = std::move(face);
            cat.entries.push_back(std::move(e));
        }
        return cat;
    }
};

// Tab-separated listing: id, path, family, glyph_count. This is the
// serialized form whose byte identity the rescan invariant is stated over.
inline std::string catalog_listing(const FontCatalog& catalog) {
    std::string out;
    for (const auto& e : catalog.entries) {
        out += std::to_string(e.id);
        out += '\t';
        out += e.source_path;
        out += '\t';
        out += e.family_name;
        out += '\t';
        out += std::to_string(e.glyph_set.size());
        out += '\n';
    }
    return out;
}

inline std::uint64_t catalog_digest(const FontCatalog& catalog) {
    Fnv1a64 h;
    h.update(catalog_listing(catalog));
    for (const auto& e : catalog.entries)
        for (char32_t cp : e.glyph_set) h.update_u64(cp);
    return h.value();
}

// Scans `dir` for font files. Every file that loads becomes an entry;
// files that do not parse land in `skipped` with the parser's reason.
inline FontCatalog scan_fonts(const std::filesystem::path& dir, bool recursive = false) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        throw IoError("not a readable directory: " + dir.string());

    std::vector<fs::path> files;
    auto consider = [&files](const fs::directory_entry& entry) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    };
    if (recursive) {
        for (auto it = fs::recursive_directory_iterator(dir, ec);
             !ec && it != fs::recursive_directory_iterator(); it.increment(ec))
            consider(*it);
    } else {
        for (auto it = fs::directory_iterator(dir, ec);
             !ec && it != fs::directory_iterator(); it.increment(ec))
            consider(*it);
    }
    if (ec) throw IoError("cannot iterate directory: " + dir.string() + " (" + ec.message() + ")");

    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });

    FontCatalog cat;
    std::vector<std::pair<std::string, std::shared_ptr<const Face>>> loaded;
    for (const auto& path : files) {
        try {
            loaded.emplace_back(path.generic_string(), load_font_file(path));
        } catch (const Error& e) {
            cat.skipped.emplace_back(path.generic_string(), e.what());
        }
    }
    auto skipped = std::move(cat.skipped);
    cat = FontCatalog::from_faces(std::move(loaded));
    cat.skipped = std::move(skipped);
    if (cat.entries.empty())
        throw DataError(Errc::empty_catalog, "no loadable fonts in " + dir.string());
    return cat;
}

// True iff every code point of `word` is renderable by the font.
inline bool covers(const FontEntry& font, std::string_view word) {
    if (word.empty()) throw DataError(Errc::empty_word, "covers: empty word");
    for (char32_t cp : utf8_decode(word))
        if (!font.has_code_point(cp)) return false;
    return true;
}

// Draws k font ids uniformly from the fonts covering `word`: without
// replacement while the eligible set is large enough, with replacement
// otherwise (signalled through `used_replacement` so the caller can log it).
inline std::vector<int> sample_fonts(const FontCatalog& catalog, std::string_view word,
                                     int k, Rng& stream,
                                     bool* used_replacement = nullptr) {
    if (catalog.empty()) throw DataError(Errc::empty_catalog, "sample_fonts: empty catalog");
    if (k < 1) throw DataError(Errc::invalid_argument, "sample_fonts: k must be positive");

    std::vector<int> eligible;
    for (const auto& e : catalog.entries)
        if (covers(e, word)) eligible.push_back(e.id);
    if (eligible.empty())
        throw DataError(Errc::no_eligible_font, "no font covers word: " + std::string(word));

    const int n = static_cast<int>(eligible.size());
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k));
    if (n >= k) {
        // partial Fisher-Yates: k distinct ids
        if (used_replacement) *used_replacement = false;
        for (int i = 0; i < k; ++i) {
            const auto j = static_cast<int>(stream.uniform_int(i, n - 1));
            std::swap(eligible[i], eligible[j]);
            out.push_back(eligible[i]);
        }
    } else {
        if (used_replacement) *used_replacement = true;
        for (int i = 0; i < k; ++i)
            out.push_back(eligible[static_cast<std::size_t>(stream.uniform_int(0, n - 1))]);
    }
    return out;
}

} // namespace hwforge
