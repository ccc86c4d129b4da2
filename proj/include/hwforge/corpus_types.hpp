#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hwforge/digest.hpp"
#include "hwforge/error.hpp"
#include "hwforge/image.hpp"

namespace hwforge {

// Unique non-empty words in first-occurrence order.
struct Vocabulary {
    std::vector<std::string> words;
    std::string source;
};

struct PlanEntry {
    std::int64_t sample_index = 0;
    int word_index = 0;
    int slot_index = 0; // 0..k-1 within the word
    int font_id = 0;
};

struct PlanResult {
    std::vector<PlanEntry> entries;
    std::vector<std::pair<std::string, std::string>> skipped_words; // (word, reason)
    std::size_t replacement_words = 0; // words sampled with replacement (eligible < k)
};

// Ground-truth annotation row: binds one image file to its label and every
// sampled parameter needed to regenerate it.
struct SampleRecord {
    std::int64_t sample_index = 0;
    std::string image_path; // relative to the output root
    std::string label;
    int font_id = 0;
    int font_size_px = 0;
    int kerning_px = 0;
    int stroke_delta = 0;
    double rotation_deg = 0.0;
    double shear = 0.0;
    int pad_left = 0;
    int pad_right = 0;
    int pad_top = 0;
    int pad_bottom = 0;
    std::uint64_t sample_seed = 0;
};

struct GeneratedSample {
    GrayImage image;
    SampleRecord record;
};

struct CorpusManifest {
    std::uint64_t config_digest = 0;
    std::string tool_version;
    std::uint64_t catalog_digest = 0;
    std::vector<SampleRecord> rows; // sorted by sample_index
};

inline constexpr const char* kManifestColumns =
    "sample_index\timage_path\tlabel\tfont_id\tfont_size\tkerning\tstroke_delta\t"
    "rotation_deg\tshear\tpad_l\tpad_r\tpad_t\tpad_b\tsample_seed";

// UTF-8 TSV: '#'-prefixed header lines, then one row per sample with reals
// printed to 6 decimals.
inline std::string serialize_manifest(const CorpusManifest& manifest) {
    std::string out;
    out += "# config_digest=" + to_hex64(manifest.config_digest) + "\n";
    out += "# tool_version=" + manifest.tool_version + "\n";
    out += "# catalog_digest=" + to_hex64(manifest.catalog_digest) + "\n";
    out += "# columns=";
    out += kManifestColumns;
    out += "\n";
    char buf[160];
    for (const auto& r : manifest.rows) {
        std::snprintf(buf, sizeof(buf), "%lld\t", static_cast<long long>(r.sample_index));
        out += buf;
        out += r.image_path;
        out += '\t';
        out += r.label;
        std::snprintf(buf, sizeof(buf), "\t%d\t%d\t%d\t%d\t%.6f\t%.6f\t%d\t%d\t%d\t%d\t%llu\n",
                      r.font_id, r.font_size_px, r.kerning_px, r.stroke_delta, r.rotation_deg,
                      r.shear, r.pad_left, r.pad_right, r.pad_top, r.pad_bottom,
                      static_cast<unsigned long long>(r.sample_seed));
        out += buf;
    }
    return out;
}

inline CorpusManifest parse_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest: " + path.string());
    CorpusManifest m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(2, eq - 2);
            const std::string value = line.substr(eq + 1);
            if (key == "config_digest") m.config_digest = std::stoull(value, nullptr, 16);
            else if (key == "tool_version") m.tool_version = value;
            else if (key == "catalog_digest") m.catalog_digest = std::stoull(value, nullptr, 16);
            continue;
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const auto tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos
                                                                         : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() != 14)
            throw DataError(Errc::invalid_argument,
                            "manifest row needs 14 fields, got " + std::to_string(fields.size()));
        try {
            SampleRecord r;
            r.sample_index = std::stoll(fields[0]);
            r.image_path = fields[1];
            r.label = fields[2];
            r.font_id = std::stoi(fields[3]);
            r.font_size_px = std::stoi(fields[4]);
            r.kerning_px = std::stoi(fields[5]);
            r.stroke_delta = std::stoi(fields[6]);
            r.rotation_deg = std::stod(fields[7]);
            r.shear = std::stod(fields[8]);
            r.pad_left = std::stoi(fields[9]);
            r.pad_right = std::stoi(fields[10]);
            r.pad_top = std::stoi(fields[11]);
            r.pad_bottom = std::stoi(fields[12]);
            r.sample_seed = std::stoull(fields[13]);
            m.rows.push_back(std::move(r));
        } catch (const std::exception&) {
            throw DataError(Errc::invalid_argument, "unparseable manifest row: " + line);
        }
    }
    return m;
}

} // namespace hwforge
