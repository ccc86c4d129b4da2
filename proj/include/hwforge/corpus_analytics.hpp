#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hwforge/corpus_types.hpp"
#include "hwforge/error.hpp"

namespace hwforge {

struct FrequencyTable {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t total_tokens = 0;
};

inline FrequencyTable word_frequency(std::span<const std::string> tokens) {
    FrequencyTable table;
    for (const auto& t : tokens) {
        ++table.counts[t];
        ++table.total_tokens;
    }
    return table;
}

// Number of word classes with fewer than `threshold` occurrences.
inline std::uint64_t rare_class_count(const FrequencyTable& table, std::uint64_t threshold) {
    if (threshold < 1)
        throw DataError(Errc::invalid_argument, "rare_class_count: threshold must be >= 1");
    std::uint64_t n = 0;
    for (const auto& [_, count] : table.counts)
        if (count < threshold) ++n;
    return n;
}

struct ZipfRow {
    std::uint64_t rank = 0;
    std::uint64_t frequency = 0;
    std::string word;
};

struct ZipfReport {
    std::vector<ZipfRow> rows; // frequency descending, ties lexicographic
    std::uint64_t vocabulary_size = 0;
    std::uint64_t total_tokens = 0;
    std::uint64_t rare_classes = 0; // at rare_threshold
    std::uint64_t rare_threshold = 20;
};

inline ZipfReport zipf_report(const FrequencyTable& table, std::uint64_t rare_threshold = 20) {
    if (table.counts.empty())
        throw DataError(Errc::empty_table, "zipf_report: empty frequency table");
    ZipfReport report;
    report.rows.reserve(table.counts.size());
    for (const auto& [word, count] : table.counts)
        report.rows.push_back(ZipfRow{0, count, word});
    std::sort(report.rows.begin(), report.rows.end(), [](const ZipfRow& a, const ZipfRow& b) {
        if (a.frequency != b.frequency) return a.frequency > b.frequency;
        return a.word < b.word;
    });
    for (std::size_t i = 0; i < report.rows.size(); ++i)
        report.rows[i].rank = static_cast<std::uint64_t>(i) + 1;
    report.vocabulary_size = table.counts.size();
    report.total_tokens = table.total_tokens;
    report.rare_threshold = rare_threshold;
    report.rare_classes = rare_class_count(table, rare_threshold);
    return report;
}

// Token input: either a word-per-line text file or a generated manifest
// (detected by its "# columns=" header, from which the label column is
// taken). `fold_case` lowercases ASCII letters before counting.
inline std::vector<std::string> load_tokens(const std::filesystem::path& path,
                                            bool fold_case = false) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open token input: " + path.string());
    std::string first;
    std::getline(in, first);
    in.seekg(0);

    std::vector<std::string> tokens;
    const bool is_manifest = first.rfind("# ", 0) == 0;
    if (is_manifest) {
        // find the label column from the manifest's columns header
        int label_col = 2;
        std::string line;
        auto pos = in.tellg();
        while (std::getline(in, line)) {
            if (line.rfind("# columns=", 0) == 0) {
                std::string cols = line.substr(10);
                int idx = 0;
                std::size_t start = 0;
                label_col = -1;
                while (true) {
                    const auto tab = cols.find('\t', start);
                    const std::string name =
                        cols.substr(start, tab == std::string::npos ? std::string::npos : tab - start);
                    if (name == "label") {
                        label_col = idx;
                        break;
                    }
                    if (tab == std::string::npos) break;
                    start = tab + 1;
                    ++idx;
                }
                if (label_col < 0)
                    throw DataError(Errc::invalid_argument,
                                    "manifest has no label column: " + path.string());
                break;
            }
            if (!line.empty() && line[0] != '#') break;
        }
        in.clear();
        in.seekg(pos);
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            int col = 0;
            std::size_t start = 0;
            std::string value;
            while (true) {
                const auto tab = line.find('\t', start);
                if (col == label_col) {
                    value = line.substr(start,
                                        tab == std::string::npos ? std::string::npos : tab - start);
                    break;
                }
                if (tab == std::string::npos) break;
                start = tab + 1;
                ++col;
            }
            if (col != label_col)
                throw DataError(Errc::invalid_argument, "manifest row too short: " + line);
            tokens.push_back(std::move(value));
        }
    } else {
        std::string line;
        while (std::getline(in, line)) {
            const auto b = line.find_first_not_of(" \t\r\n");
            if (b == std::string::npos) continue;
            const auto e = line.find_last_not_of(" \t\r\n");
            tokens.push_back(line.substr(b, e - b + 1));
        }
    }
    if (fold_case) {
        for (auto& t : tokens)
            for (auto& c : t)
                if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return tokens;
}

// zipf.tsv: rank, frequency, word. summary.txt: the headline numbers.
inline void write_zipf_report(const ZipfReport& report, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output dir: " + out_dir.string());

    std::ofstream tsv(out_dir / "zipf.tsv", std::ios::binary);
    if (!tsv) throw IoError("cannot write zipf.tsv");
    tsv << "rank\tfrequency\tword\n";
    for (const auto& row : report.rows)
        tsv << row.rank << '\t' << row.frequency << '\t' << row.word << '\n';
    if (!tsv.flush()) throw IoError("zipf.tsv write failed");

    std::ofstream summary(out_dir / "summary.txt", std::ios::binary);
    if (!summary) throw IoError("cannot write summary.txt");
    summary << "vocabulary_size=" << report.vocabulary_size << '\n'
            << "total_tokens=" << report.total_tokens << '\n'
            << "rare_class_threshold=" << report.rare_threshold << '\n'
            << "rare_classes=" << report.rare_classes << '\n';
    if (!summary.flush()) throw IoError("summary.txt write failed");
}

} // namespace hwforge
