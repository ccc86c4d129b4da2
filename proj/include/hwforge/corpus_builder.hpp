#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <vector>

#include "hwforge/config.hpp"
#include "hwforge/corpus_types.hpp"
#include "hwforge/font_catalog.hpp"
#include "hwforge/geometry.hpp"
#include "hwforge/png_io.hpp"
#include "hwforge/typesetter.hpp"
#include "hwforge/utf8.hpp"
#include "hwforge/version.hpp"

namespace hwforge {

// One word per line, UTF-8. Lines are trimmed, empties dropped, duplicates
// dropped keeping the first occurrence, case preserved verbatim.
inline Vocabulary load_vocabulary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open vocabulary: " + path.string());
    Vocabulary vocab;
    vocab.source = path.generic_string();
    std::unordered_set<std::string> seen;
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t\r\n\f\v");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r\n\f\v");
        std::string word = line.substr(b, e - b + 1);
        if (!utf8_valid(word))
            throw DataError(Errc::utf8_error, "vocabulary is not valid UTF-8: " + path.string());
        if (seen.insert(word).second) vocab.words.push_back(std::move(word));
    }
    if (in.bad()) throw IoError("read failed: " + path.string());
    if (vocab.words.empty())
        throw DataError(Errc::empty_vocabulary, "no words in " + path.string());
    return vocab;
}

// Per-sample seed: SplitMix64 finalizer over the master seed XOR the
// golden-ratio-scrambled sample index. sample_seed(0, 0) is exactly the
// first output of reference SplitMix64 seeded with 0.
inline std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t sample_index) {
    return splitmix64_finalize(master_seed ^ (kGoldenGamma * (sample_index + 1)));
}

namespace detail {
// Domain separator so per-word font-sampling streams never reuse a
// per-sample stream seed ("plan" in ASCII).
inline constexpr std::uint64_t kPlanDomain = 0x706C616Eull;
} // namespace detail

// For each vocabulary word in order, draws k fonts from the eligible set
// with a stream derived from (master_seed, word_index). Words no font can
// render are skipped and reported; sample indices are assigned densely in
// plan order.
inline PlanResult plan(const Vocabulary& vocab, const FontCatalog& catalog,
                       const GeneratorConfig& config) {
    if (vocab.words.empty()) throw DataError(Errc::empty_vocabulary, "plan: empty vocabulary");
    if (catalog.empty()) throw DataError(Errc::empty_catalog, "plan: empty catalog");

    PlanResult result;
    std::int64_t next_index = 0;
    for (std::size_t w = 0; w < vocab.words.size(); ++w) {
        Rng stream(sample_seed(config.master_seed ^ detail::kPlanDomain, w));
        bool used_replacement = false;
        std::vector<int> font_ids;
        try {
            font_ids = sample_fonts(catalog, vocab.words[w], config.fonts_per_word, stream,
                                    &used_replacement);
        } catch (const DataError& e) {
            if (e.code() != Errc::no_eligible_font) throw;
            result.skipped_words.emplace_back(vocab.words[w], "no eligible font");
            continue;
        }
        if (used_replacement) ++result.replacement_words;
        for (int slot = 0; slot < config.fonts_per_word; ++slot) {
            result.entries.push_back(PlanEntry{next_index++, static_cast<int>(w), slot,
                                               font_ids[static_cast<std::size_t>(slot)]});
        }
    }
    return result;
}

inline std::string shard_relative_path(std::int64_t sample_index, int shard_size,
                                       std::string_view format) {
    return "shard_" + std::to_string(sample_index / shard_size) + "/" +
           std::to_string(sample_index) + "." + std::string(format);
}

// Runs the full per-sample pipeline off one deterministic stream:
// render spec -> layout -> rasterize -> stroke -> pixel model -> smoothing
// -> augment -> affine -> pad. Every randomized value lands in the record.
inline GeneratedSample generate_sample(std::int64_t sample_index, std::string_view word,
                                       int font_id, const GeneratorConfig& config,
                                       const FontCatalog& catalog) {
    const std::uint64_t seed = sample_seed(config.master_seed, static_cast<std::uint64_t>(sample_index));
    Rng stream(seed);

    RenderSpec spec;
    spec.font_id = font_id;
    spec.font_size_px = config.font_size_px;
    spec.kerning_px = static_cast<int>(stream.uniform_int(config.kern_min, config.kern_max));
    spec.stroke_delta = static_cast<int>(stream.uniform_int(config.stroke_min, config.stroke_max));

    const FontEntry& font = catalog.entries.at(static_cast<std::size_t>(font_id));
    const Layout lay = layout(word, *font.face, spec);
    BinaryMask mask = rasterize(lay, *font.face, spec.font_size_px);
    mask = adjust_stroke(mask, spec.stroke_delta);
    if (mask.ink_count() == 0)
        throw DataError(Errc::zero_ink, "stroke erosion removed all ink");

    GrayImage img = apply_pixel_model(mask, config.model, stream);
    img = gaussian_smooth(img, config.sigma);
    const AugmentParams aug = sample_augment(config.augment, stream);
    img = apply_affine(img, aug.rotation_deg, aug.shear, config.model, stream,
                       config.augment.shear_unit);
    img = pad(img, aug, config.model, stream);
    if (config.normalize_height > 0) img = resize_to_height(img, config.normalize_height);

    GeneratedSample out;
    out.image = std::move(img);
    out.record = SampleRecord{sample_index,
                              shard_relative_path(sample_index, config.shard_size, config.image_format),
                              std::string(word),
                              font_id,
                              spec.font_size_px,
                              spec.kerning_px,
                              spec.stroke_delta,
                              aug.rotation_deg,
                              aug.shear,
                              aug.pad_left,
                              aug.pad_right,
                              aug.pad_top,
                              aug.pad_bottom,
                              seed};
    return out;
}

inline GeneratedSample generate_sample(const PlanEntry& entry, const Vocabulary& vocab,
                                       const GeneratorConfig& config, const FontCatalog& catalog) {
    return generate_sample(entry.sample_index, vocab.words.at(static_cast<std::size_t>(entry.word_index)),
                           entry.font_id, config, catalog);
}

struct GenerateResult {
    CorpusManifest manifest;
    PlanResult plan_info;
    std::vector<std::pair<std::int64_t, std::string>> render_skips; // (sample_index, reason)
    std::filesystem::path manifest_path;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// End-to-end generation with a bounded worker pool. Workers pull plan
// entries from an atomic cursor and write their own image files; records are
// stored into per-entry slots, so output bytes are independent of thread
// count and scheduling. The manifest write is the single serialization
// point.
inline GenerateResult generate_corpus(const GeneratorConfig& config, int threads = 0,
                                      const ProgressFn& progress = {}) {
    namespace fs = std::filesystem;
    if (config.vocabulary_path.empty())
        throw UsageError(Errc::invalid_argument, "config run.vocabulary is not set");
    if (config.fonts_dir.empty())
        throw UsageError(Errc::invalid_argument, "config fonts.dir is not set");
    if (config.output_dir.empty())
        throw UsageError(Errc::invalid_argument, "config output.dir is not set");

    // Everything that can fail from configuration happens before any output.
    const Vocabulary vocab = load_vocabulary(config.vocabulary_path);
    const FontCatalog catalog = scan_fonts(config.fonts_dir, config.fonts_recursive);

    GenerateResult result;
    result.plan_info = plan(vocab, catalog, config);
    const auto& entries = result.plan_info.entries;

    const fs::path out_root(config.output_dir);
    std::error_code ec;
    fs::create_directories(out_root, ec);
    if (ec) throw IoError("cannot create output dir: " + out_root.string());
    if (!entries.empty()) {
        const std::int64_t last_shard = entries.back().sample_index / config.shard_size;
        for (std::int64_t s = 0; s <= last_shard; ++s) {
            fs::create_directories(out_root / ("shard_" + std::to_string(s)), ec);
            if (ec) throw IoError("cannot create shard dir under " + out_root.string());
        }
    }
    const fs::path marker = out_root / "INCOMPLETE";
    {
        std::ofstream m(marker);
        m << "run in progress or aborted; delete outputs and regenerate\n";
    }

    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = std::min<int>(threads, std::max<std::size_t>(entries.size(), 1));

    std::vector<std::optional<SampleRecord>> slots(entries.size());
    std::vector<std::pair<std::int64_t, std::string>> skips;
    std::atomic<std::size_t> cursor{0};
    std::atomic<std::size_t> done{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex sink_mutex;

    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = cursor.fetch_add(1, std::memory_order_relaxed);
            if (i >= entries.size()) break;
            try {
                GeneratedSample sample = generate_sample(entries[i], vocab, config, catalog);
                png_write_gray(out_root / sample.record.image_path, sample.image);
                slots[i] = std::move(sample.record);
            } catch (const DataError& e) {
                if (e.code() == Errc::zero_ink) {
                    std::lock_guard<std::mutex> lock(sink_mutex);
                    skips.emplace_back(entries[i].sample_index, e.what());
                } else {
                    std::lock_guard<std::mutex> lock(sink_mutex);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true, std::memory_order_relaxed);
                    return;
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(sink_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
            const std::size_t d = done.fetch_add(1, std::memory_order_relaxed) + 1;
            if (progress && (d % 250 == 0 || d == entries.size())) {
                std::lock_guard<std::mutex> lock(sink_mutex);
                progress(d, entries.size());
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);

    result.manifest.config_digest = config.config_digest;
    result.manifest.tool_version = kToolVersion;
    result.manifest.catalog_digest = catalog_digest(catalog);
    result.manifest.rows.reserve(entries.size());
    for (auto& slot : slots)
        if (slot) result.manifest.rows.push_back(std::move(*slot));

    std::sort(skips.begin(), skips.end());
    result.render_skips = std::move(skips);

    result.manifest_path = out_root / "manifest.tsv";
    {
        std::ofstream m(result.manifest_path, std::ios::binary);
        if (!m) throw IoError("cannot write manifest: " + result.manifest_path.string());
        m << serialize_manifest(result.manifest);
        if (!m.flush()) throw IoError("manifest write failed");
    }

    fs::remove(marker, ec);
    return result;
}

} // namespace hwforge
