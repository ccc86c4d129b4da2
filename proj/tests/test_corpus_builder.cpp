#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <unordered_set>

#include "hwforge/corpus_builder.hpp"
#include "support/fixtures.hpp"

using namespace hwforge;
using hwtest::TempDir;

namespace {

// Hermetic generator setup over gridfont fixtures.
struct Rig {
    TempDir tmp;
    std::filesystem::path fonts_dir;
    std::filesystem::path vocab_path;
    std::filesystem::path out_dir;

    Rig(const std::vector<std::string>& words, int n_fonts = 3) {
        fonts_dir = tmp.path() / "fonts";
        std::filesystem::create_directories(fonts_dir);
        const std::string font = hwtest::build_alnum_gridfont(6, 8);
        for (int i = 0; i < n_fonts; ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "f%02d.gridfont", i);
            hwtest::write_file(fonts_dir / name, font);
        }
        vocab_path = tmp.path() / "words.txt";
        std::string content;
        for (const auto& w : words) content += w + "\n";
        hwtest::write_file(vocab_path, content);
        out_dir = tmp.path() / "out";
    }

    GeneratorConfig config(int k, std::uint64_t seed = 42) const {
        Config cfg = Config::defaults();
        cfg.apply_override("vocabulary=" + vocab_path.string());
        cfg.apply_override("fonts.dir=" + fonts_dir.string());
        cfg.apply_override("per_word=" + std::to_string(k));
        cfg.apply_override("master_seed=" + std::to_string(seed));
        cfg.apply_override("output.dir=" + out_dir.string());
        cfg.apply_override("font_size_px=8"); // gridfonts are pixel-native anyway
        cfg.apply_override("shard_size=4");
        return make_generator_config(cfg);
    }
};

std::map<std::string, std::string> slurp_tree(const std::filesystem::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root))
        if (entry.is_regular_file())
            files[std::filesystem::relative(entry.path(), root).generic_string()] =
                hwtest::read_file(entry.path());
    return files;
}

} // namespace

TEST_CASE("load_vocabulary trims, dedups and preserves order and case", "[corpus_builder]") {
    TempDir tmp;
    const auto path = tmp.path() / "v.txt";
    hwtest::write_file(path, "cat\ndog\ncat\n  Bird \n\n\ndog\n");
    const Vocabulary v = load_vocabulary(path);
    REQUIRE(v.words.size() == 3);
    CHECK(v.words[0] == "cat");
    CHECK(v.words[1] == "dog");
    CHECK(v.words[2] == "Bird");
}

TEST_CASE("load_vocabulary error paths", "[corpus_builder]") {
    TempDir tmp;
    SECTION("blank-only file") {
        const auto path = tmp.path() / "blank.txt";
        hwtest::write_file(path, "\n   \n\t\n");
        try {
            load_vocabulary(path);
            FAIL("expected EmptyVocabulary");
        } catch (const DataError& e) {
            CHECK(e.code() == Errc::empty_vocabulary);
        }
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(load_vocabulary(tmp.path() / "nope.txt"), IoError);
    }
    SECTION("invalid UTF-8") {
        const auto path = tmp.path() / "bad.txt";
        hwtest::write_file(path, std::string("ok\n\xFF\xFE broken\n"));
        try {
            load_vocabulary(path);
            FAIL("expected Utf8Error");
        } catch (const DataError& e) {
            CHECK(e.code() == Errc::utf8_error);
        }
    }
}

TEST_CASE("plan assigns dense indices in vocabulary order", "[corpus_builder]") {
    Rig rig({"ant", "bee", "cow", "dog", "elk", "fox", "gnu", "hen", "owl", "pig"});
    const GeneratorConfig config = rig.config(3);
    const Vocabulary vocab = load_vocabulary(config.vocabulary_path);
    const FontCatalog catalog = scan_fonts(config.fonts_dir);

    const PlanResult result = plan(vocab, catalog, config);
    REQUIRE(result.entries.size() == 30);
    for (std::size_t i = 0; i < result.entries.size(); ++i) {
        CHECK(result.entries[i].sample_index == static_cast<std::int64_t>(i));
        CHECK(result.entries[i].word_index == static_cast<int>(i / 3));
        CHECK(result.entries[i].slot_index == static_cast<int>(i % 3));
    }
    CHECK(result.skipped_words.empty());
}

TEST_CASE("plan skips words no font can render and reports them", "[corpus_builder]") {
    Rig rig({"cat", "∑x"});
    const GeneratorConfig config = rig.config(2);
    const Vocabulary vocab = load_vocabulary(config.vocabulary_path);
    const FontCatalog catalog = scan_fonts(config.fonts_dir);

    const PlanResult result = plan(vocab, catalog, config);
    CHECK(result.entries.size() == 2);
    REQUIRE(result.skipped_words.size() == 1);
    CHECK(result.skipped_words[0].first == "∑x");
}

TEST_CASE("plan is deterministic in the master seed", "[corpus_builder]") {
    Rig rig({"one", "two", "three"});
    const Vocabulary vocab = load_vocabulary(rig.vocab_path);
    const FontCatalog catalog = scan_fonts(rig.fonts_dir);

    const PlanResult a = plan(vocab, catalog, rig.config(5, 9));
    const PlanResult b = plan(vocab, catalog, rig.config(5, 9));
    const PlanResult c = plan(vocab, catalog, rig.config(5, 10));
    REQUIRE(a.entries.size() == b.entries.size());
    bool same = true, any_diff = false;
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        same = same && a.entries[i].font_id == b.entries[i].font_id;
        any_diff = any_diff || a.entries[i].font_id != c.entries[i].font_id;
    }
    CHECK(same);
    CHECK(any_diff); // different seed reshuffles font choices
}

TEST_CASE("sample_seed matches the SplitMix64 reference and is collision-free",
          "[corpus_builder]") {
    SECTION("published first output for seed 0") {
        CHECK(sample_seed(0, 0) == 0xE220A8397B1DCDAFull);
        // independently: one reference SplitMix64 step from state 0
        SplitMix64 sm(0);
        CHECK(sample_seed(0, 0) == sm.next());
    }
    SECTION("pure function") {
        CHECK(sample_seed(42, 7) == sample_seed(42, 7));
        CHECK(sample_seed(42, 7) == 0xB4346C5A4AC089C3ull);
    }
    SECTION("no collisions over 10^6 indices") {
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(2000000);
        for (std::uint64_t i = 0; i < 1000000; ++i)
            REQUIRE(seen.insert(sample_seed(12345, i)).second);
    }
}

TEST_CASE("generate_sample is bit-reproducible", "[corpus_builder]") {
    Rig rig({"seed"});
    const GeneratorConfig config = rig.config(1);
    const FontCatalog catalog = scan_fonts(config.fonts_dir);
    const GeneratedSample a = generate_sample(0, "seed", 1, config, catalog);
    const GeneratedSample b = generate_sample(0, "seed", 1, config, catalog);
    CHECK(a.image == b.image);
    CHECK(a.record.sample_seed == b.record.sample_seed);
    CHECK(a.record.kerning_px == b.record.kerning_px);
    CHECK(a.record.rotation_deg == b.record.rotation_deg);
}

TEST_CASE("identity pipeline equals the recolored rasterization", "[corpus_builder]") {
    Rig rig({"flat"});
    Config cfg = Config::defaults();
    cfg.apply_override("vocabulary=" + rig.vocab_path.string());
    cfg.apply_override("fonts.dir=" + rig.fonts_dir.string());
    cfg.apply_override("output.dir=" + rig.out_dir.string());
    cfg.apply_override("kern_min=0");
    cfg.apply_override("kern_max=0");
    cfg.apply_override("stroke_min=0");
    cfg.apply_override("stroke_max=0");
    cfg.apply_override("rot_min=0");
    cfg.apply_override("rot_max=0");
    cfg.apply_override("shear_min=0");
    cfg.apply_override("shear_max=0");
    cfg.apply_override("pad_max=0");
    cfg.apply_override("sigma=0");
    cfg.apply_override("fg_std=0");
    cfg.apply_override("bg_std=0");
    cfg.apply_override("fg_mean=60");
    cfg.apply_override("bg_mean=215");
    const GeneratorConfig config = make_generator_config(cfg);
    const FontCatalog catalog = scan_fonts(config.fonts_dir);

    const GeneratedSample sample = generate_sample(5, "flat", 0, config, catalog);

    RenderSpec spec;
    spec.font_id = 0;
    spec.font_size_px = config.font_size_px;
    const FontEntry& font = catalog.entries[0];
    const BinaryMask mask = rasterize(layout("flat", *font.face, spec), *font.face, spec.font_size_px);
    REQUIRE(sample.image.width == mask.width);
    REQUIRE(sample.image.height == mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            REQUIRE(sample.image.at(x, y) == (mask.get(x, y) ? 60 : 215));
}

TEST_CASE("degenerate-config sample dimensions follow layout arithmetic", "[corpus_builder]") {
    // advance-10 fixture, word "abc", kerning pinned to 2: ink width
    // = 2*(10+2) + 10 = 34, height 10; the mask adds a 1-px margin.
    TempDir tmp;
    const auto fonts = tmp.path() / "fonts";
    std::filesystem::create_directories(fonts);
    hwtest::write_file(fonts / "u.gridfont", hwtest::kGridUniform10);
    const auto vocab_path = tmp.path() / "v.txt";
    hwtest::write_file(vocab_path, "abc\n");

    Config cfg = Config::defaults();
    cfg.apply_override("vocabulary=" + vocab_path.string());
    cfg.apply_override("fonts.dir=" + fonts.string());
    cfg.apply_override("kern_min=2");
    cfg.apply_override("kern_max=2");
    cfg.apply_override("stroke_min=0");
    cfg.apply_override("stroke_max=0");
    cfg.apply_override("rot_min=0");
    cfg.apply_override("rot_max=0");
    cfg.apply_override("shear_min=0");
    cfg.apply_override("shear_max=0");
    cfg.apply_override("pad_max=0");
    cfg.apply_override("sigma=0");
    const GeneratorConfig config = make_generator_config(cfg);
    const FontCatalog catalog = scan_fonts(config.fonts_dir);

    const GeneratedSample s = generate_sample(0, "abc", 0, config, catalog);
    CHECK(s.image.width == 34 + 2);
    CHECK(s.image.height == 10 + 2);
    CHECK(s.record.kerning_px == 2);
    CHECK(s.record.label == "abc");
}

TEST_CASE("generate_corpus writes images, manifest and cleans the marker", "[corpus_builder]") {
    Rig rig({"ant", "bee", "cow", "dog", "elk"});
    const GeneratorConfig config = rig.config(2);

    const GenerateResult result = generate_corpus(config, 2);
    CHECK(result.manifest.rows.size() == 10);
    CHECK(result.plan_info.entries.size() == 10);
    CHECK(result.render_skips.empty());
    CHECK_FALSE(std::filesystem::exists(rig.out_dir / "INCOMPLETE"));
    CHECK(std::filesystem::exists(rig.out_dir / "manifest.tsv"));
    // shard_size=4: indices 0..9 span shard_0..shard_2
    CHECK(std::filesystem::exists(rig.out_dir / "shard_0" / "0.png"));
    CHECK(std::filesystem::exists(rig.out_dir / "shard_1" / "4.png"));
    CHECK(std::filesystem::exists(rig.out_dir / "shard_2" / "9.png"));
    for (const auto& row : result.manifest.rows)
        CHECK(std::filesystem::exists(rig.out_dir / row.image_path));
}

TEST_CASE("rerun and thread-count variation are byte-identical", "[corpus_builder]") {
    Rig rig({"red", "green", "blue", "cyan"});
    const GeneratorConfig config = rig.config(3);

    generate_corpus(config, 1);
    const auto first = slurp_tree(rig.out_dir);
    REQUIRE(first.count("manifest.tsv") == 1);

    generate_corpus(config, 4);
    const auto second = slurp_tree(rig.out_dir);
    REQUIRE(first.size() == second.size());
    for (const auto& [name, bytes] : first) {
        REQUIRE(second.count(name) == 1);
        REQUIRE(second.at(name) == bytes);
    }
}

TEST_CASE("manifest rows replay to bit-identical images", "[corpus_builder]") {
    Rig rig({"play", "back"});
    const GeneratorConfig config = rig.config(2);
    generate_corpus(config, 2);

    const CorpusManifest manifest = parse_manifest(rig.out_dir / "manifest.tsv");
    REQUIRE(manifest.rows.size() == 4);
    CHECK(manifest.config_digest == config.config_digest);
    const FontCatalog catalog = scan_fonts(config.fonts_dir);
    for (const auto& row : manifest.rows) {
        const GeneratedSample replayed =
            generate_sample(row.sample_index, row.label, row.font_id, config, catalog);
        CHECK(replayed.record.sample_seed == row.sample_seed);
        CHECK(replayed.record.kerning_px == row.kerning_px);
        // regenerate the PNG bytes and compare against the file on disk
        TempDir scratch;
        const auto png_path = scratch.path() / "replay.png";
        png_write_gray(png_path, replayed.image);
        CHECK(hwtest::read_file(png_path) == hwtest::read_file(rig.out_dir / row.image_path));
    }
}

TEST_CASE("normalize_height rescales every output image", "[corpus_builder]") {
    Rig rig({"tall", "word"});
    Config cfg = Config::defaults();
    cfg.apply_override("vocabulary=" + rig.vocab_path.string());
    cfg.apply_override("fonts.dir=" + rig.fonts_dir.string());
    cfg.apply_override("output.dir=" + rig.out_dir.string());
    cfg.apply_override("per_word=2");
    cfg.apply_override("normalize_height=24");
    const GeneratorConfig config = make_generator_config(cfg);

    const GenerateResult result = generate_corpus(config, 2);
    REQUIRE(result.manifest.rows.size() == 4);
    for (const auto& row : result.manifest.rows) {
        const GrayImage img = png_read_gray(rig.out_dir / row.image_path);
        CHECK(img.height == 24);
        CHECK(img.width >= 1);
    }
}

TEST_CASE("render-stage skips keep rows + skips == planned", "[corpus_builder]") {
    // a glyph whose ink is one isolated pixel: erosion radius 1 empties it
    TempDir tmp;
    const auto fonts = tmp.path() / "fonts";
    std::filesystem::create_directories(fonts);
    hwtest::write_file(fonts / "dot.gridfont",
                       "advance=5 height=5\n"
                       "glyph=a\n"
                       ".....\n.....\n..#..\n.....\n.....\n"
                       "glyph=b\n"
                       "#####\n#####\n#####\n#####\n#####\n");
    const auto vocab = tmp.path() / "v.txt";
    hwtest::write_file(vocab, "a\nb\n");

    Config cfg = Config::defaults();
    cfg.apply_override("vocabulary=" + vocab.string());
    cfg.apply_override("fonts.dir=" + fonts.string());
    cfg.apply_override("output.dir=" + (tmp.path() / "out").string());
    cfg.apply_override("per_word=3");
    cfg.apply_override("stroke_min=-1");
    cfg.apply_override("stroke_max=-1"); // erosion always on
    const GeneratorConfig config = make_generator_config(cfg);

    const GenerateResult result = generate_corpus(config, 2);
    // word "a" renders to a lone pixel; erosion removes it in all 3 samples
    CHECK(result.render_skips.size() == 3);
    CHECK(result.manifest.rows.size() == 3); // word "b" survives erosion
    CHECK(result.manifest.rows.size() + result.render_skips.size() ==
          result.plan_info.entries.size());
    for (const auto& row : result.manifest.rows) CHECK(row.label == "b");
}

TEST_CASE("I/O failure aborts and leaves the INCOMPLETE marker", "[corpus_builder]") {
    Rig rig({"fail"});
    const GeneratorConfig config = rig.config(2);
    // occupy the first image path with a directory so the PNG write fails
    std::filesystem::create_directories(rig.out_dir / "shard_0" / "0.png");
    CHECK_THROWS_AS(generate_corpus(config, 2), IoError);
    CHECK(std::filesystem::exists(rig.out_dir / "INCOMPLETE"));
}

TEST_CASE("configuration errors abort before any output", "[corpus_builder]") {
    Rig rig({"never"});
    GeneratorConfig config = rig.config(1);
    config.vocabulary_path = (rig.tmp.path() / "missing.txt").string();
    CHECK_THROWS_AS(generate_corpus(config, 1), IoError);
    CHECK_FALSE(std::filesystem::exists(rig.out_dir));
}

TEST_CASE("manifest serialization round-trips", "[corpus_builder]") {
    CorpusManifest m;
    m.config_digest = 0x0123456789ABCDEFull;
    m.tool_version = "0.1.0";
    m.catalog_digest = 0xFEDCBA9876543210ull;
    SampleRecord r;
    r.sample_index = 7;
    r.image_path = "shard_0/7.png";
    r.label = "word";
    r.font_id = 3;
    r.font_size_px = 64;
    r.kerning_px = -2;
    r.stroke_delta = 1;
    r.rotation_deg = -4.25;
    r.shear = 0.125;
    r.pad_left = 1;
    r.pad_right = 2;
    r.pad_top = 3;
    r.pad_bottom = 4;
    r.sample_seed = 0xDEADBEEFCAFEBABEull;
    m.rows.push_back(r);

    hwtest::TempDir tmp;
    const auto path = tmp.path() / "manifest.tsv";
    hwtest::write_file(path, serialize_manifest(m));
    const CorpusManifest back = parse_manifest(path);
    REQUIRE(back.rows.size() == 1);
    CHECK(back.config_digest == m.config_digest);
    CHECK(back.catalog_digest == m.catalog_digest);
    CHECK(back.tool_version == "0.1.0");
    CHECK(back.rows[0].sample_index == 7);
    CHECK(back.rows[0].image_path == "shard_0/7.png");
    CHECK(back.rows[0].label == "word");
    CHECK(back.rows[0].rotation_deg == -4.25);
    CHECK(back.rows[0].shear == 0.125);
    CHECK(back.rows[0].sample_seed == r.sample_seed);
}

TEST_CASE("serialized manifest prints reals to 6 decimals", "[corpus_builder]") {
    CorpusManifest m;
    m.tool_version = "0.1.0";
    SampleRecord r;
    r.image_path = "shard_0/0.png";
    r.label = "x";
    r.rotation_deg = 1.0 / 3.0;
    r.shear = -0.1;
    m.rows.push_back(r);
    const std::string text = serialize_manifest(m);
    CHECK(text.find("\t0.333333\t") != std::string::npos);
    CHECK(text.find("\t-0.100000\t") != std::string::npos);
    CHECK(text.find("# columns=sample_index\timage_path\tlabel") != std::string::npos);
}
