// hwforge: synthetic handwritten-word image corpus generator.
//
// Subcommands: fonts (catalog listing), estimate (pixel model from reference
// images), generate (full corpus), preview (a few samples for eyeballing),
// analyze (word-frequency / Zipf report).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hwforge/hwforge.hpp"

namespace fs = std::filesystem;
using namespace hwforge;

namespace {

std::string config_help_epilog() {
    std::string out = "Configuration keys (config file sections / --set overrides):\n";
    for (const auto& def : config_schema()) {
        std::string line = "  ";
        line += def.section;
        line += '.';
        line += def.key;
        while (line.size() < 28) line += ' ';
        line += "default=";
        line += def.default_value[0] ? def.default_value : "(unset)";
        while (line.size() < 48) line += ' ';
        line += def.help;
        out += line;
        out += '\n';
    }
    return out;
}

Config load_config(const std::string& config_path, const std::vector<std::string>& overrides) {
    Config cfg = config_path.empty() ? Config::defaults() : Config::from_file(config_path);
    for (const auto& o : overrides) cfg.apply_override(o);
    return cfg;
}

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("HWFORGE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 0; // builder default: hardware concurrency
}

int run_fonts(const std::string& dir, bool recursive, const std::string& output) {
    const FontCatalog catalog = scan_fonts(dir, recursive);
    for (const auto& [path, reason] : catalog.skipped)
        std::cerr << "skipped " << path << ": " << reason << "\n";
    const std::string listing = catalog_listing(catalog);
    if (output.empty()) {
        std::cout << listing;
    } else {
        std::ofstream out(output, std::ios::binary);
        if (!out) throw IoError("cannot write listing: " + output);
        out << listing;
    }
    std::cerr << catalog.size() << " fonts, " << catalog.skipped.size() << " skipped\n";
    return 0;
}

int run_estimate(const std::string& ref_dir, const std::string& output) {
    std::vector<fs::path> files;
    std::error_code ec;
    for (auto it = fs::directory_iterator(ref_dir, ec); !ec && it != fs::directory_iterator();
         it.increment(ec)) {
        if (it->is_regular_file() && it->path().extension() == ".png")
            files.push_back(it->path());
    }
    if (ec) throw IoError("cannot read reference dir: " + ref_dir);
    std::sort(files.begin(), files.end());

    std::vector<GrayImage> images;
    images.reserve(files.size());
    for (const auto& f : files) images.push_back(png_read_gray(f));

    std::vector<std::string> warnings;
    const PixelModel model =
        estimate_pixel_model(images, "estimated:" + ref_dir, &warnings);
    for (const auto& w : warnings) std::cerr << w << "\n";
    save_pixel_model(output, model);
    std::cerr << "estimated from " << images.size() << " images -> " << output << "\n";
    std::cout << serialize_pixel_model(model);
    return 0;
}

int run_generate(const Config& cfg, int threads, bool dry_run) {
    const GeneratorConfig config = make_generator_config(cfg);
    if (dry_run) {
        const Vocabulary vocab = load_vocabulary(config.vocabulary_path);
        const FontCatalog catalog = scan_fonts(config.fonts_dir, config.fonts_recursive);
        const PlanResult result = plan(vocab, catalog, config);
        for (const auto& [word, reason] : result.skipped_words)
            std::cerr << "skip word '" << word << "': " << reason << "\n";
        std::cout << "planned_samples=" << result.entries.size() << "\n"
                  << "skipped_words=" << result.skipped_words.size() << "\n"
                  << "replacement_words=" << result.replacement_words << "\n";
        return 0;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const GenerateResult result = generate_corpus(
        config, resolve_threads(threads), [](std::size_t done, std::size_t total) {
            std::cerr << "progress: " << done << "/" << total << "\n";
        });
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (const auto& [word, reason] : result.plan_info.skipped_words)
        std::cerr << "skipped word '" << word << "': " << reason << "\n";
    if (result.plan_info.replacement_words > 0)
        std::cerr << "warning: " << result.plan_info.replacement_words
                  << " word(s) drew fonts with replacement (eligible < per_word)\n";
    for (const auto& [index, reason] : result.render_skips)
        std::cerr << "skipped sample " << index << ": " << reason << "\n";

    const std::size_t n = result.manifest.rows.size();
    std::cout << "images=" << n << "\n"
              << "manifest=" << result.manifest_path.string() << "\n"
              << "seconds=" << secs << "\n"
              << "images_per_second=" << (secs > 0 ? static_cast<double>(n) / secs : 0) << "\n";
    return 0;
}

int run_preview(const Config& cfg, const std::string& words_csv, int count,
                std::string out_dir) {
    const GeneratorConfig config = make_generator_config(cfg);
    if (config.fonts_dir.empty())
        throw UsageError(Errc::invalid_argument, "config fonts.dir is not set");
    const FontCatalog catalog = scan_fonts(config.fonts_dir, config.fonts_recursive);
    if (out_dir.empty()) out_dir = config.output_dir;

    std::vector<std::string> words;
    std::size_t start = 0;
    while (start <= words_csv.size()) {
        const auto comma = words_csv.find(',', start);
        const std::string w =
            words_csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!w.empty()) words.push_back(w);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (words.empty())
        throw UsageError(Errc::invalid_argument, "preview needs --words w1,w2,...");

    const fs::path root = fs::path(out_dir) / "preview";
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw IoError("cannot create preview dir: " + root.string());

    std::int64_t index = 0;
    for (const auto& word : words) {
        Rng stream(sample_seed(config.master_seed ^ 0x70726576ull /*prev*/, index));
        const std::vector<int> font_ids = sample_fonts(catalog, word, count, stream);
        for (int i = 0; i < count; ++i) {
            const GeneratedSample sample =
                generate_sample(index, word, font_ids[static_cast<std::size_t>(i)], config, catalog);
            const fs::path file = root / (word + "_" + std::to_string(i) + ".png");
            png_write_gray(file, sample.image);
            std::cout << file.string() << "\n";
            ++index;
        }
    }
    return 0;
}

int run_analyze(const std::string& input, const std::string& out_dir, std::uint64_t threshold,
                bool fold_case) {
    const std::vector<std::string> tokens = load_tokens(input, fold_case);
    const FrequencyTable table = word_frequency(tokens);
    const ZipfReport report = zipf_report(table, threshold);
    write_zipf_report(report, out_dir);
    std::cout << "vocabulary_size=" << report.vocabulary_size << "\n"
              << "total_tokens=" << report.total_tokens << "\n"
              << "rare_classes(<" << report.rare_threshold << ")=" << report.rare_classes << "\n"
              << "report=" << (fs::path(out_dir) / "zipf.tsv").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hwforge: synthetic handwritten-word image corpus generator"};
    app.require_subcommand(1);
    app.footer(config_help_epilog());

    // fonts
    auto* fonts_cmd = app.add_subcommand("fonts", "scan a directory and list the font catalog");
    std::string fonts_dir, fonts_out;
    bool fonts_recursive = false;
    fonts_cmd->add_option("dir", fonts_dir, "font directory")->required();
    fonts_cmd->add_flag("--recursive", fonts_recursive, "scan recursively");
    fonts_cmd->add_option("-o,--output", fonts_out, "write listing to a file instead of stdout");

    // estimate
    auto* est_cmd = app.add_subcommand("estimate", "estimate a pixel model from reference PNGs");
    std::string est_dir, est_out = "model.txt";
    est_cmd->add_option("ref_dir", est_dir, "directory of reference PNG images")->required();
    est_cmd->add_option("-o,--output", est_out, "pixel model output file");

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "generate the synthetic corpus");
    std::string gen_config;
    std::vector<std::string> gen_overrides;
    int gen_threads = 0;
    bool gen_dry = false;
    gen_cmd->add_option("-c,--config", gen_config, "configuration file");
    gen_cmd->add_option("--set", gen_overrides, "override a config key (key=value)");
    gen_cmd->add_option("--threads", gen_threads, "worker threads (default: cores, or HWFORGE_THREADS)");
    gen_cmd->add_flag("--dry-run", gen_dry, "plan only; print sample counts without rendering");
    gen_cmd->footer(config_help_epilog());

    // preview
    auto* prev_cmd = app.add_subcommand("preview", "render a handful of samples for inspection");
    std::string prev_config, prev_words, prev_out;
    std::vector<std::string> prev_overrides;
    int prev_n = 5;
    prev_cmd->add_option("-c,--config", prev_config, "configuration file");
    prev_cmd->add_option("--set", prev_overrides, "override a config key (key=value)");
    prev_cmd->add_option("--words", prev_words, "comma-separated words to render")->required();
    prev_cmd->add_option("-n", prev_n, "samples per word");
    prev_cmd->add_option("-o,--output", prev_out, "output directory (default: config output.dir)");

    // analyze
    auto* ana_cmd = app.add_subcommand("analyze", "word-frequency / Zipf report");
    std::string ana_input, ana_out = ".";
    std::uint64_t ana_threshold = 20;
    bool ana_fold = false;
    ana_cmd->add_option("input", ana_input, "word-per-line file or generated manifest")->required();
    ana_cmd->add_option("-o,--output", ana_out, "output directory for zipf.tsv and summary.txt");
    ana_cmd->add_option("--threshold", ana_threshold, "rare-class threshold");
    ana_cmd->add_flag("--fold-case", ana_fold, "lowercase ASCII before counting");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*fonts_cmd) return run_fonts(fonts_dir, fonts_recursive, fonts_out);
        if (*est_cmd) return run_estimate(est_dir, est_out);
        if (*gen_cmd) return run_generate(load_config(gen_config, gen_overrides), gen_threads, gen_dry);
        if (*prev_cmd) return run_preview(load_config(prev_config, prev_overrides), prev_words, prev_n, prev_out);
        if (*ana_cmd) return run_analyze(ana_input, ana_out, ana_threshold, ana_fold);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
