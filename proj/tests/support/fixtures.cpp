#include "support/fixtures.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <sys/wait.h>

namespace hwtest {

namespace fs = std::filesystem;

TempDir::TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "hwforge_test_XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::string filled_glyph(char c, int advance, int height) {
    std::string out = "glyph=";
    out += c;
    out += '\n';
    for (int r = 0; r < height; ++r) out += std::string(static_cast<std::size_t>(advance), '#') + "\n";
    return out;
}

std::string blank_glyph(char c, int advance, int height) {
    std::string out = "glyph=";
    out += c;
    out += '\n';
    for (int r = 0; r < height; ++r) out += std::string(static_cast<std::size_t>(advance), '.') + "\n";
    return out;
}

} // namespace

const char* kGridUniform10 =
    "advance=10 height=10\n"
    "glyph=a\n"
    "##########\n##########\n##########\n##########\n##########\n"
    "##########\n##########\n##########\n##########\n##########\n"
    "glyph=b\n"
    "##########\n##########\n##########\n##########\n##########\n"
    "##########\n##########\n##########\n##########\n##########\n"
    "glyph=c\n"
    "##########\n##########\n##########\n##########\n##########\n"
    "##########\n##########\n##########\n##########\n##########\n";

const char* kGridSquare8 =
    "advance=8 height=8\n"
    "glyph=a\n"
    "########\n########\n########\n########\n"
    "########\n########\n########\n########\n";

const char* kGridWithSpace =
    "advance=6 height=6\n"
    "glyph=a\n"
    "######\n######\n######\n######\n######\n######\n"
    "glyph= \n"
    "......\n......\n......\n......\n......\n......\n";

std::string build_alnum_gridfont(int advance, int height) {
    std::string out = "advance=" + std::to_string(advance) + " height=" + std::to_string(height) + "\n";
    const std::string chars = "abcdefghijklmnopqrstuvwxyz0123456789";
    int index = 0;
    for (char c : chars) {
        out += "glyph=";
        out += c;
        out += '\n';
        // Solid block with one glyph-specific hole punched into it. Solid
        // ink survives the default stroke range (erosion radius 1), which a
        // sparse pattern would not.
        const int hx = 1 + index % std::max(1, advance - 2);
        const int hy = 1 + (index / std::max(1, advance - 2)) % std::max(1, height - 2);
        for (int r = 0; r < height; ++r) {
            for (int col = 0; col < advance; ++col)
                out += (r == hy && col == hx) ? '.' : '#';
            out += '\n';
        }
        ++index;
    }
    return out;
}

hwforge::FontCatalog synthetic_catalog(int n, const std::string& gridfont_text) {
    auto face = hwforge::GridFace::parse(gridfont_text, "synthetic");
    std::vector<std::pair<std::string, std::shared_ptr<const hwforge::Face>>> faces;
    faces.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "f%04d.gridfont", i);
        faces.emplace_back(name, face);
    }
    return hwforge::FontCatalog::from_faces(std::move(faces));
}

fs::path real_font_dir() { return HWFORGE_TEST_FONT_DIR; }

std::vector<fs::path> stage_real_fonts(const fs::path& dir, int count) {
    std::vector<fs::path> sources;
    for (const auto& entry : fs::directory_iterator(real_font_dir()))
        if (entry.is_regular_file() && entry.path().extension() == ".ttf")
            sources.push_back(entry.path());
    std::sort(sources.begin(), sources.end());
    if (sources.empty()) throw std::runtime_error("no real fonts found in test font dir");

    fs::create_directories(dir);
    std::vector<fs::path> out;
    int i = 0;
    while (static_cast<int>(out.size()) < count) {
        const fs::path& src = sources[static_cast<std::size_t>(i) % sources.size()];
        char name[64];
        std::snprintf(name, sizeof(name), "font_%02d_%s", i, src.filename().string().c_str());
        const fs::path dst = dir / name;
        fs::copy_file(src, dst, fs::copy_options::overwrite_existing);
        out.push_back(dst);
        ++i;
    }
    return out;
}

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(HWFORGE_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    std::string output;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, n);
    const int status = pclose(pipe);
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return CliResult{code, std::move(output)};
}

} // namespace hwtest
