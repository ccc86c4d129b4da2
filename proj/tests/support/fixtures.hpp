#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hwforge/font_catalog.hpp"
#include "hwforge/font_face.hpp"

namespace hwtest {

// Self-deleting temp directory for test artifacts.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// advance=10 height=10 font with fully-inked 'a','b','c' cells: layout
// arithmetic is exact (origins 0, 12, 24 for "aaa" at kerning 2).
extern const char* kGridUniform10;

// advance=8 height=8 font whose 'a' is a filled 8x8 square (ink area 64).
extern const char* kGridSquare8;

// 'a' filled plus a blank ' ' glyph (for the whitespace -> ZeroInk case).
extern const char* kGridWithSpace;

// Programmatic fixture: lowercase a-z and digits with per-glyph patterns.
std::string build_alnum_gridfont(int advance, int height);

// Catalog of `n` synthetic entries sharing one grid face (paths f0000...).
hwforge::FontCatalog synthetic_catalog(int n, const std::string& gridfont_text);

// Copies the DejaVu TTFs (and renamed duplicates) into `dir` until it holds
// `count` font files; returns the files created.
std::vector<std::filesystem::path> stage_real_fonts(const std::filesystem::path& dir, int count);

std::filesystem::path real_font_dir();

struct CliResult {
    int exit_code;
    std::string output; // stdout + stderr interleaved
};

CliResult run_cli(const std::string& args);

} // namespace hwtest
