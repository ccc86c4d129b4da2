#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hwforge/appearance.hpp"
#include "hwforge/digest.hpp"
#include "hwforge/error.hpp"
#include "hwforge/geometry.hpp"

namespace hwforge {

enum class ConfigType { integer, real, boolean, text };

struct ConfigKeyDef {
    const char* section;
    const char* key;
    ConfigType type;
    const char* default_value; // "" means empty / derived
    const char* help;
};

// Every configurable knob of the generator. kern_min/kern_max default to
// -0.05/+0.15 of the em size when not set explicitly.
inline const std::vector<ConfigKeyDef>& config_schema() {
    static const std::vector<ConfigKeyDef> schema = {
        {"run", "vocabulary", ConfigType::text, "", "word list, one word per line (UTF-8)"},
        {"run", "master_seed", ConfigType::integer, "1", "64-bit seed for the whole run"},
        {"fonts", "dir", ConfigType::text, "", "directory of TrueType/OpenType fonts"},
        {"fonts", "recursive", ConfigType::boolean, "false", "scan the font directory recursively"},
        {"fonts", "per_word", ConfigType::integer, "100", "fonts sampled per vocabulary word (k)"},
        {"render", "font_size_px", ConfigType::integer, "64", "nominal em size in pixels"},
        {"render", "kern_min", ConfigType::integer, "", "min extra inter-character gap, px (default -0.05*em)"},
        {"render", "kern_max", ConfigType::integer, "", "max extra inter-character gap, px (default +0.15*em)"},
        {"render", "stroke_min", ConfigType::integer, "-1", "min stroke delta (erosion radius when negative)"},
        {"render", "stroke_max", ConfigType::integer, "2", "max stroke delta (dilation radius)"},
        {"render", "normalize_height", ConfigType::integer, "0",
         "rescale final images to this height, aspect preserved (0 = off)"},
        {"appearance", "model", ConfigType::text, "", "pixel model file; empty uses the inline values"},
        {"appearance", "fg_mean", ConfigType::real, "60", "inline foreground mean intensity"},
        {"appearance", "fg_std", ConfigType::real, "8", "inline foreground std deviation"},
        {"appearance", "bg_mean", ConfigType::real, "215", "inline background mean intensity"},
        {"appearance", "bg_std", ConfigType::real, "12", "inline background std deviation"},
        {"appearance", "sigma", ConfigType::real, "0.8", "Gaussian smoothing sigma, px"},
        {"augment", "rot_min", ConfigType::real, "-5", "min rotation, degrees"},
        {"augment", "rot_max", ConfigType::real, "5", "max rotation, degrees"},
        {"augment", "shear_min", ConfigType::real, "-0.5", "min horizontal shear"},
        {"augment", "shear_max", ConfigType::real, "0.5", "max horizontal shear"},
        {"augment", "shear_unit", ConfigType::text, "degrees", "shear interpretation: degrees | factor"},
        {"augment", "pad_max", ConfigType::integer, "8", "max padding per side, px"},
        {"output", "dir", ConfigType::text, "out", "output root directory"},
        {"output", "shard_size", ConfigType::integer, "10000", "images per shard subdirectory"},
        {"output", "format", ConfigType::text, "png", "image file format tag"},
    };
    return schema;
}

// Raw key/value configuration with schema validation, override resolution,
// and a canonical serialized form (the basis of the config digest).
class Config {
public:
    static Config defaults() {
        Config c;
        for (const auto& def : config_schema())
            c.values_[full_key(def)] = def.default_value;
        return c;
    }

    // TOML-style subset: [section] headers, key = value pairs, # comments,
    // optionally double-quoted strings.
    static Config from_file(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open config: " + path.string());
        Config c = defaults();
        std::string line, section;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            if (t.front() == '[') {
                if (t.back() != ']')
                    throw UsageError(Errc::invalid_argument,
                                     "bad section header at line " + std::to_string(line_no));
                section = trim(t.substr(1, t.size() - 2));
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw UsageError(Errc::invalid_argument,
                                 "expected key = value at line " + std::to_string(line_no));
            const std::string key = trim(t.substr(0, eq));
            std::string value = trim(t.substr(eq + 1));
            if (!value.empty() && value.front() == '"') {
                const auto close = value.find('"', 1);
                if (close == std::string::npos)
                    throw UsageError(Errc::invalid_argument,
                                     "unterminated string at line " + std::to_string(line_no));
                value = value.substr(1, close - 1);
            } else {
                const auto hash = value.find('#');
                if (hash != std::string::npos) value = trim(value.substr(0, hash));
            }
            c.set(section.empty() ? key : section + "." + key, value);
        }
        return c;
    }

    // Accepts "section.key" or a bare "key" when unambiguous. Unknown keys
    // are errors and name the offending key.
    void set(const std::string& key, const std::string& value) {
        values_[resolve(key)] = value;
        explicit_.insert(resolve(key));
    }

    void apply_override(const std::string& assignment) {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos)
            throw UsageError(Errc::invalid_argument,
                             "override must be key=value, got: " + assignment);
        set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
    }

    bool is_set(const std::string& key) const { return explicit_.count(resolve(key)) != 0; }

    std::string get_text(const std::string& key) const { return values_.at(resolve(key)); }

    std::int64_t get_int(const std::string& key) const {
        const std::string full = resolve(key);
        const std::string& v = values_.at(full);
        try {
            std::size_t pos = 0;
            // master_seed is a full unsigned 64-bit value
            if (full == "run.master_seed") {
                const std::uint64_t u = std::stoull(v, &pos);
                if (pos != v.size()) throw std::invalid_argument(v);
                return static_cast<std::int64_t>(u);
            }
            const std::int64_t i = std::stoll(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return i;
        } catch (const std::exception&) {
            throw UsageError(Errc::invalid_argument,
                             "config key " + full + " needs an integer, got: " + v);
        }
    }

    double get_real(const std::string& key) const {
        const std::string full = resolve(key);
        const std::string& v = values_.at(full);
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw UsageError(Errc::invalid_argument,
                             "config key " + full + " needs a number, got: " + v);
        }
    }

    bool get_bool(const std::string& key) const {
        const std::string full = resolve(key);
        const std::string& v = values_.at(full);
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw UsageError(Errc::invalid_argument,
                         "config key " + full + " needs true/false, got: " + v);
    }

    // Normalized, sorted serialization: one "section.key=value" line per
    // schema entry with numerics reprinted canonically. Two configurations
    // that encode the same effective run serialize identically.
    std::string canonical_serialization() const {
        std::string out;
        for (const auto& def : config_schema()) {
            const std::string full = full_key(def);
            out += full;
            out += '=';
            const std::string& raw = values_.at(full);
            if (raw.empty()) {
                out += '\n';
                continue;
            }
            switch (def.type) {
            case ConfigType::integer:
                out += std::to_string(get_int(full));
                break;
            case ConfigType::real: {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%.6f", get_real(full));
                out += buf;
                break;
            }
            case ConfigType::boolean:
                out += get_bool(full) ? "true" : "false";
                break;
            case ConfigType::text:
                out += raw;
                break;
            }
            out += '\n';
        }
        return out;
    }

    std::uint64_t digest() const {
        Fnv1a64 h;
        h.update(canonical_serialization());
        return h.value();
    }

private:
    static std::string full_key(const ConfigKeyDef& def) {
        return std::string(def.section) + "." + def.key;
    }

    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    static std::string resolve(const std::string& key) {
        std::string match;
        for (const auto& def : config_schema()) {
            const std::string full = full_key(def);
            if (full == key) return full;
            if (def.key == key) {
                if (!match.empty())
                    throw UsageError(Errc::unknown_config_key,
                                     "ambiguous config key '" + key + "' (use " + match +
                                         " or " + full + ")");
                match = full;
            }
        }
        if (match.empty())
            throw UsageError(Errc::unknown_config_key, "unknown config key: " + key);
        return match;
    }

    std::map<std::string, std::string> values_;
    std::set<std::string> explicit_;
};

// The typed, validated parameter set the corpus builder runs from.
struct GeneratorConfig {
    std::uint64_t master_seed = 1;
    int fonts_per_word = 100;
    int font_size_px = 64;
    int kern_min = 0;
    int kern_max = 0;
    int stroke_min = 0;
    int stroke_max = 0;
    int normalize_height = 0; // 0 = keep natural height
    PixelModel model;
    double sigma = 0.8;
    AugmentRanges augment;
    std::string vocabulary_path;
    std::string fonts_dir;
    bool fonts_recursive = false;
    std::string output_dir;
    int shard_size = 10000;
    std::string image_format = "png";
    std::uint64_t config_digest = 0;
};

inline GeneratorConfig make_generator_config(const Config& cfg) {
    GeneratorConfig g;
    g.master_seed = static_cast<std::uint64_t>(cfg.get_int("run.master_seed"));
    g.fonts_per_word = static_cast<int>(cfg.get_int("fonts.per_word"));
    g.font_size_px = static_cast<int>(cfg.get_int("render.font_size_px"));
    if (g.fonts_per_word < 1)
        throw UsageError(Errc::invalid_argument, "fonts.per_word must be >= 1");
    if (g.font_size_px < 1)
        throw UsageError(Errc::invalid_argument, "render.font_size_px must be >= 1");

    g.kern_min = cfg.is_set("render.kern_min")
                     ? static_cast<int>(cfg.get_int("render.kern_min"))
                     : static_cast<int>(std::lround(-0.05 * g.font_size_px));
    g.kern_max = cfg.is_set("render.kern_max")
                     ? static_cast<int>(cfg.get_int("render.kern_max"))
                     : static_cast<int>(std::lround(0.15 * g.font_size_px));
    g.stroke_min = static_cast<int>(cfg.get_int("render.stroke_min"));
    g.stroke_max = static_cast<int>(cfg.get_int("render.stroke_max"));
    if (g.kern_min > g.kern_max || g.stroke_min > g.stroke_max)
        throw UsageError(Errc::invalid_range, "render ranges invalid (min > max)");
    g.normalize_height = static_cast<int>(cfg.get_int("render.normalize_height"));
    if (g.normalize_height < 0)
        throw UsageError(Errc::invalid_argument, "render.normalize_height must be >= 0");

    const std::string model_path = cfg.get_text("appearance.model");
    if (!model_path.empty()) {
        g.model = load_pixel_model(model_path);
    } else {
        g.model = PixelModel::create(cfg.get_real("appearance.fg_mean"),
                                     cfg.get_real("appearance.fg_std"),
                                     cfg.get_real("appearance.bg_mean"),
                                     cfg.get_real("appearance.bg_std"), "manual");
    }
    g.sigma = cfg.get_real("appearance.sigma");
    if (g.sigma < 0.0) throw UsageError(Errc::negative_sigma, "appearance.sigma must be >= 0");

    g.augment.rot_min = cfg.get_real("augment.rot_min");
    g.augment.rot_max = cfg.get_real("augment.rot_max");
    g.augment.shear_min = cfg.get_real("augment.shear_min");
    g.augment.shear_max = cfg.get_real("augment.shear_max");
    g.augment.shear_unit = parse_shear_unit(cfg.get_text("augment.shear_unit"));
    g.augment.pad_max = static_cast<int>(cfg.get_int("augment.pad_max"));
    g.augment.validate();

    g.vocabulary_path = cfg.get_text("run.vocabulary");
    g.fonts_dir = cfg.get_text("fonts.dir");
    g.fonts_recursive = cfg.get_bool("fonts.recursive");
    g.output_dir = cfg.get_text("output.dir");
    g.shard_size = static_cast<int>(cfg.get_int("output.shard_size"));
    if (g.shard_size < 1)
        throw UsageError(Errc::invalid_argument, "output.shard_size must be >= 1");
    g.image_format = cfg.get_text("output.format");
    if (g.image_format != "png")
        throw UsageError(Errc::invalid_argument,
                         "output.format: only 'png' is supported, got: " + g.image_format);

    // Digest the effective configuration: materialize derived kerning so a
    // config that spells the defaults out hashes the same as one that omits
    // them.
    Config effective = cfg;
    effective.set("render.kern_min", std::to_string(g.kern_min));
    effective.set("render.kern_max", std::to_string(g.kern_max));
    g.config_digest = effective.digest();
    return g;
}

} // namespace hwforge
