#pragma once

#include <stdexcept>
#include <string>

namespace hwforge {

// Error kinds, grouped by the process exit class they map to:
// usage errors -> exit 1, data errors -> exit 2, I/O errors -> exit 3.
enum class Errc {
    // usage
    unknown_config_key,
    invalid_argument,
    // data
    empty_catalog,
    empty_word,
    no_eligible_font,
    missing_glyph,
    zero_ink,
    degenerate_histogram,
    empty_reference,
    all_degenerate,
    negative_sigma,
    invalid_range,
    negative_pad,
    invalid_model,
    empty_vocabulary,
    utf8_error,
    empty_table,
    bad_config_value,
    // io
    io_error,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(Errc::io_error, what) {}
};

} // namespace hwforge
