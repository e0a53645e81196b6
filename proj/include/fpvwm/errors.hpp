#pragma once

#include <stdexcept>
#include <string>

namespace fpvwm {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid parameter or configuration value. Carries the offending field name
// so callers (and the CLI) can report exactly what was wrong.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Malformed input data (trace streams, CSV tables, JSON documents).
class ParseError : public Error {
public:
    using Error::Error;
};

// A requested time interval is not covered by the available series.
class UncoveredSpanError : public Error {
public:
    using Error::Error;
};

// Calibration found stable and stimulus bitrates equal: no stimulus energy
// reached the stream, so a 0/1 verdict would be vacuous.
class DegenerateCalibrationError : public Error {
public:
    using Error::Error;
};

// The pattern contains no 1-bit, so no stimulus interval exists to anchor on.
class NoStimulusError : public Error {
public:
    using Error::Error;
};

} // namespace fpvwm
