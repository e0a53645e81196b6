#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fpvwm {

// Binary watermark sequence. A pattern with no 1-bit can exist as a value
// (short truncations of 0-led patterns produce one), but it cannot be
// scheduled or detected: there would be no stimulus to anchor on.
class WatermarkPattern {
public:
    // Empty placeholder; every parsing constructor rejects empty input.
    WatermarkPattern() = default;

    // From a bit string such as "1010". Throws ConfigError on empty input or
    // characters other than '0'/'1'.
    explicit WatermarkPattern(std::string_view bits);
    explicit WatermarkPattern(std::vector<std::uint8_t> bits);

    std::size_t size() const noexcept { return bits_.size(); }
    bool bit(std::size_t i) const { return bits_[i] != 0; }
    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

    bool has_stimulus() const noexcept;                  // any 1-bit present
    std::optional<std::size_t> first_one() const noexcept;

    std::string to_string() const;

    friend bool operator==(const WatermarkPattern&, const WatermarkPattern&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

// Timed on-off-keyed realization of a pattern: bit k owns
// [begin_ms + k*window_ms, begin_ms + (k+1)*window_ms), and the stimulus is
// active exactly during 1-bit windows.
class StimulusSchedule {
public:
    StimulusSchedule(WatermarkPattern pattern, std::int64_t window_ms,
                     std::int64_t begin_ms);

    const WatermarkPattern& pattern() const noexcept { return pattern_; }
    std::int64_t window_ms() const noexcept { return window_ms_; }
    std::int64_t begin_ms() const noexcept { return begin_ms_; }
    std::int64_t end_ms() const noexcept {
        return begin_ms_ + static_cast<std::int64_t>(pattern_.size()) * window_ms_;
    }

    // Start of the first 1-bit window: the moment the physical stimulus
    // first turns on. Calibration anchors here.
    std::int64_t first_on_ms() const noexcept { return first_on_ms_; }

    // Stimulus state at an instant; false outside [begin_ms, end_ms).
    bool active(std::int64_t t_ms) const;

private:
    WatermarkPattern pattern_;
    std::int64_t window_ms_;
    std::int64_t begin_ms_;
    std::int64_t first_on_ms_;
};

// Uniform i.i.d. bits, re-drawn until at least one 1-bit; deterministic per seed.
WatermarkPattern random_pattern(std::size_t n_bits, std::uint64_t seed);

// Each character becomes its 8-bit big-endian code. 7-bit printable text only.
WatermarkPattern ascii_pattern(std::string_view text);

// Schedules a pattern; rejects patterns with no 1-bit (nothing to modulate).
StimulusSchedule make_schedule(WatermarkPattern pattern, std::int64_t window_ms,
                               std::int64_t begin_ms);

// First duration_ms/window_ms bits. duration_ms must be a positive multiple
// of window_ms and at most the full span.
WatermarkPattern truncate(const WatermarkPattern& pattern, std::int64_t duration_ms,
                          std::int64_t window_ms);

// Schedule interchange format: {"bits": "0101...", "window_ms": N, "begin_ms": N}.
std::string schedule_to_json(const StimulusSchedule& schedule);
StimulusSchedule schedule_from_json(const std::string& text);
StimulusSchedule schedule_from_json_file(const std::string& path);

} // namespace fpvwm
