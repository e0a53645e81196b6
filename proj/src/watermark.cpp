#include "fpvwm/watermark.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fpvwm/errors.hpp"
#include "fpvwm/random.hpp"
#include "vendor/json.hpp"

namespace fpvwm {

WatermarkPattern::WatermarkPattern(std::string_view bits) {
    if (bits.empty()) throw ConfigError("pattern", "must not be empty");
    bits_.reserve(bits.size());
    for (const char c : bits) {
        if (c != '0' && c != '1')
            throw ConfigError("pattern", std::string("invalid character '") + c +
                                             "'; expected '0' or '1'");
        bits_.push_back(c == '1' ? 1 : 0);
    }
}

WatermarkPattern::WatermarkPattern(std::vector<std::uint8_t> bits)
    : bits_(std::move(bits)) {
    if (bits_.empty()) throw ConfigError("pattern", "must not be empty");
    for (auto& b : bits_) {
        if (b > 1) throw ConfigError("pattern", "bits must be 0 or 1");
    }
}

bool WatermarkPattern::has_stimulus() const noexcept {
    return std::find(bits_.begin(), bits_.end(), std::uint8_t{1}) != bits_.end();
}

std::optional<std::size_t> WatermarkPattern::first_one() const noexcept {
    const auto it = std::find(bits_.begin(), bits_.end(), std::uint8_t{1});
    if (it == bits_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - bits_.begin());
}

std::string WatermarkPattern::to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (const auto b : bits_) s.push_back(b ? '1' : '0');
    return s;
}

StimulusSchedule::StimulusSchedule(WatermarkPattern pattern, std::int64_t window_ms,
                                   std::int64_t begin_ms)
    : pattern_(std::move(pattern)), window_ms_(window_ms), begin_ms_(begin_ms),
      first_on_ms_(0) {
    if (window_ms_ <= 0) throw ConfigError("window_ms", "must be > 0");
    if (begin_ms_ < 0) throw ConfigError("begin_ms", "must be >= 0");
    const auto idx = pattern_.first_one();
    if (!idx)
        throw NoStimulusError("schedule: pattern has no 1-bit, no stimulus to modulate");
    first_on_ms_ = begin_ms_ + static_cast<std::int64_t>(*idx) * window_ms_;
}

bool StimulusSchedule::active(std::int64_t t_ms) const {
    if (t_ms < begin_ms_ || t_ms >= end_ms()) return false;
    const auto k = static_cast<std::size_t>((t_ms - begin_ms_) / window_ms_);
    return pattern_.bit(k);
}

WatermarkPattern random_pattern(std::size_t n_bits, std::uint64_t seed) {
    if (n_bits < 1) throw ConfigError("n_bits", "must be >= 1");
    Rng rng(seed);
    std::vector<std::uint8_t> bits(n_bits);
    for (;;) {
        bool any = false;
        for (auto& b : bits) {
            b = static_cast<std::uint8_t>(rng.next_u64() & 1u);
            any = any || b;
        }
        if (any) break;  // all-zero draws are re-drawn
    }
    return WatermarkPattern(std::move(bits));
}

WatermarkPattern ascii_pattern(std::string_view text) {
    if (text.empty()) throw ConfigError("text", "must not be empty");
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size() * 8);
    for (const char c : text) {
        const auto u = static_cast<unsigned char>(c);
        if (u < 0x20 || u > 0x7E)
            throw ConfigError("text", "only printable 7-bit ASCII can be keyed");
        for (int k = 7; k >= 0; --k)
            bits.push_back(static_cast<std::uint8_t>((u >> k) & 1u));
    }
    return WatermarkPattern(std::move(bits));
}

StimulusSchedule make_schedule(WatermarkPattern pattern, std::int64_t window_ms,
                               std::int64_t begin_ms) {
    return StimulusSchedule(std::move(pattern), window_ms, begin_ms);
}

WatermarkPattern truncate(const WatermarkPattern& pattern, std::int64_t duration_ms,
                          std::int64_t window_ms) {
    if (window_ms <= 0) throw ConfigError("window_ms", "must be > 0");
    if (duration_ms <= 0)
        throw ConfigError("duration_ms", "must be > 0");
    if (duration_ms % window_ms != 0)
        throw ConfigError("duration_ms", "must be a multiple of window_ms");
    const auto n = static_cast<std::size_t>(duration_ms / window_ms);
    if (n > pattern.size())
        throw ConfigError("duration_ms", "exceeds the pattern's full span");
    return WatermarkPattern(std::vector<std::uint8_t>(pattern.bits().begin(),
                                                      pattern.bits().begin() + n));
}

std::string schedule_to_json(const StimulusSchedule& schedule) {
    nlohmann::ordered_json j;
    j["bits"] = schedule.pattern().to_string();
    j["window_ms"] = schedule.window_ms();
    j["begin_ms"] = schedule.begin_ms();
    return j.dump(2);
}

StimulusSchedule schedule_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("schedule json: ") + e.what());
    }
    if (!j.is_object() || !j.contains("bits") || !j.contains("window_ms") ||
        !j.contains("begin_ms")) {
        throw ParseError("schedule json: expected object with bits, window_ms, begin_ms");
    }
    if (!j["bits"].is_string() || !j["window_ms"].is_number_integer() ||
        !j["begin_ms"].is_number_integer()) {
        throw ParseError("schedule json: bits must be a string, window_ms/begin_ms integers");
    }
    return StimulusSchedule(WatermarkPattern(j["bits"].get<std::string>()),
                            j["window_ms"].get<std::int64_t>(),
                            j["begin_ms"].get<std::int64_t>());
}

StimulusSchedule schedule_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open schedule file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return schedule_from_json(buf.str());
}

} // namespace fpvwm
