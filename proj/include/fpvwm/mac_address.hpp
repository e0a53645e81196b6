#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace fpvwm {

// 6-byte IEEE 802 address (station MAC or BSSID).
struct MacAddress {
    std::array<std::uint8_t, 6> bytes{};

    // Parses "AA:BB:CC:DD:EE:FF" (case-insensitive, ':' or '-' separators).
    static std::optional<MacAddress> parse(std::string_view text);

    std::string to_string() const;

    friend bool operator==(const MacAddress&, const MacAddress&) = default;
};

} // namespace fpvwm
