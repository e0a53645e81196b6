#include "fpvwm/mac_address.hpp"

#include <cstdio>

namespace fpvwm {

namespace {

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

std::optional<MacAddress> MacAddress::parse(std::string_view text) {
    if (text.size() != 17) return std::nullopt;
    MacAddress mac;
    for (int i = 0; i < 6; ++i) {
        const int hi = hex_digit(text[static_cast<std::size_t>(i) * 3]);
        const int lo = hex_digit(text[static_cast<std::size_t>(i) * 3 + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        mac.bytes[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>(hi * 16 + lo);
        if (i < 5) {
            const char sep = text[static_cast<std::size_t>(i) * 3 + 2];
            if (sep != ':' && sep != '-') return std::nullopt;
        }
    }
    return mac;
}

std::string MacAddress::to_string() const {
    char buf[18];
    std::snprintf(buf, sizeof(buf), "%02X:%02X:%02X:%02X:%02X:%02X", bytes[0],
                  bytes[1], bytes[2], bytes[3], bytes[4], bytes[5]);
    return buf;
}

} // namespace fpvwm
