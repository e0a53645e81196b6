#pragma once

// Shared helpers for the test suites. The RNG here is std::mt19937_64 with
// std::uniform_* distributions — deliberately NOT the library's Rng — so a
// library RNG regression cannot silently reshape test inputs.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fpvwm/mac_address.hpp"
#include "fpvwm/trace.hpp"

namespace testutil {

inline fpvwm::MacAddress mac(const char* text) {
    auto parsed = fpvwm::MacAddress::parse(text);
    if (!parsed) throw std::runtime_error(std::string("bad test MAC: ") + text);
    return *parsed;
}

struct TestRng {
    std::mt19937_64 engine;
    explicit TestRng(std::uint64_t seed) : engine(seed) {}

    std::int64_t i64(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine);
    }
    double real(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine);
    }
    bool coin() { return i64(0, 1) == 1; }
};

// Random capture with n records, timestamps in [t0, t0 + span_ms), lengths
// in [0, 3000]. Addressing is fixed; these tests exercise time/byte logic.
inline fpvwm::PacketTrace random_trace(TestRng& rng, int n, std::int64_t t0,
                                       std::int64_t span_ms) {
    std::vector<fpvwm::PacketRecord> records;
    records.reserve(static_cast<std::size_t>(n));
    const auto src = mac("AA:00:00:00:00:01");
    const auto dst = mac("AA:00:00:00:00:02");
    const auto bss = mac("AA:00:00:00:00:01");
    for (int i = 0; i < n; ++i) {
        fpvwm::PacketRecord r;
        r.timestamp_ms = t0 + rng.i64(0, span_ms - 1);
        r.length_bytes = rng.i64(0, 3000);
        r.src_mac = src;
        r.dst_mac = dst;
        r.bssid = bss;
        records.push_back(r);
    }
    return fpvwm::PacketTrace(std::move(records), "test");
}

// Random bit string of n bits guaranteed to contain at least one '1'.
inline std::string random_bits_with_one(TestRng& rng, int n) {
    std::string bits;
    for (;;) {
        bits.clear();
        for (int i = 0; i < n; ++i) bits += rng.coin() ? '1' : '0';
        if (bits.find('1') != std::string::npos) return bits;
    }
}

} // namespace testutil
