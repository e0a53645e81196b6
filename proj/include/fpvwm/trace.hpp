#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fpvwm/mac_address.hpp"

namespace fpvwm {

// One intercepted layer-2 frame. Deliberately holds only what an external
// interceptor in monitor mode can see of an encrypted stream: arrival time,
// frame length and addressing. There is no payload field.
struct PacketRecord {
    std::int64_t timestamp_ms = 0;  // epoch milliseconds, >= 0
    std::int64_t length_bytes = 0;  // full layer-2 frame length, >= 0
    MacAddress src_mac{};
    MacAddress dst_mac{};
    MacAddress bssid{};

    friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

// An ordered capture. Records are kept sorted by timestamp (ties allowed,
// insertion order preserved).
class PacketTrace {
public:
    PacketTrace() = default;
    explicit PacketTrace(std::vector<PacketRecord> records,
                         std::string source_label = "");

    const std::vector<PacketRecord>& records() const noexcept { return records_; }
    const std::string& source_label() const noexcept { return source_label_; }

    bool empty() const noexcept { return records_.empty(); }
    std::size_t size() const noexcept { return records_.size(); }

    // Sum of all frame lengths; the conservation reference for binning.
    std::int64_t total_bytes() const noexcept;

    // Valid only when non-empty.
    std::int64_t first_timestamp_ms() const { return records_.front().timestamp_ms; }
    std::int64_t last_timestamp_ms() const { return records_.back().timestamp_ms; }

    friend bool operator==(const PacketTrace&, const PacketTrace&) = default;

private:
    std::vector<PacketRecord> records_;
    std::string source_label_;
};

// Keeps records whose BSSID matches, and additionally whose source MAC
// matches when src_mac is given (selects the drone-to-controller direction).
// An empty result is returned as-is; callers decide whether that is fatal.
PacketTrace filter_station(const PacketTrace& trace, const MacAddress& bssid,
                           const std::optional<MacAddress>& src_mac = std::nullopt);

} // namespace fpvwm
