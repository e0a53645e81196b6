#include "fpvwm/trace.hpp"

#include <algorithm>

#include "fpvwm/errors.hpp"

namespace fpvwm {

PacketTrace::PacketTrace(std::vector<PacketRecord> records, std::string source_label)
    : records_(std::move(records)), source_label_(std::move(source_label)) {
    for (const auto& r : records_) {
        if (r.timestamp_ms < 0)
            throw ConfigError("timestamp_ms", "must be >= 0");
        if (r.length_bytes < 0)
            throw ConfigError("length_bytes", "must be >= 0");
    }
    // Stable: ties keep insertion order, so serialization round-trips.
    std::stable_sort(records_.begin(), records_.end(),
                     [](const PacketRecord& a, const PacketRecord& b) {
                         return a.timestamp_ms < b.timestamp_ms;
                     });
}

std::int64_t PacketTrace::total_bytes() const noexcept {
    std::int64_t sum = 0;
    for (const auto& r : records_) sum += r.length_bytes;
    return sum;
}

PacketTrace filter_station(const PacketTrace& trace, const MacAddress& bssid,
                           const std::optional<MacAddress>& src_mac) {
    std::vector<PacketRecord> kept;
    kept.reserve(trace.size());
    for (const auto& r : trace.records()) {
        if (!(r.bssid == bssid)) continue;
        if (src_mac && !(r.src_mac == *src_mac)) continue;
        kept.push_back(r);
    }
    return PacketTrace(std::move(kept), trace.source_label());
}

} // namespace fpvwm
