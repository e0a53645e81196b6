#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fpvwm/trace.hpp"

namespace fpvwm {

// Uniformly binned bytes-per-interval series. Bin i covers
// [origin_ms + i*bin_ms, origin_ms + (i+1)*bin_ms).
//
// Values are doubles so that detector-side transformations (scaling, offsets)
// compose; series produced from traces hold exact integers (byte counts are
// far below 2^53).
struct BitrateSeries {
    std::int64_t origin_ms = 0;
    std::int64_t bin_ms = 1000;
    std::vector<double> bins;

    std::int64_t end_ms() const {
        return origin_ms + static_cast<std::int64_t>(bins.size()) * bin_ms;
    }

    bool covers(std::int64_t t0_ms, std::int64_t t1_ms) const {
        return t0_ms >= origin_ms && t1_ms <= end_ms();
    }
};

// Bins a trace into bytes per bin_ms. origin_ms defaults to the first
// record's timestamp floored to a bin boundary; a trailing partial bin is
// kept so that no bytes vanish (conservation: sum(bins) == total_bytes).
BitrateSeries extract_bitrate_array(const PacketTrace& trace, std::int64_t bin_ms,
                                    std::optional<std::int64_t> origin_ms = std::nullopt);

// Bins whose start lies in [t0_ms, t1_ms). The interval must be covered by
// the series; out-of-coverage requests are an error, never a silent clamp.
BitrateSeries subseries(const BitrateSeries& series, std::int64_t t0_ms,
                        std::int64_t t1_ms);

// Arithmetic mean of the bins (bytes per bin).
double mean_rate(const BitrateSeries& series);

} // namespace fpvwm
