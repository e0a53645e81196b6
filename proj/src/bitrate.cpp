#include "fpvwm/bitrate.hpp"

#include <string>

#include "fpvwm/errors.hpp"

namespace fpvwm {

namespace {

// ceil(num / den) for non-negative num, positive den.
std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
    return (num + den - 1) / den;
}

} // namespace

BitrateSeries extract_bitrate_array(const PacketTrace& trace, std::int64_t bin_ms,
                                    std::optional<std::int64_t> origin_ms) {
    if (bin_ms <= 0) throw ConfigError("bin_ms", "must be > 0");
    if (trace.empty()) throw Error("extract_bitrate_array: empty trace");

    const std::int64_t first = trace.first_timestamp_ms();
    const std::int64_t origin = origin_ms.value_or((first / bin_ms) * bin_ms);
    if (origin > first)
        throw ConfigError("origin_ms",
                          "origin " + std::to_string(origin) + " is after the first record at " +
                              std::to_string(first) + "; bytes would be lost");

    const std::int64_t last = trace.last_timestamp_ms();
    const std::size_t n_bins = static_cast<std::size_t>((last - origin) / bin_ms + 1);

    BitrateSeries series;
    series.origin_ms = origin;
    series.bin_ms = bin_ms;
    series.bins.assign(n_bins, 0.0);
    for (const auto& r : trace.records()) {
        const std::size_t i = static_cast<std::size_t>((r.timestamp_ms - origin) / bin_ms);
        series.bins[i] += static_cast<double>(r.length_bytes);
    }
    return series;
}

BitrateSeries subseries(const BitrateSeries& series, std::int64_t t0_ms,
                        std::int64_t t1_ms) {
    if (t0_ms >= t1_ms) throw ConfigError("t0_ms", "interval must satisfy t0 < t1");
    if (!series.covers(t0_ms, t1_ms)) {
        throw UncoveredSpanError(
            "subseries: requested [" + std::to_string(t0_ms) + ", " + std::to_string(t1_ms) +
            ") but series covers [" + std::to_string(series.origin_ms) + ", " +
            std::to_string(series.end_ms()) + ")");
    }

    // Bin i starts at origin + i*bin; starts in [t0, t1).
    const std::int64_t i_lo = ceil_div(t0_ms - series.origin_ms, series.bin_ms);
    const std::int64_t i_hi = ceil_div(t1_ms - series.origin_ms, series.bin_ms);

    BitrateSeries out;
    out.bin_ms = series.bin_ms;
    out.origin_ms = series.origin_ms + i_lo * series.bin_ms;
    out.bins.assign(series.bins.begin() + i_lo, series.bins.begin() + i_hi);
    return out;
}

double mean_rate(const BitrateSeries& series) {
    if (series.bins.empty()) throw Error("mean_rate: empty series");
    double sum = 0.0;
    for (const double b : series.bins) sum += b;
    return sum / static_cast<double>(series.bins.size());
}

} // namespace fpvwm
