#include "fpvwm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "fpvwm/errors.hpp"
#include "fpvwm/random.hpp"

namespace fpvwm {

namespace {

void append_packets(std::vector<PacketRecord>& out, std::int64_t t_ms, std::int64_t bytes,
                    int mtu, const ScenarioConfig& cfg) {
    while (bytes > 0) {
        const std::int64_t len = std::min<std::int64_t>(bytes, mtu);
        out.push_back(PacketRecord{t_ms, len, cfg.drone_mac, cfg.controller_mac, cfg.bssid});
        bytes -= len;
    }
}

// Tops every 1-second window [origin + w*1000, origin + (w+1)*1000) up to
// exactly target bytes. `have` holds the current per-window totals. Chaff
// addressing is copied from `proto`.
std::vector<PacketRecord> pad_windows(std::vector<PacketRecord> records,
                                      const std::vector<std::int64_t>& have,
                                      std::int64_t origin_ms, std::int64_t target,
                                      int mtu, const PacketRecord& proto) {
    const std::int64_t peak = have.empty() ? 0 : *std::max_element(have.begin(), have.end());
    if (peak > target) {
        throw ConfigError("target_bps", "a 1-second window already carries " +
                                            std::to_string(peak) +
                                            " bytes; the padding target must be >= " +
                                            std::to_string(peak));
    }
    for (std::size_t w = 0; w < have.size(); ++w) {
        std::int64_t chaff = target - have[w];
        if (chaff == 0) continue;
        const std::int64_t w_start = origin_ms + static_cast<std::int64_t>(w) * 1000;
        const std::int64_t n_pkts = (chaff + mtu - 1) / mtu;
        for (std::int64_t k = 0; k < n_pkts; ++k) {
            const std::int64_t len = std::min<std::int64_t>(chaff, mtu);
            PacketRecord rec = proto;
            rec.timestamp_ms = w_start + k * 1000 / n_pkts;
            rec.length_bytes = len;
            records.push_back(rec);
            chaff -= len;
        }
    }
    return records;
}

} // namespace

PacketTrace simulate_trace(const ScenarioConfig& cfg,
                           const std::optional<StimulusSchedule>& schedule,
                           std::int64_t duration_ms, std::uint64_t seed,
                           const CalibrationTable& table) {
    cfg.validate();
    if (duration_ms <= 0 || duration_ms % 1000 != 0) {
        throw ConfigError("duration_ms", "must be a positive multiple of 1000 ms, got " +
                                             std::to_string(duration_ms));
    }
    if (schedule && schedule->end_ms() > duration_ms) {
        throw ConfigError("duration_ms", "schedule runs to " + std::to_string(schedule->end_ms()) +
                                             " ms but the trace stops at " +
                                             std::to_string(duration_ms) + " ms");
    }
    const double delta = cfg.effective_delta_bps(table);
    if (cfg.padding_bps && *cfg.padding_bps < cfg.baseline_bps + delta) {
        throw ConfigError("padding_bps",
                          "must cover the stimulus-on rate: baseline + delta = " +
                              std::to_string(cfg.baseline_bps + delta) + " bytes/s");
    }

    const int fps = cfg.fps;
    const std::int64_t n_seconds = duration_ms / 1000;
    Rng noise_rng(derive_seed(seed, 1));
    const double sigma_frame = cfg.noise_sigma / fps;

    std::vector<PacketRecord> records;
    records.reserve(static_cast<std::size_t>(n_seconds) * fps);
    std::vector<std::int64_t> ticks(fps);
    std::vector<double> share(fps), prefix(fps);
    double carry = 0.0;

    for (std::int64_t s = 0; s < n_seconds; ++s) {
        // Per-frame allocation weight = (baseline + on*delta) * gop_weight;
        // the second's noise-free total is computed analytically so that it
        // is exact regardless of fps or GOP shape.
        int n_on = 0;
        for (int i = 0; i < fps; ++i) {
            ticks[i] = s * 1000 + static_cast<std::int64_t>(i) * 1000 / fps;
            const bool on = schedule && schedule->active(ticks[i]);
            if (on) ++n_on;
            const std::int64_t frame_idx = s * fps + i;
            const double gop_w = (frame_idx % cfg.gop_len == 0) ? cfg.iframe_boost : 1.0;
            share[i] = (cfg.baseline_bps + (on ? delta : 0.0)) * gop_w;
        }
        const double total =
            (cfg.baseline_bps * fps + delta * n_on) / fps;  // bytes this second

        double real_total = total;
        if (sigma_frame > 0.0) {
            const double share_sum = std::accumulate(share.begin(), share.end(), 0.0);
            real_total = 0.0;
            for (int i = 0; i < fps; ++i) {
                share[i] = std::max(0.0, total * share[i] / share_sum +
                                             sigma_frame * noise_rng.normal());
                real_total += share[i];
            }
        }

        // Integer emission with carry: the tiny guard keeps seconds whose
        // intended total is within rounding dust of an integer exact, and the
        // carry conserves bytes long-run.
        std::int64_t emit = static_cast<std::int64_t>(std::floor(real_total + carry + 1e-6));
        if (emit < 0) emit = 0;
        carry = (real_total + carry) - static_cast<double>(emit);

        double acc = 0.0;
        for (int i = 0; i < fps; ++i) {
            acc += share[i];
            prefix[i] = acc;
        }
        const double norm = prefix[fps - 1];
        std::int64_t given = 0;
        for (int i = 0; i < fps; ++i) {
            const std::int64_t cum =
                (i == fps - 1 || norm <= 0.0)
                    ? emit
                    : static_cast<std::int64_t>(std::floor(emit * (prefix[i] / norm)));
            append_packets(records, ticks[i], cum - given, cfg.mtu_bytes, cfg);
            given = cum;
        }
    }

    PacketTrace trace(std::move(records), "simulated");
    if (cfg.loss_rate > 0.0) {
        trace = apply_loss(trace, cfg.loss_rate, derive_seed(seed, 2));
    }
    if (cfg.padding_bps) {
        std::vector<std::int64_t> have(static_cast<std::size_t>(n_seconds), 0);
        for (const auto& rec : trace.records()) {
            have[static_cast<std::size_t>(rec.timestamp_ms / 1000)] += rec.length_bytes;
        }
        const PacketRecord proto{0, 0, cfg.drone_mac, cfg.controller_mac, cfg.bssid};
        auto padded = pad_windows(trace.records(), have, 0, std::llround(*cfg.padding_bps),
                                  cfg.mtu_bytes, proto);
        trace = PacketTrace(std::move(padded), "simulated");
    }
    return trace;
}

PacketTrace apply_loss(const PacketTrace& trace, double loss_rate, std::uint64_t seed) {
    if (!(loss_rate >= 0.0 && loss_rate < 1.0)) {
        throw ConfigError("loss_rate", "must be in [0, 1), got " + std::to_string(loss_rate));
    }
    if (loss_rate == 0.0) return trace;
    Rng rng(seed);
    std::vector<PacketRecord> kept;
    kept.reserve(trace.size());
    for (const auto& rec : trace.records()) {
        if (rng.uniform01() >= loss_rate) kept.push_back(rec);
    }
    return PacketTrace(std::move(kept), trace.source_label());
}

PacketTrace apply_padding(const PacketTrace& trace, double target_bps, int mtu_bytes) {
    if (mtu_bytes < 1) {
        throw ConfigError("mtu_bytes", "must be >= 1, got " + std::to_string(mtu_bytes));
    }
    if (!(target_bps > 0)) {
        throw ConfigError("target_bps", "must be positive, got " + std::to_string(target_bps));
    }
    if (trace.empty()) return trace;

    const std::int64_t origin = (trace.first_timestamp_ms() / 1000) * 1000;
    const std::size_t n_windows =
        static_cast<std::size_t>((trace.last_timestamp_ms() - origin) / 1000) + 1;
    std::vector<std::int64_t> have(n_windows, 0);
    for (const auto& rec : trace.records()) {
        have[static_cast<std::size_t>((rec.timestamp_ms - origin) / 1000)] += rec.length_bytes;
    }
    auto padded = pad_windows(trace.records(), have, origin, std::llround(target_bps),
                              mtu_bytes, trace.records().front());
    return PacketTrace(std::move(padded), trace.source_label());
}

} // namespace fpvwm
