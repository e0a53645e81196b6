#pragma once

#include <cstdint>
#include <optional>

#include "fpvwm/calibration.hpp"
#include "fpvwm/scenario.hpp"
#include "fpvwm/trace.hpp"
#include "fpvwm/watermark.hpp"

namespace fpvwm {

// Synthesizes the station's encrypted video traffic for duration_ms
// (a positive multiple of 1000; the model emits whole 1-second windows).
//
// Model, per 1-second window:
//   - frame ticks at floor(i * 1000 / fps) ms within the window;
//   - the window's byte total is baseline_bps plus the stimulus delta for
//     the fraction of frame ticks falling inside an ON window of `schedule`
//     (no schedule means the stimulus never fires);
//   - bytes are split across frames proportionally to GOP weights
//     (iframe_boost on every gop_len-th frame, renormalized so the boost
//     never changes the window total);
//   - optional Gaussian noise with sigma = noise_sigma/fps is added per
//     frame, floored so no frame goes negative;
//   - each frame's bytes are packetized into ceil(bytes/mtu) records;
//   - records are dropped i.i.d. at loss_rate;
//   - if padding_bps is set, chaff records top every window up to exactly
//     round(padding_bps) bytes.
//
// Byte totals are integers and exact: with noise, loss and padding off, every
// 1-second window sums to round(baseline_bps + on_fraction * delta) bytes.
// Deterministic for fixed (cfg, schedule, duration, seed).
PacketTrace simulate_trace(const ScenarioConfig& cfg,
                           const std::optional<StimulusSchedule>& schedule,
                           std::int64_t duration_ms, std::uint64_t seed,
                           const CalibrationTable& table = CalibrationTable::builtin());

// Drops each record independently with probability loss_rate (deterministic
// per seed). loss_rate must lie in [0, 1).
PacketTrace apply_loss(const PacketTrace& trace, double loss_rate, std::uint64_t seed);

// Fixed-bitrate countermeasure: inserts chaff records so every aligned
// 1-second window (origin = first record's timestamp rounded down to a
// second) sums to exactly round(target_bps) bytes. Chaff copies the first
// record's addressing. Errors if any window already exceeds the target,
// naming the minimum target that would work.
PacketTrace apply_padding(const PacketTrace& trace, double target_bps,
                          int mtu_bytes = 1500);

} // namespace fpvwm
