#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fpvwm/calibration.hpp"
#include "fpvwm/mac_address.hpp"

namespace fpvwm {

// Everything needed to synthesize one station's encrypted video traffic.
// Rates are layer-2 payload bytes per second; the encoder is modeled as a
// VBR source whose mean rises by the calibrated stimulus delta while the
// watermark is ON.
struct ScenarioConfig {
    double baseline_bps = 0.0;   // mean bytes/s with the stimulus OFF, > 0
    StimulusResponse stimulus;   // what the screen shows during ON windows

    int fps = 24;                // video frames per second
    int gop_len = 24;            // one intra frame every gop_len frames
    double iframe_boost = 3.0;   // intra/predicted frame size ratio, >= 1

    double noise_sigma = 0.0;    // bytes/s std-dev of encoder noise, >= 0
    double loss_rate = 0.0;      // i.i.d. capture loss probability, [0, 1)

    std::optional<double> padding_bps;  // pad each second up to this rate
    int mtu_bytes = 1500;               // packetization size

    // When set, bypasses the calibration table and uses this ON-delta
    // directly (bytes/s). Used by the end-to-end scenario presets.
    std::optional<double> delta_override_bps;

    MacAddress drone_mac = MacAddress{{0x60, 0x60, 0x1F, 0x5A, 0xB3, 0x01}};
    MacAddress controller_mac = MacAddress{{0x60, 0x60, 0x1F, 0x5A, 0xB3, 0x02}};
    MacAddress bssid = MacAddress{{0x60, 0x60, 0x1F, 0x5A, 0xB3, 0x01}};

    void validate() const;

    // ON-window rate increase: delta_override_bps if set, otherwise the
    // calibrated response to `stimulus`.
    double effective_delta_bps(const CalibrationTable& table) const;

    std::string to_json() const;
    static ScenarioConfig from_json(const std::string& text);
    static ScenarioConfig from_json_file(const std::string& path);
};

} // namespace fpvwm
