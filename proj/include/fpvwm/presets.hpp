#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fpvwm/scenario.hpp"
#include "fpvwm/watermark.hpp"

namespace fpvwm {

// A ready-to-run field scenario: traffic model plus the watermark the
// verifier would schedule against it. begin_ms leaves room for the
// detector's pre-stimulus calibration interval.
struct Preset {
    std::string name;
    std::string description;
    ScenarioConfig scenario;
    std::string pattern_bits;
    std::int64_t window_ms = 0;
    std::int64_t begin_ms = 0;

    WatermarkPattern pattern() const { return WatermarkPattern(pattern_bits); }
    StimulusSchedule schedule() const {
        return StimulusSchedule(pattern(), window_ms, begin_ms);
    }
};

// Two field-calibrated scenarios ship with the tool:
//  - "house": a building filmed from ~50 m; high-rate 2K downlink, a smart
//    bulb in a window flickers a 21-bit pattern at 2 s per bit.
//  - "subject": a person filmed from afar; low-rate long-range link, an LED
//    strip on the shirt flickers "SOS" in ASCII at 5 s per bit.
const std::vector<Preset>& presets();

// Lookup by name; unknown names raise ConfigError listing the valid ones.
const Preset& find_preset(const std::string& name);

} // namespace fpvwm
