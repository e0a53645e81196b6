#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fpvwm/bitrate.hpp"
#include "fpvwm/watermark.hpp"

namespace fpvwm {

struct DetectionConfig {
    std::int64_t calib_ms = 4000;  // calibration interval length
    std::int64_t bin_ms = 1000;    // aggregation width of the bitrate series

    void validate() const;
};

struct CalibrationLevels {
    double stable_bitrate = 0.0;    // bytes/bin, mean before the first stimulus
    double stimulus_bitrate = 0.0;  // bytes/bin, mean after it begins
    double cutoff = 0.0;            // midpoint decision threshold
};

struct DetectionResult {
    bool detected = false;
    WatermarkPattern extracted_pattern;
    double cutoff = 0.0;
    double stable_bitrate = 0.0;
    double stimulus_bitrate = 0.0;
    std::vector<double> per_bit_means;

    std::string to_json() const;  // includes per_bit_means for plotting
};

// Measures the stable and stimulus bitrates around anchor_ms (the start of
// the first 1-bit window) and derives the midpoint decision cutoff:
//   stable   = mean over [anchor - calib, anchor)
//   stimulus = mean over [anchor, anchor + calib)
// Throws UncoveredSpanError when the series does not cover both intervals,
// and DegenerateCalibrationError when the two means are equal (the verdict
// would be vacuous; flat, padded streams end up here).
CalibrationLevels calibrate(const BitrateSeries& series, std::int64_t anchor_ms,
                            const DetectionConfig& cfg);

// Demodulates one bit per window over [begin_ms, end_ms): the window mean is
// compared against the cutoff, strictly greater meaning 1 (a tie reads as 0).
// end_ms - begin_ms must be a positive multiple of window_ms, and window_ms a
// positive multiple of the series bin width.
WatermarkPattern extract_pattern(const BitrateSeries& series, double cutoff,
                                 std::int64_t begin_ms, std::int64_t end_ms,
                                 std::int64_t window_ms,
                                 std::vector<double>* window_means = nullptr);

// Full detection pass against the schedule the verifier emitted: calibrates
// around the start of its first 1-bit window, extracts one bit per window
// across the whole schedule span, and declares detection only on exact
// full-length equality with the scheduled pattern.
DetectionResult under_detection(const BitrateSeries& series,
                                const StimulusSchedule& schedule,
                                const DetectionConfig& cfg = {});

} // namespace fpvwm
