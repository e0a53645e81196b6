#include "fpvwm/detector.hpp"

#include <utility>

#include "fpvwm/errors.hpp"
#include "vendor/json.hpp"

namespace fpvwm {

void DetectionConfig::validate() const {
    if (bin_ms <= 0) {
        throw ConfigError("bin_ms", "must be positive, got " + std::to_string(bin_ms));
    }
    if (calib_ms <= 0) {
        throw ConfigError("calib_ms", "must be positive, got " + std::to_string(calib_ms));
    }
    if (calib_ms % bin_ms != 0) {
        throw ConfigError("calib_ms", "must be a multiple of bin_ms (" +
                                          std::to_string(calib_ms) + " % " +
                                          std::to_string(bin_ms) + " != 0)");
    }
}

CalibrationLevels calibrate(const BitrateSeries& series, std::int64_t anchor_ms,
                            const DetectionConfig& cfg) {
    cfg.validate();
    if (series.bin_ms != cfg.bin_ms) {
        throw ConfigError("bin_ms", "series is binned at " + std::to_string(series.bin_ms) +
                                        " ms but the detector expects " +
                                        std::to_string(cfg.bin_ms) + " ms");
    }
    CalibrationLevels levels;
    levels.stable_bitrate = mean_rate(subseries(series, anchor_ms - cfg.calib_ms, anchor_ms));
    levels.stimulus_bitrate = mean_rate(subseries(series, anchor_ms, anchor_ms + cfg.calib_ms));
    levels.cutoff = (levels.stable_bitrate + levels.stimulus_bitrate) / 2.0;
    if (levels.stimulus_bitrate == levels.stable_bitrate) {
        throw DegenerateCalibrationError(
            "stable and stimulus intervals have the same mean bitrate (" +
            std::to_string(levels.stable_bitrate) + " bytes/bin); the cutoff separates nothing");
    }
    return levels;
}

WatermarkPattern extract_pattern(const BitrateSeries& series, double cutoff,
                                 std::int64_t begin_ms, std::int64_t end_ms,
                                 std::int64_t window_ms,
                                 std::vector<double>* window_means) {
    if (window_ms <= 0) {
        throw ConfigError("window_ms", "must be positive, got " + std::to_string(window_ms));
    }
    if (window_ms % series.bin_ms != 0) {
        throw ConfigError("window_ms", "must be a multiple of the series bin width (" +
                                           std::to_string(window_ms) + " % " +
                                           std::to_string(series.bin_ms) + " != 0)");
    }
    if (end_ms <= begin_ms || (end_ms - begin_ms) % window_ms != 0) {
        throw ConfigError("end_ms", "span [" + std::to_string(begin_ms) + ", " +
                                        std::to_string(end_ms) +
                                        ") is not a positive multiple of window_ms=" +
                                        std::to_string(window_ms));
    }

    std::vector<std::uint8_t> bits;
    if (window_means != nullptr) window_means->clear();
    for (std::int64_t t = begin_ms; t < end_ms; t += window_ms) {
        const double mean = mean_rate(subseries(series, t, t + window_ms));
        if (window_means != nullptr) window_means->push_back(mean);
        bits.push_back(mean > cutoff ? 1 : 0);
    }
    return WatermarkPattern(std::move(bits));
}

DetectionResult under_detection(const BitrateSeries& series,
                                const StimulusSchedule& schedule,
                                const DetectionConfig& cfg) {
    cfg.validate();
    // Shape problems are parameter errors and take precedence over anything
    // the data itself might report (degenerate calibration, uncovered spans).
    if (schedule.window_ms() % cfg.bin_ms != 0) {
        throw ConfigError("window_ms", "must be a multiple of the series bin width (" +
                                           std::to_string(schedule.window_ms()) + " % " +
                                           std::to_string(cfg.bin_ms) + " != 0)");
    }
    const CalibrationLevels levels = calibrate(series, schedule.first_on_ms(), cfg);

    DetectionResult result;
    result.cutoff = levels.cutoff;
    result.stable_bitrate = levels.stable_bitrate;
    result.stimulus_bitrate = levels.stimulus_bitrate;
    result.extracted_pattern =
        extract_pattern(series, levels.cutoff, schedule.begin_ms(), schedule.end_ms(),
                        schedule.window_ms(), &result.per_bit_means);
    result.detected = (result.extracted_pattern == schedule.pattern());
    return result;
}

std::string DetectionResult::to_json() const {
    nlohmann::ordered_json j;
    j["detected"] = detected;
    j["degenerate"] = false;  // degenerate calibration aborts before a result exists
    j["extracted_pattern"] = extracted_pattern.to_string();
    j["cutoff"] = cutoff;
    j["stable_bitrate"] = stable_bitrate;
    j["stimulus_bitrate"] = stimulus_bitrate;
    j["per_bit_means"] = per_bit_means;
    return j.dump(2);
}

} // namespace fpvwm
