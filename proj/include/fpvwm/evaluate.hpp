#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fpvwm/detector.hpp"
#include "fpvwm/scenario.hpp"
#include "fpvwm/trace.hpp"
#include "fpvwm/watermark.hpp"

namespace fpvwm {

// Wilson score interval for k successes in n trials (n >= 1).
struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
    double half_width() const { return (hi - lo) / 2.0; }
};
WilsonInterval wilson(int successes, int trials, double z = 1.96);

// One point of a false-positive-rate curve. Trials where calibration is
// degenerate — or where the truncated pattern carries no 1-bit at all — are
// counted as not-detected and tallied here separately.
struct FprPoint {
    std::int64_t duration_ms = 0;
    int n = 0;
    int detected = 0;
    int degenerate = 0;

    double fpr() const { return n > 0 ? static_cast<double>(detected) / n : 0.0; }
};

struct FprCurve {
    std::vector<FprPoint> points;
    int n_placements = 0;
    std::string negative_source;

    std::vector<std::int64_t> durations_ms() const;
    std::vector<double> fpr() const;
};

// False-positive rate vs. stimulus duration, measured on a trace that does
// NOT carry the watermark. For each duration d (an ascending list of
// multiples of window_ms) the pattern is truncated to d/window_ms bits and
// probed at n_placements begin times drawn uniformly on the 1-second grid,
// leaving room for the calibration interval on both sides; each placement
// runs the full detection pass. Deterministic per seed, with each
// (duration, placement) trial independently seeded so trials may be
// evaluated in any order.
FprCurve fpr_curve(const PacketTrace& negative, const WatermarkPattern& pattern,
                   std::int64_t window_ms, const std::vector<std::int64_t>& durations_ms,
                   int n_placements, std::uint64_t seed, const DetectionConfig& cfg = {});

// fpr_curve.csv: duration_ms,fpr,wilson_lo,wilson_hi,n
void write_fpr_csv(std::ostream& out, const FprCurve& curve);

// Detection rate on positive traces: n_trials independently seeded
// simulations of (cfg, schedule), each run through the full detection pass.
struct DetectionRateStats {
    int n = 0;
    int detected = 0;
    int degenerate = 0;

    double rate() const { return n > 0 ? static_cast<double>(detected) / n : 0.0; }
};
DetectionRateStats detection_rate_stats(const ScenarioConfig& cfg,
                                        const StimulusSchedule& schedule, int n_trials,
                                        std::uint64_t seed,
                                        const DetectionConfig& det_cfg = {});
double detection_rate(const ScenarioConfig& cfg, const StimulusSchedule& schedule,
                      int n_trials, std::uint64_t seed,
                      const DetectionConfig& det_cfg = {});

// detection_rate.csv: trials,detected,degenerate,rate,wilson_lo,wilson_hi
void write_detection_rate_csv(std::ostream& out, const DetectionRateStats& stats);

// A scenario x noise x duration experiment grid, loaded from a JSON document:
//   {"kind": "fpr" | "detection_rate",
//    "scenarios": ["house", ...],        // preset names
//    "noise_sigmas": [20000, ...],       // bytes/s, overrides the preset's
//    "durations_ms": [2000, ...],        // stimulus duration per cell
//    "n": 200, "seed": 7}
struct ExperimentSpec {
    std::string kind;
    std::vector<std::string> scenarios;
    std::vector<double> noise_sigmas;
    std::vector<std::int64_t> durations_ms;
    int n = 100;
    std::uint64_t seed = 0;

    void validate() const;
    static ExperimentSpec from_json(const std::string& text);
    static ExperimentSpec from_json_file(const std::string& path);
};

struct SweepRow {
    std::string scenario;
    double noise_sigma = 0.0;
    std::int64_t duration_ms = 0;
    std::string kind;
    double value = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 1.0;
    int n = 0;
    std::int64_t runtime_ms = 0;
};

// Runs every cell of the grid. For "fpr" cells the preset's scenario is
// simulated once per (scenario, noise) without any stimulus and the preset
// pattern is probed against it; for "detection_rate" cells the preset's
// schedule is truncated to the cell duration and simulated positively.
std::vector<SweepRow> run_sweep(const ExperimentSpec& spec);

// report.csv: scenario,noise_sigma,duration_ms,kind,value,wilson_lo,wilson_hi,n,runtime_ms
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

} // namespace fpvwm
