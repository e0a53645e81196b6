#include "fpvwm/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fpvwm/bitrate.hpp"
#include "fpvwm/errors.hpp"
#include "fpvwm/presets.hpp"
#include "fpvwm/random.hpp"
#include "fpvwm/simulate.hpp"
#include "vendor/json.hpp"

namespace fpvwm {

WilsonInterval wilson(int successes, int trials, double z) {
    if (trials < 1) {
        throw ConfigError("trials", "must be >= 1, got " + std::to_string(trials));
    }
    if (successes < 0 || successes > trials) {
        throw ConfigError("successes", "must be in [0, trials], got " + std::to_string(successes));
    }
    const double n = trials;
    const double p = successes / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double hw = (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return WilsonInterval{std::max(0.0, center - hw), std::min(1.0, center + hw)};
}

std::vector<std::int64_t> FprCurve::durations_ms() const {
    std::vector<std::int64_t> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.duration_ms);
    return out;
}

std::vector<double> FprCurve::fpr() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.fpr());
    return out;
}

FprCurve fpr_curve(const PacketTrace& negative, const WatermarkPattern& pattern,
                   std::int64_t window_ms, const std::vector<std::int64_t>& durations_ms,
                   int n_placements, std::uint64_t seed, const DetectionConfig& cfg) {
    cfg.validate();
    if (n_placements < 1) {
        throw ConfigError("n_placements", "must be >= 1, got " + std::to_string(n_placements));
    }
    if (window_ms <= 0 || window_ms % cfg.bin_ms != 0) {
        throw ConfigError("window_ms", "must be a positive multiple of bin_ms, got " +
                                           std::to_string(window_ms));
    }
    if (durations_ms.empty()) {
        throw ConfigError("durations_ms", "must not be empty");
    }
    for (std::size_t i = 0; i < durations_ms.size(); ++i) {
        const std::int64_t d = durations_ms[i];
        if (d <= 0 || d % window_ms != 0) {
            throw ConfigError("durations_ms", "each duration must be a positive multiple of "
                                              "window_ms; got " + std::to_string(d));
        }
        if (i > 0 && d <= durations_ms[i - 1]) {
            throw ConfigError("durations_ms", "must be strictly ascending");
        }
    }

    const BitrateSeries series = extract_bitrate_array(negative, cfg.bin_ms);
    const std::int64_t n_bins = static_cast<std::int64_t>(series.bins.size());
    const std::int64_t covered_ms = n_bins * cfg.bin_ms;

    FprCurve curve;
    curve.n_placements = n_placements;
    curve.negative_source = negative.source_label();
    for (std::size_t di = 0; di < durations_ms.size(); ++di) {
        const std::int64_t d = durations_ms[di];
        const std::int64_t needed = d + 2 * cfg.calib_ms;
        if (covered_ms < needed) {
            throw Error("negative trace covers " + std::to_string(covered_ms) +
                        " ms but probing a " + std::to_string(d) + " ms stimulus needs at least " +
                        std::to_string(needed) + " ms (duration plus calibration on both sides)");
        }
        const WatermarkPattern prefix = truncate(pattern, d, window_ms);
        // Placements live on the bin grid with the calibration interval
        // clear of both trace edges.
        const std::int64_t k_min = cfg.calib_ms / cfg.bin_ms;
        const std::int64_t k_max = n_bins - (d + cfg.calib_ms) / cfg.bin_ms;

        FprPoint pt;
        pt.duration_ms = d;
        pt.n = n_placements;
        for (int j = 0; j < n_placements; ++j) {
            Rng rng(derive_seed(seed, di + 1, static_cast<std::uint64_t>(j) + 1));
            const std::int64_t begin =
                series.origin_ms + cfg.bin_ms * rng.uniform_int(k_min, k_max);
            try {
                const StimulusSchedule probe(prefix, window_ms, begin);
                if (under_detection(series, probe, cfg).detected) ++pt.detected;
            } catch (const DegenerateCalibrationError&) {
                ++pt.degenerate;
            } catch (const NoStimulusError&) {
                ++pt.degenerate;  // all-zero truncation: nothing to anchor on
            }
        }
        curve.points.push_back(pt);
    }
    return curve;
}

namespace {

std::string fmt_prob(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace

void write_fpr_csv(std::ostream& out, const FprCurve& curve) {
    out << "duration_ms,fpr,wilson_lo,wilson_hi,n\n";
    for (const auto& p : curve.points) {
        const WilsonInterval w = wilson(p.detected, p.n);
        out << p.duration_ms << ',' << fmt_prob(p.fpr()) << ',' << fmt_prob(w.lo) << ','
            << fmt_prob(w.hi) << ',' << p.n << '\n';
    }
}

DetectionRateStats detection_rate_stats(const ScenarioConfig& cfg,
                                        const StimulusSchedule& schedule, int n_trials,
                                        std::uint64_t seed, const DetectionConfig& det_cfg) {
    cfg.validate();
    det_cfg.validate();
    if (n_trials < 1) {
        throw ConfigError("n_trials", "must be >= 1, got " + std::to_string(n_trials));
    }
    if (schedule.first_on_ms() < det_cfg.calib_ms) {
        throw ConfigError("begin_ms", "first ON window starts at " +
                                          std::to_string(schedule.first_on_ms()) +
                                          " ms, leaving no room for the " +
                                          std::to_string(det_cfg.calib_ms) +
                                          " ms calibration interval before it");
    }
    const std::int64_t needed =
        std::max(schedule.end_ms(), schedule.first_on_ms() + det_cfg.calib_ms);
    const std::int64_t duration = ((needed + 999) / 1000) * 1000;

    DetectionRateStats stats;
    stats.n = n_trials;
    for (int t = 0; t < n_trials; ++t) {
        const PacketTrace trace =
            simulate_trace(cfg, schedule, duration, derive_seed(seed, static_cast<std::uint64_t>(t) + 1));
        const BitrateSeries series = extract_bitrate_array(trace, det_cfg.bin_ms);
        try {
            if (under_detection(series, schedule, det_cfg).detected) ++stats.detected;
        } catch (const DegenerateCalibrationError&) {
            ++stats.degenerate;
        }
    }
    return stats;
}

double detection_rate(const ScenarioConfig& cfg, const StimulusSchedule& schedule,
                      int n_trials, std::uint64_t seed, const DetectionConfig& det_cfg) {
    return detection_rate_stats(cfg, schedule, n_trials, seed, det_cfg).rate();
}

void write_detection_rate_csv(std::ostream& out, const DetectionRateStats& stats) {
    const WilsonInterval w = wilson(stats.detected, stats.n);
    out << "trials,detected,degenerate,rate,wilson_lo,wilson_hi\n";
    out << stats.n << ',' << stats.detected << ',' << stats.degenerate << ','
        << fmt_prob(stats.rate()) << ',' << fmt_prob(w.lo) << ',' << fmt_prob(w.hi) << '\n';
}

void ExperimentSpec::validate() const {
    if (kind != "fpr" && kind != "detection_rate") {
        throw ConfigError("kind", "must be 'fpr' or 'detection_rate', got '" + kind + "'");
    }
    if (scenarios.empty()) throw ConfigError("scenarios", "must not be empty");
    if (noise_sigmas.empty()) throw ConfigError("noise_sigmas", "must not be empty");
    if (durations_ms.empty()) throw ConfigError("durations_ms", "must not be empty");
    for (std::size_t i = 0; i < durations_ms.size(); ++i) {
        if (durations_ms[i] <= 0) {
            throw ConfigError("durations_ms", "must be positive");
        }
        if (i > 0 && durations_ms[i] <= durations_ms[i - 1]) {
            throw ConfigError("durations_ms", "must be strictly ascending");
        }
    }
    for (double s : noise_sigmas) {
        if (!(s >= 0)) throw ConfigError("noise_sigmas", "must be >= 0");
    }
    if (n < 1) throw ConfigError("n", "must be >= 1, got " + std::to_string(n));
}

ExperimentSpec ExperimentSpec::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("experiment json: ") + e.what());
    }
    if (!j.is_object()) {
        throw ParseError("experiment json: top level must be an object");
    }

    ExperimentSpec spec;
    bool saw_kind = false;
    for (const auto& [key, value] : j.items()) {
        if (key == "kind") {
            if (!value.is_string()) throw ConfigError("kind", "must be a string");
            spec.kind = value.get<std::string>();
            saw_kind = true;
        } else if (key == "scenarios") {
            if (!value.is_array()) throw ConfigError("scenarios", "must be an array of names");
            for (const auto& v : value) {
                if (!v.is_string()) throw ConfigError("scenarios", "entries must be strings");
                spec.scenarios.push_back(v.get<std::string>());
            }
        } else if (key == "noise_sigmas") {
            if (!value.is_array()) throw ConfigError("noise_sigmas", "must be an array");
            for (const auto& v : value) {
                if (!v.is_number()) throw ConfigError("noise_sigmas", "entries must be numbers");
                spec.noise_sigmas.push_back(v.get<double>());
            }
        } else if (key == "durations_ms") {
            if (!value.is_array()) throw ConfigError("durations_ms", "must be an array");
            for (const auto& v : value) {
                if (!v.is_number_integer()) {
                    throw ConfigError("durations_ms", "entries must be integers");
                }
                spec.durations_ms.push_back(v.get<std::int64_t>());
            }
        } else if (key == "n") {
            if (!value.is_number_integer()) throw ConfigError("n", "must be an integer");
            spec.n = value.get<int>();
        } else if (key == "seed") {
            if (!value.is_number_integer()) throw ConfigError("seed", "must be an integer");
            spec.seed = value.get<std::uint64_t>();
        } else {
            throw ConfigError(key, "unknown experiment field");
        }
    }
    if (!saw_kind) throw ConfigError("kind", "required field is missing");
    spec.validate();
    return spec;
}

ExperimentSpec ExperimentSpec::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open experiment file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::vector<SweepRow> run_sweep(const ExperimentSpec& spec) {
    spec.validate();
    const DetectionConfig det_cfg;
    std::vector<SweepRow> rows;

    for (std::size_t si = 0; si < spec.scenarios.size(); ++si) {
        const Preset& preset = find_preset(spec.scenarios[si]);
        const WatermarkPattern pattern = preset.pattern();
        for (std::size_t ni = 0; ni < spec.noise_sigmas.size(); ++ni) {
            ScenarioConfig scen = preset.scenario;
            scen.noise_sigma = spec.noise_sigmas[ni];

            PacketTrace negative(std::vector<PacketRecord>{});
            if (spec.kind == "fpr") {
                // One long stimulus-free recording per (scenario, noise) cell
                // group; every duration is probed against the same capture.
                const std::int64_t trace_ms =
                    spec.durations_ms.back() + 2 * det_cfg.calib_ms + 60'000;
                negative = simulate_trace(scen, std::nullopt, trace_ms,
                                          derive_seed(spec.seed, si + 1, ni + 1, 1));
            }

            for (std::size_t di = 0; di < spec.durations_ms.size(); ++di) {
                const std::int64_t d = spec.durations_ms[di];
                const std::uint64_t cell_seed = derive_seed(spec.seed, si + 1, ni + 1, 2 + di);
                const auto t0 = std::chrono::steady_clock::now();

                SweepRow row;
                row.scenario = preset.name;
                row.noise_sigma = spec.noise_sigmas[ni];
                row.duration_ms = d;
                row.kind = spec.kind;
                row.n = spec.n;
                if (spec.kind == "fpr") {
                    const FprCurve curve = fpr_curve(negative, pattern, preset.window_ms, {d},
                                                     spec.n, cell_seed, det_cfg);
                    const FprPoint& pt = curve.points.front();
                    row.value = pt.fpr();
                    const WilsonInterval w = wilson(pt.detected, pt.n);
                    row.wilson_lo = w.lo;
                    row.wilson_hi = w.hi;
                } else {
                    const WatermarkPattern prefix = truncate(pattern, d, preset.window_ms);
                    DetectionRateStats stats;
                    try {
                        const StimulusSchedule schedule(prefix, preset.window_ms, preset.begin_ms);
                        stats = detection_rate_stats(scen, schedule, spec.n, cell_seed, det_cfg);
                    } catch (const NoStimulusError&) {
                        stats.n = spec.n;
                        stats.degenerate = spec.n;  // all-zero truncation
                    }
                    row.value = stats.rate();
                    const WilsonInterval w = wilson(stats.detected, stats.n);
                    row.wilson_lo = w.lo;
                    row.wilson_hi = w.hi;
                }
                const auto t1 = std::chrono::steady_clock::now();
                row.runtime_ms =
                    std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "scenario,noise_sigma,duration_ms,kind,value,wilson_lo,wilson_hi,n,runtime_ms\n";
    for (const auto& r : rows) {
        out << r.scenario << ',' << r.noise_sigma << ',' << r.duration_ms << ',' << r.kind << ','
            << fmt_prob(r.value) << ',' << fmt_prob(r.wilson_lo) << ',' << fmt_prob(r.wilson_hi)
            << ',' << r.n << ',' << r.runtime_ms << '\n';
    }
}

} // namespace fpvwm
