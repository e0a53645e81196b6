#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fpvwm/bitrate.hpp"
#include "fpvwm/calibration.hpp"
#include "fpvwm/detector.hpp"
#include "fpvwm/errors.hpp"
#include "fpvwm/evaluate.hpp"
#include "fpvwm/jsonl.hpp"
#include "fpvwm/presets.hpp"
#include "fpvwm/random.hpp"
#include "fpvwm/scenario.hpp"
#include "fpvwm/simulate.hpp"
#include "fpvwm/trace.hpp"
#include "fpvwm/version.hpp"
#include "fpvwm/watermark.hpp"
#include "vendor/CLI11.hpp"
#include "vendor/json.hpp"

namespace {

using namespace fpvwm;

constexpr int kExitDetected = 0;
constexpr int kExitNotDetected = 1;
constexpr int kExitDegenerate = 2;
constexpr int kExitUsage = 64;
constexpr int kExitNoInput = 66;

// Missing input files exit with a dedicated code; thrown before any loader
// gets a chance to report them as parse failures.
struct MissingFile {
    std::string path;
};

void require_file(const std::string& path) {
    if (!std::filesystem::is_regular_file(path)) throw MissingFile{path};
}

PacketTrace load_trace(const std::string& path) {
    require_file(path);
    ParseResult parsed = parse_trace_file(path);
    if (parsed.malformed_lines > 0) {
        std::cerr << "warning: skipped " << parsed.malformed_lines << " malformed line(s) in "
                  << path << "\n";
    }
    return std::move(parsed.trace);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

// Every output gets a sibling <out>.manifest.json recording the exact
// invocation, resolved parameters and tool version, so any published file is
// reproducible from its manifest alone.
void write_manifest(const std::string& out_path, const std::string& command,
                    const std::vector<std::string>& argv, const nlohmann::ordered_json& params,
                    const std::vector<std::string>& outputs) {
    nlohmann::ordered_json m;
    m["tool"] = "fpvwm";
    m["version"] = kVersion;
    m["command"] = command;
    m["argv"] = argv;
    m["params"] = params;
    m["outputs"] = outputs;
    write_text_file(out_path + ".manifest.json", m.dump(2));
}

// Flags shared by every subcommand that needs a watermark schedule.
struct ScheduleFlags {
    std::string preset;
    std::string schedule_file;
    std::string pattern_bits;
    std::string ascii_text;
    std::int64_t window_ms = 0;
    std::int64_t begin_ms = 4000;
    bool window_set = false;
    bool begin_set = false;
};

void add_schedule_flags(CLI::App* cmd, ScheduleFlags& f, bool with_preset = true) {
    if (with_preset) {
        cmd->add_option("--preset", f.preset, "named scenario preset (house, subject)");
    }
    cmd->add_option("--schedule", f.schedule_file, "schedule JSON {bits, window_ms, begin_ms}");
    auto* pat = cmd->add_option("--pattern", f.pattern_bits, "watermark bits, e.g. 101100");
    auto* asc = cmd->add_option("--ascii", f.ascii_text, "watermark from ASCII text (8 bits/char)");
    pat->excludes(asc);
    cmd->add_option("--window-ms", f.window_ms, "milliseconds per watermark bit")
        ->check(CLI::PositiveNumber)
        ->each([&f](const std::string&) { f.window_set = true; });
    cmd->add_option("--begin-ms", f.begin_ms, "schedule start time (default 4000)")
        ->each([&f](const std::string&) { f.begin_set = true; });
}

// Resolution order: explicit schedule file, then --pattern/--ascii (window
// from flag or preset), then the preset's own schedule.
std::optional<StimulusSchedule> resolve_schedule(const ScheduleFlags& f) {
    const Preset* preset = f.preset.empty() ? nullptr : &find_preset(f.preset);
    if (!f.schedule_file.empty()) {
        require_file(f.schedule_file);
        return schedule_from_json_file(f.schedule_file);
    }
    std::optional<WatermarkPattern> pattern;
    if (!f.pattern_bits.empty()) pattern = WatermarkPattern(f.pattern_bits);
    if (!f.ascii_text.empty()) pattern = ascii_pattern(f.ascii_text);
    if (pattern) {
        std::int64_t window = f.window_set ? f.window_ms : (preset ? preset->window_ms : 0);
        if (window <= 0) {
            throw ConfigError("window_ms", "--pattern/--ascii needs --window-ms (or a preset)");
        }
        const std::int64_t begin = f.begin_set ? f.begin_ms : (preset ? preset->begin_ms : 4000);
        return make_schedule(*pattern, window, begin);
    }
    if (preset) {
        WatermarkPattern p = preset->pattern();
        const std::int64_t window = f.window_set ? f.window_ms : preset->window_ms;
        const std::int64_t begin = f.begin_set ? f.begin_ms : preset->begin_ms;
        return make_schedule(std::move(p), window, begin);
    }
    return std::nullopt;
}

// Flags shared by subcommands that synthesize traffic.
struct ScenarioFlags {
    std::string config_file;
    double loss = 0.0;
    double noise_sigma = 0.0;
    double padding_bps = 0.0;
    bool loss_set = false;
    bool noise_set = false;
    bool padding_set = false;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f) {
    cmd->add_option("--config", f.config_file, "scenario JSON file (overrides the preset)");
    cmd->add_option("--loss", f.loss, "override loss_rate")->each([&f](const std::string&) {
        f.loss_set = true;
    });
    cmd->add_option("--noise-sigma", f.noise_sigma, "override noise_sigma (bytes/s)")
        ->each([&f](const std::string&) { f.noise_set = true; });
    cmd->add_option("--padding-bps", f.padding_bps, "pad every second to this rate (bytes/s)")
        ->each([&f](const std::string&) { f.padding_set = true; });
}

ScenarioConfig resolve_scenario(const ScenarioFlags& f, const std::string& preset_name) {
    ScenarioConfig cfg;
    if (!f.config_file.empty()) {
        require_file(f.config_file);
        cfg = ScenarioConfig::from_json_file(f.config_file);
    } else if (!preset_name.empty()) {
        cfg = find_preset(preset_name).scenario;
    } else {
        throw ConfigError("config", "give --preset or --config to define the traffic scenario");
    }
    if (f.loss_set) cfg.loss_rate = f.loss;
    if (f.noise_set) cfg.noise_sigma = f.noise_sigma;
    if (f.padding_set) cfg.padding_bps = f.padding_bps;
    cfg.validate();
    return cfg;
}

nlohmann::ordered_json scenario_json(const ScenarioConfig& cfg) {
    return nlohmann::ordered_json::parse(cfg.to_json());
}

nlohmann::ordered_json schedule_json(const StimulusSchedule& s) {
    return nlohmann::ordered_json::parse(schedule_to_json(s));
}

std::int64_t default_duration_ms(const StimulusSchedule& schedule, std::int64_t calib_ms) {
    const std::int64_t needed =
        std::max(schedule.end_ms(), schedule.first_on_ms() + calib_ms);
    return ((needed + 999) / 1000) * 1000;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
    ScheduleFlags sched;
    ScenarioFlags scen;
    bool no_stimulus = false;
    std::int64_t duration_ms = 0;
    std::uint64_t seed = 0;
    std::string out = "trace.jsonl";
};

int run_simulate(const SimulateOpts& o, const std::vector<std::string>& argv) {
    const ScenarioConfig cfg = resolve_scenario(o.scen, o.sched.preset);
    std::optional<StimulusSchedule> schedule;
    if (!o.no_stimulus) schedule = resolve_schedule(o.sched);

    std::int64_t duration = o.duration_ms;
    if (duration <= 0) {
        duration = schedule ? default_duration_ms(*schedule, 4000) : 60'000;
    }

    const PacketTrace trace = simulate_trace(cfg, schedule, duration, o.seed);
    write_trace_file(o.out, trace);

    std::vector<std::string> outputs{o.out};
    if (schedule) {
        const std::string sched_path = o.out + ".schedule.json";
        write_text_file(sched_path, schedule_to_json(*schedule));
        outputs.push_back(sched_path);
    }

    nlohmann::ordered_json params;
    params["scenario"] = scenario_json(cfg);
    params["schedule"] = schedule ? schedule_json(*schedule) : nlohmann::ordered_json(nullptr);
    params["duration_ms"] = duration;
    params["seed"] = o.seed;
    write_manifest(o.out, "simulate", argv, params, outputs);

    std::cout << "wrote " << trace.size() << " records (" << trace.total_bytes() << " bytes, "
              << duration << " ms) to " << o.out << "\n";
    return 0;
}

// ------------------------------------------------------------------ detect

struct DetectOpts {
    ScheduleFlags sched;
    std::string trace_file;
    std::string bssid;
    std::string src;
    std::int64_t bin_ms = 1000;
    std::int64_t calib_ms = 4000;
    std::string out = "detection.json";
};

int run_detect(const DetectOpts& o, const std::vector<std::string>& argv) {
    const std::optional<StimulusSchedule> schedule = resolve_schedule(o.sched);
    if (!schedule) {
        throw ConfigError("pattern", "detect needs a schedule: --schedule, --pattern/--ascii "
                                     "with --window-ms/--begin-ms, or --preset");
    }
    DetectionConfig det;
    det.bin_ms = o.bin_ms;
    det.calib_ms = o.calib_ms;
    det.validate();

    PacketTrace trace = load_trace(o.trace_file);
    if (!o.src.empty() && o.bssid.empty()) {
        throw ConfigError("src", "--src only works together with --bssid");
    }
    if (!o.bssid.empty()) {
        const auto bssid = MacAddress::parse(o.bssid);
        if (!bssid) throw ConfigError("bssid", "not a valid MAC address: '" + o.bssid + "'");
        std::optional<MacAddress> src;
        if (!o.src.empty()) {
            src = MacAddress::parse(o.src);
            if (!src) throw ConfigError("src", "not a valid MAC address: '" + o.src + "'");
        }
        trace = filter_station(trace, *bssid, src);
    }

    nlohmann::ordered_json params;
    params["trace"] = o.trace_file;
    params["bssid"] = o.bssid.empty() ? nlohmann::ordered_json(nullptr)
                                      : nlohmann::ordered_json(o.bssid);
    params["src"] = o.src.empty() ? nlohmann::ordered_json(nullptr)
                                  : nlohmann::ordered_json(o.src);
    params["schedule"] = schedule_json(*schedule);
    params["bin_ms"] = det.bin_ms;
    params["calib_ms"] = det.calib_ms;

    try {
        const BitrateSeries series = extract_bitrate_array(trace, det.bin_ms);
        const DetectionResult result = under_detection(series, *schedule, det);
        write_text_file(o.out, result.to_json());
        write_manifest(o.out, "detect", argv, params, {o.out});
        std::cout << (result.detected ? "detected" : "not detected") << ": extracted "
                  << result.extracted_pattern.to_string() << ", cutoff " << result.cutoff << "\n";
        return result.detected ? kExitDetected : kExitNotDetected;
    } catch (const ConfigError&) {
        throw;
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        // Degenerate calibration, uncovered spans, or an empty/filtered-out
        // trace: no verdict is possible. The JSON mirrors the exit code.
        nlohmann::ordered_json j;
        j["detected"] = false;
        j["degenerate"] = true;
        j["error"] = e.what();
        write_text_file(o.out, j.dump(2));
        write_manifest(o.out, "detect", argv, params, {o.out});
        std::cout << "no verdict: " << e.what() << "\n";
        return kExitDegenerate;
    }
}

// -------------------------------------------------------------- evaluate-fpr

struct FprOpts {
    ScheduleFlags sched;
    ScenarioFlags scen;
    std::string trace_file;
    std::int64_t negative_duration_ms = 1'200'000;  // 20 minutes
    std::vector<std::int64_t> durations_ms;
    int n = 1000;
    std::int64_t bin_ms = 1000;
    std::int64_t calib_ms = 4000;
    std::uint64_t seed = 0;
    std::string out = "fpr_curve.csv";
};

int run_fpr(const FprOpts& o, const std::vector<std::string>& argv) {
    const std::optional<StimulusSchedule> schedule = resolve_schedule(o.sched);
    if (!schedule) {
        throw ConfigError("pattern", "evaluate-fpr needs the probed watermark: --preset or "
                                     "--pattern/--ascii with --window-ms");
    }
    DetectionConfig det;
    det.bin_ms = o.bin_ms;
    det.calib_ms = o.calib_ms;
    det.validate();

    std::vector<std::int64_t> durations = o.durations_ms;
    if (durations.empty()) {
        // Default probe grid: every multiple of the bit window up to the
        // full pattern span.
        for (std::int64_t d = schedule->window_ms(); d <= schedule->end_ms() - schedule->begin_ms();
             d += schedule->window_ms()) {
            durations.push_back(d);
        }
    }

    nlohmann::ordered_json params;
    PacketTrace negative;
    if (!o.trace_file.empty()) {
        negative = load_trace(o.trace_file);
        params["negative_trace"] = o.trace_file;
    } else {
        ScenarioConfig cfg = resolve_scenario(o.scen, o.sched.preset);
        negative = simulate_trace(cfg, std::nullopt, o.negative_duration_ms,
                                  derive_seed(o.seed, 1));
        params["negative_scenario"] = scenario_json(cfg);
        params["negative_duration_ms"] = o.negative_duration_ms;
    }

    const FprCurve curve = fpr_curve(negative, schedule->pattern(), schedule->window_ms(),
                                     durations, o.n, derive_seed(o.seed, 2), det);

    std::ofstream csv(o.out);
    if (!csv) throw Error("cannot write '" + o.out + "'");
    write_fpr_csv(csv, curve);
    csv.close();

    params["pattern"] = schedule->pattern().to_string();
    params["window_ms"] = schedule->window_ms();
    params["durations_ms"] = durations;
    params["n_placements"] = o.n;
    params["bin_ms"] = det.bin_ms;
    params["calib_ms"] = det.calib_ms;
    params["seed"] = o.seed;
    write_manifest(o.out, "evaluate-fpr", argv, params, {o.out});

    for (const auto& p : curve.points) {
        std::cout << "fpr(" << p.duration_ms << " ms) = " << p.fpr() << "  (" << p.detected << "/"
                  << p.n << " detected, " << p.degenerate << " degenerate)\n";
    }
    std::cout << "wrote " << o.out << "\n";
    return 0;
}

// ------------------------------------------------------------ detection-rate

struct RateOpts {
    ScheduleFlags sched;
    ScenarioFlags scen;
    int n = 100;
    std::int64_t bin_ms = 1000;
    std::int64_t calib_ms = 4000;
    std::uint64_t seed = 0;
    std::string out = "detection_rate.csv";
};

int run_rate(const RateOpts& o, const std::vector<std::string>& argv) {
    const std::optional<StimulusSchedule> schedule = resolve_schedule(o.sched);
    if (!schedule) {
        throw ConfigError("pattern", "detection-rate needs a schedule: --preset or "
                                     "--pattern/--ascii with --window-ms");
    }
    const ScenarioConfig cfg = resolve_scenario(o.scen, o.sched.preset);
    DetectionConfig det;
    det.bin_ms = o.bin_ms;
    det.calib_ms = o.calib_ms;
    det.validate();

    const DetectionRateStats stats = detection_rate_stats(cfg, *schedule, o.n, o.seed, det);

    std::ofstream csv(o.out);
    if (!csv) throw Error("cannot write '" + o.out + "'");
    write_detection_rate_csv(csv, stats);
    csv.close();

    nlohmann::ordered_json params;
    params["scenario"] = scenario_json(cfg);
    params["schedule"] = schedule_json(*schedule);
    params["n_trials"] = o.n;
    params["bin_ms"] = det.bin_ms;
    params["calib_ms"] = det.calib_ms;
    params["seed"] = o.seed;
    write_manifest(o.out, "detection-rate", argv, params, {o.out});

    std::cout << "detection rate " << stats.detected << "/" << stats.n << " ("
              << stats.degenerate << " degenerate), wrote " << o.out << "\n";
    return 0;
}

// ------------------------------------------------------------------ report

struct ReportOpts {
    std::string config_file;
    std::int64_t seed = -1;
    std::string out = "report.csv";
};

int run_report(const ReportOpts& o, const std::vector<std::string>& argv) {
    require_file(o.config_file);
    ExperimentSpec spec = ExperimentSpec::from_json_file(o.config_file);
    if (o.seed >= 0) spec.seed = static_cast<std::uint64_t>(o.seed);

    const std::vector<SweepRow> rows = run_sweep(spec);

    std::ofstream csv(o.out);
    if (!csv) throw Error("cannot write '" + o.out + "'");
    write_sweep_csv(csv, rows);
    csv.close();

    nlohmann::ordered_json params;
    params["experiment"] = nlohmann::ordered_json{{"kind", spec.kind},
                                                  {"scenarios", spec.scenarios},
                                                  {"noise_sigmas", spec.noise_sigmas},
                                                  {"durations_ms", spec.durations_ms},
                                                  {"n", spec.n},
                                                  {"seed", spec.seed}};
    params["config_file"] = o.config_file;
    write_manifest(o.out, "report", argv, params, {o.out});

    std::cout << "wrote " << rows.size() << " rows to " << o.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"watermark-driven detection of filming over encrypted FPV video links"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    const std::vector<std::string> argv_vec(argv, argv + argc);

    SimulateOpts sim;
    auto* sim_cmd = app.add_subcommand("simulate", "synthesize an encrypted-traffic trace");
    add_schedule_flags(sim_cmd, sim.sched);
    add_scenario_flags(sim_cmd, sim.scen);
    sim_cmd->add_flag("--no-stimulus", sim.no_stimulus, "simulate without any watermark");
    sim_cmd->add_option("--duration-ms", sim.duration_ms,
                        "trace length (default: schedule end + calibration room)");
    sim_cmd->add_option("--seed", sim.seed, "simulation seed");
    sim_cmd->add_option("--out", sim.out, "output trace path (JSONL)");

    DetectOpts det;
    auto* det_cmd = app.add_subcommand("detect", "run the detection pass on a trace");
    det_cmd->add_option("--trace", det.trace_file, "input trace (JSONL)")->required();
    add_schedule_flags(det_cmd, det.sched);
    det_cmd->add_option("--bssid", det.bssid, "keep only records of this BSSID");
    det_cmd->add_option("--src", det.src, "additionally filter on source MAC");
    det_cmd->add_option("--bin-ms", det.bin_ms, "aggregation bin width");
    det_cmd->add_option("--calib-ms", det.calib_ms, "calibration interval length");
    det_cmd->add_option("--out", det.out, "output JSON path");

    FprOpts fpr;
    auto* fpr_cmd =
        app.add_subcommand("evaluate-fpr", "false-positive rate vs. stimulus duration");
    add_schedule_flags(fpr_cmd, fpr.sched);
    add_scenario_flags(fpr_cmd, fpr.scen);
    fpr_cmd->add_option("--trace", fpr.trace_file,
                        "negative trace file (default: simulate one, stimulus-free)");
    fpr_cmd->add_option("--negative-duration-ms", fpr.negative_duration_ms,
                        "length of the generated negative trace");
    fpr_cmd->add_option("--durations-ms", fpr.durations_ms,
                        "comma-separated stimulus durations to probe")
        ->delimiter(',');
    fpr_cmd->add_option("--n", fpr.n, "placements per duration");
    fpr_cmd->add_option("--bin-ms", fpr.bin_ms, "aggregation bin width");
    fpr_cmd->add_option("--calib-ms", fpr.calib_ms, "calibration interval length");
    fpr_cmd->add_option("--seed", fpr.seed, "experiment seed");
    fpr_cmd->add_option("--out", fpr.out, "output CSV path");

    RateOpts rate;
    auto* rate_cmd =
        app.add_subcommand("detection-rate", "detection rate over seeded positive runs");
    add_schedule_flags(rate_cmd, rate.sched);
    add_scenario_flags(rate_cmd, rate.scen);
    rate_cmd->add_option("--n", rate.n, "number of seeded trials");
    rate_cmd->add_option("--bin-ms", rate.bin_ms, "aggregation bin width");
    rate_cmd->add_option("--calib-ms", rate.calib_ms, "calibration interval length");
    rate_cmd->add_option("--seed", rate.seed, "experiment seed");
    rate_cmd->add_option("--out", rate.out, "output CSV path");

    ReportOpts rep;
    auto* rep_cmd = app.add_subcommand("report", "run a scenario x noise x duration grid");
    rep_cmd->add_option("--config", rep.config_file, "experiment JSON file")->required();
    rep_cmd->add_option("--seed", rep.seed, "override the experiment seed");
    rep_cmd->add_option("--out", rep.out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (sim_cmd->parsed()) return run_simulate(sim, argv_vec);
        if (det_cmd->parsed()) return run_detect(det, argv_vec);
        if (fpr_cmd->parsed()) return run_fpr(fpr, argv_vec);
        if (rate_cmd->parsed()) return run_rate(rate, argv_vec);
        if (rep_cmd->parsed()) return run_report(rep, argv_vec);
    } catch (const MissingFile& e) {
        std::cerr << "error: no such file: " << e.path << "\n";
        return kExitNoInput;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 70;
    }
    return kExitUsage;
}
