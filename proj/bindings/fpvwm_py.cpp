#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

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
#include "fpvwm/scenario.hpp"
#include "fpvwm/simulate.hpp"
#include "fpvwm/trace.hpp"
#include "fpvwm/version.hpp"
#include "fpvwm/watermark.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace fpvwm;

namespace {

MacAddress parse_mac_arg(const std::string& text, const char* field) {
    const auto mac = MacAddress::parse(text);
    if (!mac) {
        throw ConfigError(field, "not a valid MAC address: '" + text + "'");
    }
    return *mac;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Watermark-driven detection of filming over encrypted FPV video links";
    m.attr("__version__") = kVersion;

    // Generic library errors map onto Python's built-ins; the three verdict-
    // relevant conditions get their own types so callers can branch on them.
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const ParseError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });
    py::register_exception<UncoveredSpanError>(m, "UncoveredSpanError", PyExc_RuntimeError);
    py::register_exception<DegenerateCalibrationError>(m, "DegenerateCalibrationError",
                                                       PyExc_RuntimeError);
    py::register_exception<NoStimulusError>(m, "NoStimulusError", PyExc_RuntimeError);

    py::class_<PacketRecord>(m, "PacketRecord")
        .def(py::init([](std::int64_t t, std::int64_t len, const std::string& src,
                         const std::string& dst, const std::string& bssid) {
                 return PacketRecord{t, len, parse_mac_arg(src, "src"),
                                     parse_mac_arg(dst, "dst"), parse_mac_arg(bssid, "bssid")};
             }),
             "t"_a, "len"_a, "src"_a, "dst"_a, "bssid"_a)
        .def_readwrite("timestamp_ms", &PacketRecord::timestamp_ms)
        .def_readwrite("length_bytes", &PacketRecord::length_bytes)
        .def_property(
            "src", [](const PacketRecord& r) { return r.src_mac.to_string(); },
            [](PacketRecord& r, const std::string& v) { r.src_mac = parse_mac_arg(v, "src"); })
        .def_property(
            "dst", [](const PacketRecord& r) { return r.dst_mac.to_string(); },
            [](PacketRecord& r, const std::string& v) { r.dst_mac = parse_mac_arg(v, "dst"); })
        .def_property(
            "bssid", [](const PacketRecord& r) { return r.bssid.to_string(); },
            [](PacketRecord& r, const std::string& v) { r.bssid = parse_mac_arg(v, "bssid"); })
        .def("__eq__", [](const PacketRecord& a, const PacketRecord& b) { return a == b; },
             py::is_operator())
        .def("__repr__", [](const PacketRecord& r) {
            return "PacketRecord(t=" + std::to_string(r.timestamp_ms) +
                   ", len=" + std::to_string(r.length_bytes) + ", src=" + r.src_mac.to_string() +
                   ")";
        });

    py::class_<PacketTrace>(m, "PacketTrace")
        .def(py::init<>())
        .def(py::init([](std::vector<PacketRecord> records, std::string label) {
                 return PacketTrace(std::move(records), std::move(label));
             }),
             "records"_a, "label"_a = "")
        .def_property_readonly("records",
                               [](const PacketTrace& t) { return t.records(); })
        .def_property_readonly("source_label",
                               [](const PacketTrace& t) { return t.source_label(); })
        .def("__len__", &PacketTrace::size)
        .def("total_bytes", &PacketTrace::total_bytes)
        .def("first_timestamp_ms",
             [](const PacketTrace& t) {
                 if (t.empty()) throw ConfigError("trace", "trace is empty");
                 return t.first_timestamp_ms();
             })
        .def("last_timestamp_ms",
             [](const PacketTrace& t) {
                 if (t.empty()) throw ConfigError("trace", "trace is empty");
                 return t.last_timestamp_ms();
             })
        .def("__eq__", [](const PacketTrace& a, const PacketTrace& b) { return a == b; },
             py::is_operator());

    m.def(
        "parse_trace_file",
        [](const std::string& path) {
            ParseResult r = parse_trace_file(path);
            return py::make_tuple(std::move(r.trace), r.malformed_lines);
        },
        "path"_a, "Returns (trace, malformed_line_count).");
    m.def("write_trace_file", &write_trace_file, "path"_a, "trace"_a);
    m.def(
        "filter_station",
        [](const PacketTrace& trace, const std::string& bssid,
           const std::optional<std::string>& src) {
            std::optional<MacAddress> src_mac;
            if (src) src_mac = parse_mac_arg(*src, "src");
            return filter_station(trace, parse_mac_arg(bssid, "bssid"), src_mac);
        },
        "trace"_a, "bssid"_a, "src"_a = std::nullopt);

    py::class_<BitrateSeries>(m, "BitrateSeries")
        .def(py::init([](std::int64_t origin_ms, std::int64_t bin_ms, std::vector<double> bins) {
                 return BitrateSeries{origin_ms, bin_ms, std::move(bins)};
             }),
             "origin_ms"_a = 0, "bin_ms"_a = 1000, "bins"_a = std::vector<double>{})
        .def_readwrite("origin_ms", &BitrateSeries::origin_ms)
        .def_readwrite("bin_ms", &BitrateSeries::bin_ms)
        .def_readwrite("bins", &BitrateSeries::bins)
        .def("end_ms", &BitrateSeries::end_ms)
        .def("covers", &BitrateSeries::covers, "t0_ms"_a, "t1_ms"_a);

    m.def("extract_bitrate_array", &extract_bitrate_array, "trace"_a, "bin_ms"_a = 1000,
          "origin_ms"_a = std::nullopt);
    m.def("subseries", &subseries, "series"_a, "t0_ms"_a, "t1_ms"_a);
    m.def("mean_rate", &mean_rate, "series"_a);

    py::class_<WatermarkPattern>(m, "WatermarkPattern")
        .def(py::init([](const std::string& bits) { return WatermarkPattern(bits); }), "bits"_a)
        .def("__len__", &WatermarkPattern::size)
        .def("__str__", &WatermarkPattern::to_string)
        .def("__repr__",
             [](const WatermarkPattern& p) { return "WatermarkPattern('" + p.to_string() + "')"; })
        .def_property_readonly("bits", [](const WatermarkPattern& p) { return p.bits(); })
        .def("bit", &WatermarkPattern::bit, "i"_a)
        .def("has_stimulus", &WatermarkPattern::has_stimulus)
        .def("first_one", [](const WatermarkPattern& p) { return p.first_one(); })
        .def("__eq__",
             [](const WatermarkPattern& a, const WatermarkPattern& b) { return a == b; },
             py::is_operator());

    m.def("random_pattern", &random_pattern, "n_bits"_a, "seed"_a);
    m.def("ascii_pattern", [](const std::string& text) { return ascii_pattern(text); }, "text"_a);
    m.def("truncate", &fpvwm::truncate, "pattern"_a, "duration_ms"_a, "window_ms"_a);

    py::class_<StimulusSchedule>(m, "StimulusSchedule")
        .def(py::init<WatermarkPattern, std::int64_t, std::int64_t>(), "pattern"_a, "window_ms"_a,
             "begin_ms"_a)
        .def_property_readonly("pattern", &StimulusSchedule::pattern)
        .def_property_readonly("window_ms", &StimulusSchedule::window_ms)
        .def_property_readonly("begin_ms", &StimulusSchedule::begin_ms)
        .def_property_readonly("end_ms", &StimulusSchedule::end_ms)
        .def_property_readonly("first_on_ms", &StimulusSchedule::first_on_ms)
        .def("active", &StimulusSchedule::active, "t_ms"_a);

    m.def("schedule_to_json", &schedule_to_json, "schedule"_a);
    m.def("schedule_from_json", &schedule_from_json, "text"_a);

    py::class_<ResponseCurve>(m, "ResponseCurve")
        .def(py::init([](std::vector<double> knots, std::vector<double> values) {
                 return ResponseCurve{std::move(knots), std::move(values)};
             }),
             "knots"_a, "values"_a)
        .def_readwrite("knots", &ResponseCurve::knots)
        .def_readwrite("values", &ResponseCurve::values)
        .def("at", &ResponseCurve::at, "x"_a);

    py::class_<CalibrationTable>(m, "CalibrationTable")
        .def(py::init<>())
        .def_static("builtin", &CalibrationTable::builtin)
        .def_readwrite("area", &CalibrationTable::area)
        .def_readwrite("pieces", &CalibrationTable::pieces)
        .def_readwrite("brightness", &CalibrationTable::brightness)
        .def("validate", &CalibrationTable::validate);

    m.def("load_calibration_csv_file", &load_calibration_csv_file, "path"_a);

    py::class_<StimulusResponse>(m, "StimulusResponse")
        .def(py::init([](double area_fraction, int pieces, double brightness) {
                 return StimulusResponse{area_fraction, pieces, brightness};
             }),
             "area_fraction"_a = 1.0, "pieces"_a = 1, "brightness"_a = 0.8)
        .def_readwrite("area_fraction", &StimulusResponse::area_fraction)
        .def_readwrite("pieces", &StimulusResponse::pieces)
        .def_readwrite("brightness", &StimulusResponse::brightness);

    m.def("stimulus_delta", &stimulus_delta, "response"_a,
          "table"_a = CalibrationTable::builtin());
    m.def(
        "stimulus_delta_of",
        [](double area_fraction, int pieces, double brightness, const CalibrationTable& table) {
            return stimulus_delta(StimulusResponse{area_fraction, pieces, brightness}, table);
        },
        "area_fraction"_a, "pieces"_a = 1, "brightness"_a = 0.8,
        "table"_a = CalibrationTable::builtin());

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("baseline_bps", &ScenarioConfig::baseline_bps)
        .def_readwrite("stimulus", &ScenarioConfig::stimulus)
        .def_readwrite("fps", &ScenarioConfig::fps)
        .def_readwrite("gop_len", &ScenarioConfig::gop_len)
        .def_readwrite("iframe_boost", &ScenarioConfig::iframe_boost)
        .def_readwrite("noise_sigma", &ScenarioConfig::noise_sigma)
        .def_readwrite("loss_rate", &ScenarioConfig::loss_rate)
        .def_readwrite("padding_bps", &ScenarioConfig::padding_bps)
        .def_readwrite("mtu_bytes", &ScenarioConfig::mtu_bytes)
        .def_readwrite("delta_override_bps", &ScenarioConfig::delta_override_bps)
        .def_property(
            "drone_mac", [](const ScenarioConfig& c) { return c.drone_mac.to_string(); },
            [](ScenarioConfig& c, const std::string& v) {
                c.drone_mac = parse_mac_arg(v, "drone_mac");
            })
        .def_property(
            "controller_mac",
            [](const ScenarioConfig& c) { return c.controller_mac.to_string(); },
            [](ScenarioConfig& c, const std::string& v) {
                c.controller_mac = parse_mac_arg(v, "controller_mac");
            })
        .def_property(
            "bssid", [](const ScenarioConfig& c) { return c.bssid.to_string(); },
            [](ScenarioConfig& c, const std::string& v) { c.bssid = parse_mac_arg(v, "bssid"); })
        .def("validate", &ScenarioConfig::validate)
        .def("effective_delta_bps", &ScenarioConfig::effective_delta_bps,
             "table"_a = CalibrationTable::builtin())
        .def("to_json", &ScenarioConfig::to_json)
        .def_static("from_json", &ScenarioConfig::from_json, "text"_a)
        .def_static("from_json_file", &ScenarioConfig::from_json_file, "path"_a);

    m.def("simulate_trace", &simulate_trace, "cfg"_a, "schedule"_a, "duration_ms"_a, "seed"_a,
          "table"_a = CalibrationTable::builtin());
    m.def("apply_loss", &apply_loss, "trace"_a, "loss_rate"_a, "seed"_a);
    m.def("apply_padding", &apply_padding, "trace"_a, "target_bps"_a, "mtu_bytes"_a = 1500);

    py::class_<DetectionConfig>(m, "DetectionConfig")
        .def(py::init([](std::int64_t calib_ms, std::int64_t bin_ms) {
                 return DetectionConfig{calib_ms, bin_ms};
             }),
             "calib_ms"_a = 4000, "bin_ms"_a = 1000)
        .def_readwrite("calib_ms", &DetectionConfig::calib_ms)
        .def_readwrite("bin_ms", &DetectionConfig::bin_ms)
        .def("validate", &DetectionConfig::validate);

    py::class_<CalibrationLevels>(m, "CalibrationLevels")
        .def_readonly("stable_bitrate", &CalibrationLevels::stable_bitrate)
        .def_readonly("stimulus_bitrate", &CalibrationLevels::stimulus_bitrate)
        .def_readonly("cutoff", &CalibrationLevels::cutoff);

    py::class_<DetectionResult>(m, "DetectionResult")
        .def_readonly("detected", &DetectionResult::detected)
        .def_readonly("extracted_pattern", &DetectionResult::extracted_pattern)
        .def_readonly("cutoff", &DetectionResult::cutoff)
        .def_readonly("stable_bitrate", &DetectionResult::stable_bitrate)
        .def_readonly("stimulus_bitrate", &DetectionResult::stimulus_bitrate)
        .def_readonly("per_bit_means", &DetectionResult::per_bit_means)
        .def("to_json", &DetectionResult::to_json);

    m.def("calibrate", &calibrate, "series"_a, "anchor_ms"_a, "cfg"_a = DetectionConfig{});
    m.def(
        "extract_pattern",
        [](const BitrateSeries& series, double cutoff, std::int64_t begin_ms, std::int64_t end_ms,
           std::int64_t window_ms) {
            std::vector<double> means;
            WatermarkPattern p = extract_pattern(series, cutoff, begin_ms, end_ms, window_ms,
                                                 &means);
            return py::make_tuple(std::move(p), std::move(means));
        },
        "series"_a, "cutoff"_a, "begin_ms"_a, "end_ms"_a, "window_ms"_a,
        "Returns (pattern, per_window_means).");
    m.def("under_detection", &under_detection, "series"_a, "schedule"_a,
          "cfg"_a = DetectionConfig{});

    m.def(
        "wilson",
        [](int successes, int trials, double z) {
            const WilsonInterval w = wilson(successes, trials, z);
            return py::make_tuple(w.lo, w.hi);
        },
        "successes"_a, "trials"_a, "z"_a = 1.96);

    py::class_<FprPoint>(m, "FprPoint")
        .def_readonly("duration_ms", &FprPoint::duration_ms)
        .def_readonly("n", &FprPoint::n)
        .def_readonly("detected", &FprPoint::detected)
        .def_readonly("degenerate", &FprPoint::degenerate)
        .def("fpr", &FprPoint::fpr);

    py::class_<FprCurve>(m, "FprCurve")
        .def_readonly("points", &FprCurve::points)
        .def_readonly("n_placements", &FprCurve::n_placements)
        .def_readonly("negative_source", &FprCurve::negative_source)
        .def("durations_ms", &FprCurve::durations_ms)
        .def("fpr", &FprCurve::fpr);

    m.def("fpr_curve", &fpr_curve, "negative"_a, "pattern"_a, "window_ms"_a, "durations_ms"_a,
          "n_placements"_a, "seed"_a, "cfg"_a = DetectionConfig{});

    py::class_<DetectionRateStats>(m, "DetectionRateStats")
        .def_readonly("n", &DetectionRateStats::n)
        .def_readonly("detected", &DetectionRateStats::detected)
        .def_readonly("degenerate", &DetectionRateStats::degenerate)
        .def("rate", &DetectionRateStats::rate);

    m.def("detection_rate_stats", &detection_rate_stats, "cfg"_a, "schedule"_a, "n_trials"_a,
          "seed"_a, "det_cfg"_a = DetectionConfig{});
    m.def("detection_rate", &detection_rate, "cfg"_a, "schedule"_a, "n_trials"_a, "seed"_a,
          "det_cfg"_a = DetectionConfig{});

    py::class_<Preset>(m, "Preset")
        .def_readonly("name", &Preset::name)
        .def_readonly("description", &Preset::description)
        .def_readonly("scenario", &Preset::scenario)
        .def_readonly("pattern_bits", &Preset::pattern_bits)
        .def_readonly("window_ms", &Preset::window_ms)
        .def_readonly("begin_ms", &Preset::begin_ms)
        .def("pattern", &Preset::pattern)
        .def("schedule", &Preset::schedule);

    m.def("presets", []() { return presets(); });
    m.def("find_preset", &find_preset, "name"_a, py::return_value_policy::copy);
}
