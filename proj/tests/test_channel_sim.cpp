#include "vendor/doctest.h"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "fpvwm/calibration.hpp"
#include "fpvwm/detector.hpp"
#include "fpvwm/errors.hpp"
#include "fpvwm/presets.hpp"
#include "fpvwm/scenario.hpp"
#include "fpvwm/simulate.hpp"
#include "helpers.hpp"

using namespace fpvwm;
using testutil::TestRng;

namespace {

// Per-second byte totals of a trace starting at t = 0.
std::vector<std::int64_t> second_totals(const PacketTrace& trace, std::int64_t n_seconds) {
    std::vector<std::int64_t> totals(static_cast<std::size_t>(n_seconds), 0);
    for (const auto& r : trace.records())
        totals[static_cast<std::size_t>(r.timestamp_ms / 1000)] += r.length_bytes;
    return totals;
}

ScenarioConfig clean_scenario(double baseline, double area, int pieces, double bright) {
    ScenarioConfig cfg;
    cfg.baseline_bps = baseline;
    cfg.stimulus.area_fraction = area;
    cfg.stimulus.pieces = pieces;
    cfg.stimulus.brightness = bright;
    return cfg;  // fps 24, gop 24, boost 3, no noise/loss/padding
}

StimulusSchedule always_on(std::int64_t duration_ms) {
    return StimulusSchedule(WatermarkPattern("1"), duration_ms, 0);
}

} // namespace

TEST_CASE("response curves evaluate knots exactly and clamp at both ends") {
    auto table = CalibrationTable::builtin();

    const std::vector<double> area_knots = {0.0, 0.012, 0.025, 0.05, 0.10,
                                            0.25, 0.50, 0.75, 1.0};
    const std::vector<double> area_values = {0.0,      10'000.0,  15'000.0,
                                             41'000.0, 50'000.0,  110'000.0,
                                             140'000.0, 170'000.0, 200'000.0};
    REQUIRE(table.area.knots == area_knots);
    for (std::size_t i = 0; i < area_knots.size(); ++i)
        CHECK(table.area.at(area_knots[i]) == area_values[i]);

    // Between knots: linear. Below/above the measured range: clamped.
    CHECK(table.area.at(0.075) == doctest::Approx((41'000.0 + 50'000.0) / 2.0));
    CHECK(table.area.at(-1.0) == 0.0);
    CHECK(table.area.at(2.0) == 200'000.0);

    CHECK(table.pieces.at(0.0) == 1.00);              // log2(1)
    CHECK(table.pieces.at(1.0) == doctest::Approx(1.04));
    CHECK(table.pieces.at(5.0) == doctest::Approx(1.36));
    CHECK(table.pieces.at(9.0) == doctest::Approx(1.36));  // clamp past 32 pieces

    CHECK(table.brightness.at(0.0) == 1.00);
    CHECK(table.brightness.at(0.8) == doctest::Approx(1.25));
    CHECK(table.brightness.at(1.0) == doctest::Approx(1.25));  // clamp past 0.8
}

TEST_CASE("stimulus delta composes area, pieces and brightness") {
    auto table = CalibrationTable::builtin();

    CHECK(stimulus_delta({.area_fraction = 1.0, .pieces = 1, .brightness = 0.0}, table) ==
          doctest::Approx(200'000.0));
    CHECK(stimulus_delta({.area_fraction = 1.0, .pieces = 1, .brightness = 0.8}, table) ==
          doctest::Approx(250'000.0));
    CHECK(stimulus_delta({.area_fraction = 0.25, .pieces = 8, .brightness = 0.0}, table) ==
          doctest::Approx(132'000.0));
    CHECK(stimulus_delta({.area_fraction = 0.05, .pieces = 1, .brightness = 0.0}, table) ==
          doctest::Approx(41'000.0));

    // Piece counts off the measured powers of two interpolate on log2.
    const double t = std::log2(3.0) - 1.0;
    const double p3 = 1.04 + t * (1.10 - 1.04);
    CHECK(stimulus_delta({.area_fraction = 1.0, .pieces = 3, .brightness = 0.0}, table) ==
          doctest::Approx(200'000.0 * p3));

    CHECK_THROWS_AS(stimulus_delta({.area_fraction = -0.1, .pieces = 1, .brightness = 0.0},
                                   table), ConfigError);
    CHECK_THROWS_AS(stimulus_delta({.area_fraction = 1.1, .pieces = 1, .brightness = 0.0},
                                   table), ConfigError);
    CHECK_THROWS_AS(stimulus_delta({.area_fraction = 0.5, .pieces = 0, .brightness = 0.0},
                                   table), ConfigError);
    CHECK_THROWS_AS(stimulus_delta({.area_fraction = 0.5, .pieces = 1, .brightness = 1.5},
                                   table), ConfigError);
}

TEST_CASE("stimulus delta is monotone non-decreasing in every knob") {
    auto table = CalibrationTable::builtin();
    TestRng rng(501);
    for (int c = 0; c < 150; ++c) {
        double a1 = rng.real(0.0, 1.0), a2 = rng.real(0.0, 1.0);
        if (a1 > a2) std::swap(a1, a2);
        int p1 = static_cast<int>(rng.i64(1, 64)), p2 = static_cast<int>(rng.i64(1, 64));
        if (p1 > p2) std::swap(p1, p2);
        double b1 = rng.real(0.0, 1.0), b2 = rng.real(0.0, 1.0);
        if (b1 > b2) std::swap(b1, b2);

        const double base = rng.real(0.0, 1.0);
        const int basep = static_cast<int>(rng.i64(1, 64));
        const double baseb = rng.real(0.0, 1.0);

        CHECK(stimulus_delta({a1, basep, baseb}, table) <=
              stimulus_delta({a2, basep, baseb}, table));
        CHECK(stimulus_delta({base, p1, baseb}, table) <=
              stimulus_delta({base, p2, baseb}, table));
        CHECK(stimulus_delta({base, basep, b1}, table) <=
              stimulus_delta({base, basep, b2}, table));
    }
}

TEST_CASE("calibration tables round-trip through CSV exactly") {
    auto table = CalibrationTable::builtin();
    std::stringstream buf;
    write_calibration_csv(buf, table);

    // Piece knots are serialized as raw counts, not their log2.
    CHECK(buf.str().find("pieces,2,") != std::string::npos);
    CHECK(buf.str().find("pieces,32,") != std::string::npos);

    auto loaded = load_calibration_csv(buf);
    CHECK(loaded.area.knots == table.area.knots);
    CHECK(loaded.area.values == table.area.values);
    CHECK(loaded.brightness.knots == table.brightness.knots);
    CHECK(loaded.brightness.values == table.brightness.values);
    REQUIRE(loaded.pieces.knots.size() == table.pieces.knots.size());
    for (std::size_t i = 0; i < table.pieces.knots.size(); ++i) {
        CHECK(loaded.pieces.knots[i] == doctest::Approx(table.pieces.knots[i]).epsilon(1e-12));
        CHECK(loaded.pieces.values[i] == table.pieces.values[i]);
    }
}

TEST_CASE("malformed calibration CSVs are parse errors") {
    auto feed = [](const std::string& text) {
        std::stringstream buf(text);
        return load_calibration_csv(buf);
    };
    CHECK_THROWS_AS(feed("nonsense\narea,0,0\n"), ParseError);
    CHECK_THROWS_AS(feed("knob,knot,value\ncolor,0,0\n"), ParseError);  // unknown knob
    CHECK_THROWS_AS(feed("knob,knot,value\narea,0,0\narea,0,5\n"
                         "pieces,1,1\nbrightness,0,1\n"), ParseError);  // duplicate knot
    CHECK_THROWS_AS(feed("knob,knot,value\narea,0,zero\n"), ParseError);
    CHECK_THROWS_AS(feed("knob,knot,value\narea,0,0\narea,1,200000\n"
                         "pieces,1,1\n"), ParseError);  // brightness knob missing
    CHECK_THROWS_AS(feed(""), ParseError);
}

TEST_CASE("scenario configs round-trip through JSON and reject unknown keys") {
    ScenarioConfig cfg;
    cfg.baseline_bps = 325'000.0;
    cfg.noise_sigma = 20'000.0;
    cfg.loss_rate = 0.01;
    cfg.delta_override_bps = 185'000.0;
    cfg.stimulus.area_fraction = 0.4;
    cfg.stimulus.pieces = 2;
    cfg.stimulus.brightness = 0.7;

    auto back = ScenarioConfig::from_json(cfg.to_json());
    CHECK(back.baseline_bps == cfg.baseline_bps);
    CHECK(back.noise_sigma == cfg.noise_sigma);
    CHECK(back.loss_rate == cfg.loss_rate);
    CHECK(back.delta_override_bps == cfg.delta_override_bps);
    CHECK(back.stimulus.area_fraction == cfg.stimulus.area_fraction);
    CHECK(back.stimulus.pieces == cfg.stimulus.pieces);
    CHECK(back.drone_mac == cfg.drone_mac);
    CHECK_FALSE(back.padding_bps.has_value());

    try {
        ScenarioConfig::from_json(R"({"baseline_bps": 1000, "frobnicate": 3})");
        FAIL("unknown key accepted");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "frobnicate");
    }
    CHECK_THROWS_AS(ScenarioConfig::from_json(R"({"fps": 24})"), ConfigError);  // baseline required
    CHECK_THROWS_AS(ScenarioConfig::from_json("[1,2]"), ParseError);
    CHECK_THROWS_AS(ScenarioConfig::from_json("{"), ParseError);

    // null means "use the default" for optional fields.
    auto with_null = ScenarioConfig::from_json(
        R"({"baseline_bps": 1000, "padding_bps": null, "fps": null})");
    CHECK_FALSE(with_null.padding_bps.has_value());
    CHECK(with_null.fps == 24);
}

TEST_CASE("noise-free windows carry exactly baseline plus the table delta") {
    auto table = CalibrationTable::builtin();
    const std::vector<double> knots = {0.0, 0.012, 0.025, 0.05, 0.10, 0.25, 0.50, 0.75, 1.0};
    for (double knot : knots) {
        auto cfg = clean_scenario(120'000.0, knot, 1, 0.0);
        const std::int64_t expected =
            120'000 + std::llround(table.area.at(knot));
        auto trace = (knot == 0.0)
                         ? simulate_trace(cfg, std::nullopt, 5000, 1)
                         : simulate_trace(cfg, always_on(5000), 5000, 1);
        for (auto total : second_totals(trace, 5)) CHECK(total == expected);
    }
}

TEST_CASE("fractional table deltas still emit exact integer window totals") {
    // 200000 * 1.04 is not representable exactly in binary; the emitted
    // windows must still carry exactly 328000 bytes.
    auto cfg = clean_scenario(120'000.0, 1.0, 2, 0.0);
    auto trace = simulate_trace(cfg, always_on(6000), 6000, 3);
    for (auto total : second_totals(trace, 6)) CHECK(total == 328'000);
}

TEST_CASE("ON and OFF windows split exactly when windows align to seconds") {
    ScenarioConfig cfg = clean_scenario(150'000.0, 0.0, 1, 0.0);
    cfg.delta_override_bps = 60'000.0;
    StimulusSchedule sched(WatermarkPattern("0110"), 2000, 4000);
    auto trace = simulate_trace(cfg, sched, 12000, 5);
    auto totals = second_totals(trace, 12);
    for (int s = 0; s < 12; ++s) {
        const bool on = (s >= 6 && s < 10);  // bits 1-2 of the schedule
        CHECK(totals[static_cast<std::size_t>(s)] == (on ? 210'000 : 150'000));
    }
}

TEST_CASE("the intra-frame boost reshapes frames but never window totals") {
    ScenarioConfig flat = clean_scenario(200'000.0, 0.25, 1, 0.8);
    flat.iframe_boost = 1.0;
    ScenarioConfig boosted = flat;
    boosted.iframe_boost = 3.0;

    auto sched = StimulusSchedule(WatermarkPattern("101"), 2000, 4000);
    auto t_flat = simulate_trace(flat, sched, 10000, 9);
    auto t_boost = simulate_trace(boosted, sched, 10000, 9);

    CHECK(second_totals(t_flat, 10) == second_totals(t_boost, 10));
    CHECK(t_flat.total_bytes() == t_boost.total_bytes());
    // The boost does change the within-second layout.
    CHECK(t_flat.records() != t_boost.records());
}

TEST_CASE("simulation is deterministic per seed even with noise and loss") {
    auto& hp = find_preset("house");
    auto a = simulate_trace(hp.scenario, hp.schedule(), 46000, 77);
    auto b = simulate_trace(hp.scenario, hp.schedule(), 46000, 77);
    CHECK(a == b);
    auto c = simulate_trace(hp.scenario, hp.schedule(), 46000, 78);
    CHECK(a.records() != c.records());
}

TEST_CASE("encoder noise never drives a frame budget negative") {
    ScenarioConfig cfg = clean_scenario(5'000.0, 0.0, 1, 0.0);
    cfg.noise_sigma = 50'000.0;  // sigma an order of magnitude above the mean
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto trace = simulate_trace(cfg, std::nullopt, 8000, seed);
        for (const auto& r : trace.records()) CHECK(r.length_bytes >= 0);
        for (auto total : second_totals(trace, 8)) CHECK(total >= 0);
    }
}

TEST_CASE("capture loss drops records at the configured rate") {
    TestRng rng(601);
    auto trace = testutil::random_trace(rng, 10'000, 0, 60'000);

    auto half = apply_loss(trace, 0.5, 1234);
    const auto kept = static_cast<std::int64_t>(half.size());
    CHECK(std::llabs(kept - 5000) <= 150);  // ~3.2 sigma for Binomial(10000, 0.5)

    CHECK(apply_loss(trace, 0.0, 99) == trace);
    CHECK(apply_loss(trace, 0.5, 1234) == half);  // deterministic per seed
    CHECK(apply_loss(trace, 0.5, 4321).records() != half.records());

    CHECK_THROWS_AS(apply_loss(trace, -0.1, 1), ConfigError);
    CHECK_THROWS_AS(apply_loss(trace, 1.0, 1), ConfigError);
}

TEST_CASE("padding flattens every aligned window to exactly the target") {
    auto& hp = find_preset("house");
    auto trace = simulate_trace(hp.scenario, hp.schedule(), 46000, 21);
    auto padded = apply_padding(trace, 600'000.0);

    auto totals = second_totals(padded, 46);
    for (auto total : totals) CHECK(total == 600'000);

    // The flattened stream defeats detection: calibration is degenerate.
    auto series = extract_bitrate_array(
        filter_station(padded, hp.scenario.bssid, hp.scenario.drone_mac), 1000, 0);
    CHECK_THROWS_AS(under_detection(series, hp.schedule()), DegenerateCalibrationError);
}

TEST_CASE("padding a square-wave stream erases the modulation") {
    ScenarioConfig cfg = clean_scenario(100'000.0, 0.0, 1, 0.0);
    cfg.delta_override_bps = 200'000.0;
    StimulusSchedule sched(WatermarkPattern("1010"), 2000, 4000);
    auto trace = simulate_trace(cfg, sched, 12000, 2);

    auto padded = apply_padding(trace, 300'000.0);
    for (auto total : second_totals(padded, 12)) CHECK(total == 300'000);
}

TEST_CASE("padding below the observed peak names the required minimum") {
    std::vector<PacketRecord> records;
    records.push_back({.timestamp_ms = 100, .length_bytes = 700'000});
    records.push_back({.timestamp_ms = 1100, .length_bytes = 10'000});
    PacketTrace trace(records);
    try {
        apply_padding(trace, 600'000.0);
        FAIL("padding below the peak was accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("700000") != std::string::npos);
    }
    // Exactly the peak is allowed.
    auto padded = apply_padding(trace, 700'000.0);
    for (auto total : second_totals(padded, 2)) CHECK(total == 700'000);
}

TEST_CASE("padding aligns windows to the second containing the first record") {
    std::vector<PacketRecord> records;
    records.push_back({.timestamp_ms = 1500, .length_bytes = 1000});
    records.push_back({.timestamp_ms = 2500, .length_bytes = 2000});
    records.push_back({.timestamp_ms = 3999, .length_bytes = 500});
    PacketTrace trace(records);

    auto padded = apply_padding(trace, 5000.0);
    auto series = extract_bitrate_array(padded, 1000, 1000);
    REQUIRE(series.bins.size() == 3);
    for (double b : series.bins) CHECK(b == 5000.0);
    for (const auto& r : padded.records()) CHECK(r.timestamp_ms >= 1000);
}

TEST_CASE("simulation validates its shape parameters") {
    auto cfg = clean_scenario(100'000.0, 0.5, 1, 0.5);
    CHECK_THROWS_AS(simulate_trace(cfg, std::nullopt, 0, 1), ConfigError);
    CHECK_THROWS_AS(simulate_trace(cfg, std::nullopt, 1500, 1), ConfigError);
    CHECK_THROWS_AS(simulate_trace(cfg, std::nullopt, -3000, 1), ConfigError);
    CHECK_THROWS_AS(simulate_trace(cfg, always_on(6000), 5000, 1), ConfigError);

    ScenarioConfig bad = cfg;
    bad.baseline_bps = 0.0;
    CHECK_THROWS_AS(simulate_trace(bad, std::nullopt, 5000, 1), ConfigError);
    bad = cfg;
    bad.fps = 0;
    CHECK_THROWS_AS(simulate_trace(bad, std::nullopt, 5000, 1), ConfigError);
    bad = cfg;
    bad.padding_bps = 50'000.0;  // below baseline + delta
    CHECK_THROWS_AS(simulate_trace(bad, std::nullopt, 5000, 1), ConfigError);
}

TEST_CASE("in-model padding flattens windows even under loss") {
    ScenarioConfig cfg = clean_scenario(100'000.0, 0.0, 1, 0.0);
    cfg.delta_override_bps = 50'000.0;
    cfg.loss_rate = 0.2;
    cfg.noise_sigma = 10'000.0;
    cfg.padding_bps = 250'000.0;
    auto trace = simulate_trace(cfg, always_on(8000), 8000, 6);
    for (auto total : second_totals(trace, 8)) CHECK(total == 250'000);
}
