#include "fpvwm/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "fpvwm/errors.hpp"

namespace fpvwm {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

void ResponseCurve::validate(const std::string& name) const {
    if (knots.size() != values.size()) {
        throw ConfigError(name, "has " + std::to_string(knots.size()) + " knots but " +
                                    std::to_string(values.size()) + " values");
    }
    if (knots.size() < 2) {
        throw ConfigError(name, "needs at least two knots to interpolate, got " +
                                    std::to_string(knots.size()));
    }
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (!std::isfinite(knots[i]) || !std::isfinite(values[i])) {
            throw ConfigError(name, "knot " + std::to_string(i) + " is not finite");
        }
        if (i > 0 && knots[i] <= knots[i - 1]) {
            throw ConfigError(name, "knots must be strictly increasing (" +
                                        fmt_double(knots[i - 1]) + " then " +
                                        fmt_double(knots[i]) + ")");
        }
    }
}

double ResponseCurve::at(double x) const {
    if (x <= knots.front()) return values.front();
    if (x >= knots.back()) return values.back();
    const auto hi = std::upper_bound(knots.begin(), knots.end(), x);
    const std::size_t i = static_cast<std::size_t>(hi - knots.begin());
    const double t = (x - knots[i - 1]) / (knots[i] - knots[i - 1]);
    return std::lerp(values[i - 1], values[i], t);
}

void CalibrationTable::validate() const {
    area.validate("area");
    pieces.validate("pieces");
    brightness.validate("brightness");
    for (double v : area.values) {
        if (v < 0) throw ConfigError("area", "response values must be >= 0 bytes/s");
    }
    for (double v : pieces.values) {
        if (v <= 0) throw ConfigError("pieces", "multipliers must be positive");
    }
    for (double v : brightness.values) {
        if (v <= 0) throw ConfigError("brightness", "multipliers must be positive");
    }
    if (pieces.knots.front() < 0) {
        throw ConfigError("pieces", "piece counts below 1 are meaningless");
    }
}

CalibrationTable CalibrationTable::builtin() {
    CalibrationTable t;
    // Extra bytes/s vs. fraction of the frame covered by the stimulus.
    t.area.knots = {0.0, 0.012, 0.025, 0.05, 0.10, 0.25, 0.50, 0.75, 1.0};
    t.area.values = {0.0,    10'000.0, 15'000.0, 41'000.0, 50'000.0,
                     110'000.0, 140'000.0, 170'000.0, 200'000.0};
    // Multiplier vs. log2 of the number of disjoint pieces: splitting the same
    // area raises edge density, which costs the encoder a little more.
    t.pieces.knots = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};  // 1, 2, 4, 8, 16, 32 pieces
    t.pieces.values = {1.00, 1.04, 1.10, 1.20, 1.30, 1.36};
    // Multiplier vs. display brightness; dim stimuli below 0.4 measured flat.
    t.brightness.knots = {0.0, 0.2, 0.4, 0.6, 0.8};
    t.brightness.values = {1.00, 1.00, 1.05, 1.10, 1.25};
    return t;
}

void StimulusResponse::validate() const {
    if (!(area_fraction >= 0.0 && area_fraction <= 1.0)) {
        throw ConfigError("area_fraction", "must be in [0, 1], got " + fmt_double(area_fraction));
    }
    if (pieces < 1) {
        throw ConfigError("pieces", "must be >= 1, got " + std::to_string(pieces));
    }
    if (!(brightness >= 0.0 && brightness <= 1.0)) {
        throw ConfigError("brightness", "must be in [0, 1], got " + fmt_double(brightness));
    }
}

double stimulus_delta(const StimulusResponse& resp, const CalibrationTable& table) {
    resp.validate();
    table.validate();
    return table.area.at(resp.area_fraction) *
           table.pieces.at(std::log2(static_cast<double>(resp.pieces))) *
           table.brightness.at(resp.brightness);
}

namespace {

double parse_field_double(const std::string& field, int line_no, const char* what) {
    if (field.empty()) {
        throw ParseError("calibration csv line " + std::to_string(line_no) + ": empty " +
                         std::string(what) + " field");
    }
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size() || !std::isfinite(v)) {
        throw ParseError("calibration csv line " + std::to_string(line_no) + ": bad " +
                         std::string(what) + " '" + field + "'");
    }
    return v;
}

} // namespace

CalibrationTable load_calibration_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("calibration csv: empty input");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "knob,knot,value") {
        throw ParseError("calibration csv: expected header 'knob,knot,value', got '" + line + "'");
    }

    std::map<std::string, std::map<double, double>> rows;  // knob -> knot -> value
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
            throw ParseError("calibration csv line " + std::to_string(line_no) +
                             ": expected 3 comma-separated fields");
        }
        const std::string knob = line.substr(0, c1);
        if (knob != "area" && knob != "pieces" && knob != "brightness") {
            throw ParseError("calibration csv line " + std::to_string(line_no) +
                             ": unknown knob '" + knob + "'");
        }
        double knot = parse_field_double(line.substr(c1 + 1, c2 - c1 - 1), line_no, "knot");
        const double value = parse_field_double(line.substr(c2 + 1), line_no, "value");
        if (knob == "pieces") {
            if (knot < 1.0) {
                throw ParseError("calibration csv line " + std::to_string(line_no) +
                                 ": piece count must be >= 1");
            }
            knot = std::log2(knot);
        }
        if (!rows[knob].emplace(knot, value).second) {
            throw ParseError("calibration csv line " + std::to_string(line_no) +
                             ": duplicate knot for knob '" + knob + "'");
        }
    }

    CalibrationTable table;
    for (auto [name, curve] : {std::pair{"area", &table.area},
                               std::pair{"pieces", &table.pieces},
                               std::pair{"brightness", &table.brightness}}) {
        const auto it = rows.find(name);
        if (it == rows.end()) {
            throw ParseError("calibration csv: no rows for knob '" + std::string(name) + "'");
        }
        for (const auto& [knot, value] : it->second) {
            curve->knots.push_back(knot);
            curve->values.push_back(value);
        }
    }
    table.validate();
    return table;
}

CalibrationTable load_calibration_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open calibration csv '" + path + "'");
    }
    return load_calibration_csv(in);
}

void write_calibration_csv(std::ostream& out, const CalibrationTable& table) {
    table.validate();
    out << "knob,knot,value\n";
    for (std::size_t i = 0; i < table.area.knots.size(); ++i) {
        out << "area," << fmt_double(table.area.knots[i]) << ','
            << fmt_double(table.area.values[i]) << '\n';
    }
    for (std::size_t i = 0; i < table.pieces.knots.size(); ++i) {
        out << "pieces," << fmt_double(std::exp2(table.pieces.knots[i])) << ','
            << fmt_double(table.pieces.values[i]) << '\n';
    }
    for (std::size_t i = 0; i < table.brightness.knots.size(); ++i) {
        out << "brightness," << fmt_double(table.brightness.knots[i]) << ','
            << fmt_double(table.brightness.values[i]) << '\n';
    }
}

} // namespace fpvwm
