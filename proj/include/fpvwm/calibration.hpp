#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fpvwm {

// One measured response curve: value as a piecewise-linear function of knot.
// Knots must be strictly increasing; evaluation clamps outside the measured
// range unless extrapolation is configured per-curve by the caller.
struct ResponseCurve {
    std::vector<double> knots;
    std::vector<double> values;

    void validate(const std::string& name) const;
    double at(double x) const;  // piecewise-linear, clamped at both ends
};

// Bench-measured response of the video encoder to the physical stimulus:
//  - area: extra bytes/s as a function of the stimulated fraction of the frame
//  - pieces: multiplier as a function of log2(number of disjoint pieces)
//  - brightness: multiplier as a function of stimulus brightness in [0, 1]
// Stimulus color is absent by design: it was measured to have no effect.
struct CalibrationTable {
    ResponseCurve area;        // knot = area fraction, value = bytes/s
    ResponseCurve pieces;      // knot = log2(pieces), value = multiplier
    ResponseCurve brightness;  // knot = brightness, value = multiplier

    void validate() const;

    // Curves fitted to the bench measurements of a 1080p/24fps FPV feed.
    static CalibrationTable builtin();
};

// What the attacker's screen shows during an ON window.
struct StimulusResponse {
    double area_fraction = 1.0;  // fraction of the camera frame covered, [0, 1]
    int pieces = 1;              // number of disjoint pieces the area is split into
    double brightness = 0.8;     // display brightness, [0, 1]

    void validate() const;
};

// Expected extra bytes/s while the stimulus is ON:
//   delta = area(area_fraction) * pieces(log2(pieces)) * brightness(brightness)
double stimulus_delta(const StimulusResponse& resp, const CalibrationTable& table);

// CSV with a header row "knob,knot,value"; knob is one of area/pieces/brightness,
// rows may arrive in any order within a knob but knots must not repeat. All
// three knobs must be present. The pieces knot column holds the raw piece
// count (2, 4, ...), converted to log2 internally.
CalibrationTable load_calibration_csv(std::istream& in);
CalibrationTable load_calibration_csv_file(const std::string& path);

void write_calibration_csv(std::ostream& out, const CalibrationTable& table);

} // namespace fpvwm
