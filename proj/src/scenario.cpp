#include "fpvwm/scenario.hpp"

#include <fstream>
#include <sstream>

#include "fpvwm/errors.hpp"
#include "vendor/json.hpp"

namespace fpvwm {

void ScenarioConfig::validate() const {
    if (!(baseline_bps > 0)) {
        throw ConfigError("baseline_bps", "must be positive, got " + std::to_string(baseline_bps));
    }
    stimulus.validate();
    if (fps < 1) {
        throw ConfigError("fps", "must be >= 1, got " + std::to_string(fps));
    }
    if (gop_len < 1) {
        throw ConfigError("gop_len", "must be >= 1, got " + std::to_string(gop_len));
    }
    if (!(iframe_boost >= 1.0)) {
        throw ConfigError("iframe_boost", "must be >= 1, got " + std::to_string(iframe_boost));
    }
    if (!(noise_sigma >= 0.0)) {
        throw ConfigError("noise_sigma", "must be >= 0, got " + std::to_string(noise_sigma));
    }
    if (!(loss_rate >= 0.0 && loss_rate < 1.0)) {
        throw ConfigError("loss_rate", "must be in [0, 1), got " + std::to_string(loss_rate));
    }
    if (padding_bps && !(*padding_bps > 0)) {
        throw ConfigError("padding_bps", "must be positive when set");
    }
    if (delta_override_bps && !(*delta_override_bps >= 0)) {
        throw ConfigError("delta_override_bps", "must be >= 0 when set");
    }
    if (mtu_bytes < 1) {
        throw ConfigError("mtu_bytes", "must be >= 1, got " + std::to_string(mtu_bytes));
    }
}

double ScenarioConfig::effective_delta_bps(const CalibrationTable& table) const {
    if (delta_override_bps) return *delta_override_bps;
    return stimulus_delta(stimulus, table);
}

std::string ScenarioConfig::to_json() const {
    nlohmann::ordered_json j;
    j["baseline_bps"] = baseline_bps;
    j["area_fraction"] = stimulus.area_fraction;
    j["pieces"] = stimulus.pieces;
    j["brightness"] = stimulus.brightness;
    j["fps"] = fps;
    j["gop_len"] = gop_len;
    j["iframe_boost"] = iframe_boost;
    j["noise_sigma"] = noise_sigma;
    j["loss_rate"] = loss_rate;
    if (padding_bps) j["padding_bps"] = *padding_bps; else j["padding_bps"] = nullptr;
    j["mtu_bytes"] = mtu_bytes;
    if (delta_override_bps) j["delta_override_bps"] = *delta_override_bps;
    else j["delta_override_bps"] = nullptr;
    j["drone_mac"] = drone_mac.to_string();
    j["controller_mac"] = controller_mac.to_string();
    j["bssid"] = bssid.to_string();
    return j.dump(2);
}

namespace {

double as_number(const nlohmann::json& v, const char* key) {
    if (!v.is_number()) {
        throw ConfigError(key, "must be a number");
    }
    return v.get<double>();
}

int as_int(const nlohmann::json& v, const char* key) {
    if (!v.is_number_integer()) {
        throw ConfigError(key, "must be an integer");
    }
    return v.get<int>();
}

MacAddress as_mac(const nlohmann::json& v, const char* key) {
    if (!v.is_string()) {
        throw ConfigError(key, "must be a MAC address string");
    }
    const auto mac = MacAddress::parse(v.get<std::string>());
    if (!mac) {
        throw ConfigError(key, "not a valid MAC address: '" + v.get<std::string>() + "'");
    }
    return *mac;
}

} // namespace

ScenarioConfig ScenarioConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("scenario json: ") + e.what());
    }
    if (!j.is_object()) {
        throw ParseError("scenario json: top level must be an object");
    }

    ScenarioConfig cfg;
    bool saw_baseline = false;
    for (const auto& [key, value] : j.items()) {
        if (value.is_null()) continue;  // null means "leave at default"
        if (key == "baseline_bps") {
            cfg.baseline_bps = as_number(value, "baseline_bps");
            saw_baseline = true;
        } else if (key == "area_fraction") {
            cfg.stimulus.area_fraction = as_number(value, "area_fraction");
        } else if (key == "pieces") {
            cfg.stimulus.pieces = as_int(value, "pieces");
        } else if (key == "brightness") {
            cfg.stimulus.brightness = as_number(value, "brightness");
        } else if (key == "fps") {
            cfg.fps = as_int(value, "fps");
        } else if (key == "gop_len") {
            cfg.gop_len = as_int(value, "gop_len");
        } else if (key == "iframe_boost") {
            cfg.iframe_boost = as_number(value, "iframe_boost");
        } else if (key == "noise_sigma") {
            cfg.noise_sigma = as_number(value, "noise_sigma");
        } else if (key == "loss_rate") {
            cfg.loss_rate = as_number(value, "loss_rate");
        } else if (key == "padding_bps") {
            cfg.padding_bps = as_number(value, "padding_bps");
        } else if (key == "mtu_bytes") {
            cfg.mtu_bytes = as_int(value, "mtu_bytes");
        } else if (key == "delta_override_bps") {
            cfg.delta_override_bps = as_number(value, "delta_override_bps");
        } else if (key == "drone_mac") {
            cfg.drone_mac = as_mac(value, "drone_mac");
        } else if (key == "controller_mac") {
            cfg.controller_mac = as_mac(value, "controller_mac");
        } else if (key == "bssid") {
            cfg.bssid = as_mac(value, "bssid");
        } else {
            throw ConfigError(key, "unknown scenario field");
        }
    }
    if (!saw_baseline) {
        throw ConfigError("baseline_bps", "required field is missing");
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig ScenarioConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open scenario file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

} // namespace fpvwm
