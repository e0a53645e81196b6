#include "vendor/doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "vendor/json.hpp"

// End-to-end checks of the command-line tool as a subprocess. The binary
// path is baked in at configure time.
#ifndef FPVWM_CLI_PATH
#error "FPVWM_CLI_PATH must be defined by the build"
#endif

namespace {

namespace fs = std::filesystem;

int run(const std::string& args) {
    const std::string cmd = std::string(FPVWM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

const fs::path& work_dir() {
    static const fs::path dir = [] {
        std::string tmpl = (fs::temp_directory_path() / "fpvwm_cli_XXXXXX").string();
        char* made = mkdtemp(tmpl.data());
        REQUIRE(made != nullptr);
        return fs::path(made);
    }();
    return dir;
}

std::string path_of(const std::string& name) { return (work_dir() / name).string(); }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

nlohmann::json slurp_json(const std::string& path) {
    return nlohmann::json::parse(slurp(path));
}

} // namespace

TEST_CASE("version flag reports and exits cleanly") {
    CHECK(run("--version") == 0);
}

TEST_CASE("simulate writes the trace, the schedule and a manifest") {
    const std::string out = path_of("house.jsonl");
    REQUIRE(run("simulate --preset house --seed 3 --out " + out) == 0);
    CHECK(fs::is_regular_file(out));
    CHECK(fs::is_regular_file(out + ".schedule.json"));
    CHECK(fs::is_regular_file(out + ".manifest.json"));

    auto manifest = slurp_json(out + ".manifest.json");
    CHECK(manifest.at("tool") == "fpvwm");
    CHECK(manifest.at("command") == "simulate");
    CHECK(manifest.at("version").get<std::string>().size() > 0);
    CHECK(manifest.at("argv").is_array());
    CHECK(manifest.at("params").at("scenario").at("baseline_bps").get<double>() == 325000.0);
    CHECK(manifest.at("params").at("seed").get<int>() == 3);
    const auto outputs = manifest.at("outputs").get<std::vector<std::string>>();
    CHECK(outputs.size() == 2);

    auto schedule = slurp_json(out + ".schedule.json");
    CHECK(schedule.at("bits") == "111100001111111000000");
    CHECK(schedule.at("window_ms") == 2000);
    CHECK(schedule.at("begin_ms") == 4000);
}

TEST_CASE("simulate is byte-identical per seed") {
    const std::string a = path_of("det_a.jsonl");
    const std::string b = path_of("det_b.jsonl");
    const std::string c = path_of("det_c.jsonl");
    REQUIRE(run("simulate --preset house --seed 7 --out " + a) == 0);
    REQUIRE(run("simulate --preset house --seed 7 --out " + b) == 0);
    REQUIRE(run("simulate --preset house --seed 8 --out " + c) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));
}

TEST_CASE("detect agrees between exit code and result JSON") {
    const std::string trace = path_of("positive.jsonl");
    REQUIRE(run("simulate --preset house --seed 11 --out " + trace) == 0);

    // Scheduled pattern present: exit 0, detected true.
    const std::string hit = path_of("hit.json");
    CHECK(run("detect --trace " + trace + " --preset house --out " + hit) == 0);
    auto j = slurp_json(hit);
    CHECK(j.at("detected") == true);
    CHECK(j.at("degenerate") == false);
    CHECK(j.at("extracted_pattern") == "111100001111111000000");
    CHECK(fs::is_regular_file(hit + ".manifest.json"));

    // Probing a different pattern of the same shape: exit 1, detected false.
    const std::string miss = path_of("miss.json");
    CHECK(run("detect --trace " + trace +
              " --pattern 111100001111111000001 --window-ms 2000 --begin-ms 4000 --out " +
              miss) == 1);
    j = slurp_json(miss);
    CHECK(j.at("detected") == false);
    CHECK(j.at("degenerate") == false);

    // Filtering on a BSSID that never transmitted: no data, exit 2.
    const std::string empty = path_of("empty.json");
    CHECK(run("detect --trace " + trace + " --preset house --bssid 00:11:22:33:44:55 --out " +
              empty) == 2);
    j = slurp_json(empty);
    CHECK(j.at("detected") == false);
    CHECK(j.at("degenerate") == true);
    CHECK(j.contains("error"));
}

TEST_CASE("a padded stream yields the degenerate exit code") {
    const std::string trace = path_of("padded.jsonl");
    REQUIRE(run("simulate --preset house --seed 13 --padding-bps 600000 --out " + trace) == 0);
    const std::string out = path_of("padded.json");
    CHECK(run("detect --trace " + trace + " --preset house --out " + out) == 2);
    auto j = slurp_json(out);
    CHECK(j.at("degenerate") == true);
}

TEST_CASE("usage problems exit 64 and missing inputs exit 66") {
    CHECK(run("") == 64);                       // a subcommand is required
    CHECK(run("frobnicate") == 64);             // unknown subcommand
    CHECK(run("simulate --preset castle --out " + path_of("x.jsonl")) == 64);
    CHECK(run("simulate --preset house --window-ms -5 --out " + path_of("x.jsonl")) == 64);
    CHECK(run("simulate --pattern 2012 --window-ms 1000 --out " + path_of("x.jsonl")) == 64);
    CHECK(run("detect --preset house --out " + path_of("x.json")) == 64);  // --trace required
    CHECK(run("simulate --pattern 101 --window-ms 1000 --out " + path_of("x.jsonl")) == 64);
    // ^ --pattern without --preset/--config leaves the traffic model undefined
    CHECK(run("detect --trace " + path_of("no_such_trace.jsonl") + " --preset house --out " +
              path_of("x.json")) == 66);
    CHECK(run("report --config " + path_of("no_such_spec.json") + " --out " +
              path_of("x.csv")) == 66);
}

TEST_CASE("evaluate-fpr writes the curve CSV with a manifest") {
    const std::string out = path_of("fpr.csv");
    REQUIRE(run("evaluate-fpr --preset house --durations-ms 2000,4000 --n 20 "
                "--negative-duration-ms 40000 --seed 1 --out " + out) == 0);
    std::istringstream csv(slurp(out));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "duration_ms,fpr,wilson_lo,wilson_hi,n");
    int rows = 0;
    while (std::getline(csv, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 2);

    auto manifest = slurp_json(out + ".manifest.json");
    CHECK(manifest.at("command") == "evaluate-fpr");
    CHECK(manifest.at("params").at("n_placements") == 20);
    CHECK(manifest.at("params").at("durations_ms").size() == 2);
}

TEST_CASE("detection-rate writes its summary CSV") {
    const std::string out = path_of("rate.csv");
    REQUIRE(run("detection-rate --preset house --n 3 --seed 2 --out " + out) == 0);
    std::istringstream csv(slurp(out));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "trials,detected,degenerate,rate,wilson_lo,wilson_hi");
    std::getline(csv, line);
    CHECK(line.rfind("3,3,0,", 0) == 0);
    CHECK(fs::is_regular_file(out + ".manifest.json"));
}

TEST_CASE("report runs an experiment grid from a JSON spec") {
    const std::string spec = path_of("experiment.json");
    {
        std::ofstream out(spec);
        out << R"({"kind": "detection_rate", "scenarios": ["house"],
                   "noise_sigmas": [20000], "durations_ms": [42000],
                   "n": 3, "seed": 2})";
    }
    const std::string out = path_of("report.csv");
    REQUIRE(run("report --config " + spec + " --out " + out) == 0);
    std::istringstream csv(slurp(out));
    std::string line;
    std::getline(csv, line);
    CHECK(line ==
          "scenario,noise_sigma,duration_ms,kind,value,wilson_lo,wilson_hi,n,runtime_ms");
    std::getline(csv, line);
    CHECK(line.rfind("house,20000,42000,detection_rate,1.000000,", 0) == 0);

    // Malformed experiment JSON is a usage error.
    const std::string bad = path_of("bad.json");
    {
        std::ofstream outf(bad);
        outf << R"({"kind": "fpr"})";
    }
    CHECK(run("report --config " + bad + " --out " + path_of("bad.csv")) == 64);
}
