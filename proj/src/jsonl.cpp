#include "fpvwm/jsonl.hpp"

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

#include "vendor/json.hpp"

#include "fpvwm/errors.hpp"

namespace fpvwm {

namespace {

std::optional<PacketRecord> parse_line(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;

    const auto t = j.find("t");
    const auto len = j.find("len");
    const auto src = j.find("src");
    const auto dst = j.find("dst");
    const auto bssid = j.find("bssid");
    if (t == j.end() || len == j.end() || src == j.end() || dst == j.end() ||
        bssid == j.end())
        return std::nullopt;
    if (!t->is_number_integer() || !len->is_number_integer()) return std::nullopt;
    if (!src->is_string() || !dst->is_string() || !bssid->is_string()) return std::nullopt;

    PacketRecord rec;
    rec.timestamp_ms = t->get<std::int64_t>();
    rec.length_bytes = len->get<std::int64_t>();
    if (rec.timestamp_ms < 0 || rec.length_bytes < 0) return std::nullopt;

    const auto s = MacAddress::parse(src->get<std::string>());
    const auto d = MacAddress::parse(dst->get<std::string>());
    const auto b = MacAddress::parse(bssid->get<std::string>());
    if (!s || !d || !b) return std::nullopt;
    rec.src_mac = *s;
    rec.dst_mac = *d;
    rec.bssid = *b;
    return rec;
}

bool is_blank(const std::string& line) {
    for (const char c : line)
        if (c != ' ' && c != '\t' && c != '\r') return false;
    return true;
}

} // namespace

ParseResult parse_trace(std::istream& input, std::string source_label) {
    if (!input) throw ParseError("parse_trace: unreadable input stream");

    std::vector<PacketRecord> records;
    std::size_t malformed = 0;
    std::string line;
    while (std::getline(input, line)) {
        if (is_blank(line)) continue;
        if (auto rec = parse_line(line)) {
            records.push_back(*rec);
        } else {
            ++malformed;
        }
    }
    if (input.bad()) throw ParseError("parse_trace: read failure");
    if (records.empty())
        throw ParseError("parse_trace: no valid records (" +
                         std::to_string(malformed) + " malformed lines)");

    return ParseResult{PacketTrace(std::move(records), std::move(source_label)),
                       malformed};
}

ParseResult parse_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("parse_trace: cannot open " + path);
    return parse_trace(in, path);
}

void write_trace(std::ostream& output, const PacketTrace& trace) {
    for (const auto& r : trace.records()) {
        nlohmann::ordered_json j;
        j["t"] = r.timestamp_ms;
        j["len"] = r.length_bytes;
        j["src"] = r.src_mac.to_string();
        j["dst"] = r.dst_mac.to_string();
        j["bssid"] = r.bssid.to_string();
        output << j.dump() << '\n';
    }
}

void write_trace_file(const std::string& path, const PacketTrace& trace) {
    std::ofstream out(path);
    if (!out) throw Error("write_trace: cannot open " + path);
    write_trace(out, trace);
    if (!out) throw Error("write_trace: write failure on " + path);
}

} // namespace fpvwm
