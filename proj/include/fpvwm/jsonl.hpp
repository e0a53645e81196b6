#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "fpvwm/trace.hpp"

namespace fpvwm {

struct ParseResult {
    PacketTrace trace;
    std::size_t malformed_lines = 0;  // skipped with a warning count, not fatal
};

// Reads the JSONL trace format, one record per line:
//   {"t": <int ms>, "len": <int bytes>, "src": "<MAC>", "dst": "<MAC>", "bssid": "<MAC>"}
// Records are sorted by timestamp. Malformed lines are skipped and counted;
// an unreadable stream or zero valid records is fatal.
ParseResult parse_trace(std::istream& input, std::string source_label = "");
ParseResult parse_trace_file(const std::string& path);

void write_trace(std::ostream& output, const PacketTrace& trace);
void write_trace_file(const std::string& path, const PacketTrace& trace);

} // namespace fpvwm
