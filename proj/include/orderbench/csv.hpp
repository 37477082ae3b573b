#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace orderbench {

struct CsvRow {
    std::vector<std::string> cells;
    std::size_t line = 0; // 1-based line on which the row starts
};

struct CsvError : std::runtime_error {
    CsvError(const std::string& what, std::size_t line_) : std::runtime_error(what), line(line_) {}
    std::size_t line;
};

// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
// line breaks. Accepts LF or CRLF record separators. Blank lines are skipped.
std::vector<CsvRow> parse_csv(std::string_view text);

} // namespace orderbench
