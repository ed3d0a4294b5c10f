#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lenctl::csv {

using Row = std::vector<std::string>;

// RFC 4180 reader: quoted fields may hold commas, quotes ("") and newlines.
// Throws ParseError on an unterminated quote or stray text after a closing
// quote. A trailing empty line is ignored.
std::vector<Row> parse(std::istream& in);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);

// Shortest round-trip decimal representation.
std::string format_number(double value);

}  // namespace lenctl::csv
