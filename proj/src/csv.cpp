#include "lenctl/csv.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <iterator>
#include <ostream>

#include "lenctl/errors.hpp"

namespace lenctl::csv {

std::vector<Row> parse(std::istream& in) {
  const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::vector<Row> rows;
  Row row;
  std::string field;
  std::size_t line = 1;
  std::size_t i = 0;
  bool row_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
    row_started = false;
  };

  while (i < data.size()) {
    const char c = data[i];
    if (c == '"' && field.empty()) {
      row_started = true;
      const std::size_t open_line = line;
      ++i;
      for (;;) {
        if (i >= data.size()) throw ParseError(open_line, "unterminated quoted field");
        if (data[i] == '"') {
          if (i + 1 < data.size() && data[i + 1] == '"') {
            field += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        if (data[i] == '\n') ++line;
        field += data[i++];
      }
      if (i < data.size() && data[i] != ',' && data[i] != '\n' && data[i] != '\r') {
        throw ParseError(line, "unexpected text after closing quote");
      }
      continue;
    }
    if (c == ',') {
      row_started = true;
      end_field();
    } else if (c == '\r' && i + 1 < data.size() && data[i + 1] == '\n') {
      ++i;
      continue;
    } else if (c == '\n') {
      end_row();
      ++line;
    } else {
      row_started = true;
      field += c;
    }
    ++i;
  }
  if (row_started || !field.empty()) end_row();
  return rows;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out << ',';
    out << escape(row[i]);
  }
  out << '\n';
}

std::string format_number(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

}  // namespace lenctl::csv
