#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "webbend/errors.hpp"

namespace webbend::csv {

// Splits one CSV record. Supports RFC 4180 double-quoted fields on a single line.
inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  for (auto& f : fields) {
    auto b = f.find_first_not_of(" \t");
    auto e = f.find_last_not_of(" \t");
    f = (b == std::string::npos) ? std::string{} : f.substr(b, e - b + 1);
  }
  return fields;
}

inline std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

struct Record {
  std::size_t row;  // physical 1-based line number
  std::vector<std::string> fields;
};

// A parsed CSV table. Blank lines and lines starting with '#' are skipped but still counted
// in row numbers. The first remaining line is the header.
struct Table {
  std::string source;
  std::size_t header_row = 0;
  std::vector<std::string> header;
  std::vector<Record> records;
};

inline Table parse(std::istream& in, const std::string& source) {
  Table t;
  t.source = source;
  std::string line;
  std::size_t row = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++row;
    if (row == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.front() == '#') continue;
    if (!have_header) {
      t.header = split(line);
      t.header_row = row;
      have_header = true;
    } else {
      t.records.push_back({row, split(line)});
    }
  }
  if (!have_header) throw ParseError(source, 0, "missing header");
  return t;
}

inline Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError(path);
  return parse(in, path);
}

inline Table parse_string(const std::string& text, const std::string& source = "<string>") {
  std::istringstream in(text);
  return parse(in, source);
}

// Requires the header to begin with `expected` (extra trailing columns are allowed).
inline void expect_header(const Table& t, const std::vector<std::string>& expected) {
  bool ok = t.header.size() >= expected.size();
  for (std::size_t i = 0; ok && i < expected.size(); ++i) ok = (t.header[i] == expected[i]);
  if (!ok) {
    std::string want;
    for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
    throw ParseError(t.source, t.header_row, "bad header, expected '" + want + "'");
  }
}

}  // namespace webbend::csv
