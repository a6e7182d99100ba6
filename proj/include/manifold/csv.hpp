#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "manifold/error.hpp"

namespace manifold::csv {

struct Record {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "path=" + path + " cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, "path=" + path + " read failed");
  return ss.str();
}

/// RFC-4180 reader: quoted fields may contain commas, CRLF and doubled quotes.
/// Blank lines are skipped.
inline std::vector<Record> parse(std::string_view text, const std::string& origin = "<memory>") {
  std::vector<Record> out;
  Record cur;
  std::string field;
  std::size_t line = 1;
  bool in_quotes = false;
  bool field_started = false;
  bool record_has_content = false;
  cur.line = 1;

  auto end_field = [&] {
    cur.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    if (record_has_content || !cur.fields.empty()) {
      end_field();
      out.push_back(std::move(cur));
    }
    cur = Record{};
    field.clear();
    field_started = false;
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty())
          throw Error(ErrorKind::Format,
                      "file=" + origin + " line=" + std::to_string(line) + " stray quote");
        in_quotes = true;
        field_started = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        cur.line = line;
        break;
      default:
        if (!record_has_content) cur.line = line;
        field.push_back(c);
        field_started = true;
        record_has_content = true;
    }
  }
  if (in_quotes)
    throw Error(ErrorKind::Format,
                "file=" + origin + " line=" + std::to_string(line) + " unterminated quote");
  end_record();
  return out;
}

inline std::vector<Record> read(const std::string& path) { return parse(read_file(path), path); }

/// Quotes a field only when needed.
inline std::string escape(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string r = "\"";
  for (char c : s) {
    if (c == '"') r += "\"\"";
    else r += c;
  }
  r += '"';
  return r;
}

/// Parses a double; returns false if the cell is not entirely numeric.
inline bool parse_double(std::string_view s, double& v) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

/// Shortest text that parses back to the identical double.
inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace manifold::csv
