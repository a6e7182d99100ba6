#pragma once

// Reader for the subset of TOML used by run configurations: comments,
// [table] and [dotted.table] headers, bare/quoted/dotted keys, basic and
// literal strings, integers, floats, booleans, (multi-line) arrays and
// inline tables. Dates and multi-line strings are not supported.

#include <cctype>
#include <string>
#include <string_view>

#include <json.hpp>

#include "manifold/csv.hpp"
#include "manifold/error.hpp"

namespace manifold::toml {

class Parser {
 public:
  Parser(std::string_view text, std::string origin) : s_(text), origin_(std::move(origin)) {}

  nlohmann::ordered_json parse() {
    nlohmann::ordered_json root = nlohmann::ordered_json::object();
    nlohmann::ordered_json* table = &root;
    for (;;) {
      skip_ws_comments_newlines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        if (peek() == '[') fail("arrays of tables are not supported");
        skip_ws();
        auto path = parse_key_path();
        skip_ws();
        expect(']');
        table = &root;
        for (const auto& k : path) {
          auto& next = (*table)[k];
          if (next.is_null()) next = nlohmann::ordered_json::object();
          if (!next.is_object()) fail("key '" + k + "' is not a table");
          table = &next;
        }
      } else {
        parse_assignment(*table);
      }
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Config, "file=" + origin_ + " line=" + std::to_string(line_) + " " + what);
  }
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }
  void skip_ws_comments_newlines() {
    for (;;) {
      skip_ws();
      skip_comment();
      if (peek() == '\r') {
        ++pos_;
      } else if (peek() == '\n') {
        ++pos_;
        ++line_;
      } else {
        return;
      }
    }
  }
  void end_of_line() {
    skip_ws();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    ++pos_;
    ++line_;
  }

  std::string parse_key_part() {
    if (peek() == '"') return parse_basic_string();
    if (peek() == '\'') return parse_literal_string();
    std::string k;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) k += s_[pos_++];
    if (k.empty()) fail("expected key");
    return k;
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path{parse_key_part()};
    for (;;) {
      skip_ws();
      if (peek() != '.') break;
      ++pos_;
      skip_ws();
      path.push_back(parse_key_part());
    }
    return path;
  }

  void parse_assignment(nlohmann::ordered_json& table) {
    auto path = parse_key_path();
    skip_ws();
    expect('=');
    skip_ws();
    nlohmann::ordered_json* t = &table;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      auto& next = (*t)[path[i]];
      if (next.is_null()) next = nlohmann::ordered_json::object();
      if (!next.is_object()) fail("key '" + path[i] + "' is not a table");
      t = &next;
    }
    if (t->contains(path.back())) fail("duplicate key '" + path.back() + "'");
    (*t)[path.back()] = parse_value();
  }

  std::string parse_basic_string() {
    expect('"');
    std::string out;
    for (;;) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  std::string parse_literal_string() {
    expect('\'');
    std::string out;
    while (peek() != '\'') {
      if (eof() || peek() == '\n') fail("unterminated string");
      out += s_[pos_++];
    }
    ++pos_;
    return out;
  }

  nlohmann::ordered_json parse_value() {
    const char c = peek();
    if (c == '"') return parse_basic_string();
    if (c == '\'') return parse_literal_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    std::string tok;
    while (!eof() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != ',' && peek() != ']' &&
           peek() != '}' && peek() != '#')
      tok += s_[pos_++];
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string clean;
    for (char ch : tok)
      if (ch != '_') clean += ch;
    if (!clean.empty() && clean.find_first_of(".eE") == std::string::npos && clean != "inf" && clean != "nan") {
      long long v = 0;
      const char* b = clean.data();
      if (*b == '+') ++b;
      auto [p, ec] = std::from_chars(b, clean.data() + clean.size(), v);
      if (ec == std::errc() && p == clean.data() + clean.size()) return v;
    }
    double d;
    if (csv::parse_double(clean, d)) return d;
    fail("invalid value '" + tok + "'");
  }

  nlohmann::ordered_json parse_array() {
    expect('[');
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (;;) {
      skip_ws_comments_newlines();
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(parse_value());
      skip_ws_comments_newlines();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      skip_ws_comments_newlines();
      expect(']');
      return arr;
    }
  }

  nlohmann::ordered_json parse_inline_table() {
    expect('{');
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    skip_ws();
    if (peek() == '}') {
      ++pos_;
      return obj;
    }
    for (;;) {
      skip_ws();
      parse_assignment(obj);
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      return obj;
    }
  }

  std::string_view s_;
  std::string origin_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

inline nlohmann::ordered_json parse(std::string_view text, const std::string& origin = "<memory>") {
  return Parser(text, origin).parse();
}

}  // namespace manifold::toml
