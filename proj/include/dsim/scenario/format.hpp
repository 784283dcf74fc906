#pragma once

// Line-oriented key-value tree used by scenario files and run reports.
//
//   document := { line }
//   line     := ws [ path ws "=" ws value ws ] [ "#" comment ] newline
//   path     := segment { "." segment }
//   segment  := [A-Za-z_][A-Za-z0-9_-]* | [0-9]+
//   value    := integer | decimal | "true" | "false" | string | list
//   list     := "[" ws [ value { ws "," ws value } ] ws "]"
//   string   := '"' { char | '\"' | '\\' | '\n' | '\t' } '"'
//
// Positions in errors are 1-based (line, column), columns counted in bytes.

#include <charconv>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "dsim/core/errors.hpp"

namespace dsim::scn {

enum class ValueKind { integer, decimal, boolean, string, list };

inline const char* to_string(ValueKind k) {
  switch (k) {
    case ValueKind::integer: return "integer";
    case ValueKind::decimal: return "decimal";
    case ValueKind::boolean: return "boolean";
    case ValueKind::string: return "string";
    case ValueKind::list: return "list";
  }
  return "?";
}

struct Value {
  ValueKind kind = ValueKind::integer;
  std::string text;          // integer/decimal literal, or decoded string
  bool flag = false;         // boolean
  std::vector<Value> items;  // list
  std::size_t line = 0;
  std::size_t column = 0;
};

struct Entry {
  std::string path;
  Value value;
  std::size_t line = 0;
  std::size_t column = 0;
};

// Entries in file order. Duplicate paths are rejected by the parser.
using Document = std::vector<Entry>;

namespace detail {

inline bool is_key_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_key_char(char c) { return is_key_start(c) || is_digit(c) || c == '-'; }

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no) : s_(line), line_(line_no) {}

  // Returns false for blank / comment-only lines.
  bool parse(Entry& out) {
    skip_ws();
    if (at_end_or_comment()) return false;
    out.line = line_;
    out.column = col();
    out.path = parse_path();
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != '=') fail("expected '=' after key");
    ++pos_;
    skip_ws();
    if (at_end_or_comment()) fail("expected a value after '='");
    out.value = parse_value();
    skip_ws();
    if (!at_end_or_comment()) fail("unexpected characters after value");
    return true;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(line_, col(), what); }

  std::size_t col() const { return pos_ + 1; }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }

  bool at_end_or_comment() const { return pos_ >= s_.size() || s_[pos_] == '#'; }

  std::string parse_path() {
    std::string path;
    while (true) {
      if (pos_ >= s_.size()) fail("expected key segment");
      const char c = s_[pos_];
      const std::size_t start = pos_;
      if (is_digit(c)) {
        while (pos_ < s_.size() && is_digit(s_[pos_])) ++pos_;
        if (pos_ < s_.size() && is_key_char(s_[pos_])) fail("numeric key segment followed by letters");
      } else if (is_key_start(c)) {
        while (pos_ < s_.size() && is_key_char(s_[pos_])) ++pos_;
      } else {
        fail(std::string("invalid character '") + c + "' in key");
      }
      path.append(s_.substr(start, pos_ - start));
      if (pos_ < s_.size() && s_[pos_] == '.') {
        path.push_back('.');
        ++pos_;
        continue;
      }
      return path;
    }
  }

  Value parse_value() {
    Value v;
    v.line = line_;
    v.column = col();
    const char c = s_[pos_];
    if (c == '"') {
      v.kind = ValueKind::string;
      v.text = parse_string();
    } else if (c == '[') {
      v.kind = ValueKind::list;
      ++pos_;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      while (true) {
        skip_ws();
        if (at_end_or_comment()) fail("unterminated list");
        if (s_[pos_] == '[') fail("nested lists are not supported");
        v.items.push_back(parse_value());
        skip_ws();
        if (pos_ >= s_.size()) fail("unterminated list");
        if (s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (s_[pos_] == ']') {
          ++pos_;
          break;
        }
        fail("expected ',' or ']' in list");
      }
    } else if (s_.substr(pos_).starts_with("true") && !continues_word(pos_ + 4)) {
      v.kind = ValueKind::boolean;
      v.flag = true;
      pos_ += 4;
    } else if (s_.substr(pos_).starts_with("false") && !continues_word(pos_ + 5)) {
      v.kind = ValueKind::boolean;
      v.flag = false;
      pos_ += 5;
    } else if (c == '-' || c == '+' || is_digit(c) || c == '.') {
      parse_number(v);
    } else {
      fail("expected a value (number, boolean, quoted string or list)");
    }
    return v;
  }

  bool continues_word(std::size_t at) const { return at < s_.size() && is_key_char(s_[at]); }

  std::string parse_string() {
    ++pos_;  // opening quote
    std::string out;
    while (true) {
      if (pos_ >= s_.size()) fail("unterminated string");
      const char c = s_[pos_];
      if (c == '"') {
        ++pos_;
        return out;
      }
      if (c == '\\') {
        if (pos_ + 1 >= s_.size()) fail("unterminated escape");
        const char e = s_[pos_ + 1];
        switch (e) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          default: fail(std::string("unknown escape '\\") + e + "'");
        }
        pos_ += 2;
        continue;
      }
      out.push_back(c);
      ++pos_;
    }
  }

  void parse_number(Value& v) {
    const std::size_t start = pos_;
    if (s_[pos_] == '-' || s_[pos_] == '+') ++pos_;
    bool digits = false;
    bool decimal = false;
    while (pos_ < s_.size() && is_digit(s_[pos_])) {
      ++pos_;
      digits = true;
    }
    if (pos_ < s_.size() && s_[pos_] == '.') {
      decimal = true;
      ++pos_;
      while (pos_ < s_.size() && is_digit(s_[pos_])) {
        ++pos_;
        digits = true;
      }
    }
    if (!digits) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      decimal = true;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
      if (pos_ >= s_.size() || !is_digit(s_[pos_])) fail("malformed exponent");
      while (pos_ < s_.size() && is_digit(s_[pos_])) ++pos_;
    }
    if (pos_ < s_.size() && (is_key_char(s_[pos_]) || s_[pos_] == '.')) fail("malformed number");
    v.kind = decimal ? ValueKind::decimal : ValueKind::integer;
    v.text = std::string(s_.substr(start, pos_ - start));
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Document parse_document(std::string_view text) {
  Document doc;
  std::map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  std::size_t begin = 0;
  if (text.starts_with("\xEF\xBB\xBF")) begin = 3;
  while (begin <= text.size()) {
    ++line_no;
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(begin, end - begin);
    Entry e;
    if (detail::LineParser(line, line_no).parse(e)) {
      if (auto it = seen.find(e.path); it != seen.end()) {
        throw SyntaxError(e.line, e.column,
                          "duplicate key '" + e.path + "' (first set on line " + std::to_string(it->second) + ")");
      }
      seen.emplace(e.path, e.line);
      doc.push_back(std::move(e));
    }
    if (end == text.size()) break;
    begin = end + 1;
  }
  return doc;
}

// Shortest decimal text that reads back to the same double.
inline std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

template <typename Int>
bool parse_integer(std::string_view text, Int& out) {
  if (text.starts_with('+')) text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

inline bool parse_real(std::string_view text, double& out) {
  if (text.starts_with('+')) text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

}  // namespace dsim::scn
