#pragma once

// Line-oriented N-Triples parser (W3C RDF 1.1 N-Triples grammar).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace lodcov {

// A malformed line. `offset` is the byte offset within the line; `line` is
// the 1-based line number when known (0 otherwise).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::string reason, std::size_t line = 0)
      : std::runtime_error((line ? "line " + std::to_string(line) + ", " : std::string{}) + "byte " +
                           std::to_string(offset) + ": " + reason),
        offset_(offset),
        line_(line),
        reason_(std::move(reason)) {}

  std::size_t offset() const noexcept { return offset_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

  ParseError at_line(std::size_t line) const { return ParseError(offset_, reason_, line); }

 private:
  std::size_t offset_;
  std::size_t line_;
  std::string reason_;
};

// Subject/object node that is not a literal.
struct Term {
  enum class Kind { iri, blank };
  Kind kind = Kind::iri;
  std::string value;  // IRI without angle brackets, or blank label without `_:`

  // Identity key: keeps `<x>` and `_:x` apart.
  std::string key() const { return kind == Kind::iri ? "<" + value + ">" : "_:" + value; }
  friend bool operator==(const Term&, const Term&) = default;
};

struct Literal {
  std::string lexical_form;
  std::optional<std::string> language_tag;  // lowercased
  std::optional<std::string> datatype_iri;
  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Triple {
  Term subject;
  std::string predicate;
  std::variant<Term, Literal> object;

  const Literal* literal() const { return std::get_if<Literal>(&object); }
  friend bool operator==(const Triple&, const Triple&) = default;
};

namespace detail {

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp <= 0x7F) {
    out.push_back(static_cast<char>(cp));
  } else if (cp <= 0x7FF) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp <= 0xFFFF) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline char to_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

class LineParser {
 public:
  explicit LineParser(std::string_view line) : s_(line) {}

  std::optional<Triple> run() {
    skip_ws();
    if (at_end() || peek() == '#') return std::nullopt;
    Triple t;
    t.subject = subject();
    skip_ws();
    if (peek() != '<') fail("predicate must be an IRI");
    t.predicate = iri();
    skip_ws();
    t.object = object();
    skip_ws();
    if (peek() != '.') fail("expected `.` terminating the triple");
    ++pos_;
    skip_ws();
    if (!at_end() && peek() != '#') fail("trailing content after `.`");
    return t;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  [[noreturn]] void fail(std::string reason) const { throw ParseError(pos_, std::move(reason)); }

  void skip_ws() {
    while (!at_end() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r' || s_[pos_] == '\n')) ++pos_;
  }

  Term subject() {
    if (peek() == '<') return Term{Term::Kind::iri, iri()};
    if (peek() == '_') return Term{Term::Kind::blank, blank_label()};
    fail("subject must be an IRI or blank node");
  }

  std::variant<Term, Literal> object() {
    switch (peek()) {
      case '<': return Term{Term::Kind::iri, iri()};
      case '_': return Term{Term::Kind::blank, blank_label()};
      case '"': return literal();
      default: fail("object must be an IRI, blank node, or literal");
    }
  }

  std::uint32_t hex_escape(int digits) {
    if (pos_ + digits > s_.size()) fail("truncated unicode escape");
    std::uint32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      char c = s_[pos_++];
      cp <<= 4;
      if (c >= '0' && c <= '9') cp |= static_cast<std::uint32_t>(c - '0');
      else if (c >= 'a' && c <= 'f') cp |= static_cast<std::uint32_t>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') cp |= static_cast<std::uint32_t>(c - 'A' + 10);
      else { --pos_; fail("invalid hex digit in unicode escape"); }
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("escape is not a Unicode scalar value");
    return cp;
  }

  // After a backslash: \u / \U only.
  void uchar(std::string& out) {
    char c = peek();
    if (c == 'u') { ++pos_; append_utf8(out, hex_escape(4)); }
    else if (c == 'U') { ++pos_; append_utf8(out, hex_escape(8)); }
    else fail("invalid escape sequence");
  }

  std::string iri() {
    ++pos_;  // '<'
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated IRI");
      char c = s_[pos_];
      if (c == '>') { ++pos_; break; }
      if (c == '\\') { ++pos_; uchar(out); continue; }
      if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' ||
          c == '|' || c == '^' || c == '`')
        fail("character not allowed in IRI");
      out.push_back(c);
      ++pos_;
    }
    if (out.empty()) fail("empty IRI");
    return out;
  }

  std::string blank_label() {
    if (s_.substr(pos_, 2) != "_:") fail("expected `_:`");
    pos_ += 2;
    std::size_t start = pos_;
    while (!at_end()) {
      char c = s_[pos_];
      if (c == ' ' || c == '\t' || c == '<' || c == '"') break;
      // a trailing '.' terminates the statement, not the label
      if (c == '.' && (pos_ + 1 == s_.size() || s_[pos_ + 1] == ' ' || s_[pos_ + 1] == '\t' ||
                       s_[pos_ + 1] == '#' || s_[pos_ + 1] == '\r'))
        break;
      ++pos_;
    }
    if (pos_ == start) fail("empty blank node label");
    return std::string(s_.substr(start, pos_ - start));
  }

  Literal literal() {
    ++pos_;  // '"'
    Literal lit;
    std::string& out = lit.lexical_form;
    while (true) {
      if (at_end()) fail("unterminated string literal");
      char c = s_[pos_];
      if (c == '"') { ++pos_; break; }
      if (c == '\n' || c == '\r') fail("raw line break in string literal");
      if (c != '\\') { out.push_back(c); ++pos_; continue; }
      ++pos_;
      switch (peek()) {
        case 't': out.push_back('\t'); ++pos_; break;
        case 'b': out.push_back('\b'); ++pos_; break;
        case 'n': out.push_back('\n'); ++pos_; break;
        case 'r': out.push_back('\r'); ++pos_; break;
        case 'f': out.push_back('\f'); ++pos_; break;
        case '"': out.push_back('"'); ++pos_; break;
        case '\'': out.push_back('\''); ++pos_; break;
        case '\\': out.push_back('\\'); ++pos_; break;
        default: uchar(out);
      }
    }
    if (peek() == '@') {
      ++pos_;
      std::string tag;
      std::size_t start = pos_;
      while (!at_end() && is_alpha(s_[pos_])) tag.push_back(to_lower(s_[pos_++]));
      if (pos_ == start) fail("empty language tag");
      while (peek() == '-') {
        tag.push_back('-');
        ++pos_;
        std::size_t sub = pos_;
        while (!at_end() && (is_alpha(s_[pos_]) || is_digit(s_[pos_]))) tag.push_back(to_lower(s_[pos_++]));
        if (pos_ == sub) fail("empty language subtag");
      }
      lit.language_tag = std::move(tag);
    } else if (s_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      if (peek() != '<') fail("datatype must be an IRI");
      lit.datatype_iri = iri();
    }
    return lit;
  }
};

}  // namespace detail

// Parses one physical line. Blank and comment lines yield nothing; malformed
// lines throw ParseError.
inline std::optional<Triple> parse_ntriples_line(std::string_view line) {
  return detail::LineParser(line).run();
}

}  // namespace lodcov
