#pragma once

// Hand-written scanner shared by the signature, expression, rate and model
// parsers. Tracks line/column for diagnostics.

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "kred/errors.hpp"

namespace kred::detail {

class Cursor {
 public:
  explicit Cursor(std::string_view text, SourceLocation origin = {1, 1})
      : text_(text), line_(origin.line), col_(origin.column) {}

  bool eof() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  std::size_t pos() const { return pos_; }
  std::string_view rest() const { return text_.substr(pos_); }
  SourceLocation loc() const { return {line_, col_}; }

  char get() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  // Spaces and tabs only; newlines are significant in model files.
  void skip_blanks() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) get();
  }
  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) get();
  }

  bool at(std::string_view s) const { return rest().substr(0, s.size()) == s; }

  bool accept(char c) {
    if (peek() == c && !eof()) {
      get();
      return true;
    }
    return false;
  }
  bool accept(std::string_view s) {
    if (!at(s)) return false;
    for (std::size_t i = 0; i < s.size(); ++i) get();
    return true;
  }

  void expect(char c, std::string_view context) {
    if (!accept(c)) {
      fail(ErrorCode::Parse, "expected '" + std::string(1, c) + "' " + std::string(context) +
                                 found());
    }
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  std::optional<std::string> identifier() {
    if (!ident_start(peek()) || eof()) return std::nullopt;
    std::string out;
    while (!eof() && ident_char(peek())) out += get();
    return out;
  }

  // Internal-state tokens may start with a digit.
  std::optional<std::string> token() {
    if (eof() || !ident_char(peek())) return std::nullopt;
    std::string out;
    while (!eof() && ident_char(peek())) out += get();
    return out;
  }

  std::optional<long long> integer() {
    if (eof() || !std::isdigit(static_cast<unsigned char>(peek()))) return std::nullopt;
    long long v = 0;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (get() - '0');
      if (v > (1LL << 52)) fail(ErrorCode::Parse, "integer literal too large");
    }
    return v;
  }

  // Unsigned decimal/scientific literal.
  std::optional<double> number() {
    std::size_t start = pos_;
    std::size_t i = pos_;
    auto digit = [&](std::size_t k) {
      return k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]));
    };
    bool any = false;
    while (digit(i)) { ++i; any = true; }
    if (i < text_.size() && text_[i] == '.') {
      ++i;
      while (digit(i)) { ++i; any = true; }
    }
    if (!any) return std::nullopt;
    if (i < text_.size() && (text_[i] == 'e' || text_[i] == 'E')) {
      std::size_t j = i + 1;
      if (j < text_.size() && (text_[j] == '+' || text_[j] == '-')) ++j;
      if (digit(j)) {
        while (digit(j)) ++j;
        i = j;
      }
    }
    std::string lit(text_.substr(start, i - start));
    while (pos_ < i) get();
    return std::stod(lit);
  }

  std::string found() const {
    if (eof()) return " (found end of input)";
    return " (found '" + std::string(1, peek()) + "')";
  }

  [[noreturn]] void fail(ErrorCode code, const std::string& msg) const {
    throw Error(code, msg, loc());
  }
  [[noreturn]] static void fail_at(ErrorCode code, const std::string& msg, SourceLocation at) {
    throw Error(code, msg, at);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  int col_;
};

}  // namespace kred::detail
