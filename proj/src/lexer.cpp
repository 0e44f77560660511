#include "hpk/lexer.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "hpk/utf8.hpp"

namespace hpk {

namespace {

constexpr std::array kKeywords = {
    "let",    "rec",     "type",   "is",     "in",      "use",    "with",  "drop",    "from",  "proc",
    "begin",  "end",     "if",     "then",   "else",    "do",     "for",   "to",      "while", "project",
    "as",     "onto",    "default", "struct", "vector", "of",     "true",  "false",   "nil",   "and",
    "or",     "rem",     "int",    "real",   "bool",    "string", "null",  "any",     "env",   "typerep",
    "set",    "structure", "variant",
};

bool isIdentStart(char32_t c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool isIdentPart(char32_t c) { return isIdentStart(c) || (c >= '0' && c <= '9'); }
bool isDigit(char32_t c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::u32string_view s) : src_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    bool newline = true;
    for (;;) {
      newline = skipSpace() || newline;
      Token t;
      t.line = line_;
      t.column = col_;
      t.newlineBefore = newline;
      newline = false;
      auto start = static_cast<std::int64_t>(pos_) + 1;
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        t.span = {start, start - 1};
        out.push_back(std::move(t));
        return out;
      }
      char32_t c = src_[pos_];
      if (isIdentStart(c)) {
        std::string word;
        while (pos_ < src_.size() && isIdentPart(src_[pos_])) {
          word.push_back(static_cast<char>(src_[pos_]));
          advance();
        }
        t.kind = isKeyword(word) ? Tok::Keyword : Tok::Ident;
        t.text = std::move(word);
      } else if (isDigit(c)) {
        number(t);
      } else if (c == '"') {
        string(t);
      } else {
        symbol(t);
      }
      t.span = {start, static_cast<std::int64_t>(pos_)};
      out.push_back(std::move(t));
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) { throw SyntaxException({line_, col_, msg}); }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  // Skips blanks and `!` comments; reports whether a newline was crossed.
  bool skipSpace() {
    bool newline = false;
    while (pos_ < src_.size()) {
      char32_t c = src_[pos_];
      if (c == '\n') {
        newline = true;
        advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
        advance();
      } else if (c == '!') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
    return newline;
  }

  void number(Token& t) {
    std::string digits;
    bool real = false;
    while (pos_ < src_.size() && isDigit(src_[pos_])) {
      digits.push_back(static_cast<char>(src_[pos_]));
      advance();
    }
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' && isDigit(src_[pos_ + 1])) {
      real = true;
      digits.push_back('.');
      advance();
      while (pos_ < src_.size() && isDigit(src_[pos_])) {
        digits.push_back(static_cast<char>(src_[pos_]));
        advance();
      }
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && isDigit(src_[look])) {
        real = true;
        digits.push_back('e');
        advance();
        if (src_[pos_] == '+' || src_[pos_] == '-') {
          digits.push_back(static_cast<char>(src_[pos_]));
          advance();
        }
        while (pos_ < src_.size() && isDigit(src_[pos_])) {
          digits.push_back(static_cast<char>(src_[pos_]));
          advance();
        }
      }
    }
    t.text = digits;
    if (real) {
      t.kind = Tok::Real;
      t.rval = std::strtod(digits.c_str(), nullptr);
    } else {
      t.kind = Tok::Int;
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (ec != std::errc() || v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
        fail("integer literal too large");
      }
      t.ival = static_cast<std::int64_t>(v);
    }
  }

  // Strings use the apostrophe as escape character: '" '' 'n 't.
  void string(Token& t) {
    int line = line_, col = col_;
    advance();
    std::string out;
    for (;;) {
      if (pos_ >= src_.size()) throw SyntaxException({line, col, "unterminated string literal"});
      char32_t c = src_[pos_];
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\'') {
        advance();
        if (pos_ >= src_.size()) throw SyntaxException({line, col, "unterminated string literal"});
        char32_t e = src_[pos_];
        switch (e) {
          case 'n': utf8::append(out, '\n'); break;
          case 't': utf8::append(out, '\t'); break;
          case 'b': utf8::append(out, '\b'); break;
          case 'p': utf8::append(out, '\f'); break;
          case 'o': utf8::append(out, '\r'); break;
          default: utf8::append(out, e); break;
        }
        advance();
        continue;
      }
      utf8::append(out, c);
      advance();
    }
    t.kind = Tok::String;
    t.text = std::move(out);
  }

  void symbol(Token& t) {
    char32_t c = src_[pos_];
    char32_t n = pos_ + 1 < src_.size() ? src_[pos_ + 1] : 0;
    auto two = [&](const char* s) {
      advance();
      advance();
      t.text = s;
    };
    auto one = [&](const char* s) {
      advance();
      t.text = s;
    };
    t.kind = Tok::Symbol;
    switch (c) {
      case U'→': one("->"); return;
      case '-': if (n == '>') two("->"); else one("-"); return;
      case ':': if (n == '=') two(":="); else one(":"); return;
      case '~': if (n == '=') two("~="); else one("~"); return;
      case '<': if (n == '=') two("<="); else one("<"); return;
      case '>': if (n == '=') two(">="); else one(">"); return;
      case '+': if (n == '+') two("++"); else one("+"); return;
      case '(': one("("); return;
      case ')': one(")"); return;
      case '[': one("["); return;
      case ']': one("]"); return;
      case '{': one("{"); return;
      case '}': one("}"); return;
      case ',': one(","); return;
      case ';': one(";"); return;
      case '=': one("="); return;
      case '*': one("*"); return;
      case '/': one("/"); return;
      case '@': one("@"); return;
      default: break;
    }
    std::string shown;
    utf8::append(shown, c);
    fail("unexpected character '" + shown + "'");
  }

  std::u32string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

bool isKeyword(std::string_view word) {
  for (const char* k : kKeywords) {
    if (word == k) return true;
  }
  return false;
}

std::vector<Token> tokenize(std::u32string_view src) { return Lexer(src).run(); }

}  // namespace hpk
