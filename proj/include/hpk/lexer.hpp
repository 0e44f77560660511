#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hpk/ast.hpp"

namespace hpk {

enum class Tok { End, Ident, Keyword, Int, Real, String, Symbol };

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifier/keyword/symbol (canonical: "->" for both arrows), string contents
  Span span;
  int line = 1;
  int column = 1;
  bool newlineBefore = false;
  std::int64_t ival = 0;
  double rval = 0.0;

  bool is(Tok k, std::string_view t) const { return kind == k && text == t; }
  bool sym(std::string_view t) const { return is(Tok::Symbol, t); }
  bool kw(std::string_view t) const { return is(Tok::Keyword, t); }
};

struct SyntaxError {
  int line = 1;
  int column = 1;
  std::string message;
};

class SyntaxException : public std::exception {
 public:
  explicit SyntaxException(SyntaxError e) : err(std::move(e)) {}
  const char* what() const noexcept override { return err.message.c_str(); }
  SyntaxError err;
};

bool isKeyword(std::string_view word);

// Tokenises the whole text. Throws SyntaxException on malformed input.
std::vector<Token> tokenize(std::u32string_view src);

}  // namespace hpk
