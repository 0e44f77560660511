#pragma once

#include <string>
#include <vector>

#include "hpk/ast.hpp"
#include "hpk/lexer.hpp"
#include "hpk/symbols.hpp"

namespace hpk {

class TypeException : public std::exception {
 public:
  explicit TypeException(SyntaxError e) : err(std::move(e)) {}
  const char* what() const noexcept override { return err.message.c_str(); }
  SyntaxError err;
};

struct CheckOptions {
  std::vector<const SymbolTable*> tables;  // consulted in order
  const SymbolTable* shared = nullptr;     // consulted after the extra tables
};

struct CheckedProgram {
  // Synthetic zero-argument procedure literal wrapping the program; its
  // body is the program block at lexical level 0.
  NodePtr entry;
  TypePtr resultType;              // void for programs without a value
  std::vector<Node*> procLiterals;  // every literal, in source order, entry excluded
};

// Annotates the parsed program in place. Throws TypeException.
CheckedProgram typecheck(const NodePtr& program, std::u32string_view src, const CheckOptions& opts);

// Resolves type syntax outside any program (predefined names only).
TypePtr resolveTypeSyntax(const TypeSyntax& t, const CheckOptions& opts, std::string& err);

// 1-based line and column of a 1-based character offset.
std::pair<int, int> lineColumnOf(std::u32string_view src, std::int64_t offset);

}  // namespace hpk
