#pragma once

#include <string_view>

#include "hpk/ast.hpp"
#include "hpk/lexer.hpp"

namespace hpk {

// Node layouts produced by the parser:
//   Let        text=name, flag=variable, rec, kids[0]=initialiser
//   InLet      kids[0]=environment, kids[1]=initialiser, text=name, flag=variable
//   TypeDecl   text=name, tsyn[0]
//   Drop       text=name, kids[0]=environment
//   Use        kids[0]=environment, names/tsyn parallel, kids[1]=body
//   Assign     kids[0]=target, kids[1]=value
//   Apply      kids[0]=callee, kids[1..]=arguments, names=labels ("" if none)
//   Binary     text=operator, kids[0..1];  Unary text=operator, kids[0]
//   ProcLit    names/tsyn parameters, tsyn.back()=result when flag, kids[0]=body
//   If         kids cond, then, [else]; flag=has else
//   For        text=variable, kids lower, upper, body
//   While      kids cond, body
//   Project    kids[0]=subject, text=binder, tsyn[i] arm type with kids[1+i],
//              flag=has default (kids.back())
//   StructLit  names fields, kids values
//   VectorLit  kids[0]=lower bound, kids[1..] elements, tsyn[0] element type if given
//   VectorRange kids lower, upper, initial value
//   Block      kids clauses
// Every node that binds a name records its span in nameSpans.

// Parses a whole program; the result is a Block. Throws SyntaxException.
NodePtr parseProgram(std::u32string_view src);

// Parses a stand-alone type expression (the writeType grammar).
TypeSyntaxPtr parseTypeText(std::u32string_view src);

}  // namespace hpk
