#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hpk/typerep.hpp"
#include "hpk/value.hpp"

namespace hpk {

// Source spans are 1-based inclusive character offsets.
using Span = CodeRegion;

struct TypeSyntax;
using TypeSyntaxPtr = std::shared_ptr<TypeSyntax>;

struct TypeSyntax {
  enum class Kind { Base, Name, Vector, Structure, Variant, Proc };
  Kind kind = Kind::Base;
  Span span;
  TypeCtor base = TypeCtor::Int;
  std::string name;
  std::vector<std::pair<std::string, TypeSyntaxPtr>> fields;
  std::vector<TypeSyntaxPtr> params;
  TypeSyntaxPtr elem;
  TypeSyntaxPtr result;
};

enum class NodeKind {
  IntLit,
  RealLit,
  BoolLit,
  StringLit,
  NilLit,
  Ident,
  Apply,
  Binary,
  Unary,
  AnyInject,
  ProcLit,
  Block,
  If,
  For,
  While,
  Project,
  Use,
  StructLit,
  VectorLit,
  VectorRange,
  Let,
  InLet,
  TypeDecl,
  Drop,
  Assign,
};

const char* nodeKindName(NodeKind k);

// How an identifier or application was resolved by the type checker.
struct Resolution {
  enum class Kind {
    None,
    Local,        // frame slot `hops` static links up
    UseVar,       // env held in frame slot, entry `name`
    Planted,      // direct reference from a symbol table entry
    Builtin,      // standard environment procedure
    Call,         // Apply: procedure call
    Field,        // Apply: structure field selection, `index`
    Index,        // Apply: vector subscript
    Construct,    // Apply: named structure constructor
    VariantCons,  // Apply: named variant constructor, branch `name`
    Intrinsic,    // Apply: polymorphic builtin
  };
  Kind kind = Kind::None;
  int hops = 0;
  int slot = 0;
  int index = 0;
  std::string name;
  Binding planted;
  const BuiltinDef* builtin = nullptr;
};

// A free identifier occurrence inside a procedure literal: either a frame
// location (binding template with null frame) or a planted link.
struct FreeRef {
  Span span;
  Binding binding;
  bool planted = false;
};

struct ProcInfo {
  int level = 0;      // lexical level of the body
  int frameSize = 0;  // slots in an activation frame
  std::vector<FreeRef> frees;
  // Attached source with frame bindings still unresolved (null frames);
  // null when no source is kept.
  std::shared_ptr<const HyperSource> source;
  bool sourceHasFrames = false;
  ObjectId codeId = 0;  // persistent identity of this code unit, 0 until saved
};

struct Node;
using NodePtr = std::shared_ptr<Node>;

struct Node : std::enable_shared_from_this<Node> {
  NodeKind kind;
  Span span;
  std::string text;  // identifier, operator, string literal, declared name
  std::int64_t ival = 0;
  double rval = 0.0;
  bool flag = false;  // Let/InLet: variable; ProcLit: has result; If: has else; Project: has default
  bool rec = false;   // rec let
  std::vector<NodePtr> kids;
  std::vector<std::string> names;
  std::vector<Span> nameSpans;
  std::vector<TypeSyntaxPtr> tsyn;

  // Filled in by the type checker.
  TypePtr type;
  std::vector<TypePtr> types;
  Resolution res;
  int slot = -1;
  std::shared_ptr<ProcInfo> proc;

  Node(NodeKind k, Span s) : kind(k), span(s) {}
};

}  // namespace hpk
