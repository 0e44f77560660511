#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hpk {

enum class TypeCtor {
  Int,
  Real,
  Bool,
  String,
  Null,
  Any,
  Env,
  TypeRep,
  Set,
  Vector,
  Structure,
  Variant,
  Proc,
  Opaque,  // host-provided abstract type (HyperSource, Generator, ...)
  Void,    // type of clauses that yield no value; never a value type
};

class TypeRep;
using TypePtr = std::shared_ptr<const TypeRep>;

struct NameAndType {
  std::string name;
  TypePtr type;
};

// Structural description of a type. Immutable; share freely.
class TypeRep {
 public:
  TypeCtor ctor() const { return ctor_; }
  // Structure fields, variant branches, or proc parameters (names empty).
  const std::vector<NameAndType>& fields() const { return fields_; }
  // Element type for vectors and sets.
  const TypePtr& elem() const { return elem_; }
  // Proc result; null means the procedure yields no value.
  const TypePtr& result() const { return result_; }
  const std::string& opaqueName() const { return name_; }

  bool is(TypeCtor c) const { return ctor_ == c; }
  const TypeRep* field(std::string_view name) const;

  static TypePtr base(TypeCtor c);
  static TypePtr vector(TypePtr elem);
  static TypePtr set(TypePtr elem = nullptr);
  static TypePtr proc(std::vector<TypePtr> params, TypePtr result);
  // Returns nullptr when a name is duplicated or empty.
  static TypePtr structure(std::vector<NameAndType> fields);
  static TypePtr variant(std::vector<NameAndType> branches);
  static TypePtr opaque(std::string name);

 private:
  TypeRep() = default;
  TypeCtor ctor_ = TypeCtor::Void;
  std::vector<NameAndType> fields_;
  TypePtr elem_;
  TypePtr result_;
  std::string name_;
};

namespace types {
TypePtr intT();
TypePtr realT();
TypePtr boolT();
TypePtr stringT();
TypePtr nullT();
TypePtr anyT();
TypePtr envT();
TypePtr typeRepT();
TypePtr setT();
TypePtr voidT();
TypePtr hyperSourceT();
TypePtr generatorT();
TypePtr generatorSourceT();
TypePtr generatorResultT();
TypePtr comparisonT();
// structure( name : string ; typeRep : typerep )
TypePtr nameAndTypeT();
// structure( name : string ; value : HyperSource )
TypePtr nameAndValueT();
}  // namespace types

// Structural equivalence. Structure fields and variant branches match by
// name regardless of declaration order; proc parameters are positional.
bool equalType(const TypeRep& a, const TypeRep& b);
inline bool equalType(const TypePtr& a, const TypePtr& b) {
  if (!a || !b) return a == b;
  return a == b || equalType(*a, *b);
}

// Fields of a structure type in declaration order; empty for anything else.
std::vector<NameAndType> getStructureFields(const TypeRep& t);

// Builds a structure type; nullopt if a field name is duplicated.
std::optional<TypePtr> mkStructureType(const std::vector<NameAndType>& fields);

// Textual definition that the kernel's type grammar parses back.
std::string writeType(const TypeRep& t);
inline std::string writeType(const TypePtr& t) { return t ? writeType(*t) : std::string("void"); }

}  // namespace hpk
