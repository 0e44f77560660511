#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hpk/typerep.hpp"

namespace hpk {

using ObjectId = std::uint64_t;

struct Void {
  bool operator==(const Void&) const = default;
};
struct Null {
  bool operator==(const Null&) const = default;
};

class Object;
using ObjRef = std::shared_ptr<Object>;

// Every runtime datum. Scalars and strings are held inline; everything with
// identity (structures, vectors, closures, environments, ...) is an Object.
class Value {
 public:
  using Rep = std::variant<Void, Null, std::int64_t, double, bool, std::string, TypePtr, ObjRef>;

  Value() = default;
  static Value integer(std::int64_t i) { return Value(Rep(std::in_place_index<2>, i)); }
  static Value real(double r) { return Value(Rep(std::in_place_index<3>, r)); }
  static Value boolean(bool b) { return Value(Rep(std::in_place_index<4>, b)); }
  static Value string(std::string s) { return Value(Rep(std::in_place_index<5>, std::move(s))); }
  static Value nil() { return Value(Rep(Null{})); }
  static Value type(TypePtr t) { return Value(Rep(std::move(t))); }
  static Value object(ObjRef o) { return Value(Rep(std::move(o))); }

  bool isVoid() const { return rep_.index() == 0; }
  bool isNull() const { return rep_.index() == 1; }
  bool isInt() const { return rep_.index() == 2; }
  bool isReal() const { return rep_.index() == 3; }
  bool isBool() const { return rep_.index() == 4; }
  bool isString() const { return rep_.index() == 5; }
  bool isType() const { return rep_.index() == 6; }
  bool isObject() const { return rep_.index() == 7; }

  std::int64_t asInt() const { return std::get<2>(rep_); }
  double asReal() const { return std::get<3>(rep_); }
  bool asBool() const { return std::get<4>(rep_); }
  const std::string& asString() const { return std::get<5>(rep_); }
  const TypePtr& asType() const { return std::get<6>(rep_); }
  const ObjRef& asObject() const { return std::get<7>(rep_); }

  // Object payload downcast; null if this is not an object of type T.
  template <class T>
  std::shared_ptr<T> as() const {
    if (!isObject()) return nullptr;
    return std::dynamic_pointer_cast<T>(asObject());
  }

  const Rep& rep() const { return rep_; }

 private:
  explicit Value(Rep r) : rep_(std::move(r)) {}
  Rep rep_;
};

enum class ObjKind {
  Structure,
  Variant,
  Vector,
  Closure,
  Builtin,
  Env,
  Any,
  Set,
  Comparison,
  Frame,
  HyperSource,
  Generator,
  GeneratorSource,
  GeneratorResult,
};

class Object {
 public:
  virtual ~Object() = default;
  virtual ObjKind kind() const = 0;
  // Persistent identity; 0 until first externalised (see Store::idOf).
  ObjectId id = 0;
};

class StructObj final : public Object {
 public:
  StructObj(TypePtr t, std::vector<Value> s) : type(std::move(t)), slots(std::move(s)) {}
  ObjKind kind() const override { return ObjKind::Structure; }
  int indexOf(std::string_view field) const;
  TypePtr type;
  std::vector<Value> slots;  // parallel to type->fields()
};

class VariantObj final : public Object {
 public:
  VariantObj(TypePtr t, std::string b, Value p) : type(std::move(t)), branch(std::move(b)), payload(std::move(p)) {}
  ObjKind kind() const override { return ObjKind::Variant; }
  TypePtr type;
  std::string branch;
  Value payload;
};

class VectorObj final : public Object {
 public:
  VectorObj(TypePtr t, std::int64_t lb, std::vector<Value> c) : type(std::move(t)), lower(lb), cells(std::move(c)) {}
  ObjKind kind() const override { return ObjKind::Vector; }
  std::int64_t upper() const { return lower + static_cast<std::int64_t>(cells.size()) - 1; }
  bool inBounds(std::int64_t i) const { return i >= lower && i <= upper(); }
  TypePtr type;  // the vector type, *T
  std::int64_t lower;
  std::vector<Value> cells;
};

class FrameObj final : public Object {
 public:
  FrameObj(std::size_t size, std::shared_ptr<FrameObj> p, int lvl) : slots(size), parent(std::move(p)), level(lvl) {}
  ObjKind kind() const override { return ObjKind::Frame; }
  std::vector<Value> slots;
  std::shared_ptr<FrameObj> parent;  // static link
  int level;
};
using FramePtr = std::shared_ptr<FrameObj>;

class EnvObj final : public Object {
 public:
  struct Entry {
    std::string name;
    TypePtr type;
    Value value;
    bool mutable_ = false;
  };
  ObjKind kind() const override { return ObjKind::Env; }
  Entry* find(std::string_view name);
  const Entry* find(std::string_view name) const;
  // Adds, or rebinds in place when the name already exists.
  void bind(std::string name, TypePtr type, Value value, bool isMutable);
  bool drop(std::string_view name);
  std::vector<Entry> entries;  // insertion order
};
using EnvPtr = std::shared_ptr<EnvObj>;

class AnyObj final : public Object {
 public:
  AnyObj(TypePtr t, Value v) : type(std::move(t)), value(std::move(v)) {}
  ObjKind kind() const override { return ObjKind::Any; }
  TypePtr type;
  Value value;
};

struct Node;
struct BuiltinDef;
struct HyperSource;

class ClosureObj final : public Object {
 public:
  ObjKind kind() const override { return ObjKind::Closure; }
  TypePtr type;
  std::shared_ptr<const Node> code;  // the procedure literal
  FramePtr frame;                    // defining frame
  std::shared_ptr<const HyperSource> source;
};

class BuiltinObj final : public Object {
 public:
  explicit BuiltinObj(const BuiltinDef* d) : def(d) {}
  ObjKind kind() const override { return ObjKind::Builtin; }
  const BuiltinDef* def;
};

class ComparisonObj final : public Object {
 public:
  ObjKind kind() const override { return ObjKind::Comparison; }
  TypePtr elem;
  Value equal;
  Value lessThan;  // void for unordered comparisons
  bool ordered() const { return !lessThan.isVoid(); }
};

class SetObj final : public Object {
 public:
  ObjKind kind() const override { return ObjKind::Set; }
  TypePtr elem;
  std::shared_ptr<ComparisonObj> cmp;
  std::vector<Value> elems;  // insertion order, no duplicates under cmp
};

// ---------------------------------------------------------------------------
// Hyper-program representation.

struct CodeRegion {
  std::int64_t start = 0;
  std::int64_t finish = 0;
  std::int64_t length() const { return finish - start + 1; }
  bool overlaps(const CodeRegion& o) const { return start <= o.finish && o.start <= finish; }
  bool operator==(const CodeRegion&) const = default;
};

enum class BindingKind { Value, EnvLocation, StructLocation, VectorLocation, FrameLocation, Type };

// A link target embedded in hyper-program text.
struct Binding {
  BindingKind kind = BindingKind::Value;
  TypePtr type;         // type of the value, of the location, or the linked type
  Value value;          // Value: payload; Struct/VectorLocation: the container
  EnvPtr env;           // EnvLocation
  std::string name;     // EnvLocation entry, StructLocation field, env name for envLoc frames
  std::int64_t index = 0;  // VectorLocation
  FramePtr frame;       // FrameLocation; null only inside compile-time templates
  int slot = 0;
  int hops = 0;         // template only: static links from the defining frame
  bool envLoc = false;  // template only: slot holds an env, entry `name`
  bool isMutable = true;

  static Binding ofValue(Value v, TypePtr t);
  static Binding envLocation(EnvPtr e, std::string name, TypePtr t, bool isMutable);
  static Binding structLocation(Value structure, std::string field, TypePtr fieldType);
  static Binding vectorLocation(Value vector, std::int64_t index, TypePtr elemType);
  static Binding frameLocation(FramePtr f, int slot, TypePtr t, bool isMutable);
  static Binding aType(TypePtr t);

  bool isLocation() const {
    return kind != BindingKind::Value && kind != BindingKind::Type;
  }
};

const char* bindingKindName(BindingKind k);

struct Substitution {
  Binding val;
  CodeRegion region;
};

struct HyperSource {
  std::u32string code;
  std::vector<Substitution> bindings;  // sorted by region start, disjoint
};

class HyperSourceObj final : public Object {
 public:
  explicit HyperSourceObj(HyperSource s) : src(std::move(s)) {}
  ObjKind kind() const override { return ObjKind::HyperSource; }
  HyperSource src;
};

class GeneratorObj;

struct GenSubstitution {
  std::shared_ptr<GeneratorObj> gen;
  CodeRegion region;
};

struct GeneratorSource {
  HyperSource code;
  std::vector<GenSubstitution> generators;  // sorted, disjoint
};

struct GeneratorResult {
  bool literal = true;
  GeneratorSource source;  // literal branch
  Value expression;        // expression branch: proc( env -> GeneratorSource )
};

class GeneratorObj final : public Object {
 public:
  ObjKind kind() const override { return ObjKind::Generator; }
  Value prelude;  // proc( env -> env )
  GeneratorResult result;
};
using GeneratorPtr = std::shared_ptr<GeneratorObj>;

class GenSourceObj final : public Object {
 public:
  explicit GenSourceObj(GeneratorSource s) : src(std::move(s)) {}
  ObjKind kind() const override { return ObjKind::GeneratorSource; }
  GeneratorSource src;
};

class GenResultObj final : public Object {
 public:
  explicit GenResultObj(GeneratorResult r) : result(std::move(r)) {}
  ObjKind kind() const override { return ObjKind::GeneratorResult; }
  GeneratorResult result;
};

// ---------------------------------------------------------------------------

// Dynamic type of a value (the static type it was created with).
TypePtr typeOfValue(const Value& v);

// `=` semantics: scalars by value, type representations by equivalence,
// objects by identity.
bool identical(const Value& a, const Value& b);

Value makeAny(TypePtr t, Value v);
Value makeHyperSource(HyperSource h);
Value makeString(std::u32string_view s);

// Current content of a value binding or location; faults when the
// location has vanished (dropped env entry, index out of range).
Value readBinding(const Binding& b);
// Assigns through a location binding; faults on value bindings and
// constant locations.
void writeBinding(const Binding& b, Value v);

// Short human-readable rendering used by the REPL and scalar displays.
std::string showValue(const Value& v);

}  // namespace hpk
