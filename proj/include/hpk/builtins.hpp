#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hpk/value.hpp"

namespace hpk {

class Interp;

using BuiltinFn = std::function<Value(Interp&, std::vector<Value>&)>;

// Computes the result type of a call from its argument types; sets `err`
// and returns null when the call is ill-typed.
using IntrinsicTyper = std::function<TypePtr(const std::vector<TypePtr>&, std::string& err)>;

// A host-provided procedure of the standard environment. Monomorphic
// builtins are first-class values; intrinsics (type != null is false) have
// a per-call typing rule and may only appear in call position.
struct BuiltinDef {
  std::string name;
  TypePtr type;
  IntrinsicTyper typer;
  BuiltinFn fn;
  std::shared_ptr<BuiltinObj> object;

  bool isIntrinsic() const { return !type; }
};

// Process-wide table of the standard environment: builtins by name and the
// predefined type names. Populated by installStandardLibrary().
class BuiltinRegistry {
 public:
  static BuiltinRegistry& instance();

  const BuiltinDef& add(std::string name, TypePtr type, BuiltinFn fn);
  const BuiltinDef& addIntrinsic(std::string name, IntrinsicTyper typer, BuiltinFn fn);
  void addType(std::string name, TypePtr type);

  const BuiltinDef* find(const std::string& name) const;
  TypePtr findType(const std::string& name) const;
  // Builtin closure value; throws if absent.
  Value value(const std::string& name) const;

 private:
  std::map<std::string, std::unique_ptr<BuiltinDef>> defs_;
  std::map<std::string, TypePtr> types_;
};

}  // namespace hpk
