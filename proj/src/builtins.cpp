#include "hpk/builtins.hpp"

#include "hpk/error.hpp"

namespace hpk {

BuiltinRegistry& BuiltinRegistry::instance() {
  static BuiltinRegistry registry;
  return registry;
}

const BuiltinDef& BuiltinRegistry::add(std::string name, TypePtr type, BuiltinFn fn) {
  auto def = std::make_unique<BuiltinDef>();
  def->name = name;
  def->type = std::move(type);
  def->fn = std::move(fn);
  def->object = std::make_shared<BuiltinObj>(def.get());
  auto& slot = defs_[name];
  slot = std::move(def);
  return *slot;
}

const BuiltinDef& BuiltinRegistry::addIntrinsic(std::string name, IntrinsicTyper typer, BuiltinFn fn) {
  auto def = std::make_unique<BuiltinDef>();
  def->name = name;
  def->typer = std::move(typer);
  def->fn = std::move(fn);
  auto& slot = defs_[name];
  slot = std::move(def);
  return *slot;
}

void BuiltinRegistry::addType(std::string name, TypePtr type) { types_[std::move(name)] = std::move(type); }

const BuiltinDef* BuiltinRegistry::find(const std::string& name) const {
  auto it = defs_.find(name);
  return it == defs_.end() ? nullptr : it->second.get();
}

TypePtr BuiltinRegistry::findType(const std::string& name) const {
  auto it = types_.find(name);
  return it == types_.end() ? nullptr : it->second;
}

Value BuiltinRegistry::value(const std::string& name) const {
  const auto* def = find(name);
  if (!def || !def->object) throw Error("no builtin procedure " + name);
  return Value::object(def->object);
}

}  // namespace hpk
