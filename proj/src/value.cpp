#include "hpk/value.hpp"

#include <charconv>
#include <cmath>

#include "hpk/builtins.hpp"
#include "hpk/error.hpp"
#include "hpk/utf8.hpp"

namespace hpk {

int StructObj::indexOf(std::string_view field) const {
  const auto& fs = type->fields();
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (fs[i].name == field) return static_cast<int>(i);
  }
  return -1;
}

EnvObj::Entry* EnvObj::find(std::string_view name) {
  for (auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

const EnvObj::Entry* EnvObj::find(std::string_view name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

void EnvObj::bind(std::string name, TypePtr type, Value value, bool isMutable) {
  if (auto* e = find(name)) {
    e->type = std::move(type);
    e->value = std::move(value);
    e->mutable_ = isMutable;
    return;
  }
  entries.push_back({std::move(name), std::move(type), std::move(value), isMutable});
}

bool EnvObj::drop(std::string_view name) {
  for (auto it = entries.begin(); it != entries.end(); ++it) {
    if (it->name == name) {
      entries.erase(it);
      return true;
    }
  }
  return false;
}

Binding Binding::ofValue(Value v, TypePtr t) {
  Binding b;
  b.kind = BindingKind::Value;
  b.value = std::move(v);
  b.type = std::move(t);
  b.isMutable = false;
  return b;
}

Binding Binding::envLocation(EnvPtr e, std::string name, TypePtr t, bool isMutable) {
  Binding b;
  b.kind = BindingKind::EnvLocation;
  b.env = std::move(e);
  b.name = std::move(name);
  b.type = std::move(t);
  b.isMutable = isMutable;
  return b;
}

Binding Binding::structLocation(Value structure, std::string field, TypePtr fieldType) {
  Binding b;
  b.kind = BindingKind::StructLocation;
  b.value = std::move(structure);
  b.name = std::move(field);
  b.type = std::move(fieldType);
  return b;
}

Binding Binding::vectorLocation(Value vector, std::int64_t index, TypePtr elemType) {
  Binding b;
  b.kind = BindingKind::VectorLocation;
  b.value = std::move(vector);
  b.index = index;
  b.type = std::move(elemType);
  return b;
}

Binding Binding::frameLocation(FramePtr f, int slot, TypePtr t, bool isMutable) {
  Binding b;
  b.kind = BindingKind::FrameLocation;
  b.frame = std::move(f);
  b.slot = slot;
  b.type = std::move(t);
  b.isMutable = isMutable;
  return b;
}

Binding Binding::aType(TypePtr t) {
  Binding b;
  b.kind = BindingKind::Type;
  b.type = std::move(t);
  b.isMutable = false;
  return b;
}

const char* bindingKindName(BindingKind k) {
  switch (k) {
    case BindingKind::Value: return "value";
    case BindingKind::EnvLocation: return "envLocation";
    case BindingKind::StructLocation: return "structLocation";
    case BindingKind::VectorLocation: return "vectorLocation";
    case BindingKind::FrameLocation: return "frameLocation";
    case BindingKind::Type: return "aType";
  }
  return "?";
}

Value readBinding(const Binding& b) {
  switch (b.kind) {
    case BindingKind::Value: return b.value;
    case BindingKind::Type: return Value::type(b.type);
    case BindingKind::EnvLocation: {
      const auto* e = b.env ? b.env->find(b.name) : nullptr;
      if (!e) throw RuntimeFault("absent: " + b.name);
      return e->value;
    }
    case BindingKind::StructLocation: {
      auto s = b.value.as<StructObj>();
      int i = s ? s->indexOf(b.name) : -1;
      if (i < 0) throw RuntimeFault("absent: " + b.name);
      return s->slots[static_cast<std::size_t>(i)];
    }
    case BindingKind::VectorLocation: {
      auto v = b.value.as<VectorObj>();
      if (!v || !v->inBounds(b.index)) throw RuntimeFault("index out of bounds: " + std::to_string(b.index));
      return v->cells[static_cast<std::size_t>(b.index - v->lower)];
    }
    case BindingKind::FrameLocation:
      if (!b.frame || b.slot < 0 || static_cast<std::size_t>(b.slot) >= b.frame->slots.size()) {
        throw RuntimeFault("unresolved frame location");
      }
      return b.frame->slots[static_cast<std::size_t>(b.slot)];
  }
  return {};
}

void writeBinding(const Binding& b, Value v) {
  if (!b.isLocation()) throw RuntimeFault("cannot assign through a value link");
  if (!b.isMutable) throw RuntimeFault("assignment to constant " + b.name);
  switch (b.kind) {
    case BindingKind::EnvLocation: {
      auto* e = b.env ? b.env->find(b.name) : nullptr;
      if (!e) throw RuntimeFault("absent: " + b.name);
      if (!e->mutable_) throw RuntimeFault("assignment to constant " + b.name);
      e->value = std::move(v);
      return;
    }
    case BindingKind::StructLocation: {
      auto s = b.value.as<StructObj>();
      int i = s ? s->indexOf(b.name) : -1;
      if (i < 0) throw RuntimeFault("absent: " + b.name);
      s->slots[static_cast<std::size_t>(i)] = std::move(v);
      return;
    }
    case BindingKind::VectorLocation: {
      auto vec = b.value.as<VectorObj>();
      if (!vec || !vec->inBounds(b.index)) throw RuntimeFault("index out of bounds: " + std::to_string(b.index));
      vec->cells[static_cast<std::size_t>(b.index - vec->lower)] = std::move(v);
      return;
    }
    case BindingKind::FrameLocation:
      if (!b.frame || b.slot < 0 || static_cast<std::size_t>(b.slot) >= b.frame->slots.size()) {
        throw RuntimeFault("unresolved frame location");
      }
      b.frame->slots[static_cast<std::size_t>(b.slot)] = std::move(v);
      return;
    default: return;
  }
}

TypePtr typeOfValue(const Value& v) {
  switch (v.rep().index()) {
    case 0: return types::voidT();
    case 1: return types::nullT();
    case 2: return types::intT();
    case 3: return types::realT();
    case 4: return types::boolT();
    case 5: return types::stringT();
    case 6: return types::typeRepT();
    default: break;
  }
  const auto& o = v.asObject();
  switch (o->kind()) {
    case ObjKind::Structure: return static_cast<const StructObj&>(*o).type;
    case ObjKind::Variant: return static_cast<const VariantObj&>(*o).type;
    case ObjKind::Vector: return static_cast<const VectorObj&>(*o).type;
    case ObjKind::Closure: return static_cast<const ClosureObj&>(*o).type;
    case ObjKind::Builtin: return static_cast<const BuiltinObj&>(*o).def->type;
    case ObjKind::Env: return types::envT();
    case ObjKind::Any: return types::anyT();
    case ObjKind::Set: return types::setT();
    case ObjKind::Comparison: return types::comparisonT();
    case ObjKind::HyperSource: return types::hyperSourceT();
    case ObjKind::Generator: return types::generatorT();
    case ObjKind::GeneratorSource: return types::generatorSourceT();
    case ObjKind::GeneratorResult: return types::generatorResultT();
    case ObjKind::Frame: return types::voidT();
  }
  return types::voidT();
}

bool identical(const Value& a, const Value& b) {
  if (a.rep().index() != b.rep().index()) return false;
  switch (a.rep().index()) {
    case 0:
    case 1: return true;
    case 2: return a.asInt() == b.asInt();
    case 3: return a.asReal() == b.asReal();
    case 4: return a.asBool() == b.asBool();
    case 5: return a.asString() == b.asString();
    case 6: return equalType(a.asType(), b.asType());
    default: return a.asObject() == b.asObject();
  }
}

Value makeAny(TypePtr t, Value v) {
  return Value::object(std::make_shared<AnyObj>(std::move(t), std::move(v)));
}

Value makeHyperSource(HyperSource h) {
  return Value::object(std::make_shared<HyperSourceObj>(std::move(h)));
}

Value makeString(std::u32string_view s) { return Value::string(utf8::encode(s)); }

static std::string showReal(double r) {
  if (std::isnan(r)) return "nan";
  if (std::isinf(r)) return r < 0 ? "-inf" : "inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, r);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string showValue(const Value& v) {
  switch (v.rep().index()) {
    case 0: return "";
    case 1: return "nil";
    case 2: return std::to_string(v.asInt());
    case 3: return showReal(v.asReal());
    case 4: return v.asBool() ? "true" : "false";
    case 5: return "\"" + v.asString() + "\"";
    case 6: return writeType(v.asType());
    default: break;
  }
  const auto& o = v.asObject();
  switch (o->kind()) {
    case ObjKind::Structure: {
      const auto& s = static_cast<const StructObj&>(*o);
      std::string out = "struct( ";
      for (std::size_t i = 0; i < s.slots.size(); ++i) {
        if (i) out += " ; ";
        out += s.type->fields()[i].name + " = " + showValue(s.slots[i]);
      }
      return out + " )";
    }
    case ObjKind::Variant: {
      const auto& s = static_cast<const VariantObj&>(*o);
      return s.branch + " : " + showValue(s.payload);
    }
    case ObjKind::Vector: {
      const auto& s = static_cast<const VectorObj&>(*o);
      std::string out = "vector @" + std::to_string(s.lower) + " of [ ";
      for (std::size_t i = 0; i < s.cells.size(); ++i) {
        if (i) out += ", ";
        out += showValue(s.cells[i]);
      }
      return out + " ]";
    }
    case ObjKind::Any: {
      const auto& a = static_cast<const AnyObj&>(*o);
      return "any( " + showValue(a.value) + " )";
    }
    case ObjKind::HyperSource:
      return "hyper\"" + utf8::encode(static_cast<const HyperSourceObj&>(*o).src.code) + "\"";
    case ObjKind::Closure:
    case ObjKind::Builtin: return "<" + writeType(typeOfValue(v)) + ">";
    case ObjKind::Env: return "<env>";
    case ObjKind::Set: {
      const auto& s = static_cast<const SetObj&>(*o);
      std::string out = "{ ";
      for (std::size_t i = 0; i < s.elems.size(); ++i) {
        if (i) out += ", ";
        out += showValue(s.elems[i]);
      }
      return out + " }";
    }
    case ObjKind::Comparison: return "<Comparison>";
    case ObjKind::Generator: return "<Generator>";
    case ObjKind::GeneratorSource: return "<GeneratorSource>";
    case ObjKind::GeneratorResult: return "<GeneratorResult>";
    case ObjKind::Frame: return "<frame>";
  }
  return "?";
}

}  // namespace hpk
