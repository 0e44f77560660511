#include "hpk/typerep.hpp"

#include <set>

namespace hpk {

const TypeRep* TypeRep::field(std::string_view name) const {
  for (const auto& f : fields_) {
    if (f.name == name) return f.type.get();
  }
  return nullptr;
}

TypePtr TypeRep::base(TypeCtor c) {
  auto t = std::shared_ptr<TypeRep>(new TypeRep);
  t->ctor_ = c;
  return t;
}

TypePtr TypeRep::vector(TypePtr elem) {
  auto t = std::shared_ptr<TypeRep>(new TypeRep);
  t->ctor_ = TypeCtor::Vector;
  t->elem_ = std::move(elem);
  return t;
}

TypePtr TypeRep::set(TypePtr elem) {
  auto t = std::shared_ptr<TypeRep>(new TypeRep);
  t->ctor_ = TypeCtor::Set;
  t->elem_ = elem ? std::move(elem) : types::anyT();
  return t;
}

TypePtr TypeRep::proc(std::vector<TypePtr> params, TypePtr result) {
  auto t = std::shared_ptr<TypeRep>(new TypeRep);
  t->ctor_ = TypeCtor::Proc;
  for (auto& p : params) t->fields_.push_back({"", std::move(p)});
  t->result_ = std::move(result);
  return t;
}

static bool uniqueNames(const std::vector<NameAndType>& fields) {
  std::set<std::string_view> seen;
  for (const auto& f : fields) {
    if (f.name.empty() || !seen.insert(f.name).second) return false;
  }
  return true;
}

TypePtr TypeRep::structure(std::vector<NameAndType> fields) {
  if (!uniqueNames(fields)) return nullptr;
  auto t = std::shared_ptr<TypeRep>(new TypeRep);
  t->ctor_ = TypeCtor::Structure;
  t->fields_ = std::move(fields);
  return t;
}

TypePtr TypeRep::variant(std::vector<NameAndType> branches) {
  if (!uniqueNames(branches)) return nullptr;
  auto t = std::shared_ptr<TypeRep>(new TypeRep);
  t->ctor_ = TypeCtor::Variant;
  t->fields_ = std::move(branches);
  return t;
}

TypePtr TypeRep::opaque(std::string name) {
  auto t = std::shared_ptr<TypeRep>(new TypeRep);
  t->ctor_ = TypeCtor::Opaque;
  t->name_ = std::move(name);
  return t;
}

namespace types {
#define HPK_BASE_TYPE(fn, ctor)                           \
  TypePtr fn() {                                          \
    static const TypePtr t = TypeRep::base(TypeCtor::ctor); \
    return t;                                             \
  }
HPK_BASE_TYPE(intT, Int)
HPK_BASE_TYPE(realT, Real)
HPK_BASE_TYPE(boolT, Bool)
HPK_BASE_TYPE(stringT, String)
HPK_BASE_TYPE(nullT, Null)
HPK_BASE_TYPE(anyT, Any)
HPK_BASE_TYPE(envT, Env)
HPK_BASE_TYPE(typeRepT, TypeRep)
HPK_BASE_TYPE(voidT, Void)
#undef HPK_BASE_TYPE

TypePtr setT() {
  static const TypePtr t = TypeRep::set(anyT());
  return t;
}

#define HPK_OPAQUE_TYPE(fn, label)                      \
  TypePtr fn() {                                        \
    static const TypePtr t = TypeRep::opaque(label);    \
    return t;                                           \
  }
HPK_OPAQUE_TYPE(hyperSourceT, "HyperSource")
HPK_OPAQUE_TYPE(generatorT, "Generator")
HPK_OPAQUE_TYPE(generatorSourceT, "GeneratorSource")
HPK_OPAQUE_TYPE(generatorResultT, "GeneratorResult")
HPK_OPAQUE_TYPE(comparisonT, "Comparison")
#undef HPK_OPAQUE_TYPE

TypePtr nameAndTypeT() {
  static const TypePtr t = TypeRep::structure({{"name", stringT()}, {"typeRep", typeRepT()}});
  return t;
}

TypePtr nameAndValueT() {
  static const TypePtr t = TypeRep::structure({{"name", stringT()}, {"value", hyperSourceT()}});
  return t;
}
}  // namespace types

static bool sameFieldSets(const std::vector<NameAndType>& a, const std::vector<NameAndType>& b) {
  if (a.size() != b.size()) return false;
  for (const auto& fa : a) {
    const NameAndType* match = nullptr;
    for (const auto& fb : b) {
      if (fb.name == fa.name) {
        match = &fb;
        break;
      }
    }
    if (!match || !equalType(fa.type, match->type)) return false;
  }
  return true;
}

bool equalType(const TypeRep& a, const TypeRep& b) {
  if (&a == &b) return true;
  if (a.ctor() != b.ctor()) return false;
  switch (a.ctor()) {
    case TypeCtor::Vector:
    case TypeCtor::Set:
      return equalType(a.elem(), b.elem());
    case TypeCtor::Structure:
    case TypeCtor::Variant:
      return sameFieldSets(a.fields(), b.fields());
    case TypeCtor::Proc: {
      if (a.fields().size() != b.fields().size()) return false;
      for (std::size_t i = 0; i < a.fields().size(); ++i) {
        if (!equalType(a.fields()[i].type, b.fields()[i].type)) return false;
      }
      return equalType(a.result(), b.result());
    }
    case TypeCtor::Opaque:
      return a.opaqueName() == b.opaqueName();
    default:
      return true;
  }
}

std::vector<NameAndType> getStructureFields(const TypeRep& t) {
  if (!t.is(TypeCtor::Structure)) return {};
  return t.fields();
}

std::optional<TypePtr> mkStructureType(const std::vector<NameAndType>& fields) {
  auto t = TypeRep::structure(fields);
  if (!t) return std::nullopt;
  return t;
}

static void writeFields(std::string& out, const std::vector<NameAndType>& fields) {
  if (fields.empty()) {
    out += "()";
    return;
  }
  out += "( ";
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += " ; ";
    out += fields[i].name;
    out += " : ";
    out += writeType(*fields[i].type);
  }
  out += " )";
}

std::string writeType(const TypeRep& t) {
  switch (t.ctor()) {
    case TypeCtor::Int: return "int";
    case TypeCtor::Real: return "real";
    case TypeCtor::Bool: return "bool";
    case TypeCtor::String: return "string";
    case TypeCtor::Null: return "null";
    case TypeCtor::Any: return "any";
    case TypeCtor::Env: return "env";
    case TypeCtor::TypeRep: return "typerep";
    case TypeCtor::Set: return "set";
    case TypeCtor::Void: return "void";
    case TypeCtor::Opaque: return t.opaqueName();
    case TypeCtor::Vector: return "*" + writeType(*t.elem());
    case TypeCtor::Structure: {
      std::string out = "structure";
      writeFields(out, t.fields());
      return out;
    }
    case TypeCtor::Variant: {
      std::string out = "variant";
      writeFields(out, t.fields());
      return out;
    }
    case TypeCtor::Proc: {
      if (t.fields().empty() && !t.result()) return "proc()";
      std::string out = "proc( ";
      for (std::size_t i = 0; i < t.fields().size(); ++i) {
        if (i) out += ", ";
        out += writeType(*t.fields()[i].type);
      }
      if (t.result()) {
        if (!t.fields().empty()) out += " ";
        out += "-> " + writeType(*t.result());
      }
      out += " )";
      return out;
    }
  }
  return "?";
}

}  // namespace hpk
