#include "hpk/genlib.hpp"

#include <set>

#include "hpk/builtins.hpp"
#include "hpk/error.hpp"

namespace hpk {

namespace {

TypePtr firstParamType(const Value& proc) {
  TypePtr t;
  if (auto c = proc.as<ClosureObj>()) t = c->type;
  if (auto b = proc.as<BuiltinObj>()) t = b->def->type;
  if (!t || !t->is(TypeCtor::Proc) || t->fields().size() != 2 || !t->result() ||
      !t->result()->is(TypeCtor::Bool) || !equalType(t->fields()[0].type, t->fields()[1].type)) {
    throw RuntimeFault("comparison needs a proc( T, T -> bool )");
  }
  return t->fields()[0].type;
}

SetPtr emptyLike(const SetObj& s) {
  auto out = std::make_shared<SetObj>();
  out->elem = s.elem;
  out->cmp = s.cmp;
  return out;
}

void checkElement(const SetObj& s, const Value& x) {
  if (!equalType(typeOfValue(x), s.elem)) {
    throw RuntimeFault("element type mismatch: " + writeType(typeOfValue(x)) + " in set of " + writeType(s.elem));
  }
}

void checkCompatible(const SetObj& a, const SetObj& b) {
  if (!equalType(a.elem, b.elem)) {
    throw RuntimeFault("element type mismatch: " + writeType(b.elem) + " with " + writeType(a.elem));
  }
}

const StructObj& fieldsOf(const Value& v, const TypePtr& expected, const char* what) {
  auto s = v.as<StructObj>();
  if (!s || !equalType(s->type, expected)) throw RuntimeFault(std::string("not a ") + what);
  return *s;
}

std::string stringSlot(const StructObj& s, std::string_view field) {
  return s.slots[static_cast<std::size_t>(s.indexOf(field))].asString();
}

HyperSource compose(const SetObj& s, const char* op, const char* unit) {
  HyperSource out;
  for (const auto& e : s.elems) {
    auto h = e.as<HyperSourceObj>();
    if (!h) throw RuntimeFault("not a HyperSource");
    out = concatHyperSource(out, mkHyperSource("("));
    out = concatHyperSource(out, h->src);
    out = concatHyperSource(out, mkHyperSource(std::string(") ") + op + " "));
  }
  return concatHyperSource(out, mkHyperSource(unit));
}

}  // namespace

ComparisonPtr mkComparison(Value equal) {
  TypePtr elem = firstParamType(equal);
  return mkComparison(std::move(elem), std::move(equal));
}

ComparisonPtr mkComparison(TypePtr elem, Value equal) {
  auto c = std::make_shared<ComparisonObj>();
  c->elem = std::move(elem);
  c->equal = std::move(equal);
  return c;
}

SetPtr mkEmptySet(ComparisonPtr cmp) {
  if (!cmp) throw RuntimeFault("no comparison");
  auto s = std::make_shared<SetObj>();
  s->elem = cmp->elem;
  s->cmp = std::move(cmp);
  return s;
}

bool setEqual(Interp& in, const SetObj& s, const Value& a, const Value& b) {
  Value r = in.call(s.cmp->equal, {a, b});
  return r.isBool() && r.asBool();
}

bool memberOf(Interp& in, const Value& x, const SetObj& s) {
  checkElement(s, x);
  for (const auto& e : s.elems) {
    if (setEqual(in, s, e, x)) return true;
  }
  return false;
}

SetPtr insert(Interp& in, const SetObj& s, const Value& x) {
  auto out = std::make_shared<SetObj>(s);
  out->id = 0;
  if (!memberOf(in, x, s)) out->elems.push_back(x);
  return out;
}

SetPtr remove(Interp& in, const SetObj& s, const Value& x) {
  checkElement(s, x);
  auto out = emptyLike(s);
  for (const auto& e : s.elems) {
    if (!setEqual(in, s, e, x)) out->elems.push_back(e);
  }
  return out;
}

SetPtr setUnion(Interp& in, const SetObj& a, const SetObj& b) {
  checkCompatible(a, b);
  auto out = emptyLike(a);
  out->elems = a.elems;
  for (const auto& e : b.elems) {
    if (!memberOf(in, e, *out)) out->elems.push_back(e);
  }
  return out;
}

SetPtr intersection(Interp& in, const SetObj& a, const SetObj& b) {
  checkCompatible(a, b);
  auto out = emptyLike(a);
  for (const auto& e : a.elems) {
    if (memberOf(in, e, b)) out->elems.push_back(e);
  }
  return out;
}

SetPtr difference(Interp& in, const SetObj& a, const SetObj& b) {
  checkCompatible(a, b);
  auto out = emptyLike(a);
  for (const auto& e : a.elems) {
    if (!memberOf(in, e, b)) out->elems.push_back(e);
  }
  return out;
}

bool includes(Interp& in, const SetObj& a, const SetObj& b) {
  checkCompatible(a, b);
  for (const auto& e : b.elems) {
    if (!memberOf(in, e, a)) return false;
  }
  return true;
}

void iterate(Interp& in, const SetObj& s, const Value& visit) {
  auto elems = s.elems;
  for (const auto& e : elems) {
    Value r = in.call(visit, {e});
    if (!r.isBool() || !r.asBool()) return;
  }
}

Value scan(Interp& in, const SetObj& s, const Value& pred) {
  auto elems = s.elems;
  for (const auto& e : elems) {
    Value r = in.call(pred, {e});
    if (r.isBool() && r.asBool()) return e;
  }
  return {};
}

SetPtr mapSet(Interp& in, const SetObj& s, const Value& f, ComparisonPtr resultCmp) {
  auto out = mkEmptySet(std::move(resultCmp));
  auto elems = s.elems;
  for (const auto& e : elems) {
    Value y = in.call(f, {e});
    if (!memberOf(in, y, *out)) out->elems.push_back(y);
  }
  return out;
}

SetPtr rest(const SetObj& s) {
  auto out = emptyLike(s);
  if (!s.elems.empty()) out->elems.assign(s.elems.begin() + 1, s.elems.end());
  return out;
}

SetPtr setOf(Interp& in, ComparisonPtr cmp, const std::vector<Value>& elems) {
  auto out = mkEmptySet(std::move(cmp));
  for (const auto& e : elems) {
    if (!memberOf(in, e, *out)) out->elems.push_back(e);
  }
  return out;
}

ComparisonPtr nameAndTypeComparison() {
  return mkComparison(types::nameAndTypeT(), BuiltinRegistry::instance().value("sameNameAndType"));
}

Value nameAndType(const std::string& name, TypePtr t) {
  return Value::object(std::make_shared<StructObj>(
      types::nameAndTypeT(), std::vector<Value>{Value::string(name), Value::type(std::move(t))}));
}

SetPtr getStructureFields(Interp& in, const TypePtr& t) {
  std::vector<Value> elems;
  if (t) {
    for (const auto& f : hpk::getStructureFields(*t)) elems.push_back(nameAndType(f.name, f.type));
  }
  return setOf(in, nameAndTypeComparison(), elems);
}

TypePtr mkStructureType(const SetObj& fields) {
  std::vector<NameAndType> out;
  std::set<std::string> seen;
  for (const auto& e : fields.elems) {
    const auto& s = fieldsOf(e, types::nameAndTypeT(), "NameAndType");
    std::string name = stringSlot(s, "name");
    const Value& tv = s.slots[static_cast<std::size_t>(s.indexOf("typeRep"))];
    if (!seen.insert(name).second) throw RuntimeFault("duplicate field name " + name);
    out.push_back({name, tv.asType()});
  }
  auto t = hpk::mkStructureType(out);
  if (!t) throw RuntimeFault("bad structure fields");
  return *t;
}

ComparisonPtr nameAndValueComparison() {
  return mkComparison(types::nameAndValueT(), BuiltinRegistry::instance().value("sameName"));
}

Value nameAndValue(const std::string& name, HyperSource value) {
  return Value::object(std::make_shared<StructObj>(
      types::nameAndValueT(), std::vector<Value>{Value::string(name), makeHyperSource(std::move(value))}));
}

ComparisonPtr hyperSourceComparison() {
  return mkComparison(types::hyperSourceT(), BuiltinRegistry::instance().value("compareHyperSource"));
}

HyperSource andCompose(const SetObj& s) { return compose(s, "and", "true"); }

HyperSource orCompose(const SetObj& s) { return compose(s, "or", "false"); }

HyperSource mkStruct(const SetObj& s) {
  HyperSource out = mkHyperSource("struct( ");
  std::set<std::string> seen;
  bool first = true;
  for (const auto& e : s.elems) {
    const auto& nv = fieldsOf(e, types::nameAndValueT(), "NameAndValue");
    std::string name = stringSlot(nv, "name");
    if (!seen.insert(name).second) throw RuntimeFault("duplicate field name " + name);
    auto h = nv.slots[static_cast<std::size_t>(nv.indexOf("value"))].as<HyperSourceObj>();
    if (!h) throw RuntimeFault("not a HyperSource");
    out = concatHyperSource(out, mkHyperSource((first ? "" : " ; ") + name + " = "));
    out = concatHyperSource(out, h->src);
    first = false;
  }
  return concatHyperSource(out, mkHyperSource(first ? ")" : " )"));
}

}  // namespace hpk
