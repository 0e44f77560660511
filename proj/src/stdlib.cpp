#include <cmath>
#include <istream>
#include <mutex>
#include <ostream>

#include "hpk/builtins.hpp"
#include "hpk/compiler.hpp"
#include "hpk/error.hpp"
#include "hpk/generator.hpp"
#include "hpk/genlib.hpp"
#include "hpk/kernel.hpp"

namespace hpk {

namespace {

using Args = std::vector<Value>;

TypePtr P(std::vector<TypePtr> params, TypePtr result = nullptr) {
  return TypeRep::proc(std::move(params), std::move(result));
}

// Host errors surface in L as runtime faults.
BuiltinFn guarded(BuiltinFn fn) {
  return [fn = std::move(fn)](Interp& in, Args& a) -> Value {
    try {
      return fn(in, a);
    } catch (const RuntimeFault&) {
      throw;
    } catch (const Error& e) {
      throw RuntimeFault(e.what());
    }
  };
}

void def(const std::string& name, TypePtr type, BuiltinFn fn) {
  BuiltinRegistry::instance().add(name, std::move(type), guarded(std::move(fn)));
}

void intrinsic(const std::string& name, IntrinsicTyper typer, BuiltinFn fn) {
  BuiltinRegistry::instance().addIntrinsic(name, std::move(typer), guarded(std::move(fn)));
}

const HyperSource& hs(const Value& v) {
  auto h = v.as<HyperSourceObj>();
  if (!h) throw RuntimeFault("not a HyperSource");
  return h->src;
}

const GeneratorSource& gsrc(const Value& v) {
  auto g = v.as<GenSourceObj>();
  if (!g) throw RuntimeFault("not a GeneratorSource");
  return g->src;
}

GeneratorPtr gen(const Value& v) {
  auto g = v.as<GeneratorObj>();
  if (!g) throw RuntimeFault("not a Generator");
  return g;
}

const SetObj& set(const Value& v) {
  auto s = v.as<SetObj>();
  if (!s) throw RuntimeFault("not a set");
  return *s;
}

EnvPtr env(const Value& v) {
  auto e = v.as<EnvObj>();
  if (!e) throw RuntimeFault("not an environment");
  return e;
}

Value H(HyperSource h) { return makeHyperSource(std::move(h)); }
Value GS(GeneratorSource s) { return Value::object(std::make_shared<GenSourceObj>(std::move(s))); }
Value S(SetPtr s) { return Value::object(std::move(s)); }

// Contents of an any, or the value itself.
std::pair<TypePtr, Value> unbox(const Value& v) {
  if (auto a = v.as<AnyObj>()) return {a->type, a->value};
  return {typeOfValue(v), v};
}

TypePtr procType(const Value& v) {
  if (auto c = v.as<ClosureObj>()) return c->type;
  if (auto b = v.as<BuiltinObj>()) return b->def->type;
  return nullptr;
}

// Checks that `visit` takes one element of `s`.
void checkVisitor(const SetObj& s, const Value& visit) {
  TypePtr t = procType(visit);
  if (!t || t->fields().size() != 1 || !equalType(t->fields()[0].type, s.elem)) {
    throw RuntimeFault("element type mismatch: visitor over " + writeType(t) + " for set of " + writeType(s.elem));
  }
}

ComparisonPtr comparisonArg(const Value& v) {
  if (auto c = v.as<ComparisonObj>()) return c;
  return mkComparison(v);
}

// Typer helpers. Intrinsic typers see the static argument types.
bool isSet(const TypePtr& t) { return t && t->is(TypeCtor::Set); }
bool isProc(const TypePtr& t, std::size_t n) { return t && t->is(TypeCtor::Proc) && t->fields().size() == n; }
bool isPredicate(const TypePtr& t, std::size_t n) {
  return isProc(t, n) && t->result() && t->result()->is(TypeCtor::Bool);
}
bool isEqualityProc(const TypePtr& t) {
  return isPredicate(t, 2) && equalType(t->fields()[0].type, t->fields()[1].type);
}
bool isValue(const TypePtr& t) { return t && !t->is(TypeCtor::Void); }

IntrinsicTyper typer(std::size_t arity, std::function<bool(const std::vector<TypePtr>&)> ok, std::string expect,
                     TypePtr result) {
  return [=](const std::vector<TypePtr>& a, std::string& err) -> TypePtr {
    if (a.size() != arity) {
      err = "expected " + std::to_string(arity) + " arguments";
      return nullptr;
    }
    if (!ok(a)) {
      err = "expected " + expect;
      return nullptr;
    }
    return result;
  };
}

void installCore() {
  auto& reg = BuiltinRegistry::instance();
  reg.addType("HyperSource", types::hyperSourceT());
  reg.addType("Generator", types::generatorT());
  reg.addType("GeneratorSource", types::generatorSourceT());
  reg.addType("GeneratorResult", types::generatorResultT());
  reg.addType("Comparison", types::comparisonT());
  reg.addType("NameAndType", types::nameAndTypeT());
  reg.addType("NameAndValue", types::nameAndValueT());
  reg.addType("TypeRep", types::typeRepT());

  auto I = types::intT();
  auto R = types::realT();
  auto B = types::boolT();
  auto Str = types::stringT();
  auto A = types::anyT();
  auto E = types::envT();
  auto T = types::typeRepT();
  auto St = types::setT();
  auto Hs = types::hyperSourceT();
  auto G = types::generatorT();
  auto Gs = types::generatorSourceT();
  auto Gr = types::generatorResultT();

  def("PS", P({}, E), [](Interp& in, Args&) { return Value::object(in.kernel.store().root()); });
  def("environment", P({}, E), [](Interp&, Args&) { return Value::object(std::make_shared<EnvObj>()); });
  def("writeString", P({Str}), [](Interp& in, Args& a) {
    in.kernel.out() << a[0].asString();
    in.kernel.out().flush();
    return Value();
  });
  def("readString", P({}, Str), [](Interp& in, Args&) {
    std::string line;
    if (!std::getline(in.kernel.in(), line)) return Value::string("");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return Value::string(line);
  });
  def("iformat", P({I}, Str), [](Interp&, Args& a) { return Value::string(std::to_string(a[0].asInt())); });
  def("rformat", P({R}, Str), [](Interp&, Args& a) { return Value::string(showValue(a[0])); });
  def("length", P({Str}, I), [](Interp&, Args& a) {
    return Value::integer(static_cast<std::int64_t>(utf8::decode(a[0].asString()).size()));
  });
  def("sin", P({R}, R), [](Interp&, Args& a) { return Value::real(std::sin(a[0].asReal())); });
  def("cos", P({R}, R), [](Interp&, Args& a) { return Value::real(std::cos(a[0].asReal())); });
  def("sqrt", P({R}, R), [](Interp&, Args& a) {
    if (a[0].asReal() < 0) throw RuntimeFault("sqrt of a negative number");
    return Value::real(std::sqrt(a[0].asReal()));
  });
  def("float", P({I}, R), [](Interp&, Args& a) { return Value::real(static_cast<double>(a[0].asInt())); });
  def("truncate", P({R}, I), [](Interp&, Args& a) {
    double r = std::trunc(a[0].asReal());
    if (!(r >= -9.2e18 && r <= 9.2e18)) throw RuntimeFault("real out of integer range");
    return Value::integer(static_cast<std::int64_t>(r));
  });

  // Compiler.
  def("compile", P({Str}, A), [](Interp& in, Args& a) { return compileString(in.kernel, a[0].asString()); });
  def("compileString", P({Str}, A), [](Interp& in, Args& a) { return compileString(in.kernel, a[0].asString()); });
  def("compileHyper", P({Hs}, A), [](Interp& in, Args& a) { return compileHyper(in.kernel, hs(a[0])); });
  def("compileAndProcess", P({Hs, P({A})}), [](Interp& in, Args& a) {
    compileAndProcess(in.kernel, hs(a[0]), a[1]);
    return Value();
  });

  // Type representations.
  def("getTypeRep", P({A}, T), [](Interp&, Args& a) { return Value::type(unbox(a[0]).first); });
  def("equalType", P({T, T}, B), [](Interp&, Args& a) {
    return Value::boolean(equalType(a[0].asType(), a[1].asType()));
  });
  def("writeType", P({T}, Str), [](Interp&, Args& a) { return Value::string(writeType(a[0].asType())); });
  def("getStructureFields", P({T}, St), [](Interp& in, Args& a) { return S(getStructureFields(in, a[0].asType())); });
  def("mkStructureType", P({St}, T), [](Interp&, Args& a) { return Value::type(mkStructureType(set(a[0]))); });

  // Browser support.
  def("valueText", P({A}, Str), [](Interp&, Args& a) { return Value::string(showValue(unbox(a[0]).second)); });
  def("hasSource", P({A}, B), [](Interp&, Args& a) {
    auto c = unbox(a[0]).second.as<ClosureObj>();
    return Value::boolean(c && c->source);
  });
  def("sourceOf", P({A}, Hs), [](Interp&, Args& a) { return H(getProcSource(unbox(a[0]).second)); });

  // Hyper-sources and links.
  def("mkHyperSource", P({Str}, Hs), [](Interp&, Args& a) { return H(mkHyperSource(a[0].asString())); });
  def("concatHyperSource", P({Hs, Hs}, Hs), [](Interp&, Args& a) { return H(concatHyperSource(hs(a[0]), hs(a[1]))); });
  def("extractHyperSource", P({Hs, I, I}, Hs), [](Interp&, Args& a) {
    return H(extractHyperSource(hs(a[0]), a[1].asInt(), a[2].asInt()));
  });
  def("compareHyperSource", P({Hs, Hs}, B), [](Interp&, Args& a) {
    return Value::boolean(compareHyperSource(hs(a[0]), hs(a[1])));
  });
  def("hyperText", P({Hs}, Str), [](Interp&, Args& a) { return Value::string(hyperText(hs(a[0]))); });
  def("mkLink", P({A}, Hs), [](Interp&, Args& a) {
    auto [t, v] = unbox(a[0]);
    return H(mkLink(t, v));
  });
  def("mkEnvLocLink", P({E, Str}, Hs), [](Interp&, Args& a) { return H(mkEnvLocLink(env(a[0]), a[1].asString())); });
  def("mkStructLocLink", P({A, Str}, Hs), [](Interp&, Args& a) {
    return H(mkStructLocLink(unbox(a[0]).second, a[1].asString()));
  });
  def("mkVecLocLink", P({A, I}, Hs), [](Interp&, Args& a) { return H(mkVecLocLink(unbox(a[0]).second, a[1].asInt())); });
  def("mkTypeLink", P({T}, Hs), [](Interp&, Args& a) { return H(mkTypeLink(a[0].asType())); });

  // Generators.
  def("mkGeneratorSource", P({Hs}, Gs), [](Interp&, Args& a) { return GS(mkGeneratorSource(hs(a[0]))); });
  def("concatGeneratorSource", P({Gs, Gs}, Gs), [](Interp&, Args& a) {
    return GS(concatGeneratorSource(gsrc(a[0]), gsrc(a[1])));
  });
  def("extractGeneratorSource", P({Gs, I, I}, Gs), [](Interp&, Args& a) {
    return GS(extractGeneratorSource(gsrc(a[0]), a[1].asInt(), a[2].asInt()));
  });
  def("addSubGenerator", P({Gs, I, I, G}, Gs), [](Interp&, Args& a) {
    return GS(addSubGenerator(gsrc(a[0]), a[1].asInt(), a[2].asInt(), gen(a[3])));
  });
  def("nullPrelude", P({E}, E), [](Interp&, Args& a) { return a[0]; });
  def("literalResult", P({Gs}, Gr), [](Interp&, Args& a) {
    return Value::object(std::make_shared<GenResultObj>(literalResult(gsrc(a[0]))));
  });
  def("exprResult", P({P({E}, Gs)}, Gr), [](Interp&, Args& a) {
    return Value::object(std::make_shared<GenResultObj>(exprResult(a[0])));
  });
  def("mkGenerator", P({P({E}, E), Gr}, G), [](Interp&, Args& a) {
    auto r = a[1].as<GenResultObj>();
    if (!r) throw RuntimeFault("not a GeneratorResult");
    return Value::object(mkGenerator(a[0], r->result));
  });
  def("expandGenerator", P({G, E}, Hs), [](Interp& in, Args& a) {
    return H(expandGenerator(in.kernel, gen(a[0]), env(a[1])));
  });
  def("evalWithString", P({Str, G}, Hs), [](Interp& in, Args& a) {
    return H(evalWithString(in.kernel, gen(a[1]), a[0].asString()));
  });

  // Sets and code composition.
  def("sameNameAndType", P({types::nameAndTypeT(), types::nameAndTypeT()}, B), [](Interp&, Args& a) {
    auto x = a[0].as<StructObj>();
    auto y = a[1].as<StructObj>();
    return Value::boolean(x->slots[static_cast<std::size_t>(x->indexOf("name"))].asString() ==
                              y->slots[static_cast<std::size_t>(y->indexOf("name"))].asString() &&
                          equalType(x->slots[static_cast<std::size_t>(x->indexOf("typeRep"))].asType(),
                                    y->slots[static_cast<std::size_t>(y->indexOf("typeRep"))].asType()));
  });
  def("sameName", P({types::nameAndValueT(), types::nameAndValueT()}, B), [](Interp&, Args& a) {
    auto x = a[0].as<StructObj>();
    auto y = a[1].as<StructObj>();
    return Value::boolean(x->slots[static_cast<std::size_t>(x->indexOf("name"))].asString() ==
                          y->slots[static_cast<std::size_t>(y->indexOf("name"))].asString());
  });
  def("union", P({St, St}, St), [](Interp& in, Args& a) { return S(setUnion(in, set(a[0]), set(a[1]))); });
  def("intersection", P({St, St}, St), [](Interp& in, Args& a) { return S(intersection(in, set(a[0]), set(a[1]))); });
  def("difference", P({St, St}, St), [](Interp& in, Args& a) { return S(difference(in, set(a[0]), set(a[1]))); });
  def("includes", P({St, St}, B), [](Interp& in, Args& a) { return Value::boolean(includes(in, set(a[0]), set(a[1]))); });
  def("size", P({St}, I), [](Interp&, Args& a) { return Value::integer(static_cast<std::int64_t>(set(a[0]).elems.size())); });
  def("rest", P({St}, St), [](Interp&, Args& a) { return S(rest(set(a[0]))); });
  def("choose", P({St}, A), [](Interp&, Args& a) {
    const auto& s = set(a[0]);
    if (s.elems.empty()) throw RuntimeFault("choose from an empty set");
    return makeAny(s.elem, s.elems.front());
  });
  def("andCompose", P({St}, Hs), [](Interp&, Args& a) { return H(andCompose(set(a[0]))); });
  def("orCompose", P({St}, Hs), [](Interp&, Args& a) { return H(orCompose(set(a[0]))); });
  def("mkStruct", P({St}, Hs), [](Interp&, Args& a) { return H(mkStruct(set(a[0]))); });

  // Intrinsics: element types are checked when the call runs.
  intrinsic("insert", typer(2, [](auto& a) { return isSet(a[0]) && isValue(a[1]); }, "( set, element )", St),
            [](Interp& in, Args& a) { return S(insert(in, set(a[0]), a[1])); });
  intrinsic("delete", typer(2, [](auto& a) { return isSet(a[0]) && isValue(a[1]); }, "( set, element )", St),
            [](Interp& in, Args& a) { return S(remove(in, set(a[0]), a[1])); });
  intrinsic("memberOf", typer(2, [](auto& a) { return isValue(a[0]) && isSet(a[1]); }, "( element, set )", B),
            [](Interp& in, Args& a) { return Value::boolean(memberOf(in, a[0], set(a[1]))); });
  intrinsic("iterate",
            typer(2, [](auto& a) { return isSet(a[0]) && isPredicate(a[1], 1); }, "( set, proc( T -> bool ) )",
                  types::voidT()),
            [](Interp& in, Args& a) {
              checkVisitor(set(a[0]), a[1]);
              iterate(in, set(a[0]), a[1]);
              return Value();
            });
  intrinsic("scan",
            typer(2, [](auto& a) { return isSet(a[0]) && isPredicate(a[1], 1); }, "( set, proc( T -> bool ) )", B),
            [](Interp& in, Args& a) {
              checkVisitor(set(a[0]), a[1]);
              return Value::boolean(!scan(in, set(a[0]), a[1]).isVoid());
            });
  intrinsic("map",
            typer(3,
                  [](auto& a) {
                    return isSet(a[0]) && isProc(a[1], 1) && a[1]->result() &&
                           ((a[2]->is(TypeCtor::Opaque) && a[2]->opaqueName() == "Comparison") ||
                            isEqualityProc(a[2]));
                  },
                  "( set, proc( S -> T ), Comparison )", St),
            [](Interp& in, Args& a) {
              checkVisitor(set(a[0]), a[1]);
              return S(mapSet(in, set(a[0]), a[1], comparisonArg(a[2])));
            });
  intrinsic("mkComparison",
            typer(1, [](auto& a) { return isEqualityProc(a[0]); }, "proc( T, T -> bool )", types::comparisonT()),
            [](Interp&, Args& a) { return Value::object(mkComparison(a[0])); });
  intrinsic("mkEmptySet",
            typer(1,
                  [](auto& a) {
                    return (a[0]->is(TypeCtor::Opaque) && a[0]->opaqueName() == "Comparison") || isEqualityProc(a[0]);
                  },
                  "Comparison or proc( T, T -> bool )", St),
            [](Interp&, Args& a) { return S(mkEmptySet(comparisonArg(a[0]))); });
  intrinsic("upb", typer(1, [](auto& a) { return a[0]->is(TypeCtor::Vector); }, "a vector", I),
            [](Interp&, Args& a) { return Value::integer(a[0].as<VectorObj>()->upper()); });
  intrinsic("lwb", typer(1, [](auto& a) { return a[0]->is(TypeCtor::Vector); }, "a vector", I),
            [](Interp&, Args& a) { return Value::integer(a[0].as<VectorObj>()->lower); });
  intrinsic("getProcSource", typer(1, [](auto& a) { return a[0]->is(TypeCtor::Proc); }, "a procedure", Hs),
            [](Interp&, Args& a) { return H(getProcSource(a[0])); });
}

}  // namespace

void installStandardLibrary() {
  static std::once_flag once;
  std::call_once(once, installCore);
}

}  // namespace hpk
