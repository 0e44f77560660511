#include "hpk/natural_join.hpp"

#include <algorithm>
#include <ostream>

#include "hpk/compiler.hpp"
#include "hpk/error.hpp"

namespace hpk {

namespace {

HyperSource genLink(const GeneratorPtr& g, const std::string& label) {
  return linkTo(Binding::ofValue(Value::object(g), types::generatorT()), label);
}

// Compiles an L procedure whose text may link to generators by name.
Value procFrom(Kernel& k, const std::string& text, const std::map<std::string, GeneratorPtr>& links = {}) {
  std::map<std::string, HyperSource> ls;
  for (const auto& [name, g] : links) ls[name] = genLink(g, name);
  return evalHyper(k, sourceTemplate(text, {}, ls).code);
}

GeneratorPtr literal(Kernel& k, const std::string& text, const std::map<std::string, GeneratorPtr>& gens = {},
                     const std::string& prelude = "") {
  Value p = prelude.empty() ? nullPrelude() : procFrom(k, prelude);
  return mkGenerator(p, literalResult(sourceTemplate(text, gens)));
}

GeneratorPtr expression(Kernel& k, const std::string& body, Value prelude = {}) {
  if (prelude.isVoid()) prelude = nullPrelude();
  return mkGenerator(prelude, exprResult(procFrom(k, "proc( e_ : env -> GeneratorSource ) ; " + body)));
}

// Source for a link to the type held in the environment under `name`.
GeneratorPtr typeLink(Kernel& k, const std::string& name) {
  return expression(k, "use e_ with " + name + " : typerep in mkGeneratorSource( mkTypeLink( " + name + " ) )");
}

// arg1 and arg2 agree on every field common to the sets left and right.
GeneratorPtr matchBody(Kernel& k, const std::string& left, const std::string& right, const std::string& out,
                       const GeneratorPtr& fieldTest) {
  Value prelude = procFrom(k,
                           "proc( e_ : env -> env ) ;\n"
                           "use e_ with " + left + ", " + right + " : set in\n"
                           "begin\n"
                           "  let tests_ := mkEmptySet( compareHyperSource )\n"
                           "  let addTest = proc( fieldInfo : NameAndType -> bool )\n"
                           "  begin\n"
                           "    tests_ := insert( tests_, evalWithString( fieldInfo( name ), ⟦mkFieldNameTest⟧ ) )\n"
                           "    true\n"
                           "  end\n"
                           "  iterate( intersection( " + left + ", " + right + " ), addTest )\n"
                           "  in e_ let " + out + " = tests_\n"
                           "  e_\n"
                           "end",
                           {{"mkFieldNameTest", fieldTest}});
  return expression(k, "use e_ with " + out + " : set in mkGeneratorSource( andCompose( " + out + " ) )", prelude);
}

GeneratorPtr concatBody(Kernel& k, const GeneratorPtr& takeFrom1, const GeneratorPtr& takeFrom2) {
  Value prelude = procFrom(k,
                           "proc( e_ : env -> env ) ;\n"
                           "use e_ with type1Fields, type2Fields : set in\n"
                           "begin\n"
                           "  let elems_ := mkEmptySet( sameName )\n"
                           "  let addField = proc( fieldInfo : NameAndType -> bool )\n"
                           "  begin\n"
                           "    let g_ = if memberOf( fieldInfo, type1Fields ) then ⟦takeFrom1⟧ else ⟦takeFrom2⟧\n"
                           "    let n_ = fieldInfo( name )\n"
                           "    elems_ := insert( elems_, NameAndValue( n_, evalWithString( n_, g_ ) ) )\n"
                           "    true\n"
                           "  end\n"
                           "  iterate( union( type1Fields, type2Fields ), addField )\n"
                           "  in e_ let structElementSet = elems_\n"
                           "  e_\n"
                           "end",
                           {{"takeFrom1", takeFrom1}, {"takeFrom2", takeFrom2}});
  return expression(k, "use e_ with structElementSet : set in mkGeneratorSource( mkStruct( structElementSet ) )",
                    prelude);
}

const char* kJoinPrelude =
    "proc( e_ : env -> env ) ;\n"
    "use e_ with type1, type2 : typerep in\n"
    "begin\n"
    "  let f1_ = getStructureFields( type1 )\n"
    "  let f2_ = getStructureFields( type2 )\n"
    "  let all_ = union( f1_, f2_ )\n"
    "  in e_ let type1Fields = f1_\n"
    "  in e_ let type2Fields = f2_\n"
    "  in e_ let resultFields = all_\n"
    "  in e_ let resultType = mkStructureType( all_ )\n"
    "  e_\n"
    "end";

const char* kJoinBody =
    "begin\n"
    "let compare_ = ⟦compareResult⟧\n"
    "let match_ = ⟦match⟧\n"
    "let concat_ = ⟦concat⟧\n"
    "rec let onejoin_ = proc( t_ : ⟦type1⟧ ; r_ : set -> set )\n"
    "  if size( r_ ) = 0 then mkEmptySet( compare_ ) else\n"
    "  begin\n"
    "    let rest_ = onejoin_( t_, rest( r_ ) )\n"
    "    project choose( r_ ) as u_ onto\n"
    "      ⟦type2⟧ : if match_( t_, u_ ) then insert( rest_, concat_( t_, u_ ) ) else rest_\n"
    "      default : rest_\n"
    "  end\n"
    "rec let join_ = proc( r1_, r2_ : set -> set )\n"
    "  if size( r1_ ) = 0 then mkEmptySet( compare_ ) else\n"
    "  begin\n"
    "    let rest_ = join_( rest( r1_ ), r2_ )\n"
    "    project choose( r1_ ) as t_ onto\n"
    "      ⟦type1⟧ : union( onejoin_( t_, r2_ ), rest_ )\n"
    "      default : rest_\n"
    "  end\n"
    "join_\n"
    "end";

}  // namespace

GeneratorPtr naturalJoinGenerator(Kernel& k) {
  auto type1 = typeLink(k, "type1");
  auto type2 = typeLink(k, "type2");
  auto resultType = typeLink(k, "resultType");

  auto fieldName = expression(k, "use e_ with stringVal : string in mkGeneratorSource( mkHyperSource( stringVal ) )");
  auto fieldTest = literal(k, "arg1( ⟦fieldName⟧ ) = arg2( ⟦fieldName⟧ )", {{"fieldName", fieldName}});
  auto takeFrom1 = literal(k, "arg1( ⟦fieldName⟧ )", {{"fieldName", fieldName}});
  auto takeFrom2 = literal(k, "arg2( ⟦fieldName⟧ )", {{"fieldName", fieldName}});

  auto matchTests = matchBody(k, "type1Fields", "type2Fields", "matchTests", fieldTest);
  auto resultTests = matchBody(k, "resultFields", "resultFields", "resultTests", fieldTest);

  auto match = literal(k, "proc( arg1 : ⟦type1⟧ ; arg2 : ⟦type2⟧ -> bool ) ; ⟦matchBody⟧",
                       {{"type1", type1}, {"type2", type2}, {"matchBody", matchTests}});
  auto compareResult = literal(k, "mkComparison( proc( arg1, arg2 : ⟦resultType⟧ -> bool ) ; ⟦resultBody⟧ )",
                               {{"resultType", resultType}, {"resultBody", resultTests}});
  auto concat = literal(k, "proc( arg1 : ⟦type1⟧ ; arg2 : ⟦type2⟧ -> ⟦resultType⟧ ) ; ⟦concatBody⟧",
                        {{"type1", type1},
                         {"type2", type2},
                         {"resultType", resultType},
                         {"concatBody", concatBody(k, takeFrom1, takeFrom2)}});

  return literal(k, kJoinBody,
                 {{"compareResult", compareResult}, {"match", match}, {"concat", concat}, {"type1", type1},
                  {"type2", type2}},
                 kJoinPrelude);
}

GeneratorPtr installNaturalJoin(Kernel& k) {
  const EnvPtr& root = k.store().root();
  if (auto* e = root->find("naturalJoin")) {
    if (auto g = e->value.as<GeneratorObj>()) return g;
  }
  auto g = naturalJoinGenerator(k);
  root->bind("naturalJoin", types::generatorT(), Value::object(g), false);
  return g;
}

TypePtr joinResultType(Interp& in, const TypePtr& t1, const TypePtr& t2) {
  return mkStructureType(*setUnion(in, *getStructureFields(in, t1), *getStructureFields(in, t2)));
}

HyperSource joinSource(Kernel& k, const TypePtr& t1, const TypePtr& t2) {
  auto e = std::make_shared<EnvObj>();
  e->bind("type1", types::typeRepT(), Value::type(t1), false);
  e->bind("type2", types::typeRepT(), Value::type(t2), false);
  return expandGenerator(k, installNaturalJoin(k), e);
}

Value joinProcedure(Kernel& k, const TypePtr& t1, const TypePtr& t2) { return evalHyper(k, joinSource(k, t1, t2)); }

ComparisonPtr tupleComparison(Kernel& k, const TypePtr& t) {
  std::string body;
  for (const auto& f : t->fields()) body += "( a_( " + f.name + " ) = b_( " + f.name + " ) ) and ";
  Value eq = evalString(k, "proc( a_, b_ : " + writeType(t) + " -> bool ) ; " + body + "true");
  return mkComparison(t, eq);
}

Value relation(Kernel& k, const TypePtr& t, const std::vector<Row>& rows) {
  std::vector<Value> tuples;
  for (const auto& r : rows) {
    std::vector<Value> slots;
    for (const auto& f : t->fields()) {
      auto it = r.find(f.name);
      if (it == r.end()) throw Error("row has no field " + f.name);
      slots.push_back(it->second);
    }
    tuples.push_back(Value::object(std::make_shared<StructObj>(t, std::move(slots))));
  }
  return Value::object(setOf(k.interp(), tupleComparison(k, t), tuples));
}

std::vector<Row> rowsOf(const Value& rel) {
  auto s = rel.as<SetObj>();
  if (!s) throw Error("not a relation");
  std::vector<Row> out;
  for (const auto& v : s->elems) {
    auto st = v.as<StructObj>();
    if (!st) throw Error("relation element is not a structure");
    Row r;
    for (std::size_t i = 0; i < st->slots.size(); ++i) r[st->type->fields()[i].name] = st->slots[i];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Row> bruteForceJoin(const std::vector<Row>& r, const std::vector<Row>& s) {
  std::vector<Row> out;
  for (const auto& a : r) {
    for (const auto& b : s) {
      bool match = true;
      for (const auto& [name, v] : a) {
        auto it = b.find(name);
        if (it != b.end() && !identical(v, it->second)) match = false;
      }
      if (!match) continue;
      Row joined = a;
      joined.insert(b.begin(), b.end());
      bool dup = std::any_of(out.begin(), out.end(), [&](const Row& x) {
        return std::equal(x.begin(), x.end(), joined.begin(), joined.end(),
                          [](const auto& p, const auto& q) { return p.first == q.first && identical(p.second, q.second); });
      });
      if (!dup) out.push_back(std::move(joined));
    }
  }
  return out;
}

bool sameRows(const std::vector<Row>& a, const std::vector<Row>& b) {
  auto key = [](const Row& r) {
    std::string s;
    for (const auto& [name, v] : r) s += name + "=" + showValue(v) + ";";
    return s;
  };
  std::vector<std::string> ka, kb;
  for (const auto& r : a) ka.push_back(key(r));
  for (const auto& r : b) kb.push_back(key(r));
  std::sort(ka.begin(), ka.end());
  std::sort(kb.begin(), kb.end());
  return ka == kb;
}

bool naturalJoinDemo(Kernel& k, std::ostream& out) {
  auto I = types::intT();
  auto S = types::stringT();
  TypePtr t1 = TypeRep::structure({{"a", I}, {"b", S}, {"c", types::realT()}});
  TypePtr t2 = TypeRep::structure({{"a", I}, {"b", S}, {"d", types::boolT()}});
  std::vector<Row> r{{{"a", Value::integer(1)}, {"b", Value::string("x")}, {"c", Value::real(1.0)}},
                     {{"a", Value::integer(2)}, {"b", Value::string("y")}, {"c", Value::real(2.0)}}};
  std::vector<Row> s{{{"a", Value::integer(1)}, {"b", Value::string("x")}, {"d", Value::boolean(true)}},
                     {{"a", Value::integer(2)}, {"b", Value::string("z")}, {"d", Value::boolean(false)}}};
  HyperSource src = joinSource(k, t1, t2);
  out << "generated join:\n" << hyperText(src) << "\n";
  Value join = evalHyper(k, src);
  Value result = k.interp().call(join, {relation(k, t1, r), relation(k, t2, s)});
  auto got = rowsOf(result);
  auto want = bruteForceJoin(r, s);
  out << "result: " << showValue(result) << "\n";
  bool typeOk = equalType(result.as<SetObj>()->elem, joinResultType(k.interp(), t1, t2));
  bool ok = typeOk && sameRows(got, want);
  out << (ok ? "PASS" : "FAIL") << " natural join matches nested-loop oracle (" << got.size() << " rows)\n";
  return ok;
}

}  // namespace hpk
