#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "hpk/browser.hpp"
#include "hpk/builtins.hpp"
#include "hpk/compiler.hpp"
#include "hpk/generator.hpp"
#include "hpk/genlib.hpp"
#include "hpk/natural_join.hpp"
#include "hpk/snapshot.hpp"

using namespace hpk;

namespace {

struct Failed {
  std::string why;
};

void require(bool ok, const std::string& why) {
  if (!ok) throw Failed{why};
}

template <class A, class B>
void requireEq(const A& got, const B& want, const std::string& what) {
  if (!(got == want)) {
    std::ostringstream s;
    s << what << ": got " << got << ", want " << want;
    throw Failed{s.str()};
  }
}

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

HyperSource hyper(std::initializer_list<HyperSource> parts) {
  HyperSource out;
  for (const auto& p : parts) out = concatHyperSource(out, p);
  return out;
}

HyperSource text(const std::string& s) { return mkHyperSource(s); }

std::string regionText(const HyperSource& h, const CodeRegion& r) {
  return utf8::encode(h.code.substr(static_cast<std::size_t>(r.start - 1), static_cast<std::size_t>(r.length())));
}

Value unboxed(const Value& v) {
  auto a = v.as<AnyObj>();
  return a ? a->value : v;
}

Value root(Kernel& k, const std::string& name) {
  auto* e = k.store().root()->find(name);
  if (!e) throw Failed{"absent: " + name};
  return e->value;
}

const char* kMkFun =
    "let prelude = proc( e : env → env )\n"
    "begin\n"
    "  writeString( \"enter real expression over x\" )\n"
    "  in e let expr = mkHyperSource( readString() )\n"
    "  e\n"
    "end\n"
    "let genDefn = proc( e : env → GeneratorSource ) ; use e with expr : HyperSource in mkGeneratorSource( expr )\n"
    "let bodyGen = mkGenerator( nullPrelude, exprResult( genDefn ) )\n"
    "let codeString = \"proc( x : real → real ) ; body\"\n"
    "let source = addSubGenerator( mkGeneratorSource( mkHyperSource( codeString ) ), 27, 30, bodyGen )\n"
    "mkGenerator( PRELUDE, literalResult( source ) )";

GeneratorPtr mkFun(Kernel& k, bool readsInput) {
  std::string src = kMkFun;
  src.replace(src.find("PRELUDE"), 7, readsInput ? "prelude" : "nullPrelude");
  return evalString(k, src).as<GeneratorObj>();
}

void compileTriple() {
  auto start = Clock::now();
  Kernel k;
  Value seven = unboxed(compileString(k, "3 + 4"));
  requireEq(k.interp().call(seven, {}).asInt(), 7, "3 + 4");
  Value err = unboxed(compileString(k, "abc"));
  require(err.isString() && err.asString().rfind("error at line 1", 0) == 0, "abc did not give a line 1 error");
  Value succ = compileString(k, "proc( i : int → int ) ; i + 1");
  auto box = succ.as<AnyObj>();
  require(box != nullptr, "proc program not boxed");
  auto want = TypeRep::proc({}, TypeRep::proc({types::intT()}, types::intT()));
  require(equalType(box->type, want), "boxed type is " + writeType(box->type));
  Value f = k.interp().call(box->value, {});
  requireEq(k.interp().call(f, {Value::integer(3)}).asInt(), 4, "succ( 3 )");
  require(secondsSince(start) < 1.0, "took over 1 s");
}

void executeLaw() {
  Kernel k;
  std::istringstream in("3\n");
  std::ostringstream out;
  k.setInput(in);
  k.setOutput(out);
  Value f = evalString(k, "proc( e : env -> GeneratorSource ) ; mkGeneratorSource( mkHyperSource( \"2+\" ++ readString() ) )");
  auto g = mkGenerator(nullPrelude(), exprResult(f));
  HyperSource h = expandGenerator(k, g, std::make_shared<EnvObj>());
  requireEq(hyperText(h), std::string("2+3"), "intermediate text");
  Value thunk = unboxed(compileHyper(k, h));
  requireEq(k.interp().call(thunk, {}).asInt(), 5, "result");
}

void substitution() {
  auto h = mkHyperSource("proc( x : real → real ) ; body");
  requireEq(hyperText(substituteRegion(h, {27, 30}, mkHyperSource("x + 1"))),
            std::string("proc( x : real → real ) ; x + 1"), "substituteRegion");

  Kernel k;
  std::istringstream in("x + 1\n");
  std::ostringstream out;
  k.setInput(in);
  k.setOutput(out);
  HyperSource full = expandGenerator(k, mkFun(k, true), std::make_shared<EnvObj>());
  requireEq(hyperText(full), std::string("proc( x : real → real ) ; x + 1"), "mkFun expansion");

  auto realF = TypeRep::proc({types::realT()}, types::realT());
  Value f = evalString(k, "proc( x : real -> real ) ; x * 2.0");
  auto body = hyper({linkTo(Binding::ofValue(BuiltinRegistry::instance().value("sin"), realF), "sin"), text("( x ) + "),
                     linkTo(Binding::ofValue(f, realF), "f"), text("( x )")});
  auto env = std::make_shared<EnvObj>();
  env->bind("expr", types::hyperSourceT(), makeHyperSource(body), false);
  HyperSource linked = expandGenerator(k, mkFun(k, false), env);
  requireEq(hyperText(linked), std::string("proc( x : real → real ) ; sin( x ) + f( x )"), "linked expansion");
  requireEq(linked.bindings.size(), std::size_t{2}, "link count");
  require(linked.bindings[0].region == CodeRegion{27, 29} && regionText(linked, linked.bindings[0].region) == "sin",
          "sin link misplaced");
  require(linked.bindings[1].region == CodeRegion{38, 38} && regionText(linked, linked.bindings[1].region) == "f",
          "f link misplaced");
  Value g = unboxed(evalHyper(k, linked));
  require(std::abs(k.interp().call(g, {Value::real(1.0)}).asReal() - (std::sin(1.0) + 2.0)) < 1e-12,
          "linked procedure computes the wrong value");
}

// Nested-loop join over rows compared by their printed values.
std::vector<std::string> oracle(const std::vector<Row>& r, const std::vector<Row>& s) {
  std::vector<std::string> out;
  for (const auto& a : r) {
    for (const auto& b : s) {
      bool match = true;
      for (const auto& [n, v] : a) {
        auto it = b.find(n);
        if (it != b.end() && showValue(it->second) != showValue(v)) match = false;
      }
      if (!match) continue;
      Row j = a;
      for (const auto& [n, v] : b) j.emplace(n, v);
      std::string line;
      for (const auto& [n, v] : j) line += n + "=" + showValue(v) + ";";
      out.push_back(line);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> flatten(const std::vector<Row>& rows) {
  std::vector<std::string> out;
  for (const auto& r : rows) {
    std::string line;
    for (const auto& [n, v] : r) line += n + "=" + showValue(v) + ";";
    out.push_back(line);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void naturalJoin() {
  auto start = Clock::now();
  Kernel k;
  auto I = types::intT();
  auto S = types::stringT();
  auto t1 = TypeRep::structure({{"a", I}, {"b", S}, {"c", types::realT()}});
  auto t2 = TypeRep::structure({{"a", I}, {"b", S}, {"d", types::boolT()}});
  requireEq(writeType(joinResultType(k.interp(), t1, t2)),
            std::string("structure( a : int ; b : string ; c : real ; d : bool )"), "result type");
  std::vector<Row> r = {{{"a", Value::integer(1)}, {"b", Value::string("x")}, {"c", Value::real(1.0)}},
                        {{"a", Value::integer(2)}, {"b", Value::string("y")}, {"c", Value::real(2.0)}}};
  std::vector<Row> s = {{{"a", Value::integer(1)}, {"b", Value::string("x")}, {"d", Value::boolean(true)}},
                        {{"a", Value::integer(2)}, {"b", Value::string("z")}, {"d", Value::boolean(false)}}};
  auto got = rowsOf(k.interp().call(joinProcedure(k, t1, t2), {relation(k, t1, r), relation(k, t2, s)}));
  require(flatten(got) == oracle(r, s), "seeded join differs from the oracle");
  requireEq(got.size(), std::size_t{1}, "seeded join size");

  auto d1 = TypeRep::structure({{"a", I}});
  auto d2 = TypeRep::structure({{"b", S}});
  std::vector<Row> dr = {{{"a", Value::integer(1)}}, {{"a", Value::integer(2)}}};
  std::vector<Row> ds = {{{"b", Value::string("p")}}, {{"b", Value::string("q")}}, {{"b", Value::string("r")}}};
  auto prod = rowsOf(k.interp().call(joinProcedure(k, d1, d2), {relation(k, d1, dr), relation(k, d2, ds)}));
  requireEq(prod.size(), std::size_t{6}, "cartesian product size");

  std::mt19937 rng(99);
  const std::vector<std::pair<std::string, TypePtr>> attrs = {{"a", I}, {"b", S}, {"c", I}, {"d", types::boolT()}};
  for (int i = 0; i < 100; ++i) {
    auto pick = [&] {
      std::vector<NameAndType> fs;
      for (const auto& [n, t] : attrs) {
        if (rng() % 2) fs.push_back({n, t});
      }
      if (fs.empty()) fs.push_back(NameAndType{attrs[0].first, attrs[0].second});
      return TypeRep::structure(fs);
    };
    auto rows = [&](const TypePtr& t) {
      std::vector<Row> out;
      for (int n = static_cast<int>(rng() % 6); n > 0; --n) {
        Row row;
        for (const auto& f : t->fields()) {
          if (f.type->is(TypeCtor::Int)) row[f.name] = Value::integer(static_cast<std::int64_t>(rng() % 3));
          else if (f.type->is(TypeCtor::Bool)) row[f.name] = Value::boolean(rng() % 2 == 0);
          else row[f.name] = Value::string(std::string(1, static_cast<char>('p' + rng() % 3)));
        }
        out.push_back(row);
      }
      return out;
    };
    auto a = pick(), b = pick();
    auto ra = rows(a), rb = rows(b);
    auto res = rowsOf(k.interp().call(joinProcedure(k, a, b), {relation(k, a, ra), relation(k, b, rb)}));
    require(flatten(res) == oracle(ra, rb), "random pair " + std::to_string(i) + " differs: " + writeType(a) + " x " +
                                                writeType(b));
  }
  require(secondsSince(start) < 10.0, "took over 10 s");
}

void sharedLocation() {
  Kernel k;
  evalString(k,
             "let i := 0\n"
             "in PS() let inc := proc() ; i := i + 1\n"
             "in PS() let get := proc( → int ) ; i");
  auto call = [&](const char* name) { return k.interp().call(root(k, name), {}); };
  call("inc");
  call("inc");
  requireEq(call("get").asInt(), 2, "get after two increments");
  HyperSource src = getProcSource(root(k, "inc"));
  Binding before = getProcSource(root(k, "get")).bindings.at(0).val;
  require(sameBinding(src.bindings.at(0).val, before), "inc and get do not share i");
  auto one = static_cast<std::int64_t>(hyperText(src).rfind('1')) + 1;
  HyperSource edited = substituteRegion(src, {one, one}, mkHyperSource("2"));
  requireEq(hyperText(edited), std::string("proc() ; i := i + 2"), "edited source");
  Value getBefore = root(k, "get");
  writeBinding(Binding::envLocation(k.store().root(), "inc", TypeRep::proc({}, nullptr), true),
               unboxed(evalHyper(k, edited)));
  call("inc");
  requireEq(call("get").asInt(), 4, "get after the edited increment");
  require(identical(root(k, "get"), getBefore), "get was replaced");
  Binding after = getProcSource(root(k, "inc")).bindings.at(0).val;
  require(sameBinding(after, before) && after.frame == before.frame && after.slot == before.slot,
          "shared slot identity changed");
}

void capture() {
  Kernel k;
  auto z = mkLink(types::intT(), Value::integer(10));
  z = linkTo(z.bindings[0].val, "z");
  const std::string p2Text = "proc( → int )\n  begin\n    x + y + 2\n  end";
  auto h = hyper({text("let x = 1\nlet p1 = proc( -> proc( -> int ) )\nbegin\n  let y = x + "), z,
                  text("\n  let p2 = " + p2Text + "\n  p2\nend\np1")});
  Value p1 = unboxed(evalHyper(k, h));
  HyperSource s1 = getProcSource(p1);
  std::vector<std::string> labels;
  for (const auto& b : s1.bindings) labels.push_back(regionText(s1, b.region));
  require(labels == std::vector<std::string>{"x", "z", "x"}, "p1 links are not x, z, x");
  require(s1.bindings[0].val.kind == BindingKind::FrameLocation && s1.bindings[2].val.kind == BindingKind::FrameLocation,
          "p1's x links are not frame locations");
  require(s1.bindings[1].val.kind == BindingKind::Value && s1.bindings[1].val.value.asInt() == 10,
          "p1 lost the original z link");
  Value p2 = k.interp().call(p1, {});
  HyperSource s2 = getProcSource(p2);
  requireEq(hyperText(s2), p2Text, "p2 text");
  requireEq(s2.bindings.size(), std::size_t{2}, "p2 link count");
  require(regionText(s2, s2.bindings[0].region) == "x" && regionText(s2, s2.bindings[1].region) == "y",
          "p2 links are not x, y");
  for (const auto& b : s2.bindings) require(b.val.kind == BindingKind::FrameLocation && b.val.frame, "p2 link unresolved");
  requireEq(readBinding(s2.bindings[0].val).asInt(), 1, "x");
  requireEq(readBinding(s2.bindings[1].val).asInt(), 11, "y");
}

void storeRoundTrip() {
  Kernel k;
  evalString(k,
             "let s = struct( a = 1 )\n"
             "in PS() let x = s\n"
             "in PS() let y = s\n"
             "in PS() let gone = struct( a = 2 )");
  ObjectId gone = k.store().idOf(root(k, "gone").asObject());
  std::string marker = "\"id\":" + std::to_string(gone) + ",";
  require(snapshotText(k.store()).find(marker) != std::string::npos, "reachable object missing");
  evalString(k, "drop gone from PS()");
  std::string first = snapshotText(k.store());
  require(first.find(marker) == std::string::npos, "unreachable object written");
  requireEq(snapshotText(k.store()), first, "second snapshot");

  Kernel k2;
  k2.replaceStore(loadSnapshotText(first));
  require(identical(root(k2, "x"), root(k2, "y")), "aliasing lost");
  requireEq(snapshotText(k2.store()), first, "reloaded snapshot");
}

void browserCache() {
  Kernel k;
  Browser b(k);
  std::vector<Value> values;
  const char* programs[] = {
      "struct( a = 1 ; b = \"x\" )", "struct( b = \"y\" ; a = 2 )", "struct( a = 3 ; b = \"z\" )",
      "vector @1 of [ 1 ]",         "vector @1 of [ 2, 3 ]",       "struct( c = true )",
      "struct( c = false )",        "7",                           "\"s\"",
      "proc( x : int -> int ) ; x", "struct( b = \"w\" ; a = 4 )", "vector @1 of [ \"s\" ]",
      "struct( p = struct( q = 1 ) )", "struct( p = struct( q = 2 ) )", "vector @1 of [ 4, 5, 6 ]",
      "struct( a = 5 ; b = \"v\" )", "true",                        "2.5",
      "vector @1 of [ \"t\" ]",     "struct( c = true )",
  };
  for (const char* p : programs) values.push_back(evalString(k, p));
  require(values.size() == 20, "lookup list");
  std::vector<TypePtr> classes;
  for (const auto& v : values) {
    TypePtr t = typeOfValue(v);
    bool preloaded = t->is(TypeCtor::Proc) || !v.isObject();
    if (preloaded) continue;
    bool seen = false;
    for (const auto& c : classes) seen = seen || equalType(c, t);
    if (!seen) classes.push_back(t);
  }
  auto before = k.compilations;
  for (const auto& v : values) b.displayProcFor(typeOfValue(v), v);
  requireEq(k.compilations - before, static_cast<std::uint64_t>(classes.size()), "display compilations");

  std::vector<std::string> corpus;
  for (const char* p : programs) corpus.push_back(p);
  for (int i = 0; corpus.size() < 50; ++i) {
    corpus.push_back("struct( n = " + std::to_string(i) + " ; s = \"" + std::string(static_cast<std::size_t>(i % 5), 'z') + "\" )");
    corpus.push_back("vector @1 of [ " + std::to_string(i) + ", " + std::to_string(i + 1) + " ]");
    corpus.push_back("type Shape is variant( circle : real ; square : int )\nShape( square : " + std::to_string(i) + " )");
  }
  for (const auto& p : corpus) {
    Value v = evalString(k, p);
    require(sameDisplay(describeValue(k.store(), v), b.reflectiveDisplay(v)), "displays disagree on " + p);
  }
}

// Everything the determinism check compares between two processes.
std::string determinismOutput() {
  std::ostringstream out;
  Kernel k;
  auto env = std::make_shared<EnvObj>();
  env->bind("n", types::intT(), Value::integer(3), true);
  Value show = evalString(k, "proc( s : string ) ; writeString( s )");
  auto loop = hyper({text("for i = 1 to "), mkEnvLocLink(env, "n"), text(" do\nbegin\n    "),
                     mkLink(TypeRep::proc({types::stringT()}, nullptr), show), text("( "),
                     mkLink(types::stringT(), Value::string("fish")), text(" )\nend")});
  auto form = toCompilerForm(loop);
  out << utf8::encode(form.text) << "\n";
  for (const auto& e : form.table.entries()) out << e.name << " " << writeType(e.target.type) << "\n";

  std::istringstream in("x * x + 1\n");
  std::ostringstream sink;
  k.setInput(in);
  k.setOutput(sink);
  out << hyperText(expandGenerator(k, mkFun(k, true), std::make_shared<EnvObj>())) << "\n";

  auto t1 = TypeRep::structure({{"a", types::intT()}, {"b", types::stringT()}, {"c", types::realT()}});
  auto t2 = TypeRep::structure({{"a", types::intT()}, {"b", types::stringT()}, {"d", types::boolT()}});
  HyperSource join = joinSource(k, t1, t2);
  out << hyperText(join) << "\n";
  auto joinForm = toCompilerForm(join);
  out << utf8::encode(joinForm.text) << "\n";
  return out.str();
}

std::string runSelf(const std::string& self) {
  std::string cmd = "'" + self + "' --emit-determinism";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) throw Failed{"cannot run " + self};
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  if (pclose(p) != 0) throw Failed{"child run failed"};
  return out;
}

void determinism(const std::string& self) {
  std::string a = runSelf(self);
  std::string b = runSelf(self);
  require(!a.empty(), "no output");
  require(a == b, "outputs differ between runs");
  require(a == determinismOutput(), "in-process output differs");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::string(argv[1]) == "--emit-determinism") {
    std::cout << determinismOutput();
    return 0;
  }
  std::string self = argv[0];
  const std::vector<std::pair<std::string, std::function<void()>>> checks = {
      {"compileString triple", compileTriple},
      {"execute law", executeLaw},
      {"substitution, mkFun expansion and carried links", substitution},
      {"natural join against the nested-loop oracle", naturalJoin},
      {"shared location replacement", sharedLocation},
      {"source capture in nested procedures", capture},
      {"store round trip", storeRoundTrip},
      {"browser display cache and reflective agreement", browserCache},
      {"determinism across processes", [&] { determinism(self); }},
  };
  int failures = 0;
  for (const auto& [name, run] : checks) {
    std::string why;
    try {
      run();
    } catch (const Failed& f) {
      why = f.why;
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    if (why.empty()) {
      std::cout << "PASS " << name << "\n";
    } else {
      std::cout << "FAIL " << name << ": " << why << "\n";
      ++failures;
    }
  }
  std::cout << "SKIP code-proportion measurements: not reproducible here, covered by the property suites\n";
  return failures == 0 ? 0 : 1;
}
