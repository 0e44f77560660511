#include <gtest/gtest.h>

#include "hpk/builtins.hpp"
#include "hpk/snapshot.hpp"
#include "support.hpp"

using namespace hpk;
using namespace hpk::test;

namespace {

std::string errorText(const Value& v) {
  Value u = unboxed(v);
  return u.isString() ? u.asString() : "";
}

Value runThunk(Kernel& k, const Value& compiled) { return k.interp().call(unboxed(compiled), {}); }

TypePtr procT(std::vector<TypePtr> ps, TypePtr r) { return TypeRep::proc(std::move(ps), std::move(r)); }

const char* kShared =
    "let i := 0\n"
    "in PS() let inc := proc() ; i := i + 1\n"
    "in PS() let get := proc( → int ) ; i";

}  // namespace

TEST(Compiler, CompileStringTriple) {
  Kernel k;
  Value seven = compileString(k, "3 + 4");
  EXPECT_EQ(runThunk(k, seven).asInt(), 7);

  std::string err = errorText(compileString(k, "abc"));
  EXPECT_EQ(err.rfind("error at line 1", 0), 0u) << err;

  Value succ = compileString(k, "proc( i : int → int ) ; i + 1");
  auto box = succ.as<AnyObj>();
  ASSERT_TRUE(box);
  EXPECT_TRUE(equalType(box->type, procT({}, procT({types::intT()}, types::intT()))));
  Value f = runThunk(k, succ);
  EXPECT_EQ(k.interp().call(f, {Value::integer(3)}).asInt(), 4);
}

TEST(Compiler, ErrorLineNumbers) {
  Kernel k;
  EXPECT_EQ(errorText(compileString(k, "let a = 1\nlet b = a +\n")).rfind("error at line ", 0), 0u);
  EXPECT_EQ(errorText(compileString(k, "let a = 1\n\na + \"s\"")).rfind("error at line 3", 0), 0u);
  EXPECT_EQ(errorText(compileHyper(k, mkHyperSource(""))), "error at line 1: empty program");
}

TEST(Compiler, ExtraTableLocation) {
  Kernel k;
  auto env = std::make_shared<EnvObj>();
  env->bind("n", types::intT(), Value::integer(5), true);
  SymbolTable t;
  t.add("uniqueId0", Binding::envLocation(env, "n", types::intT(), true));
  StringReader r("uniqueId0 := uniqueId0 * 2\nuniqueId0");
  Value out = compileWithTables(k, r, {&t}, {});
  EXPECT_EQ(runThunk(k, out).asInt(), 10);
  EXPECT_EQ(env->find("n")->value.asInt(), 10);
}

TEST(Compiler, OptionsMustBeEmpty) {
  Kernel k;
  StringReader r("1");
  EXPECT_EQ(errorText(compileWithTables(k, r, {}, {"listing"})).rfind("error at line", 0), 0u);
}

TEST(Compiler, SharedTable) {
  Kernel k;
  Value twice = evalString(k, "proc( n : int -> int ) ; n * 2");
  sharedTableAdd(k, "myProc", Binding::ofValue(twice, procT({types::intT()}, types::intT())));
  sharedTableAdd(k, "limit", Binding::ofValue(Value::integer(9), types::intT()));
  EXPECT_EQ(evalString(k, "myProc( 21 )").asInt(), 42);
  EXPECT_EQ(sharedTableList(k), (std::vector<std::string>{"myProc", "limit"}));
  sharedTableRemove(k, "myProc");
  EXPECT_NE(errorText(compileString(k, "myProc( 21 )")).find("myProc"), std::string::npos);
  EXPECT_EQ(sharedTableList(k), (std::vector<std::string>{"limit"}));
}

TEST(Compiler, FailedCompileChangesNothing) {
  Kernel k;
  evalString(k, kShared);
  sharedTableAdd(k, "limit", Binding::ofValue(Value::integer(9), types::intT()));
  std::string before = snapshotText(k.store());
  compileString(k, "in PS() let zz = 1\nzz + \"q\"");
  compileString(k, "let = ");
  EXPECT_EQ(snapshotText(k.store()), before);
  EXPECT_EQ(sharedTableList(k).size(), 1u);
}

TEST(Compiler, HyperProgramReadsLiveLocation) {
  Kernel k;
  auto fishPics = std::make_shared<EnvObj>();
  auto dispT = procT({types::stringT()}, types::stringT());
  fishPics->bind("displayFish", dispT, evalString(k, "proc( p : string -> string ) ; \"small \" ++ p"), true);
  auto h = hyper({text("proc( -> string ) ; "), mkEnvLocLink(fishPics, "displayFish"), text("( "),
                  mkLink(types::stringT(), Value::string("nemo")), text(" )")});
  Value main = runThunk(k, compileHyper(k, h));
  EXPECT_EQ(k.interp().call(main, {}).asString(), "small nemo");
  fishPics->find("displayFish")->value = evalString(k, "proc( p : string -> string ) ; \"BIG \" ++ p");
  EXPECT_EQ(k.interp().call(main, {}).asString(), "BIG nemo");
}

TEST(Compiler, LinksToSinAndF) {
  Kernel k;
  auto realF = procT({types::realT()}, types::realT());
  Value f = evalString(k, "proc( x : real -> real ) ; x * 2.0");
  auto h = hyper({text("proc( x : real → real ) ; "), mkLink(realF, BuiltinRegistry::instance().value("sin")),
                  text("( x ) + "), mkLink(realF, f), text("( x )")});
  Value g = runThunk(k, compileHyper(k, h));
  EXPECT_DOUBLE_EQ(k.interp().call(g, {Value::real(0.5)}).asReal(), std::sin(0.5) + 1.0);
}

TEST(Compiler, CompileAndProcessCallsOnce) {
  Kernel k;
  Value n = evalString(k,
                       "let calls := 0\n"
                       "let seen := 0\n"
                       "compileAndProcess( mkHyperSource( \"3 + 4\" ), proc( a : any )\n"
                       "begin\n"
                       "  calls := calls + 1\n"
                       "  project a as t onto proc( -> int ) : seen := t() default : seen := -1\n"
                       "end )\n"
                       "calls * 100 + seen");
  EXPECT_EQ(n.asInt(), 107);
  Value msg = evalString(k,
                         "let got := \"\"\n"
                         "compileAndProcess( mkHyperSource( \"abc\" ), proc( a : any ) ;\n"
                         "  project a as s onto string : got := s default : got := \"?\" )\n"
                         "got");
  EXPECT_EQ(msg.asString().rfind("error at line 1", 0), 0u);
}

TEST(Capture, NestedProcedures) {
  Kernel k;
  auto z = mkLink(types::intT(), Value::integer(10));
  ASSERT_EQ(hyperText(z), "10");
  z = linkTo(z.bindings[0].val, "z");
  const std::string p2Text = "proc( → int )\n  begin\n    x + y + 2\n  end";
  auto h = hyper({text("let x = 1\nlet p1 = proc( -> proc( -> int ) )\nbegin\n  let y = x + "), z,
                  text("\n  let p2 = " + p2Text + "\n  p2\nend\np1")});
  Value p1 = evalHyper(k, h);

  HyperSource s1 = getProcSource(p1);
  std::string whole = hyperText(h);
  std::size_t at = whole.find("proc( -> proc");
  EXPECT_EQ(hyperText(s1), whole.substr(at, whole.rfind("end") + 3 - at));
  std::vector<std::string> labels;
  for (const auto& b : s1.bindings) labels.push_back(regionText(s1, b.region));
  EXPECT_EQ(labels, (std::vector<std::string>{"x", "z", "x"}));
  EXPECT_EQ(s1.bindings[0].val.kind, BindingKind::FrameLocation);
  EXPECT_EQ(s1.bindings[1].val.kind, BindingKind::Value);
  EXPECT_EQ(s1.bindings[1].val.value.asInt(), 10);
  EXPECT_EQ(s1.bindings[2].val.kind, BindingKind::FrameLocation);

  Value p2 = k.interp().call(p1, {});
  HyperSource s2 = getProcSource(p2);
  EXPECT_EQ(hyperText(s2), p2Text);
  ASSERT_EQ(s2.bindings.size(), 2u);
  EXPECT_EQ(regionText(s2, s2.bindings[0].region), "x");
  EXPECT_EQ(regionText(s2, s2.bindings[1].region), "y");
  for (const auto& b : s2.bindings) {
    EXPECT_EQ(b.val.kind, BindingKind::FrameLocation);
    EXPECT_TRUE(b.val.frame);
  }
  EXPECT_EQ(readBinding(s2.bindings[0].val).asInt(), 1);
  EXPECT_EQ(readBinding(s2.bindings[1].val).asInt(), 11);
  EXPECT_EQ(k.interp().call(p2, {}).asInt(), 14);
}

TEST(Capture, LiteralWithoutFreeIdentifiers) {
  Kernel k;
  Value f = evalString(k, "proc( a : int -> int ) ; a * a");
  EXPECT_TRUE(getProcSource(f).bindings.empty());
  auto h = hyper({text("proc( a : int -> int ) ; a + "), mkLink(types::intT(), Value::integer(3))});
  EXPECT_EQ(getProcSource(evalHyper(k, h)).bindings.size(), 1u);
  EXPECT_THROW(getProcSource(BuiltinRegistry::instance().value("sin")), Error);
}

// Recompiling a closure's source yields an equivalent closure, including
// its effect on shared locations.
TEST(Capture, SourceRecompilesToEquivalentClosure) {
  Kernel k;
  evalString(k, kShared);
  evalString(k, "let b := 5\nin PS() let addB := proc( n : int -> int ) ; n + b");
  Value inc = root(k, "inc");
  Value get = root(k, "get");
  Value addB = root(k, "addB");
  Value inc2 = evalHyper(k, getProcSource(inc));
  Value addB2 = evalHyper(k, getProcSource(addB));
  for (int n : {0, 1, -4, 100}) {
    EXPECT_EQ(k.interp().call(addB, {Value::integer(n)}).asInt(), k.interp().call(addB2, {Value::integer(n)}).asInt());
  }
  k.interp().call(inc, {});
  k.interp().call(inc2, {});
  EXPECT_EQ(k.interp().call(get, {}).asInt(), 2);
}

TEST(Capture, ExternalFramesFromTwoClosures) {
  Kernel k;
  evalString(k, "let a := 1\nin PS() let getA := proc( -> int ) ; a");
  evalString(k, "let b := 10\nin PS() let setB := proc( n : int ) ; b := n");
  Binding aLoc = getProcSource(root(k, "getA")).bindings[0].val;
  Binding bLoc = getProcSource(root(k, "setB")).bindings[0].val;
  auto h = hyper({text("proc( -> int ) begin "), linkTo(bLoc, "b"), text(" := "), linkTo(aLoc, "a"), text(" + "),
                  linkTo(bLoc, "b"), text(" ; "), linkTo(bLoc, "b"), text(" end")});
  Value both = evalHyper(k, h);
  EXPECT_EQ(k.interp().call(both, {}).asInt(), 11);
  k.interp().call(root(k, "setB"), {Value::integer(100)});
  EXPECT_EQ(k.interp().call(both, {}).asInt(), 101);
}

TEST(SharedLocation, ReplaceIncrement) {
  Kernel k;
  evalString(k, kShared);
  auto call = [&](const char* name) { return k.interp().call(root(k, name), {}); };
  call("inc");
  call("inc");
  EXPECT_EQ(call("get").asInt(), 2);

  HyperSource src = getProcSource(root(k, "inc"));
  EXPECT_EQ(hyperText(src), "proc() ; i := i + 1");
  Binding slotBefore = getProcSource(root(k, "get")).bindings[0].val;
  EXPECT_TRUE(sameBinding(src.bindings[0].val, slotBefore));

  // Copy, then change the increment to 2.
  HyperSource copy = src;
  auto one = static_cast<std::int64_t>(hyperText(copy).rfind('1')) + 1;
  HyperSource edited = substituteRegion(copy, {one, one}, mkHyperSource("2"));
  EXPECT_EQ(hyperText(edited), "proc() ; i := i + 2");
  Value newInc = evalHyper(k, edited);
  Value getBefore = root(k, "get");
  writeBinding(Binding::envLocation(k.store().root(), "inc", TypeRep::proc({}, nullptr), true), newInc);

  call("inc");
  EXPECT_EQ(call("get").asInt(), 4);
  EXPECT_TRUE(identical(root(k, "get"), getBefore));
  Binding slotAfter = getProcSource(root(k, "inc")).bindings[0].val;
  EXPECT_TRUE(sameBinding(slotAfter, slotBefore));
  EXPECT_EQ(slotAfter.frame, slotBefore.frame);
  EXPECT_EQ(slotAfter.slot, slotBefore.slot);
}
