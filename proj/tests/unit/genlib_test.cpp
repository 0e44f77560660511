#include <gtest/gtest.h>

#include <algorithm>

#include "hpk/genlib.hpp"
#include "hpk/snapshot.hpp"
#include "support.hpp"

using namespace hpk;
using namespace hpk::test;

namespace {

ComparisonPtr ints(Kernel& k) { return mkComparison(types::intT(), evalString(k, "proc( a, b : int -> bool ) ; a = b")); }

ComparisonPtr strings(Kernel& k) {
  return mkComparison(types::stringT(), evalString(k, "proc( a, b : string -> bool ) ; a = b"));
}

std::vector<std::int64_t> contents(const SetObj& s) {
  std::vector<std::int64_t> out;
  for (const auto& v : s.elems) out.push_back(v.asInt());
  return out;
}

std::vector<std::string> words(const SetObj& s) {
  std::vector<std::string> out;
  for (const auto& v : s.elems) out.push_back(v.asString());
  std::sort(out.begin(), out.end());
  return out;
}

SetPtr intSet(Kernel& k, const ComparisonPtr& c, const std::vector<std::int64_t>& xs) {
  std::vector<Value> vs;
  for (auto x : xs) vs.push_back(Value::integer(x));
  return setOf(k.interp(), c, vs);
}

// Model: a deduplicated vector in insertion order.
std::vector<std::int64_t> model(const std::vector<std::int64_t>& xs) {
  std::vector<std::int64_t> out;
  for (auto x : xs) {
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  }
  return out;
}

bool has(const std::vector<std::int64_t>& xs, std::int64_t x) { return std::find(xs.begin(), xs.end(), x) != xs.end(); }

SetPtr hyperSet(Kernel& k, const std::vector<std::string>& texts) {
  std::vector<Value> vs;
  for (const auto& t : texts) vs.push_back(makeHyperSource(mkHyperSource(t)));
  return setOf(k.interp(), hyperSourceComparison(), vs);
}

}  // namespace

TEST(Sets, AlgebraAgreesWithModel) {
  Kernel k;
  auto c = ints(k);
  std::mt19937 rng(41);
  auto draw = [&] {
    std::vector<std::int64_t> xs;
    for (int i = static_cast<int>(rng() % 7); i > 0; --i) xs.push_back(static_cast<std::int64_t>(rng() % 6));
    return xs;
  };
  for (int i = 0; i < 200; ++i) {
    auto xa = draw(), xb = draw();
    auto a = intSet(k, c, xa), b = intSet(k, c, xb);
    auto ma = model(xa), mb = model(xb);
    EXPECT_EQ(contents(*a), ma);

    auto u = ma;
    for (auto x : mb) {
      if (!has(u, x)) u.push_back(x);
    }
    EXPECT_EQ(contents(*setUnion(k.interp(), *a, *b)), u);

    std::vector<std::int64_t> n, d;
    for (auto x : ma) (has(mb, x) ? n : d).push_back(x);
    EXPECT_EQ(contents(*intersection(k.interp(), *a, *b)), n);
    EXPECT_EQ(contents(*difference(k.interp(), *a, *b)), d);

    bool inc = std::all_of(mb.begin(), mb.end(), [&](auto x) { return has(ma, x); });
    EXPECT_EQ(includes(k.interp(), *a, *b), inc);
    for (std::int64_t x = 0; x < 6; ++x) EXPECT_EQ(memberOf(k.interp(), Value::integer(x), *a), has(ma, x));

    if (!ma.empty()) {
      auto x = ma[rng() % ma.size()];
      auto removed = contents(*remove(k.interp(), *a, Value::integer(x)));
      auto want = ma;
      want.erase(std::find(want.begin(), want.end(), x));
      EXPECT_EQ(removed, want);
      EXPECT_EQ(contents(*rest(*a)), std::vector<std::int64_t>(ma.begin() + 1, ma.end()));
    }
  }
}

TEST(Sets, InsertIsIdempotentAndKeepsOrder) {
  Kernel k;
  auto s = intSet(k, ints(k), {3, 1});
  auto once = insert(k.interp(), *s, Value::integer(2));
  auto twice = insert(k.interp(), *once, Value::integer(2));
  EXPECT_EQ(contents(*once), (std::vector<std::int64_t>{3, 1, 2}));
  EXPECT_EQ(contents(*twice), contents(*once));
  EXPECT_EQ(contents(*s), (std::vector<std::int64_t>{3, 1}));
}

TEST(Sets, ElementTypeMismatchFaults) {
  Kernel k;
  EXPECT_THROW(evalString(k, "insert( mkEmptySet( proc( a, b : int -> bool ) ; a = b ), \"x\" )"), RuntimeFault);
  EXPECT_EQ(evalString(k, "size( insert( mkEmptySet( proc( a, b : int -> bool ) ; a = b ), 4 ) )").asInt(), 1);
}

TEST(Sets, UnionAndIntersectionOfNames) {
  Kernel k;
  auto c = strings(k);
  auto r = setOf(k.interp(), c, {Value::string("a"), Value::string("b"), Value::string("c")});
  auto s = setOf(k.interp(), c, {Value::string("a"), Value::string("b"), Value::string("d")});
  EXPECT_EQ(words(*intersection(k.interp(), *r, *s)), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(words(*setUnion(k.interp(), *r, *s)), (std::vector<std::string>{"a", "b", "c", "d"}));
  auto empty = mkEmptySet(c);
  EXPECT_TRUE(intersection(k.interp(), *r, *empty)->elems.empty());
  EXPECT_EQ(words(*setUnion(k.interp(), *empty, *r)), words(*r));
}

TEST(Sets, IterateStopsWhenVisitorSaysSo) {
  Kernel k;
  Value n = evalString(k,
                       "let s = insert( insert( insert( mkEmptySet( proc( a, b : int -> bool ) ; a = b ), 1 ), 2 ), 3 )\n"
                       "let n := 0\n"
                       "iterate( s, proc( x : int -> bool ) ; begin n := n + 1 ; n < 2 end )\n"
                       "n");
  EXPECT_EQ(n.asInt(), 2);
  EXPECT_TRUE(evalString(k,
                         "let s = insert( insert( mkEmptySet( proc( a, b : int -> bool ) ; a = b ), 5 ), 8 )\n"
                         "scan( s, proc( x : int -> bool ) ; x > 6 )")
                  .asBool());
}

TEST(Sets, MapCanCollapse) {
  Kernel k;
  auto c = ints(k);
  auto s = intSet(k, c, {1, 2, 3});
  auto m = mapSet(k.interp(), *s, evalString(k, "proc( x : int -> int ) ; 0"), c);
  EXPECT_EQ(contents(*m), (std::vector<std::int64_t>{0}));
  auto twice = mapSet(k.interp(), *s, evalString(k, "proc( x : int -> int ) ; x * 2"), c);
  EXPECT_EQ(contents(*twice), (std::vector<std::int64_t>{2, 4, 6}));
}

TEST(Compose, AndOfNothingIsTrue) {
  Kernel k;
  EXPECT_EQ(hyperText(andCompose(*mkEmptySet(hyperSourceComparison()))), "true");
  EXPECT_EQ(hyperText(orCompose(*mkEmptySet(hyperSourceComparison()))), "false");
}

TEST(Compose, AndOfOne) {
  Kernel k;
  auto h = andCompose(*hyperSet(k, {"arg1( a ) = arg2( a )"}));
  EXPECT_EQ(hyperText(h), "(arg1( a ) = arg2( a )) and true");
  std::string prog = "let arg1 = struct( a = 1 )\nlet arg2 = struct( a = 1 )\n" + hyperText(h);
  Value v = evalString(k, prog);
  EXPECT_TRUE(v.asBool());
}

TEST(Compose, AndKeepsLinks) {
  Kernel k;
  auto linked = hyper({text("1 = "), mkLink(types::intT(), Value::integer(1))});
  auto s = setOf(k.interp(), hyperSourceComparison(), {makeHyperSource(linked), makeHyperSource(mkHyperSource("2 > 1"))});
  auto h = andCompose(*s);
  ASSERT_EQ(h.bindings.size(), 1u);
  EXPECT_EQ(h.bindings[0].region.start, 6);
  EXPECT_TRUE(unboxed(evalHyper(k, h)).asBool());
}

TEST(Compose, MkStruct) {
  Kernel k;
  auto empty = mkEmptySet(nameAndValueComparison());
  EXPECT_EQ(hyperText(mkStruct(*empty)), "struct( )");
  auto s = setOf(k.interp(), nameAndValueComparison(),
                 {nameAndValue("a", mkHyperSource("1")), nameAndValue("b", mkHyperSource("\"x\""))});
  auto h = mkStruct(*s);
  EXPECT_EQ(hyperText(h), "struct( a = 1 ; b = \"x\" )");
  EXPECT_EQ(evalString(k, "let v = " + hyperText(h) + "\nv( a )").asInt(), 1);
}

TEST(Compose, MkStructRejectsDuplicates) {
  Kernel k;
  auto s = std::make_shared<SetObj>();
  s->cmp = hyperSourceComparison();
  s->elem = types::nameAndValueT();
  s->elems = {nameAndValue("a", mkHyperSource("1")), nameAndValue("a", mkHyperSource("2"))};
  try {
    mkStruct(*s);
    FAIL();
  } catch (const RuntimeFault& e) {
    EXPECT_STREQ(e.what(), "duplicate field name a");
  }
}

// Operations leave their arguments and the store untouched.
TEST(Sets, OperationsArePure) {
  Kernel k;
  auto c = ints(k);
  auto a = intSet(k, c, {1, 2, 3});
  auto b = intSet(k, c, {2, 5});
  std::string before = snapshotText(k.store());
  setUnion(k.interp(), *a, *b);
  intersection(k.interp(), *a, *b);
  difference(k.interp(), *a, *b);
  insert(k.interp(), *a, Value::integer(9));
  remove(k.interp(), *a, Value::integer(1));
  andCompose(*hyperSet(k, {"x", "y"}));
  EXPECT_EQ(contents(*a), (std::vector<std::int64_t>{1, 2, 3}));
  EXPECT_EQ(contents(*b), (std::vector<std::int64_t>{2, 5}));
  EXPECT_EQ(snapshotText(k.store()), before);
}
