#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "hpk/snapshot.hpp"
#include "support.hpp"

using namespace hpk;
using namespace hpk::test;

namespace {

std::string tempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("hpk_store_" + name + ".hpk")).string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

bool mentions(const std::string& snapshot, ObjectId id) {
  return snapshot.find("\"id\":" + std::to_string(id) + ",") != std::string::npos;
}

}  // namespace

TEST(Store, RootIsOneObject) {
  Kernel k;
  Value a = evalString(k, "PS()");
  evalString(k, "in PS() let k = 7");
  Value b = evalString(k, "PS()");
  EXPECT_TRUE(identical(a, b));
  EXPECT_EQ(root(k, "k").asInt(), 7);
  EXPECT_EQ(k.store().idOf(a.asObject()), k.store().idOf(b.asObject()));
}

TEST(Store, StabilizeIsDeterministic) {
  Kernel k;
  evalString(k, "in PS() let p = struct( a = 1 ; b = \"x\" )\nin PS() let f = proc( i : int -> int ) ; i + 1");
  auto p1 = tempPath("det1"), p2 = tempPath("det2");
  stabilize(k.store(), p1);
  stabilize(k.store(), p2);
  EXPECT_EQ(slurp(p1), slurp(p2));
  EXPECT_EQ(slurp(p1).rfind(kSnapshotMagic, 0), std::string::npos);
  EXPECT_NE(slurp(p1).find(kSnapshotMagic), std::string::npos);
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST(Store, UnreachableObjectsAreNotWritten) {
  Kernel k;
  evalString(k, "in PS() let gone = struct( a = 1 )\nin PS() let kept = struct( a = 2 )");
  ObjectId gone = k.store().idOf(root(k, "gone").asObject());
  ObjectId kept = k.store().idOf(root(k, "kept").asObject());
  EXPECT_TRUE(mentions(snapshotText(k.store()), gone));
  evalString(k, "drop gone from PS()");
  std::string after = snapshotText(k.store());
  EXPECT_FALSE(mentions(after, gone));
  EXPECT_TRUE(mentions(after, kept));
}

// A structure reachable only through a link in a closure's source survives.
TEST(Store, ObjectsReachedThroughProcSourceSurvive) {
  Kernel k;
  Value s = evalString(k, "struct( a = 41 )");
  ObjectId id = k.store().idOf(s.asObject());
  auto h = hyper({text("proc( -> int ) ; "), mkStructLocLink(s, "a"), text(" + 1")});
  Value f = unboxed(evalHyper(k, h));
  k.store().root()->bind("f", TypeRep::proc({}, types::intT()), f, false);
  s = Value();
  std::string text = snapshotText(k.store());
  EXPECT_TRUE(mentions(text, id));

  Kernel k2;
  k2.replaceStore(loadSnapshotText(text));
  EXPECT_EQ(k2.interp().call(root(k2, "f"), {}).asInt(), 42);
}

TEST(Store, RoundTripPreservesSharing) {
  Kernel k;
  evalString(k,
             "let shared = vector @1 of [ 1 ]\n"
             "in PS() let left = struct( s = shared )\n"
             "in PS() let right = struct( s = shared )\n"
             "in PS() let v = vector @1 of [ 1, 2, 3 ]");
  std::string text = snapshotText(k.store());
  Kernel k2;
  k2.replaceStore(loadSnapshotText(text));
  EXPECT_EQ(snapshotText(k2.store()), text);
  evalString(k2, "use PS() with left : structure( s : *int ) in left( s )( 1 ) := 5");
  EXPECT_EQ(evalString(k2, "use PS() with right : structure( s : *int ) in right( s )( 1 )").asInt(), 5);
  EXPECT_EQ(evalString(k2, "use PS() with v : *int in v( 3 )").asInt(), 3);
}

TEST(Store, ClosuresSurviveRoundTrip) {
  Kernel k;
  evalString(k, "let i := 0\nin PS() let inc = proc( -> int ) ; begin i := i + 1 ; i end");
  k.interp().call(root(k, "inc"), {});
  Kernel k2;
  k2.replaceStore(loadSnapshotText(snapshotText(k.store())));
  EXPECT_EQ(k2.interp().call(root(k2, "inc"), {}).asInt(), 2);
  EXPECT_EQ(hyperText(getProcSource(root(k2, "inc"))), hyperText(getProcSource(root(k, "inc"))));
}

TEST(Store, TruncatedSnapshotIsRejected) {
  Kernel k;
  evalString(k, "in PS() let p = struct( a = 1 )");
  std::string text = snapshotText(k.store());
  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, text.size() / 2, text.size() - 3}) {
    try {
      loadSnapshotText(text.substr(0, cut));
      FAIL() << cut;
    } catch (const StoreError& e) {
      EXPECT_STREQ(e.what(), "corrupt snapshot");
    }
  }
  EXPECT_THROW(loadStore(tempPath("missing-nowhere")), StoreError);
}

TEST(Store, VersionMismatchIsRejected) {
  Kernel k;
  std::string text = snapshotText(k.store());
  auto pos = text.find("\"version\":1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 11, "\"version\":9");
  try {
    loadSnapshotText(text);
    FAIL();
  } catch (const StoreError& e) {
    EXPECT_STREQ(e.what(), "unsupported snapshot version");
  }
}

TEST(Store, FailedStabilizeLeavesOldSnapshot) {
  Kernel k;
  auto p = tempPath("keep");
  stabilize(k.store(), p);
  std::string before = slurp(p);
  EXPECT_THROW(stabilize(k.store(), "/nonexistent-dir/x/y.hpk"), StoreError);
  EXPECT_EQ(slurp(p), before);
  std::filesystem::remove(p);
}

TEST(Store, ResolvePaths) {
  Kernel k;
  evalString(k, "let demo = environment()\nin demo let sharkName := \"jaws\"\nin PS() let demo = demo");
  auto path = parseStorePath("/demo/sharkName");
  EXPECT_EQ(formatStorePath(path), "/demo/sharkName");
  Binding v = k.store().resolve(path, Want::Value);
  EXPECT_EQ(v.kind, BindingKind::Value);
  EXPECT_EQ(v.value.asString(), "jaws");
  Binding loc = k.store().resolve(path, Want::Location);
  EXPECT_EQ(loc.kind, BindingKind::EnvLocation);
  try {
    k.store().resolve(parseStorePath("/sharkName"), Want::Value);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "absent: sharkName");
  }
  EXPECT_THROW(parseStorePath("demo"), Error);
}

TEST(Store, ResolveFieldsAndIndices) {
  Kernel k;
  evalString(k, "in PS() let p = struct( a = vector @1 of [ 10, 20 ] )");
  EXPECT_EQ(k.store().resolve(parseStorePath("/p.a[2]"), Want::Value).value.asInt(), 20);
  EXPECT_EQ(k.store().resolve(parseStorePath("/p.a[2]"), Want::Location).kind, BindingKind::VectorLocation);
  EXPECT_THROW(k.store().resolve(parseStorePath("/p.a[3]"), Want::Value), Error);
  ObjectId id = k.store().idOf(root(k, "p").asObject());
  auto byId = parseStorePath("#" + std::to_string(id) + ".a[1]");
  EXPECT_EQ(k.store().resolve(byId, Want::Value).value.asInt(), 10);
}
