#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "hpk/browser.hpp"
#include "hpk/builtins.hpp"
#include "hpk/interchange.hpp"
#include "hpk/service.hpp"
#include "hpk/snapshot.hpp"
#include "support.hpp"

using namespace hpk;
using namespace hpk::test;
using nlohmann::json;

namespace {

std::vector<std::string> labels(const DisplayModel& m) {
  std::vector<std::string> out;
  for (const auto& e : m.entries) out.push_back(e.label);
  return out;
}

const char* kPerson = "type Person is structure( name : string ; age : int )\n";

// Programs whose values cover every display shape.
std::vector<std::string> corpus() {
  std::vector<std::string> out = {
      "7", "-3", "0", "2.5", "\"fish\"", "\"\"", "true", "false", "nil",
      "struct( a = 1 )", "struct( a = 1 ; b = \"x\" )", "struct( b = \"x\" ; a = 1 )", "struct( )",
      "struct( p = struct( q = 2 ) )", "struct( v = vector @1 of [ 1, 2 ] )",
      "vector @1 of [ 1, 2, 3 ]", "vector @1 of [ \"a\" ]", "vector 1 to 0 of 0", "vector @0 of [ true, false ]",
      "vector @1 of [ struct( a = 1 ), struct( a = 2 ) ]", "vector @1 of [ vector @1 of [ 1 ] ]",
      "proc( x : int -> int ) ; x + 1", "proc() ; writeString( \"hi\" )", "sin",
      "PS()", "environment()",
      "type Shape is variant( circle : real ; square : int )\nShape( circle : 1.0 )",
      "type Shape is variant( circle : real ; square : int )\nShape( square : 2 )",
      "any( 3 )", "getTypeRep( any( 3 ) )", "mkHyperSource( \"x\" )",
  };
  for (int i = 0; i < 10; ++i) out.push_back(std::string(kPerson) + "Person( \"p" + std::to_string(i) + "\", " + std::to_string(i) + " )");
  for (int i = 0; i < 9; ++i) {
    out.push_back("struct( n" + std::to_string(i) + " = " + std::to_string(i) + " ; s = \"" + std::string(i, 'z') + "\" )");
  }
  return out;
}

struct TempFile {
  explicit TempFile(const std::string& name)
      : path((std::filesystem::temp_directory_path() / ("hpk_wb_" + name)).string()) {
    std::filesystem::remove(path);
  }
  ~TempFile() { std::filesystem::remove(path); }
  std::string path;
};

void seedDemo(Kernel& k) {
  evalString(k, "let demo = environment()\nin demo let sharkName := \"jaws\"\nin PS() let demo = demo");
}

json post(Service& s, const std::string& path, const json& body, int expect = 200) {
  auto r = s.handle("POST", path, body.dump());
  EXPECT_EQ(r.status, expect) << r.body.dump();
  return r.body;
}

}  // namespace

TEST(Browser, StructureMenu) {
  Kernel k;
  Value p = evalString(k, std::string(kPerson) + "Person( \"ann\", 7 )");
  auto m = describeValue(k.store(), p);
  EXPECT_EQ(m.kind, DisplayModel::Kind::Menu);
  EXPECT_EQ(labels(m), (std::vector<std::string>{"name : string", "age : int"}));
  EXPECT_TRUE(m.entries[0].selectable);
}

TEST(Browser, VariantShowsOnlyThePresentBranch) {
  Kernel k;
  Value v = evalString(k, "type Shape is variant( circle : real ; square : int )\nShape( square : 2 )");
  auto m = describeValue(k.store(), v);
  ASSERT_EQ(m.entries.size(), 2u);
  int selectable = 0;
  for (const auto& e : m.entries) {
    if (e.selectable) {
      ++selectable;
      EXPECT_EQ(e.label, "square : int");
    }
  }
  EXPECT_EQ(selectable, 1);
}

TEST(Browser, ScalarsShowTheirText) {
  Kernel k;
  auto m = describeValue(k.store(), Value::integer(7));
  EXPECT_EQ(m.kind, DisplayModel::Kind::ScalarText);
  EXPECT_EQ(m.text, "7");
  EXPECT_EQ(describeValue(k.store(), Value::string("s")).kind, DisplayModel::Kind::ScalarText);
}

TEST(Browser, DisplayProceduresAreCachedByType) {
  Kernel k;
  Browser b(k);
  Value p = evalString(k, std::string(kPerson) + "Person( \"ann\", 7 )");
  auto before = k.compilations;
  b.reflectiveDisplay(p);
  EXPECT_EQ(k.compilations, before + 1);
  b.reflectiveDisplay(p);
  Value q = evalString(k, "struct( age = 3 ; name = \"bo\" )");
  before = k.compilations;
  auto m = b.reflectiveDisplay(q);
  EXPECT_EQ(k.compilations, before);
  EXPECT_EQ(labels(m), (std::vector<std::string>{"age : int", "name : string"}));
  EXPECT_EQ(k.store().displayCache().size(), 1u);

  b.reflectiveDisplay(Value::integer(4));
  b.reflectiveDisplay(evalString(k, "proc( x : int -> int ) ; x"));
  before = k.compilations;
  b.reflectiveDisplay(Value::integer(5));
  EXPECT_EQ(k.compilations, before);

  Value env = evalString(k, "PS()");
  before = k.compilations;
  b.reflectiveDisplay(env);
  b.reflectiveDisplay(env);
  EXPECT_EQ(k.compilations, before + 2);
  EXPECT_EQ(k.store().displayCache().size(), 1u);
}

TEST(Browser, TwentyLookupsOneCompilation) {
  Kernel k;
  Browser b(k);
  auto before = k.compilations;
  for (int i = 0; i < 20; ++i) b.reflectiveDisplay(evalString(k, "vector @1 of [ " + std::to_string(i) + " ]"));
  // The evaluations themselves compile; the display procedure only once.
  EXPECT_EQ(k.compilations, before + 20 + 1);
}

TEST(Browser, ReflectiveAgreesWithDirect) {
  Kernel k;
  Browser b(k);
  auto programs = corpus();
  ASSERT_GE(programs.size(), 50u);
  for (const auto& src : programs) {
    Value v = evalString(k, src);
    auto direct = describeValue(k.store(), v);
    auto reflective = b.reflectiveDisplay(v);
    EXPECT_TRUE(sameDisplay(direct, reflective)) << src << "\n"
                                                 << displayJson(direct).dump() << "\n"
                                                 << displayJson(reflective).dump();
  }
}

TEST(Browser, SelectableTargetsResolve) {
  Kernel k;
  for (const auto& src : corpus()) {
    Value v = evalString(k, src);
    k.store().retained()[v.isObject() ? k.store().idOf(v.asObject()) : 0] = v;
    auto m = describeValue(k.store(), v);
    for (const auto& e : m.entries) {
      if (!e.selectable || e.target.empty()) continue;
      EXPECT_NO_THROW(describePath(k.store(), e.target)) << src << " " << e.label << " " << e.target;
    }
  }
}

TEST(Service, EvalRequest) {
  Kernel k;
  auto ok = evalRequest(k, mkHyperSource("3 + 4"));
  EXPECT_EQ(ok.status, EvalResult::Status::Ok);
  EXPECT_EQ(ok.valueText, "7");
  EXPECT_EQ(ok.typeText, "int");
  EXPECT_EQ(ok.id, 0u);

  auto obj = evalRequest(k, mkHyperSource("struct( a = 1 )"));
  EXPECT_NE(obj.id, 0u);
  EXPECT_EQ(k.store().retained().count(obj.id), 1u);

  auto bad = evalRequest(k, mkHyperSource("3 +"));
  EXPECT_EQ(bad.status, EvalResult::Status::CompileError);
  EXPECT_EQ(bad.message.rfind("error at line 1", 0), 0u) << bad.message;

  auto fault = evalRequest(k, mkHyperSource("let z = 0\n1 / z"));
  EXPECT_EQ(fault.status, EvalResult::Status::RuntimeFault);
}

TEST(Service, Routes) {
  Kernel k;
  seedDemo(k);
  Service s(k);
  auto root = s.handle("GET", "/root", "");
  ASSERT_EQ(root.status, 200);
  EXPECT_EQ(root.body["kind"], "menu");

  auto r = post(s, "/eval", {{"text", std::string(kPerson) + "Person( \"ann\", 7 )"}});
  EXPECT_EQ(r["status"], "ok");
  auto id = r["id"].get<ObjectId>();
  auto obj = s.handle("GET", "/object/" + std::to_string(id), "");
  ASSERT_EQ(obj.status, 200);
  EXPECT_EQ(obj.body["entries"][0]["label"], "name : string");
  EXPECT_EQ(s.handle("GET", "/object/" + std::to_string(id) + "/type", "").body["type"],
            "structure( name : string ; age : int )");
  EXPECT_EQ(s.handle("GET", "/object/" + std::to_string(id) + "/reflective", "").body["entries"].size(), 2u);

  auto scalar = post(s, "/eval", {{"text", "1 + 1"}});
  EXPECT_TRUE(scalar["id"].is_null());
  EXPECT_EQ(scalar["value"], "2");
  EXPECT_EQ(post(s, "/eval", {{"text", "1 +"}})["status"], "compileError");

  auto f = post(s, "/eval", {{"text", "proc( x : int -> int ) ; x + 1"}});
  auto src = s.handle("GET", "/proc/" + f["id"].dump() + "/source", "");
  ASSERT_EQ(src.status, 200);
  EXPECT_EQ(src.body["text"], "proc( x : int -> int ) ; x + 1");

  EXPECT_EQ(s.handle("GET", "/object/99999", "").status, 404);
  EXPECT_EQ(s.handle("GET", "/nowhere", "").status, 404);
  EXPECT_EQ(s.handle("POST", "/eval", "{not json").status, 400);
  EXPECT_EQ(s.handle("POST", "/eval", "{}").status, 400);
}

TEST(Service, SharedTable) {
  Kernel k;
  seedDemo(k);
  Service s(k);
  auto added = post(s, "/shared-table", {{"name", "shark"}, {"path", "/demo/sharkName"}, {"location", true}});
  EXPECT_EQ(added["type"], "string");
  EXPECT_EQ(s.handle("GET", "/shared-table", "").body["entries"], json::array({"shark"}));
  EXPECT_EQ(post(s, "/eval", {{"text", "shark := \"bruce\""}})["status"], "ok");
  EXPECT_EQ(evalString(k, "use PS() with demo : env in use demo with sharkName : string in sharkName").asString(),
            "bruce");
  EXPECT_EQ(s.handle("DELETE", "/shared-table/shark", "").status, 200);
  EXPECT_EQ(post(s, "/eval", {{"text", "shark"}})["status"], "compileError");
  EXPECT_EQ(s.handle("POST", "/shared-table", json{{"name", "x"}, {"path", "/absent"}}.dump()).status, 400);
}

TEST(Service, ReleasedResultsAreCollected) {
  Kernel k;
  Service s(k);
  auto id = post(s, "/eval", {{"text", "struct( a = 12345 )"}})["id"].get<ObjectId>();
  std::string marker = "\"id\":" + std::to_string(id) + ",";
  EXPECT_NE(snapshotText(k.store()).find(marker), std::string::npos);
  EXPECT_EQ(s.handle("DELETE", "/result/" + std::to_string(id), "").status, 200);
  EXPECT_EQ(s.handle("DELETE", "/result/" + std::to_string(id), "").status, 404);
  EXPECT_EQ(snapshotText(k.store()).find(marker), std::string::npos);
}

TEST(Service, StabilizeAndLoad) {
  Kernel k;
  Service s(k);
  TempFile f("admin.hpk");
  evalString(k, "in PS() let n = 5");
  EXPECT_EQ(post(s, "/admin/stabilize", {{"path", f.path}})["stabilized"], f.path);
  evalString(k, "in PS() let n = 6");
  post(s, "/admin/load", {{"path", f.path}});
  EXPECT_EQ(root(k, "n").asInt(), 5);
  EXPECT_EQ(s.handle("POST", "/admin/load", json{{"path", f.path + ".missing"}}.dump()).status, 500);
}

TEST(Service, OverHttp) {
  Kernel k;
  Service s(k);
  int port = s.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread t([&] { s.run(); });
  httplib::Client c("127.0.0.1", port);
  auto r = c.Post("/eval", json{{"text", "3 + 4"}}.dump(), "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(json::parse(r->body)["value"], "7");
  auto root = c.Get("/root");
  ASSERT_TRUE(root);
  EXPECT_EQ(json::parse(root->body)["kind"], "menu");
  auto missing = c.Get("/object/424242");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  s.stop();
  t.join();
}

TEST(Hsrc, RoundTrip) {
  Kernel k;
  seedDemo(k);
  auto demo = root(k, "demo").as<EnvObj>();
  auto h = hyper({text("writeString( "), mkEnvLocLink(demo, "sharkName"), text(" ++ "),
                  mkLink(types::stringT(), Value::string("!")), text(" )\nlet t = "), mkTypeLink(types::intT()),
                  text("\n"), linkTo(Binding::ofValue(BuiltinRegistry::instance().value("sin"),
                                                      TypeRep::proc({types::realT()}, types::realT())),
                                     "sin"),
                  text("( 0.0 )")});
  std::string text1 = exportHsrc(k.store(), h);
  EXPECT_NE(text1.find("---bindings---"), std::string::npos);
  EXPECT_NE(text1.find("envLocation /demo/sharkName string"), std::string::npos) << text1;
  HyperSource back = importHsrc(k.store(), text1);
  EXPECT_EQ(hyperText(back), hyperText(h));
  ASSERT_EQ(back.bindings.size(), h.bindings.size());
  for (std::size_t i = 0; i < h.bindings.size(); ++i) {
    EXPECT_EQ(back.bindings[i].region, h.bindings[i].region);
    EXPECT_EQ(back.bindings[i].val.kind, h.bindings[i].val.kind);
  }
  EXPECT_EQ(exportHsrc(k.store(), back), text1);
}

TEST(Hsrc, DanglingPathIsNamed) {
  Kernel k;
  seedDemo(k);
  auto demo = root(k, "demo").as<EnvObj>();
  std::string text1 = exportHsrc(k.store(), hyper({mkEnvLocLink(demo, "sharkName"), text(" ++ \"\"")}));
  demo->drop("sharkName");
  try {
    importHsrc(k.store(), text1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/demo/sharkName"), std::string::npos) << e.what();
  }
  Service s(k);
  auto r = post(s, "/eval", {{"hsrc", text1}});
  EXPECT_EQ(r["status"], "importError");
}

TEST(Hsrc, WrongTypeIsRejected) {
  Kernel k;
  seedDemo(k);
  auto demo = root(k, "demo").as<EnvObj>();
  std::string text1 = exportHsrc(k.store(), mkEnvLocLink(demo, "sharkName"));
  auto pos = text1.rfind("string");
  text1.replace(pos, 6, "int");
  EXPECT_THROW(importHsrc(k.store(), text1), Error);
}

TEST(Cli, DanglingHsrcExitsNonZero) {
  Kernel k;
  seedDemo(k);
  auto demo = root(k, "demo").as<EnvObj>();
  TempFile src("dangling.hsrc"), store("empty.hpk");
  {
    std::ofstream out(src.path);
    out << exportHsrc(k.store(), hyper({text("writeString( "), mkEnvLocLink(demo, "sharkName"), text(" )")}));
  }
  std::string cmd = std::string(HPK_CLI) + " eval " + src.path + " --store " + store.path + " 2>&1";
  auto run = [&](std::string& out) {
    FILE* p = popen(cmd.c_str(), "r");
    char buf[512];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
    return pclose(p);
  };
  std::string out;
  EXPECT_NE(run(out), 0);
  EXPECT_NE(out.find("/demo/sharkName"), std::string::npos) << out;

  stabilize(k.store(), store.path);
  out.clear();
  EXPECT_EQ(run(out), 0);
  EXPECT_EQ(out, "jaws");
}

TEST(Hsrc, RootLinksUsePortablePaths) {
  Kernel k;
  evalString(k, "in PS() let n := 3\nin PS() let v = vector @1 of [ struct( a = 1 ) ]");
  auto h = hyper({mkEnvLocLink(k.store().root(), "n"), text(" + "), mkStructLocLink(evalString(k, "use PS() with v : *structure( a : int ) in v( 1 )"), "a")});
  std::string out = exportHsrc(k.store(), h);
  EXPECT_NE(out.find("envLocation /n int"), std::string::npos) << out;
  EXPECT_NE(out.find("structLocation /v[1].a int"), std::string::npos) << out;

  Kernel k2;
  k2.replaceStore(loadSnapshotText(snapshotText(k.store())));
  EXPECT_EQ(unboxed(evalHyper(k2, importHsrc(k2.store(), out))).asInt(), 4);
}
