#include "hpk/snapshot.hpp"

#include <bit>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hpk/builtins.hpp"
#include "hpk/error.hpp"
#include "hpk/utf8.hpp"

namespace hpk {

using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Writing.

class Writer {
 public:
  explicit Writer(Store& s) : store_(s) {}

  std::string run() {
    json roots;
    roots["root"] = value(Value::object(store_.root()));
    json shared = json::array();
    for (const auto& e : store_.shared().entries()) shared.push_back({e.name, binding(e.target)});
    roots["shared"] = shared;
    json display = json::array();
    for (const auto& d : store_.displayCache()) display.push_back({type(d.type), value(d.proc)});
    roots["display"] = display;
    json retained = json::array();
    for (const auto& [id, v] : store_.retained()) retained.push_back(value(v));
    roots["retained"] = retained;

    while (!pendingObjects_.empty() || !pendingCode_.empty()) {
      while (!pendingObjects_.empty()) {
        ObjRef o = pendingObjects_.front();
        pendingObjects_.pop_front();
        records_[o->id] = object(*o);
      }
      while (!pendingCode_.empty()) {
        NodePtr n = pendingCode_.front();
        pendingCode_.pop_front();
        json r;
        r["id"] = n->proc->codeId;
        r["k"] = "code";
        r["node"] = node(*n, true);
        records_[n->proc->codeId] = r;
      }
    }

    std::ostringstream out;
    json header{{"magic", kSnapshotMagic}, {"version", kSnapshotVersion}, {"nextId", store_.nextId()}};
    out << header.dump() << '\n';
    out << json{{"types", types_}}.dump() << '\n';
    out << json{{"roots", roots}}.dump() << '\n';
    for (const auto& [id, r] : records_) out << r.dump() << '\n';
    out << json{{"end", records_.size()}}.dump() << '\n';
    return out.str();
  }

 private:
  json type(const TypePtr& t) {
    if (!t) return nullptr;
    json e;
    e["c"] = static_cast<int>(t->ctor());
    if (!t->fields().empty()) {
      json fs = json::array();
      for (const auto& f : t->fields()) fs.push_back({f.name, type(f.type)});
      e["f"] = fs;
    }
    if (t->elem()) e["e"] = type(t->elem());
    if (t->result()) e["r"] = type(t->result());
    if (t->is(TypeCtor::Opaque)) e["n"] = t->opaqueName();
    std::string key = e.dump();
    auto it = typeIndex_.find(key);
    if (it != typeIndex_.end()) return it->second;
    int idx = static_cast<int>(types_.size());
    types_.push_back(e);
    typeIndex_[key] = idx;
    return idx;
  }

  json value(const Value& v) {
    if (v.isVoid()) return json::object();
    if (v.isNull()) return {{"nil", 1}};
    if (v.isInt()) return {{"i", v.asInt()}};
    if (v.isReal()) return {{"r", std::bit_cast<std::uint64_t>(v.asReal())}};
    if (v.isBool()) return {{"b", v.asBool()}};
    if (v.isString()) return {{"s", v.asString()}};
    if (v.isType()) return {{"t", type(v.asType())}};
    const ObjRef& o = v.asObject();
    if (o->kind() == ObjKind::Builtin) return {{"bi", static_cast<const BuiltinObj&>(*o).def->name}};
    return {{"o", ref(o)}};
  }

  ObjectId ref(const ObjRef& o) {
    if (!o) return 0;
    bool fresh = !seen_.count(o.get());
    ObjectId id = store_.idOf(o);
    if (fresh) {
      seen_.insert(o.get());
      pendingObjects_.push_back(o);
    }
    return id;
  }

  ObjectId code(const NodePtr& n) {
    bool fresh = !seenCode_.count(n.get());
    ObjectId id = store_.codeIdOf(n);
    if (fresh) {
      seenCode_.insert(n.get());
      pendingCode_.push_back(n);
    }
    return id;
  }

  json binding(const Binding& b) {
    json j;
    j["k"] = static_cast<int>(b.kind);
    j["t"] = type(b.type);
    if (!b.value.isVoid()) j["v"] = value(b.value);
    if (b.env) j["env"] = ref(b.env);
    if (!b.name.empty()) j["n"] = b.name;
    if (b.index) j["x"] = b.index;
    if (b.frame) j["fr"] = ref(b.frame);
    if (b.slot) j["sl"] = b.slot;
    if (b.hops) j["h"] = b.hops;
    if (b.envLoc) j["el"] = true;
    j["m"] = b.isMutable;
    return j;
  }

  json hyper(const HyperSource& h) {
    json bs = json::array();
    for (const auto& s : h.bindings) bs.push_back({s.region.start, s.region.finish, binding(s.val)});
    return {{"code", utf8::encode(h.code)}, {"links", bs}};
  }

  json genSource(const GeneratorSource& g) {
    json gs = json::array();
    for (const auto& s : g.generators) gs.push_back({s.region.start, s.region.finish, ref(s.gen)});
    return {{"code", hyper(g.code)}, {"gens", gs}};
  }

  json genResult(const GeneratorResult& r) {
    if (r.literal) return {{"literal", genSource(r.source)}};
    return {{"expr", value(r.expression)}};
  }

  json syntax(const TypeSyntaxPtr& ts) {
    if (!ts) return nullptr;
    json j;
    j["k"] = static_cast<int>(ts->kind);
    j["sp"] = {ts->span.start, ts->span.finish};
    j["b"] = static_cast<int>(ts->base);
    if (!ts->name.empty()) j["n"] = ts->name;
    if (!ts->fields.empty()) {
      json fs = json::array();
      for (const auto& [n, t] : ts->fields) fs.push_back({n, syntax(t)});
      j["f"] = fs;
    }
    if (!ts->params.empty()) {
      json ps = json::array();
      for (const auto& p : ts->params) ps.push_back(syntax(p));
      j["p"] = ps;
    }
    if (ts->elem) j["e"] = syntax(ts->elem);
    if (ts->result) j["r"] = syntax(ts->result);
    return j;
  }

  json node(const Node& n, bool isRoot) {
    json j;
    j["k"] = static_cast<int>(n.kind);
    j["sp"] = {n.span.start, n.span.finish};
    if (!n.text.empty()) j["t"] = n.text;
    if (n.ival) j["i"] = n.ival;
    if (n.rval != 0.0) j["r"] = std::bit_cast<std::uint64_t>(n.rval);
    if (n.flag) j["f"] = true;
    if (n.rec) j["rec"] = true;
    if (!n.kids.empty()) {
      json ks = json::array();
      for (const auto& k : n.kids) {
        if (!k) {
          ks.push_back(nullptr);
        } else if (k->kind == NodeKind::ProcLit && k->proc) {
          ks.push_back({{"ref", code(k)}});
        } else {
          ks.push_back(node(*k, false));
        }
      }
      j["kids"] = ks;
    }
    if (!n.names.empty()) j["names"] = n.names;
    if (!n.nameSpans.empty()) {
      json ss = json::array();
      for (const auto& s : n.nameSpans) ss.push_back({s.start, s.finish});
      j["nsp"] = ss;
    }
    if (!n.tsyn.empty()) {
      json ts = json::array();
      for (const auto& t : n.tsyn) ts.push_back(syntax(t));
      j["tsyn"] = ts;
    }
    if (n.type) j["ty"] = type(n.type);
    if (!n.types.empty()) {
      json ts = json::array();
      for (const auto& t : n.types) ts.push_back(type(t));
      j["tys"] = ts;
    }
    if (n.res.kind != Resolution::Kind::None) {
      json r;
      r["k"] = static_cast<int>(n.res.kind);
      if (n.res.hops) r["h"] = n.res.hops;
      if (n.res.slot) r["sl"] = n.res.slot;
      if (n.res.index) r["x"] = n.res.index;
      if (!n.res.name.empty()) r["n"] = n.res.name;
      if (n.res.kind == Resolution::Kind::Planted) r["p"] = binding(n.res.planted);
      if (n.res.builtin) r["bi"] = n.res.builtin->name;
      j["res"] = r;
    }
    if (n.slot >= 0) j["slot"] = n.slot;
    if (n.proc && isRoot) {
      const auto& p = *n.proc;
      json pj;
      pj["level"] = p.level;
      pj["size"] = p.frameSize;
      json fs = json::array();
      for (const auto& f : p.frees) fs.push_back({f.span.start, f.span.finish, binding(f.binding), f.planted});
      pj["frees"] = fs;
      if (p.source) pj["src"] = hyper(*p.source);
      if (p.sourceHasFrames) pj["hasFrames"] = true;
      j["proc"] = pj;
    }
    return j;
  }

  json object(const Object& o) {
    json j;
    j["id"] = o.id;
    switch (o.kind()) {
      case ObjKind::Structure: {
        const auto& s = static_cast<const StructObj&>(o);
        j["k"] = "struct";
        j["type"] = type(s.type);
        json slots = json::array();
        for (const auto& v : s.slots) slots.push_back(value(v));
        j["slots"] = slots;
        break;
      }
      case ObjKind::Variant: {
        const auto& v = static_cast<const VariantObj&>(o);
        j["k"] = "variant";
        j["type"] = type(v.type);
        j["branch"] = v.branch;
        j["payload"] = value(v.payload);
        break;
      }
      case ObjKind::Vector: {
        const auto& v = static_cast<const VectorObj&>(o);
        j["k"] = "vector";
        j["type"] = type(v.type);
        j["lower"] = v.lower;
        json cells = json::array();
        for (const auto& c : v.cells) cells.push_back(value(c));
        j["cells"] = cells;
        break;
      }
      case ObjKind::Frame: {
        const auto& f = static_cast<const FrameObj&>(o);
        j["k"] = "frame";
        json slots = json::array();
        for (const auto& v : f.slots) slots.push_back(value(v));
        j["slots"] = slots;
        j["parent"] = ref(f.parent);
        j["level"] = f.level;
        break;
      }
      case ObjKind::Env: {
        const auto& e = static_cast<const EnvObj&>(o);
        j["k"] = "env";
        json es = json::array();
        for (const auto& x : e.entries) es.push_back({x.name, type(x.type), value(x.value), x.mutable_});
        j["entries"] = es;
        break;
      }
      case ObjKind::Any: {
        const auto& a = static_cast<const AnyObj&>(o);
        j["k"] = "any";
        j["type"] = type(a.type);
        j["value"] = value(a.value);
        break;
      }
      case ObjKind::Closure: {
        const auto& c = static_cast<const ClosureObj&>(o);
        j["k"] = "closure";
        j["type"] = type(c.type);
        j["code"] = code(std::const_pointer_cast<Node>(c.code));
        j["frame"] = ref(c.frame);
        if (c.source) j["src"] = hyper(*c.source);
        break;
      }
      case ObjKind::Comparison: {
        const auto& c = static_cast<const ComparisonObj&>(o);
        j["k"] = "comparison";
        j["elem"] = type(c.elem);
        j["equal"] = value(c.equal);
        j["less"] = value(c.lessThan);
        break;
      }
      case ObjKind::Set: {
        const auto& s = static_cast<const SetObj&>(o);
        j["k"] = "set";
        j["elem"] = type(s.elem);
        j["cmp"] = ref(s.cmp);
        json es = json::array();
        for (const auto& e : s.elems) es.push_back(value(e));
        j["elems"] = es;
        break;
      }
      case ObjKind::HyperSource:
        j["k"] = "hyper";
        j["src"] = hyper(static_cast<const HyperSourceObj&>(o).src);
        break;
      case ObjKind::Generator: {
        const auto& g = static_cast<const GeneratorObj&>(o);
        j["k"] = "generator";
        j["prelude"] = value(g.prelude);
        j["result"] = genResult(g.result);
        break;
      }
      case ObjKind::GeneratorSource:
        j["k"] = "gensource";
        j["src"] = genSource(static_cast<const GenSourceObj&>(o).src);
        break;
      case ObjKind::GeneratorResult:
        j["k"] = "genresult";
        j["result"] = genResult(static_cast<const GenResultObj&>(o).result);
        break;
      case ObjKind::Builtin: throw StoreError("builtin stored as an object");
    }
    return j;
  }

  Store& store_;
  json types_ = json::array();
  std::map<std::string, int> typeIndex_;
  std::set<const Object*> seen_;
  std::set<const Node*> seenCode_;
  std::deque<ObjRef> pendingObjects_;
  std::deque<NodePtr> pendingCode_;
  std::map<ObjectId, json> records_;
};

// ---------------------------------------------------------------------------
// Reading.

struct Corrupt {};

void need(bool ok) {
  if (!ok) throw Corrupt{};
}

class Reader {
 public:
  std::unique_ptr<Store> run(const std::string& text) {
    std::vector<json> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      lines.push_back(json::parse(line));
    }
    need(lines.size() >= 4);
    const json& header = lines[0];
    need(header.is_object() && header.value("magic", "") == kSnapshotMagic);
    if (header.at("version").get<int>() != kSnapshotVersion) throw StoreError("unsupported snapshot version");
    const json& trailer = lines.back();
    need(trailer.contains("end") && trailer["end"].get<std::size_t>() == lines.size() - 4);

    for (const auto& t : lines[1].at("types")) types_.push_back(decodeType(t));

    store_ = std::make_unique<Store>();
    for (std::size_t i = 3; i + 1 < lines.size(); ++i) {
      const json& r = lines[i];
      ObjectId id = r.at("id").get<ObjectId>();
      need(id > 0 && !records_.count(id));
      records_[id] = &r;
      if (r.at("k") != "code") shells_[id] = shell(r);
    }
    for (auto& [id, o] : shells_) store_->adopt(o, id);
    for (auto& [id, o] : shells_) fill(*records_[id], *o);

    const json& roots = lines[2].at("roots");
    auto root = object(roots.at("root").at("o").get<ObjectId>());
    auto env = std::dynamic_pointer_cast<EnvObj>(root);
    need(env != nullptr);
    store_->setRoot(env);
    for (const auto& e : roots.at("shared")) {
      need(store_->shared().add(e.at(0).get<std::string>(), binding(e.at(1))));
    }
    for (const auto& d : roots.at("display")) store_->displayCache().push_back({type(d.at(0)), value(d.at(1))});
    for (const auto& r : roots.at("retained")) {
      Value v = value(r);
      need(v.isObject());
      store_->retained()[v.asObject()->id] = v;
    }
    store_->setNextId(std::max(store_->nextId(), header.at("nextId").get<ObjectId>()));
    return std::move(store_);
  }

 private:
  TypePtr decodeType(const json& e) {
    auto c = static_cast<TypeCtor>(e.at("c").get<int>());
    std::vector<NameAndType> fs;
    if (e.contains("f")) {
      for (const auto& f : e["f"]) fs.push_back({f.at(0).get<std::string>(), type(f.at(1))});
    }
    TypePtr elem = e.contains("e") ? type(e["e"]) : nullptr;
    TypePtr result = e.contains("r") ? type(e["r"]) : nullptr;
    switch (c) {
      case TypeCtor::Vector: need(elem != nullptr); return TypeRep::vector(elem);
      case TypeCtor::Set: return elem ? TypeRep::set(elem) : types::setT();
      case TypeCtor::Proc: {
        std::vector<TypePtr> ps;
        for (const auto& f : fs) ps.push_back(f.type);
        return TypeRep::proc(ps, result);
      }
      case TypeCtor::Structure: {
        auto t = TypeRep::structure(fs);
        need(t != nullptr);
        return t;
      }
      case TypeCtor::Variant: {
        auto t = TypeRep::variant(fs);
        need(t != nullptr);
        return t;
      }
      case TypeCtor::Opaque: {
        std::string name = e.at("n").get<std::string>();
        if (auto t = BuiltinRegistry::instance().findType(name)) return t;
        return TypeRep::opaque(name);
      }
      default: need(static_cast<int>(c) >= 0 && c <= TypeCtor::Void); return TypeRep::base(c);
    }
  }

  TypePtr type(const json& j) {
    if (j.is_null()) return nullptr;
    auto i = j.get<std::size_t>();
    need(i < types_.size());
    return types_[i];
  }

  ObjRef object(ObjectId id) {
    if (id == 0) return nullptr;
    auto it = shells_.find(id);
    need(it != shells_.end());
    return it->second;
  }

  template <class T>
  std::shared_ptr<T> objectAs(ObjectId id) {
    if (id == 0) return nullptr;
    auto o = std::dynamic_pointer_cast<T>(object(id));
    need(o != nullptr);
    return o;
  }

  Value value(const json& j) {
    need(j.is_object());
    if (j.empty()) return {};
    if (j.contains("nil")) return Value::nil();
    if (j.contains("i")) return Value::integer(j["i"].get<std::int64_t>());
    if (j.contains("r")) return Value::real(std::bit_cast<double>(j["r"].get<std::uint64_t>()));
    if (j.contains("b")) return Value::boolean(j["b"].get<bool>());
    if (j.contains("s")) return Value::string(j["s"].get<std::string>());
    if (j.contains("t")) return Value::type(type(j["t"]));
    if (j.contains("bi")) return BuiltinRegistry::instance().value(j["bi"].get<std::string>());
    return Value::object(object(j.at("o").get<ObjectId>()));
  }

  Binding binding(const json& j) {
    Binding b;
    b.kind = static_cast<BindingKind>(j.at("k").get<int>());
    need(b.kind >= BindingKind::Value && b.kind <= BindingKind::Type);
    b.type = type(j.at("t"));
    if (j.contains("v")) b.value = value(j["v"]);
    if (j.contains("env")) b.env = objectAs<EnvObj>(j["env"].get<ObjectId>());
    b.name = j.value("n", "");
    b.index = j.value("x", std::int64_t{0});
    if (j.contains("fr")) b.frame = objectAs<FrameObj>(j["fr"].get<ObjectId>());
    b.slot = j.value("sl", 0);
    b.hops = j.value("h", 0);
    b.envLoc = j.value("el", false);
    b.isMutable = j.at("m").get<bool>();
    return b;
  }

  HyperSource hyper(const json& j) {
    HyperSource h;
    h.code = utf8::decode(j.at("code").get<std::string>());
    for (const auto& s : j.at("links")) {
      h.bindings.push_back({binding(s.at(2)), {s.at(0).get<std::int64_t>(), s.at(1).get<std::int64_t>()}});
    }
    return h;
  }

  GeneratorSource genSource(const json& j) {
    GeneratorSource g;
    g.code = hyper(j.at("code"));
    for (const auto& s : j.at("gens")) {
      g.generators.push_back({objectAs<GeneratorObj>(s.at(2).get<ObjectId>()),
                              {s.at(0).get<std::int64_t>(), s.at(1).get<std::int64_t>()}});
    }
    return g;
  }

  GeneratorResult genResult(const json& j) {
    GeneratorResult r;
    if (j.contains("literal")) {
      r.literal = true;
      r.source = genSource(j["literal"]);
    } else {
      r.literal = false;
      r.expression = value(j.at("expr"));
    }
    return r;
  }

  TypeSyntaxPtr syntax(const json& j) {
    if (j.is_null()) return nullptr;
    auto ts = std::make_shared<TypeSyntax>();
    ts->kind = static_cast<TypeSyntax::Kind>(j.at("k").get<int>());
    ts->span = {j.at("sp").at(0).get<std::int64_t>(), j.at("sp").at(1).get<std::int64_t>()};
    ts->base = static_cast<TypeCtor>(j.at("b").get<int>());
    ts->name = j.value("n", "");
    if (j.contains("f")) {
      for (const auto& f : j["f"]) ts->fields.emplace_back(f.at(0).get<std::string>(), syntax(f.at(1)));
    }
    if (j.contains("p")) {
      for (const auto& p : j["p"]) ts->params.push_back(syntax(p));
    }
    if (j.contains("e")) ts->elem = syntax(j["e"]);
    if (j.contains("r")) ts->result = syntax(j["r"]);
    return ts;
  }

  NodePtr code(ObjectId id) {
    if (auto it = code_.find(id); it != code_.end()) return it->second;
    auto rec = records_.find(id);
    need(rec != records_.end() && rec->second->at("k") == "code");
    need(!decoding_.count(id));
    decoding_.insert(id);
    NodePtr n = node(rec->second->at("node"));
    decoding_.erase(id);
    need(n->kind == NodeKind::ProcLit && n->proc);
    store_->adoptCode(n, id);
    code_[id] = n;
    return n;
  }

  NodePtr node(const json& j) {
    auto kind = static_cast<NodeKind>(j.at("k").get<int>());
    need(kind >= NodeKind::IntLit && kind <= NodeKind::Assign);
    auto n = std::make_shared<Node>(kind, Span{j.at("sp").at(0).get<std::int64_t>(), j.at("sp").at(1).get<std::int64_t>()});
    n->text = j.value("t", "");
    n->ival = j.value("i", std::int64_t{0});
    if (j.contains("r")) n->rval = std::bit_cast<double>(j["r"].get<std::uint64_t>());
    n->flag = j.value("f", false);
    n->rec = j.value("rec", false);
    if (j.contains("kids")) {
      for (const auto& k : j["kids"]) {
        if (k.is_null()) {
          n->kids.push_back(nullptr);
        } else if (k.contains("ref")) {
          n->kids.push_back(code(k["ref"].get<ObjectId>()));
        } else {
          n->kids.push_back(node(k));
        }
      }
    }
    if (j.contains("names")) n->names = j["names"].get<std::vector<std::string>>();
    if (j.contains("nsp")) {
      for (const auto& s : j["nsp"]) n->nameSpans.push_back({s.at(0).get<std::int64_t>(), s.at(1).get<std::int64_t>()});
    }
    if (j.contains("tsyn")) {
      for (const auto& t : j["tsyn"]) n->tsyn.push_back(syntax(t));
    }
    if (j.contains("ty")) n->type = type(j["ty"]);
    if (j.contains("tys")) {
      for (const auto& t : j["tys"]) n->types.push_back(type(t));
    }
    if (j.contains("res")) {
      const json& r = j["res"];
      n->res.kind = static_cast<Resolution::Kind>(r.at("k").get<int>());
      n->res.hops = r.value("h", 0);
      n->res.slot = r.value("sl", 0);
      n->res.index = r.value("x", 0);
      n->res.name = r.value("n", "");
      if (r.contains("p")) n->res.planted = binding(r["p"]);
      if (r.contains("bi")) {
        n->res.builtin = BuiltinRegistry::instance().find(r["bi"].get<std::string>());
        need(n->res.builtin != nullptr);
      }
    }
    n->slot = j.value("slot", -1);
    if (j.contains("proc")) {
      const json& pj = j["proc"];
      auto p = std::make_shared<ProcInfo>();
      p->level = pj.at("level").get<int>();
      p->frameSize = pj.at("size").get<int>();
      need(p->frameSize >= 0);
      for (const auto& f : pj.at("frees")) {
        p->frees.push_back({{f.at(0).get<std::int64_t>(), f.at(1).get<std::int64_t>()}, binding(f.at(2)), f.at(3).get<bool>()});
      }
      if (pj.contains("src")) p->source = std::make_shared<HyperSource>(hyper(pj["src"]));
      p->sourceHasFrames = pj.value("hasFrames", false);
      n->proc = p;
    }
    return n;
  }

  ObjRef shell(const json& r) {
    const std::string k = r.at("k").get<std::string>();
    if (k == "struct") return std::make_shared<StructObj>(nullptr, std::vector<Value>{});
    if (k == "variant") return std::make_shared<VariantObj>(nullptr, "", Value());
    if (k == "vector") return std::make_shared<VectorObj>(nullptr, 0, std::vector<Value>{});
    if (k == "frame") return std::make_shared<FrameObj>(0, nullptr, 0);
    if (k == "env") return std::make_shared<EnvObj>();
    if (k == "any") return std::make_shared<AnyObj>(nullptr, Value());
    if (k == "closure") return std::make_shared<ClosureObj>();
    if (k == "comparison") return std::make_shared<ComparisonObj>();
    if (k == "set") return std::make_shared<SetObj>();
    if (k == "hyper") return std::make_shared<HyperSourceObj>(HyperSource{});
    if (k == "generator") return std::make_shared<GeneratorObj>();
    if (k == "gensource") return std::make_shared<GenSourceObj>(GeneratorSource{});
    if (k == "genresult") return std::make_shared<GenResultObj>(GeneratorResult{});
    throw Corrupt{};
  }

  void fill(const json& r, Object& o) {
    switch (o.kind()) {
      case ObjKind::Structure: {
        auto& s = static_cast<StructObj&>(o);
        s.type = type(r.at("type"));
        need(s.type && s.type->is(TypeCtor::Structure));
        for (const auto& v : r.at("slots")) s.slots.push_back(value(v));
        need(s.slots.size() == s.type->fields().size());
        break;
      }
      case ObjKind::Variant: {
        auto& v = static_cast<VariantObj&>(o);
        v.type = type(r.at("type"));
        need(v.type && v.type->is(TypeCtor::Variant));
        v.branch = r.at("branch").get<std::string>();
        v.payload = value(r.at("payload"));
        break;
      }
      case ObjKind::Vector: {
        auto& v = static_cast<VectorObj&>(o);
        v.type = type(r.at("type"));
        need(v.type && v.type->is(TypeCtor::Vector));
        v.lower = r.at("lower").get<std::int64_t>();
        for (const auto& c : r.at("cells")) v.cells.push_back(value(c));
        break;
      }
      case ObjKind::Frame: {
        auto& f = static_cast<FrameObj&>(o);
        for (const auto& v : r.at("slots")) f.slots.push_back(value(v));
        f.parent = objectAs<FrameObj>(r.at("parent").get<ObjectId>());
        f.level = r.at("level").get<int>();
        break;
      }
      case ObjKind::Env: {
        auto& e = static_cast<EnvObj&>(o);
        for (const auto& x : r.at("entries")) {
          e.entries.push_back({x.at(0).get<std::string>(), type(x.at(1)), value(x.at(2)), x.at(3).get<bool>()});
        }
        break;
      }
      case ObjKind::Any: {
        auto& a = static_cast<AnyObj&>(o);
        a.type = type(r.at("type"));
        a.value = value(r.at("value"));
        break;
      }
      case ObjKind::Closure: {
        auto& c = static_cast<ClosureObj&>(o);
        c.type = type(r.at("type"));
        c.code = code(r.at("code").get<ObjectId>());
        c.frame = objectAs<FrameObj>(r.at("frame").get<ObjectId>());
        if (r.contains("src")) c.source = std::make_shared<HyperSource>(hyper(r["src"]));
        break;
      }
      case ObjKind::Comparison: {
        auto& c = static_cast<ComparisonObj&>(o);
        c.elem = type(r.at("elem"));
        c.equal = value(r.at("equal"));
        c.lessThan = value(r.at("less"));
        break;
      }
      case ObjKind::Set: {
        auto& s = static_cast<SetObj&>(o);
        s.elem = type(r.at("elem"));
        s.cmp = objectAs<ComparisonObj>(r.at("cmp").get<ObjectId>());
        need(s.cmp != nullptr);
        for (const auto& e : r.at("elems")) s.elems.push_back(value(e));
        break;
      }
      case ObjKind::HyperSource: static_cast<HyperSourceObj&>(o).src = hyper(r.at("src")); break;
      case ObjKind::Generator: {
        auto& g = static_cast<GeneratorObj&>(o);
        g.prelude = value(r.at("prelude"));
        g.result = genResult(r.at("result"));
        break;
      }
      case ObjKind::GeneratorSource: static_cast<GenSourceObj&>(o).src = genSource(r.at("src")); break;
      case ObjKind::GeneratorResult: static_cast<GenResultObj&>(o).result = genResult(r.at("result")); break;
      case ObjKind::Builtin: throw Corrupt{};
    }
  }

  std::unique_ptr<Store> store_;
  std::vector<TypePtr> types_;
  std::map<ObjectId, const json*> records_;
  std::map<ObjectId, ObjRef> shells_;
  std::map<ObjectId, NodePtr> code_;
  std::set<ObjectId> decoding_;
};

}  // namespace

std::string snapshotText(Store& store) { return Writer(store).run(); }

void stabilize(Store& store, const std::string& path) {
  std::string text = snapshotText(store);
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw StoreError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw StoreError("cannot replace " + path);
  }
}

std::unique_ptr<Store> loadSnapshotText(const std::string& text) {
  try {
    return Reader().run(text);
  } catch (const StoreError&) {
    throw;
  } catch (...) {
    throw StoreError("corrupt snapshot");
  }
}

std::unique_ptr<Store> loadStore(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return loadSnapshotText(buf.str());
}

}  // namespace hpk
