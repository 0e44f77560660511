#include "hpk/service.hpp"

#include <charconv>

#include <httplib.h>

#include "hpk/compiler.hpp"
#include "hpk/error.hpp"
#include "hpk/interchange.hpp"
#include "hpk/snapshot.hpp"

namespace hpk {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& path) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < path.size()) {
    if (path[pos] == '/') {
      ++pos;
      continue;
    }
    std::size_t end = path.find('/', pos);
    if (end == std::string::npos) end = path.size();
    out.push_back(path.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

bool parseId(const std::string& s, ObjectId& id) {
  auto r = std::from_chars(s.data(), s.data() + s.size(), id);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

Service::Response reply(int status, json body) { return {status, std::move(body)}; }
Service::Response problem(int status, const std::string& msg) { return {status, json{{"error", msg}}}; }

std::string requireString(const json& body, const char* key) {
  if (!body.is_object() || !body.contains(key) || !body[key].is_string()) {
    throw Error(std::string("missing field ") + key);
  }
  return body[key].get<std::string>();
}

json resultJson(const EvalResult& r) {
  json j{{"status", statusName(r.status)}};
  if (r.status == EvalResult::Status::Ok) {
    j["id"] = r.id ? json(r.id) : json(nullptr);
    j["type"] = r.typeText;
    j["value"] = r.valueText;
  } else {
    j["message"] = r.message;
  }
  return j;
}

json targetOf(Store& store, const Binding& b) {
  switch (b.kind) {
    case BindingKind::Type: return json{{"typeText", writeType(b.type)}};
    case BindingKind::EnvLocation: return json{{"targetId", store.idOf(b.env)}, {"name", b.name}};
    case BindingKind::StructLocation:
      return json{{"targetId", store.idOf(b.value.asObject())}, {"name", b.name}};
    case BindingKind::VectorLocation:
      return json{{"targetId", store.idOf(b.value.asObject())}, {"index", b.index}};
    case BindingKind::FrameLocation:
      if (!b.frame) return json::object();
      return json{{"targetId", store.idOf(b.frame)}, {"slot", b.slot}};
    case BindingKind::Value:
      if (b.value.isObject()) return json{{"targetId", store.idOf(b.value.asObject())}};
      return json{{"value", showValue(b.value)}};
  }
  return json::object();
}

}  // namespace

const char* statusName(EvalResult::Status s) {
  switch (s) {
    case EvalResult::Status::Ok: return "ok";
    case EvalResult::Status::CompileError: return "compileError";
    case EvalResult::Status::RuntimeFault: return "runtimeFault";
    case EvalResult::Status::ImportError: return "importError";
  }
  return "?";
}

EvalResult evalRequest(Kernel& k, const HyperSource& h) {
  EvalResult r;
  CompileResult c = compileSource(k, h, {});
  if (!c.ok) {
    r.status = EvalResult::Status::CompileError;
    r.message = c.error;
    return r;
  }
  r.typeText = c.resultType ? writeType(c.resultType) : "void";
  Value v;
  try {
    v = k.interp().call(c.thunk, {});
  } catch (const RuntimeFault& e) {
    r.status = EvalResult::Status::RuntimeFault;
    r.message = e.what();
    return r;
  }
  if (v.isObject()) {
    r.id = k.store().idOf(v.asObject());
    k.store().retained()[r.id] = v;
  }
  r.valueText = r.typeText == "void" ? "" : showValue(v);
  return r;
}

json displayJson(const DisplayModel& m) {
  json entries = json::array();
  for (const auto& e : m.entries) {
    json x{{"label", e.label}, {"selectable", e.selectable}, {"target", e.target}};
    if (!e.detail.empty()) x["detail"] = e.detail;
    entries.push_back(std::move(x));
  }
  json j{{"kind", displayKindName(m.kind)}, {"title", m.title}, {"entries", std::move(entries)}};
  if (m.kind == DisplayModel::Kind::ScalarText) j["text"] = m.text;
  return j;
}

json sourceJson(Store& store, const HyperSource& h) {
  json tokens = json::array();
  for (const auto& s : h.bindings) {
    auto first = static_cast<std::size_t>(s.region.start - 1);
    auto len = static_cast<std::size_t>(s.region.length());
    json t{{"region", {s.region.start, s.region.finish}},
           {"kind", bindingKindName(s.val.kind)},
           {"label", utf8::encode(h.code.substr(first, len))},
           {"type", writeType(s.val.type)}};
    t.update(targetOf(store, s.val));
    tokens.push_back(std::move(t));
  }
  return json{{"text", hyperText(h)}, {"tokens", std::move(tokens)}};
}

Service::Service(Kernel& k) : kernel_(k), browser_(k) {}

Service::~Service() = default;

Service::Response Service::handle(const std::string& method, const std::string& path, const std::string& body) {
  std::lock_guard<std::mutex> lock(mutex_);
  json j;
  if (!body.empty()) {
    j = json::parse(body, nullptr, false);
    if (j.is_discarded()) return problem(400, "malformed JSON");
  }
  try {
    return route(method, path, j);
  } catch (const StoreError& e) {
    return problem(500, e.what());
  } catch (const Error& e) {
    return problem(400, e.what());
  }
}

Service::Response Service::route(const std::string& method, const std::string& path, const json& body) {
  Store& store = kernel_.store();
  auto parts = split(path);
  auto objectAt = [&](const std::string& text, ObjRef& out) {
    ObjectId id = 0;
    if (!parseId(text, id)) return false;
    out = store.find(id);
    return out != nullptr;
  };

  if (method == "GET" && parts.size() == 1 && parts[0] == "root") {
    json d = displayJson(describeValue(store, Value::object(store.root())));
    d["id"] = store.idOf(store.root());
    return reply(200, d);
  }
  if (parts.size() >= 2 && parts[0] == "object" && method == "GET") {
    ObjRef o;
    if (!objectAt(parts[1], o)) return problem(404, "no object " + parts[1]);
    Value v = Value::object(o);
    if (parts.size() == 2) {
      json d = displayJson(describeValue(store, v));
      d["id"] = store.idOf(o);
      return reply(200, d);
    }
    if (parts.size() == 3 && parts[2] == "type") return reply(200, json{{"type", writeType(typeOfValue(v))}});
    if (parts.size() == 3 && parts[2] == "reflective") return reply(200, displayJson(browser_.reflectiveDisplay(v)));
  }
  if (method == "GET" && parts.size() == 3 && parts[0] == "proc" && parts[2] == "source") {
    ObjRef o;
    if (!objectAt(parts[1], o)) return problem(404, "no object " + parts[1]);
    auto c = std::dynamic_pointer_cast<ClosureObj>(o);
    if (!c) return problem(400, "not a procedure");
    if (!c->source) return problem(404, "no source");
    return reply(200, sourceJson(store, *c->source));
  }
  if (method == "POST" && parts.size() == 1 && parts[0] == "eval") {
    HyperSource h;
    if (body.is_object() && body.contains("hsrc")) {
      try {
        h = importHsrc(store, requireString(body, "hsrc"));
      } catch (const Error& e) {
        EvalResult r;
        r.status = EvalResult::Status::ImportError;
        r.message = e.what();
        return reply(200, resultJson(r));
      }
    } else {
      h = mkHyperSource(requireString(body, "text"));
    }
    return reply(200, resultJson(evalRequest(kernel_, h)));
  }
  if (method == "DELETE" && parts.size() == 2 && parts[0] == "result") {
    ObjectId id = 0;
    if (!parseId(parts[1], id) || store.retained().erase(id) == 0) return problem(404, "no retained result " + parts[1]);
    return reply(200, json{{"released", id}});
  }
  if (parts.size() == 1 && parts[0] == "shared-table") {
    if (method == "GET") return reply(200, json{{"entries", sharedTableList(kernel_)}});
    if (method == "POST") {
      std::string name = requireString(body, "name");
      std::string where = requireString(body, "path");
      bool location = body.value("location", false);
      Binding b = store.resolve(parseStorePath(where), location ? Want::Location : Want::Value);
      sharedTableAdd(kernel_, name, b);
      return reply(200, json{{"added", name}, {"type", writeType(b.type)}});
    }
  }
  if (method == "DELETE" && parts.size() == 2 && parts[0] == "shared-table") {
    sharedTableRemove(kernel_, parts[1]);
    return reply(200, json{{"removed", parts[1]}});
  }
  if (method == "POST" && parts.size() == 2 && parts[0] == "admin") {
    std::string file = requireString(body, "path");
    if (parts[1] == "stabilize") {
      stabilize(store, file);
      return reply(200, json{{"stabilized", file}});
    }
    if (parts[1] == "load") {
      kernel_.replaceStore(loadStore(file));
      return reply(200, json{{"loaded", file}, {"root", kernel_.store().idOf(kernel_.store().root())}});
    }
  }
  return problem(404, "no route for " + method + " " + path);
}

int Service::bind(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    Response r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server_->Get(R"(/.*)", forward);
  server_->Post(R"(/.*)", forward);
  server_->Delete(R"(/.*)", forward);
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

void Service::run() {
  if (server_) server_->listen_after_bind();
}

void Service::stop() {
  if (server_) server_->stop();
}

}  // namespace hpk
