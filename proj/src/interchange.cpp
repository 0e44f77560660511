#include "hpk/interchange.hpp"

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hpk/builtins.hpp"
#include "hpk/error.hpp"
#include "hpk/parser.hpp"
#include "hpk/typecheck.hpp"

namespace hpk {

namespace {

const std::string kOpen = "\xE2\x9F\xA6";   // ⟦
const std::string kClose = "\xE2\x9F\xA7";  // ⟧
const std::string kMarker = "---bindings---";

std::string kindName(BindingKind k) {
  switch (k) {
    case BindingKind::Value: return "value";
    case BindingKind::EnvLocation: return "envLocation";
    case BindingKind::StructLocation: return "structLocation";
    case BindingKind::VectorLocation: return "vectorLocation";
    case BindingKind::FrameLocation: return "frameLocation";
    case BindingKind::Type: return "type";
  }
  return "?";
}

// Shortest path from the root environment to `target`, breadth first, so a
// link exported from one store names the same place in a reloaded one.
std::optional<std::string> rootPath(Store& store, const ObjRef& target) {
  std::deque<std::pair<ObjRef, std::string>> queue{{store.root(), ""}};
  std::set<const Object*> seen{store.root().get()};
  auto push = [&](const Value& v, std::string path) {
    if (!v.isObject() || !seen.insert(v.asObject().get()).second) return;
    queue.emplace_back(v.asObject(), std::move(path));
  };
  while (!queue.empty()) {
    auto [o, path] = std::move(queue.front());
    queue.pop_front();
    if (o == target) return path;
    if (auto e = std::dynamic_pointer_cast<EnvObj>(o)) {
      for (const auto& x : e->entries) push(x.value, path + "/" + x.name);
    } else if (auto s = std::dynamic_pointer_cast<StructObj>(o)) {
      const auto& fs = s->type->fields();
      for (std::size_t i = 0; i < fs.size() && i < s->slots.size(); ++i) push(s->slots[i], path + "." + fs[i].name);
    } else if (auto v = std::dynamic_pointer_cast<VectorObj>(o)) {
      for (std::size_t i = 0; i < v->cells.size(); ++i) {
        push(v->cells[i], path + "[" + std::to_string(v->lower + static_cast<std::int64_t>(i)) + "]");
      }
    } else if (auto var = std::dynamic_pointer_cast<VariantObj>(o)) {
      push(var->payload, path + "!" + var->branch);
    }
  }
  return std::nullopt;
}

std::string objectPath(Store& store, const ObjRef& o) {
  if (auto p = rootPath(store, o); p && !p->empty()) return *p;
  return "#" + std::to_string(store.idOf(o));
}

std::string objectPath(Store& store, const Value& v) {
  if (!v.isObject()) throw Error("link target has no path");
  return objectPath(store, v.asObject());
}

std::string literalText(const Value& v) {
  nlohmann::json j;
  if (v.isInt()) {
    j = v.asInt();
  } else if (v.isReal()) {
    j = v.asReal();
  } else if (v.isBool()) {
    j = v.asBool();
  } else if (v.isString()) {
    j = v.asString();
  } else if (v.isNull()) {
    j = nullptr;
  } else {
    throw Error("link target has no path");
  }
  return j.dump();
}

std::string pathOf(Store& store, const Binding& b, std::string& kind) {
  kind = kindName(b.kind);
  switch (b.kind) {
    case BindingKind::Value:
      if (!b.value.isObject()) {
        kind = "literal";
        return literalText(b.value);
      }
      if (auto bi = b.value.as<BuiltinObj>()) {
        kind = "builtin";
        return bi->def->name;
      }
      return objectPath(store, b.value);
    case BindingKind::EnvLocation:
      if (b.env == store.root()) return "/" + b.name;
      return objectPath(store, ObjRef(b.env)) + "/" + b.name;
    case BindingKind::StructLocation: return objectPath(store, b.value) + "." + b.name;
    case BindingKind::VectorLocation: return objectPath(store, b.value) + "[" + std::to_string(b.index) + "]";
    case BindingKind::FrameLocation:
      if (!b.frame) throw Error("unresolved frame link");
      return "#" + std::to_string(store.idOf(b.frame)) + "[" + std::to_string(b.slot) + "]";
    case BindingKind::Type: return "-";
  }
  return "-";
}

// Splits off one whitespace-delimited field; a leading '"' reads a JSON
// string token instead.
std::string field(std::string_view& line) {
  while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
  std::size_t end = 0;
  if (!line.empty() && line.front() == '"') {
    end = 1;
    while (end < line.size() && line[end] != '"') end += line[end] == '\\' ? 2 : 1;
    if (end >= line.size()) throw Error("unterminated string in bindings");
    ++end;
  } else {
    while (end < line.size() && line[end] != ' ') ++end;
  }
  std::string out(line.substr(0, end));
  line.remove_prefix(end);
  return out;
}

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

std::string lastStepLabel(const StorePath& p) {
  if (p.steps.empty()) return "value";
  const auto& s = p.steps.back();
  if (s.kind == PathStep::Kind::Index) return "[" + std::to_string(s.index) + "]";
  return s.name;
}

struct LinkLine {
  Binding binding;
  std::string label;
};

LinkLine resolveLine(Store& store, const std::string& k, const std::string& kind, const std::string& path,
                     const std::string& typeText) {
  TypePtr want = readType(store, typeText);
  auto fail = [&](const std::string& why) -> Error {
    return Error("link " + k + " at " + path + ": " + why);
  };
  LinkLine out;
  if (kind == "type") {
    out.binding = Binding::aType(want);
    out.label = writeType(want);
    return out;
  }
  if (kind == "builtin") {
    const auto* def = BuiltinRegistry::instance().find(path);
    if (!def || !def->object) throw fail("absent: " + path);
    if (!equalType(def->type, want)) throw fail("type mismatch: expected " + typeText);
    out.binding = Binding::ofValue(Value::object(def->object), want);
    out.label = path;
    return out;
  }
  if (kind == "literal") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(path);
    } catch (const std::exception&) {
      throw fail("bad literal");
    }
    Value v;
    if (j.is_number_integer()) {
      v = Value::integer(j.get<std::int64_t>());
    } else if (j.is_number()) {
      v = Value::real(j.get<double>());
    } else if (j.is_boolean()) {
      v = Value::boolean(j.get<bool>());
    } else if (j.is_string()) {
      v = Value::string(j.get<std::string>());
    } else if (j.is_null()) {
      v = Value::nil();
    } else {
      throw fail("bad literal");
    }
    if (!equalType(typeOfValue(v), want)) throw fail("type mismatch: expected " + typeText);
    out.binding = Binding::ofValue(v, want);
    out.label = showValue(v);
    return out;
  }
  StorePath p;
  try {
    p = parseStorePath(path);
  } catch (const Error& e) {
    throw fail(e.what());
  }
  try {
    if (kind == "frameLocation") {
      if (!p.base || p.steps.size() != 1 || p.steps[0].kind != PathStep::Kind::Index) throw Error("bad frame path");
      auto f = std::dynamic_pointer_cast<FrameObj>(store.find(p.base));
      if (!f) throw Error("absent: object #" + std::to_string(p.base));
      auto slot = p.steps[0].index;
      if (slot < 0 || static_cast<std::size_t>(slot) >= f->slots.size()) throw Error("index out of bounds: " + std::to_string(slot));
      out.binding = Binding::frameLocation(f, static_cast<int>(slot), want, true);
      out.label = "slot" + std::to_string(slot);
      return out;
    }
    Want w = kind == "value" ? Want::Value : Want::Location;
    if (kind != "value" && kind != "envLocation" && kind != "structLocation" && kind != "vectorLocation") {
      throw Error("unknown link kind " + kind);
    }
    out.binding = store.resolve(p, w);
    if (kindName(out.binding.kind) != kind) throw Error("path denotes a " + kindName(out.binding.kind));
  } catch (const Error& e) {
    throw fail(e.what());
  }
  if (!equalType(out.binding.type, want)) {
    throw fail("type mismatch: expected " + typeText + ", found " + writeType(out.binding.type));
  }
  if (kind == "value" && !out.binding.value.isObject()) {
    out.label = showValue(out.binding.value);
  } else {
    out.label = lastStepLabel(p);
  }
  return out;
}

}  // namespace

TypePtr readType(Store& store, std::string_view text) {
  TypeSyntaxPtr ts;
  try {
    ts = parseTypeText(utf8::decode(text));
  } catch (const SyntaxException& e) {
    throw Error("bad type text " + std::string(text) + ": " + e.err.message);
  }
  CheckOptions opts;
  opts.shared = &store.shared();
  std::string err;
  TypePtr t = resolveTypeSyntax(*ts, opts, err);
  if (!t) throw Error("bad type text " + std::string(text) + ": " + err);
  return t;
}

std::string exportHsrc(Store& store, const HyperSource& h) {
  if (!wellFormed(h)) throw Error("malformed hyper-source");
  std::string code;
  std::ostringstream lines;
  std::size_t pos = 0;
  int k = 0;
  for (const auto& s : h.bindings) {
    code += utf8::encode(h.code.substr(pos, static_cast<std::size_t>(s.region.start - 1) - pos));
    pos = static_cast<std::size_t>(s.region.finish);
    ++k;
    code += kOpen + std::to_string(k) + kClose;
    std::string kind;
    std::string path = pathOf(store, s.val, kind);
    lines << k << ' ' << kind << ' ' << path << ' ' << writeType(s.val.type) << '\n';
  }
  code += utf8::encode(h.code.substr(pos));
  return code + "\n" + kMarker + "\n" + lines.str();
}

HyperSource importHsrc(Store& store, std::string_view text) {
  std::string_view code = text;
  std::string_view rest;
  std::size_t at = std::string_view::npos;
  for (std::size_t from = 0;;) {
    std::size_t m = text.find(kMarker, from);
    if (m == std::string_view::npos) break;
    bool lineStart = m == 0 || text[m - 1] == '\n';
    std::size_t after = m + kMarker.size();
    bool lineEnd = after == text.size() || text[after] == '\n' || text[after] == '\r';
    if (lineStart && lineEnd) {
      at = m;
      break;
    }
    from = m + 1;
  }
  if (at != std::string_view::npos) {
    code = text.substr(0, at);
    if (!code.empty() && code.back() == '\n') code.remove_suffix(1);
    if (!code.empty() && code.back() == '\r') code.remove_suffix(1);
    rest = text.substr(std::min(text.size(), at + kMarker.size() + 1));
  }

  std::map<std::string, LinkLine> links;
  std::istringstream in{std::string(rest)};
  std::string raw;
  while (std::getline(in, raw)) {
    if (trim(raw).empty()) continue;
    std::string_view line = raw;
    std::string k = field(line);
    std::string kind = field(line);
    std::string path = field(line);
    std::string typeText = trim(line);
    if (k.empty() || kind.empty() || path.empty() || typeText.empty()) throw Error("bad binding line: " + raw);
    if (links.count(k)) throw Error("link " + k + " bound twice");
    links[k] = resolveLine(store, k, kind, path, typeText);
  }

  HyperSource out;
  std::size_t pos = 0;
  while (pos < code.size()) {
    std::size_t open = code.find(kOpen, pos);
    if (open == std::string_view::npos) {
      out = concatHyperSource(out, mkHyperSource(code.substr(pos)));
      break;
    }
    out = concatHyperSource(out, mkHyperSource(code.substr(pos, open - pos)));
    std::size_t close = code.find(kClose, open);
    if (close == std::string_view::npos) throw Error("unterminated link token");
    std::string k(code.substr(open + kOpen.size(), close - open - kOpen.size()));
    auto it = links.find(k);
    if (it == links.end()) throw Error("link " + k + " has no binding");
    out = concatHyperSource(out, linkTo(it->second.binding, it->second.label));
    pos = close + kClose.size();
  }
  return out;
}

}  // namespace hpk
