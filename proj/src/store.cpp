#include "hpk/store.hpp"

#include <cctype>
#include <charconv>

#include "hpk/error.hpp"

namespace hpk {

namespace {

bool isNameChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

StorePath parseStorePath(std::string_view text) {
  StorePath p;
  std::size_t i = 0;
  auto number = [&](std::int64_t& out) {
    std::size_t start = i;
    if (i < text.size() && text[i] == '-') ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    auto [ptr, ec] = std::from_chars(text.data() + start, text.data() + i, out);
    if (ec != std::errc() || ptr != text.data() + i) throw Error("bad number in path: " + std::string(text));
  };
  auto name = [&] {
    std::size_t start = i;
    while (i < text.size() && isNameChar(text[i])) ++i;
    if (start == i) throw Error("missing name in path: " + std::string(text));
    return std::string(text.substr(start, i - start));
  };
  if (i < text.size() && text[i] == '#') {
    ++i;
    std::int64_t id = 0;
    number(id);
    if (id <= 0) throw Error("bad object id in path: " + std::string(text));
    p.base = static_cast<ObjectId>(id);
  }
  while (i < text.size()) {
    PathStep s;
    char c = text[i++];
    switch (c) {
      case '/':
        s.kind = PathStep::Kind::Env;
        s.name = name();
        break;
      case '.':
        s.kind = PathStep::Kind::Field;
        s.name = name();
        break;
      case '!':
        s.kind = PathStep::Kind::Branch;
        s.name = name();
        break;
      case '[':
        s.kind = PathStep::Kind::Index;
        number(s.index);
        if (i >= text.size() || text[i] != ']') throw Error("missing ] in path: " + std::string(text));
        ++i;
        break;
      default: throw Error("bad path: " + std::string(text));
    }
    p.steps.push_back(std::move(s));
  }
  return p;
}

std::string formatStorePath(const StorePath& p) {
  std::string out;
  if (p.base) out += "#" + std::to_string(p.base);
  for (const auto& s : p.steps) {
    switch (s.kind) {
      case PathStep::Kind::Env: out += "/" + s.name; break;
      case PathStep::Kind::Field: out += "." + s.name; break;
      case PathStep::Kind::Branch: out += "!" + s.name; break;
      case PathStep::Kind::Index: out += "[" + std::to_string(s.index) + "]"; break;
    }
  }
  return out;
}

Store::Store() : root_(std::make_shared<EnvObj>()) {}

ObjectId Store::idOf(const ObjRef& o) {
  if (o->id != 0) {
    auto it = objects_.find(o->id);
    if (it != objects_.end() && it->second.lock() == o) return o->id;
  }
  o->id = nextId_++;
  objects_[o->id] = o;
  return o->id;
}

ObjRef Store::find(ObjectId id) const {
  auto it = objects_.find(id);
  return it == objects_.end() ? nullptr : it->second.lock();
}

void Store::adopt(const ObjRef& o, ObjectId id) {
  o->id = id;
  objects_[id] = o;
  if (id >= nextId_) nextId_ = id + 1;
}

ObjectId Store::codeIdOf(const NodePtr& procLit) {
  auto& info = *procLit->proc;
  if (info.codeId != 0) {
    auto it = code_.find(info.codeId);
    if (it != code_.end() && it->second.lock() == procLit) return info.codeId;
  }
  info.codeId = nextId_++;
  code_[info.codeId] = procLit;
  return info.codeId;
}

NodePtr Store::findCode(ObjectId id) const {
  auto it = code_.find(id);
  return it == code_.end() ? nullptr : it->second.lock();
}

void Store::adoptCode(const NodePtr& procLit, ObjectId id) {
  procLit->proc->codeId = id;
  code_[id] = procLit;
  if (id >= nextId_) nextId_ = id + 1;
}

Binding Store::resolve(const StorePath& path, Want want) {
  Value cur;
  TypePtr curType;
  if (path.base) {
    auto o = find(path.base);
    if (!o) throw Error("absent: object #" + std::to_string(path.base));
    cur = Value::object(o);
    curType = typeOfValue(cur);
  } else {
    cur = Value::object(root_);
    curType = types::envT();
  }
  for (std::size_t k = 0; k < path.steps.size(); ++k) {
    const auto& s = path.steps[k];
    bool last = k + 1 == path.steps.size();
    switch (s.kind) {
      case PathStep::Kind::Env: {
        auto env = cur.as<EnvObj>();
        if (!env) throw Error("not an environment before /" + s.name);
        auto* e = env->find(s.name);
        if (!e) throw Error("absent: " + s.name);
        if (last && want == Want::Location) return Binding::envLocation(env, s.name, e->type, e->mutable_);
        cur = e->value;
        curType = e->type;
        break;
      }
      case PathStep::Kind::Field: {
        auto st = cur.as<StructObj>();
        if (!st) throw Error("not a structure before ." + s.name);
        int i = st->indexOf(s.name);
        if (i < 0) throw Error("absent: " + s.name);
        TypePtr ft = st->type->fields()[static_cast<std::size_t>(i)].type;
        if (last && want == Want::Location) return Binding::structLocation(cur, s.name, ft);
        cur = st->slots[static_cast<std::size_t>(i)];
        curType = ft;
        break;
      }
      case PathStep::Kind::Index: {
        auto v = cur.as<VectorObj>();
        if (!v) throw Error("not a vector before [" + std::to_string(s.index) + "]");
        if (!v->inBounds(s.index)) throw Error("index out of bounds: " + std::to_string(s.index));
        TypePtr et = v->type->elem();
        if (last && want == Want::Location) return Binding::vectorLocation(cur, s.index, et);
        cur = v->cells[static_cast<std::size_t>(s.index - v->lower)];
        curType = et;
        break;
      }
      case PathStep::Kind::Branch: {
        auto v = cur.as<VariantObj>();
        if (!v) throw Error("not a variant before !" + s.name);
        if (v->branch != s.name) throw Error("absent: " + s.name);
        if (last && want == Want::Location) throw Error("variant payload is not a location");
        for (const auto& f : v->type->fields()) {
          if (f.name == s.name) curType = f.type;
        }
        cur = v->payload;
        break;
      }
    }
  }
  switch (want) {
    case Want::Value: return Binding::ofValue(cur, curType);
    case Want::Type: return Binding::aType(curType);
    case Want::Location: throw Error("path denotes no location");
  }
  return {};
}

}  // namespace hpk
