#include "hpk/hyperprog.hpp"

#include <algorithm>
#include <set>

#include "hpk/error.hpp"

namespace hpk {

namespace {

std::int64_t len(const HyperSource& h) { return static_cast<std::int64_t>(h.code.size()); }

Substitution shifted(Substitution s, std::int64_t by) {
  s.region.start += by;
  s.region.finish += by;
  return s;
}

bool isIdentStart(char32_t c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool isIdentPart(char32_t c) { return isIdentStart(c) || (c >= '0' && c <= '9'); }

}  // namespace

HyperSource mkHyperSource(std::string_view utf8Text) { return HyperSource{utf8::decode(utf8Text), {}}; }

HyperSource concatHyperSource(const HyperSource& a, const HyperSource& b) {
  HyperSource out = a;
  out.code += b.code;
  for (const auto& s : b.bindings) out.bindings.push_back(shifted(s, len(a)));
  return out;
}

HyperSource extractHyperSource(const HyperSource& h, std::int64_t start, std::int64_t finish) {
  if (start < 1 || finish < start - 1 || finish > len(h)) {
    throw Error("bad region " + std::to_string(start) + ".." + std::to_string(finish));
  }
  HyperSource out;
  out.code = h.code.substr(static_cast<std::size_t>(start - 1), static_cast<std::size_t>(finish - start + 1));
  CodeRegion cut{start, finish};
  for (const auto& s : h.bindings) {
    bool inside = s.region.start >= start && s.region.finish <= finish;
    if (inside) {
      out.bindings.push_back(shifted(s, 1 - start));
    } else if (s.region.overlaps(cut)) {
      throw Error("cut through link");
    }
  }
  return out;
}

HyperSource substituteRegion(const HyperSource& h, CodeRegion r, const HyperSource& repl) {
  if (r.start < 1 || r.finish < r.start - 1 || r.finish > len(h)) {
    throw Error("bad region " + std::to_string(r.start) + ".." + std::to_string(r.finish));
  }
  HyperSource out;
  out.code = h.code.substr(0, static_cast<std::size_t>(r.start - 1));
  out.code += repl.code;
  out.code += h.code.substr(static_cast<std::size_t>(r.finish));
  std::int64_t delta = len(repl) - r.length();
  for (const auto& s : h.bindings) {
    if (s.region.finish < r.start) {
      out.bindings.push_back(s);
    } else if (s.region.start <= r.finish) {
      throw Error("substitution overlaps a link");
    }
  }
  for (const auto& s : repl.bindings) out.bindings.push_back(shifted(s, r.start - 1));
  for (const auto& s : h.bindings) {
    if (s.region.start > r.finish) out.bindings.push_back(shifted(s, delta));
  }
  std::stable_sort(out.bindings.begin(), out.bindings.end(),
                   [](const Substitution& a, const Substitution& b) { return a.region.start < b.region.start; });
  return out;
}

HyperSource linkTo(Binding b, std::string label) {
  if (label.empty()) label = "link";
  HyperSource out;
  out.code = utf8::decode(label);
  out.bindings.push_back({std::move(b), {1, static_cast<std::int64_t>(out.code.size())}});
  return out;
}

HyperSource mkLink(TypePtr type, Value v) {
  std::string label;
  if (v.isInt() || v.isReal() || v.isBool() || v.isString()) label = showValue(v);
  if (label.empty() || label.size() > 40) label = "value";
  return linkTo(Binding::ofValue(std::move(v), std::move(type)), label);
}

HyperSource mkEnvLocLink(const EnvPtr& env, const std::string& name) {
  const auto* e = env ? env->find(name) : nullptr;
  if (!e) throw Error("absent: " + name);
  return linkTo(Binding::envLocation(env, name, e->type, e->mutable_), name);
}

HyperSource mkStructLocLink(const Value& structure, const std::string& field) {
  auto s = structure.as<StructObj>();
  if (!s) throw Error("not a structure");
  int i = s->indexOf(field);
  if (i < 0) throw Error("absent: " + field);
  return linkTo(Binding::structLocation(structure, field, s->type->fields()[static_cast<std::size_t>(i)].type),
                field);
}

HyperSource mkVecLocLink(const Value& vector, std::int64_t index) {
  auto v = vector.as<VectorObj>();
  if (!v) throw Error("not a vector");
  if (!v->inBounds(index)) throw Error("index out of bounds: " + std::to_string(index));
  return linkTo(Binding::vectorLocation(vector, index, v->type->elem()), "[" + std::to_string(index) + "]");
}

HyperSource mkTypeLink(TypePtr t) {
  std::string label = writeType(t);
  return linkTo(Binding::aType(std::move(t)), label);
}

bool sameBinding(const Binding& a, const Binding& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case BindingKind::Value: return identical(a.value, b.value) && equalType(a.type, b.type);
    case BindingKind::Type: return equalType(a.type, b.type);
    case BindingKind::EnvLocation: return a.env == b.env && a.name == b.name;
    case BindingKind::StructLocation: return identical(a.value, b.value) && a.name == b.name;
    case BindingKind::VectorLocation: return identical(a.value, b.value) && a.index == b.index;
    case BindingKind::FrameLocation:
      if (!a.frame || !b.frame) return a.frame == b.frame && a.slot == b.slot && a.hops == b.hops;
      return a.frame == b.frame && a.slot == b.slot;
  }
  return false;
}

bool compareHyperSource(const HyperSource& a, const HyperSource& b) {
  if (a.code != b.code || a.bindings.size() != b.bindings.size()) return false;
  for (std::size_t i = 0; i < a.bindings.size(); ++i) {
    if (!(a.bindings[i].region == b.bindings[i].region)) return false;
    if (!sameBinding(a.bindings[i].val, b.bindings[i].val)) return false;
  }
  return true;
}

bool wellFormed(const HyperSource& h) {
  std::int64_t prev = 0;
  for (const auto& s : h.bindings) {
    if (s.region.start < 1 || s.region.finish < s.region.start || s.region.finish > len(h)) return false;
    if (s.region.start <= prev) return false;
    prev = s.region.finish;
  }
  return true;
}

CodeRegion CompilerForm::toOriginal(CodeRegion r) const {
  // Offset delta accumulates over pieces lying wholly before r.
  std::int64_t delta = 0;
  CodeRegion out{0, 0};
  bool startSet = false;
  for (const auto& p : pieces) {
    if (!startSet) {
      if (r.start < p.emitted.start) {
        out.start = r.start - delta;
        startSet = true;
      } else if (r.start <= p.emitted.finish) {
        out.start = p.original.start;
        startSet = true;
      }
    }
    if (r.finish < p.emitted.start) {
      out.finish = r.finish - delta;
      if (!startSet) out.start = r.start - delta;
      return out;
    }
    if (r.finish <= p.emitted.finish) {
      out.finish = p.original.finish;
      if (!startSet) out.start = p.original.start;
      return out;
    }
    delta += p.emitted.length() - p.original.length();
  }
  if (!startSet) out.start = r.start - delta;
  out.finish = r.finish - delta;
  return out;
}

int CompilerForm::pieceAt(CodeRegion r) const {
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (r.start >= pieces[i].emitted.start && r.finish <= pieces[i].emitted.finish) return static_cast<int>(i);
  }
  return -1;
}

CompilerForm toCompilerForm(const HyperSource& h) {
  if (!wellFormed(h)) throw Error("malformed hyper-source");
  // Identifiers already present outside link regions are unavailable.
  std::set<std::u32string> taken;
  {
    std::size_t next = 0;
    auto scan = [&](std::size_t from, std::size_t to) {
      std::size_t i = from;
      while (i < to) {
        if (isIdentStart(h.code[i]) && (i == from || !isIdentPart(h.code[i - 1]))) {
          std::size_t j = i;
          while (j < to && isIdentPart(h.code[j])) ++j;
          taken.insert(h.code.substr(i, j - i));
          i = j;
        } else {
          ++i;
        }
      }
    };
    for (const auto& s : h.bindings) {
      scan(next, static_cast<std::size_t>(s.region.start - 1));
      next = static_cast<std::size_t>(s.region.finish);
    }
    scan(next, h.code.size());
  }
  CompilerForm out;
  int n = 0;
  auto fresh = [&] {
    for (;;) {
      std::u32string id = U"uniqueId" + utf8::decode(std::to_string(n++));
      if (!taken.count(id)) return id;
    }
  };
  std::size_t pos = 0;
  for (const auto& s : h.bindings) {
    out.text += h.code.substr(pos, static_cast<std::size_t>(s.region.start - 1) - pos);
    pos = static_cast<std::size_t>(s.region.finish);
    std::u32string id = fresh();
    std::u32string emitted = id;
    const Binding& b = s.val;
    std::string name = utf8::encode(id);
    switch (b.kind) {
      case BindingKind::StructLocation:
        out.table.add(name, Binding::ofValue(b.value, typeOfValue(b.value)));
        emitted += U"( " + utf8::decode(b.name) + U" )";
        break;
      case BindingKind::VectorLocation:
        out.table.add(name, Binding::ofValue(b.value, typeOfValue(b.value)));
        emitted += U"( " + utf8::decode(std::to_string(b.index)) + U" )";
        break;
      case BindingKind::FrameLocation:
        if (!b.frame) throw Error("unresolved frame link");
        out.table.add(name, b);
        break;
      default: out.table.add(name, b); break;
    }
    auto at = static_cast<std::int64_t>(out.text.size()) + 1;
    out.text += emitted;
    out.pieces.push_back({s.region, {at, at + static_cast<std::int64_t>(emitted.size()) - 1}});
  }
  out.text += h.code.substr(pos);
  return out;
}

}  // namespace hpk
