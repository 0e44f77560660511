#include "hpk/browser.hpp"

#include <algorithm>

#include "hpk/builtins.hpp"
#include "hpk/compiler.hpp"
#include "hpk/error.hpp"

namespace hpk {

namespace {

const char* kEntryType = "structure( label : string ; selectable : bool ; browse : proc( -> any ) )";

bool isScalarDisplay(const TypePtr& t) {
  switch (t->ctor()) {
    case TypeCtor::Structure:
    case TypeCtor::Variant:
    case TypeCtor::Vector:
    case TypeCtor::Env:
    case TypeCtor::Proc: return false;
    default: return true;
  }
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\'') out += '\'';
    out += c;
  }
  return out + "\"";
}

std::string entry(const std::string& label, const std::string& selectable, const std::string& browse) {
  return "Entry_( " + quoted(label) + ", " + selectable + ", proc( -> any ) ; " + browse + " )";
}

std::string wrap(const TypePtr& t, const std::vector<std::string>& entries, const std::string& prefix = "") {
  std::string body = "vector @1 of Entry_ [ ";
  for (std::size_t i = 0; i < entries.size(); ++i) body += (i ? ",\n    " : "") + entries[i];
  body += " ]";
  return "begin\n"
         "type Entry_ is " + std::string(kEntryType) + "\n"
         "proc( v_ : any -> *Entry_ ) ;\n"
         "project v_ as x_ onto\n"
         "  " + writeType(t) + " : " + prefix + body + "\n"
         "  default : vector @1 of Entry_ [ ]\n"
         "end\n";
}

std::string label(const std::string& name, const TypePtr& t) { return name + " : " + typeSummary(t); }

std::string nameOfLabel(const std::string& l) { return l.substr(0, l.find(" : ")); }

std::string idPath(Store& store, const Value& v) { return "#" + std::to_string(store.idOf(v.asObject())); }

}  // namespace

const char* displayKindName(DisplayModel::Kind k) {
  switch (k) {
    case DisplayModel::Kind::ScalarText: return "scalarText";
    case DisplayModel::Kind::Menu: return "menu";
    case DisplayModel::Kind::ProcMenu: return "procMenu";
    case DisplayModel::Kind::VectorMenu: return "vectorMenu";
  }
  return "?";
}

bool sameDisplay(const DisplayModel& a, const DisplayModel& b) {
  if (a.kind != b.kind || a.text != b.text || a.entries.size() != b.entries.size()) return false;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (a.entries[i].label != b.entries[i].label || a.entries[i].selectable != b.entries[i].selectable) return false;
  }
  return true;
}

std::string typeSummary(const TypePtr& t) {
  if (!t) return "void";
  switch (t->ctor()) {
    case TypeCtor::Structure: return "structure";
    case TypeCtor::Variant: return "variant";
    case TypeCtor::Vector: return "*" + typeSummary(t->elem());
    case TypeCtor::Proc: return "proc";
    default: return writeType(t);
  }
}

DisplayModel describeValue(Store& store, const Value& v) {
  DisplayModel m;
  TypePtr t = typeOfValue(v);
  m.title = writeType(t);
  if (!v.isObject() || isScalarDisplay(t)) {
    m.kind = DisplayModel::Kind::ScalarText;
    m.text = showValue(v);
    return m;
  }
  std::string base = idPath(store, v);
  if (auto s = v.as<StructObj>()) {
    m.kind = DisplayModel::Kind::Menu;
    for (const auto& f : s->type->fields()) m.entries.push_back({label(f.name, f.type), true, base + "." + f.name, ""});
  } else if (auto var = v.as<VariantObj>()) {
    m.kind = DisplayModel::Kind::Menu;
    for (const auto& f : var->type->fields()) {
      bool present = f.name == var->branch;
      m.entries.push_back({label(f.name, f.type), present, present ? base + "!" + f.name : "", ""});
    }
  } else if (auto e = v.as<EnvObj>()) {
    m.kind = DisplayModel::Kind::Menu;
    m.title = "env";
    for (const auto& x : e->entries) m.entries.push_back({label(x.name, x.type), true, base + "/" + x.name, ""});
  } else if (auto vec = v.as<VectorObj>()) {
    m.kind = DisplayModel::Kind::VectorMenu;
    bool any = !vec->cells.empty();
    m.entries.push_back({"bounds", true, base, std::to_string(vec->lower) + ".." + std::to_string(vec->upper())});
    m.entries.push_back({"element...", any, any ? base + "[" + std::to_string(vec->lower) + "]" : "", ""});
    m.entries.push_back({"all elements", true, base, ""});
    m.entries.push_back({"type", true, base, writeType(vec->type)});
  } else {
    m.kind = DisplayModel::Kind::ProcMenu;
    auto c = v.as<ClosureObj>();
    bool has = c && c->source;
    m.entries.push_back({"source", has, has ? base : "", ""});
  }
  return m;
}

DisplayModel describePath(Store& store, const std::string& path) {
  Binding b = store.resolve(parseStorePath(path), Want::Value);
  return describeValue(store, b.value);
}

Browser::Browser(Kernel& k) : kernel_(k) {
  scalarDisplay_ = compile(
      "begin\n"
      "type Entry_ is " + std::string(kEntryType) + "\n"
      "proc( v_ : any -> *Entry_ ) ;\n"
      "vector @1 of Entry_ [ Entry_( valueText( v_ ), false, proc( -> any ) ; v_ ) ]\n"
      "end\n");
  procDisplay_ = compile(
      "begin\n"
      "type Entry_ is " + std::string(kEntryType) + "\n"
      "proc( v_ : any -> *Entry_ ) ;\n"
      "vector @1 of Entry_ [ Entry_( \"source\", hasSource( v_ ), proc( -> any ) ; any( sourceOf( v_ ) ) ) ]\n"
      "end\n");
}

Value Browser::compile(const std::string& src) {
  Value box = compileString(kernel_, src);
  auto a = box.as<AnyObj>();
  if (!a || a->value.as<ClosureObj>() == nullptr) {
    throw Error("display procedure did not compile: " + (a && a->value.isString() ? a->value.asString() : src));
  }
  return kernel_.interp().call(a->value, {});
}

std::string Browser::generatedSource(const TypePtr& t, const Value& sample) {
  std::vector<std::string> entries;
  switch (t->ctor()) {
    case TypeCtor::Structure:
      for (const auto& f : t->fields()) entries.push_back(entry(label(f.name, f.type), "true", "any( x_( " + f.name + " ) )"));
      return wrap(t, entries);
    case TypeCtor::Variant:
      for (const auto& f : t->fields()) {
        entries.push_back(entry(label(f.name, f.type),
                                "project x_ as y_ onto " + f.name + " : true default : false",
                                "project x_ as y_ onto " + f.name + " : any( y_ ) default : any( nil )"));
      }
      return wrap(t, entries);
    case TypeCtor::Vector:
      entries.push_back(entry("bounds", "true", "any( iformat( lwb( x_ ) ) ++ \"..\" ++ iformat( upb( x_ ) ) )"));
      entries.push_back(entry("element...", "upb( x_ ) >= lwb( x_ )",
                              "if upb( x_ ) >= lwb( x_ ) then any( x_( lwb( x_ ) ) ) else any( nil )"));
      entries.push_back(entry("all elements", "true", "any( x_ )"));
      entries.push_back(entry("type", "true", "any( getTypeRep( any( x_ ) ) )"));
      return wrap(t, entries);
    case TypeCtor::Env: {
      auto e = sample.as<EnvObj>();
      if (!e || e->entries.empty()) return wrap(t, entries);
      std::string use = "use x_ with ";
      for (std::size_t i = 0; i < e->entries.size(); ++i) {
        const auto& x = e->entries[i];
        use += (i ? " ; " : "") + x.name + " : " + writeType(x.type);
        entries.push_back(entry(label(x.name, x.type), "true", "any( " + x.name + " )"));
      }
      return wrap(t, entries, use + " in ");
    }
    default: throw Error("no generated display for " + writeType(t));
  }
}

Value Browser::displayProcFor(const TypePtr& t, const Value& sample) {
  if (isScalarDisplay(t)) return scalarDisplay_;
  if (t->is(TypeCtor::Proc)) return procDisplay_;
  if (t->is(TypeCtor::Env)) return compile(generatedSource(t, sample));
  auto& cache = kernel_.store().displayCache();
  for (const auto& d : cache) {
    if (equalType(d.type, t)) return d.proc;
  }
  Value proc = compile(generatedSource(t, sample));
  cache.push_back({t, proc});
  return proc;
}

DisplayModel Browser::reflectiveDisplay(const Value& v) {
  TypePtr t = typeOfValue(v);
  Value proc = displayProcFor(t, v);
  Value out = kernel_.interp().call(proc, {makeAny(t, v)});
  auto vec = out.as<VectorObj>();
  if (!vec) throw Error("display procedure returned no menu");
  DisplayModel m;
  m.title = t->is(TypeCtor::Env) ? "env" : writeType(t);
  for (const auto& c : vec->cells) {
    auto s = c.as<StructObj>();
    if (!s) throw Error("bad menu entry");
    MenuEntry e;
    e.label = s->slots[static_cast<std::size_t>(s->indexOf("label"))].asString();
    e.selectable = s->slots[static_cast<std::size_t>(s->indexOf("selectable"))].asBool();
    m.entries.push_back(std::move(e));
  }
  if (isScalarDisplay(t)) {
    m.kind = DisplayModel::Kind::ScalarText;
    m.text = m.entries.empty() ? "" : m.entries.front().label;
    m.entries.clear();
    return m;
  }
  switch (t->ctor()) {
    case TypeCtor::Proc: m.kind = DisplayModel::Kind::ProcMenu; break;
    case TypeCtor::Vector: m.kind = DisplayModel::Kind::VectorMenu; break;
    default: m.kind = DisplayModel::Kind::Menu; break;
  }
  if (t->is(TypeCtor::Structure) || t->is(TypeCtor::Variant)) {
    // A cached procedure may list fields in another equivalent order; show
    // them in the value's own declaration order.
    std::vector<MenuEntry> ordered;
    for (const auto& f : t->fields()) {
      for (const auto& e : m.entries) {
        if (nameOfLabel(e.label) == f.name) ordered.push_back(e);
      }
    }
    m.entries = std::move(ordered);
  }
  return m;
}

}  // namespace hpk
