#include "hpk/typecheck.hpp"

#include <map>

#include "hpk/builtins.hpp"

namespace hpk {

std::pair<int, int> lineColumnOf(std::u32string_view src, std::int64_t offset) {
  int line = 1, col = 1;
  auto end = std::min<std::int64_t>(offset - 1, static_cast<std::int64_t>(src.size()));
  for (std::int64_t i = 0; i < end; ++i) {
    if (src[static_cast<std::size_t>(i)] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

namespace {

struct VarInfo {
  bool useVar = false;
  TypePtr type;
  int level = 0;
  int slot = 0;
  bool isMutable = false;
  std::string entry;  // env entry name for use-bound identifiers
};

struct Scope {
  std::map<std::string, VarInfo> vars;
  std::map<std::string, TypePtr> types;
};

struct Fn {
  Node* node;
  ProcInfo* info;
  int level;
};

bool isVoid(const TypePtr& t) { return !t || t->is(TypeCtor::Void); }

std::string show(const TypePtr& t) { return isVoid(t) ? "void" : writeType(t); }

class Checker {
 public:
  Checker(std::u32string_view src, const CheckOptions& opts) : src_(src), opts_(opts) {}

  CheckedProgram run(const NodePtr& program) {
    auto entry = std::make_shared<Node>(NodeKind::ProcLit, program->span);
    entry->kids.push_back(program);
    auto info = std::make_shared<ProcInfo>();
    info->level = 0;
    entry->proc = info;
    fns_.push_back({entry.get(), info.get(), 0});
    scopes_.emplace_back();
    TypePtr t = check(*program);
    scopes_.pop_back();
    fns_.pop_back();
    entry->flag = !isVoid(t);
    entry->type = TypeRep::proc({}, entry->flag ? t : nullptr);
    CheckedProgram out;
    out.entry = entry;
    out.resultType = isVoid(t) ? types::voidT() : t;
    out.procLiterals = std::move(procs_);
    return out;
  }

  TypePtr resolveType(const TypeSyntax& ts) {
    switch (ts.kind) {
      case TypeSyntax::Kind::Base:
        if (ts.base == TypeCtor::Set) return types::setT();
        return TypeRep::base(ts.base);
      case TypeSyntax::Kind::Name: {
        if (auto t = lookupTypeName(ts.name)) return t;
        failAt(ts.span.start, "unknown type " + ts.name);
      }
      case TypeSyntax::Kind::Vector: return TypeRep::vector(resolveType(*ts.elem));
      case TypeSyntax::Kind::Structure:
      case TypeSyntax::Kind::Variant: {
        std::vector<NameAndType> fields;
        for (const auto& [name, ft] : ts.fields) fields.push_back({name, resolveType(*ft)});
        auto t = ts.kind == TypeSyntax::Kind::Structure ? TypeRep::structure(fields) : TypeRep::variant(fields);
        if (!t) failAt(ts.span.start, "duplicate field name in type");
        return t;
      }
      case TypeSyntax::Kind::Proc: {
        std::vector<TypePtr> params;
        for (const auto& p : ts.params) params.push_back(resolveType(*p));
        return TypeRep::proc(std::move(params), ts.result ? resolveType(*ts.result) : nullptr);
      }
    }
    failAt(ts.span.start, "bad type");
  }

 private:
  [[noreturn]] void failAt(std::int64_t offset, const std::string& msg) const {
    auto [line, col] = lineColumnOf(src_, offset);
    throw TypeException({line, col, msg});
  }
  [[noreturn]] void fail(const Node& n, const std::string& msg) const { failAt(n.span.start, msg); }

  static TypePtr set(Node& n, TypePtr t) {
    n.type = t;
    return t;
  }

  Fn& fn() { return fns_.back(); }
  int alloc() { return fn().info->frameSize++; }

  const VarInfo* lookupVar(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto v = it->vars.find(name);
      if (v != it->vars.end()) return &v->second;
    }
    return nullptr;
  }

  const SymbolEntry* lookupTable(const std::string& name) const {
    for (const auto* t : opts_.tables) {
      if (!t) continue;
      if (const auto* e = t->find(name)) return e;
    }
    if (opts_.shared) return opts_.shared->find(name);
    return nullptr;
  }

  TypePtr lookupTypeName(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto t = it->types.find(name);
      if (t != it->types.end()) return t->second;
    }
    if (const auto* e = lookupTable(name); e && e->target.kind == BindingKind::Type) return e->target.type;
    return BuiltinRegistry::instance().findType(name);
  }

  void declare(const std::string& name, VarInfo v) { scopes_.back().vars[name] = std::move(v); }

  TypePtr value(Node& n) {
    TypePtr t = check(n);
    if (isVoid(t)) fail(n, "clause has no value");
    return t;
  }

  void expect(Node& n, const TypePtr& want, const std::string& what) {
    TypePtr t = value(n);
    if (!equalType(t, want)) fail(n, what + " has type " + show(t) + ", expected " + show(want));
  }

  TypePtr scoped(Node& n) {
    scopes_.emplace_back();
    TypePtr t = check(n);
    scopes_.pop_back();
    return t;
  }

  TypePtr check(Node& n) {
    switch (n.kind) {
      case NodeKind::IntLit: return set(n, types::intT());
      case NodeKind::RealLit: return set(n, types::realT());
      case NodeKind::BoolLit: return set(n, types::boolT());
      case NodeKind::StringLit: return set(n, types::stringT());
      case NodeKind::NilLit: return set(n, types::nullT());
      case NodeKind::Ident: return ident(n);
      case NodeKind::Apply: return apply(n);
      case NodeKind::Binary: return binary(n);
      case NodeKind::Unary: {
        TypePtr t = value(*n.kids[0]);
        if (n.text == "~") {
          if (!t->is(TypeCtor::Bool)) fail(n, "operand of ~ must be bool, found " + show(t));
        } else if (!t->is(TypeCtor::Int) && !t->is(TypeCtor::Real)) {
          fail(n, "operand of - must be int or real, found " + show(t));
        }
        return set(n, t);
      }
      case NodeKind::AnyInject:
        value(*n.kids[0]);
        return set(n, types::anyT());
      case NodeKind::ProcLit: return procLit(n);
      case NodeKind::Block: {
        scopes_.emplace_back();
        TypePtr t = types::voidT();
        for (auto& k : n.kids) t = check(*k);
        scopes_.pop_back();
        return set(n, isVoid(t) ? types::voidT() : t);
      }
      case NodeKind::If: {
        expect(*n.kids[0], types::boolT(), "condition");
        TypePtr a = scoped(*n.kids[1]);
        if (!n.flag) return set(n, types::voidT());
        TypePtr b = scoped(*n.kids[2]);
        if (!isVoid(a) && equalType(a, b)) return set(n, a);
        return set(n, types::voidT());
      }
      case NodeKind::For: {
        expect(*n.kids[0], types::intT(), "lower bound");
        expect(*n.kids[1], types::intT(), "upper bound");
        scopes_.emplace_back();
        n.slot = alloc();
        declare(n.text, {false, types::intT(), fn().level, n.slot, false, {}});
        check(*n.kids[2]);
        scopes_.pop_back();
        return set(n, types::voidT());
      }
      case NodeKind::While:
        expect(*n.kids[0], types::boolT(), "condition");
        scoped(*n.kids[1]);
        return set(n, types::voidT());
      case NodeKind::Project: return project(n);
      case NodeKind::Use: return use(n);
      case NodeKind::StructLit: {
        std::vector<NameAndType> fields;
        for (std::size_t i = 0; i < n.kids.size(); ++i) fields.push_back({n.names[i], value(*n.kids[i])});
        auto t = TypeRep::structure(fields);
        if (!t) fail(n, "duplicate field name in structure");
        return set(n, t);
      }
      case NodeKind::VectorLit: {
        expect(*n.kids[0], types::intT(), "lower bound");
        TypePtr elem = n.tsyn.empty() ? nullptr : resolveType(*n.tsyn[0]);
        for (std::size_t i = 1; i < n.kids.size(); ++i) {
          if (!elem) {
            elem = value(*n.kids[i]);
          } else {
            expect(*n.kids[i], elem, "vector element");
          }
        }
        if (!elem) fail(n, "element type of an empty vector must be given");
        return set(n, TypeRep::vector(elem));
      }
      case NodeKind::VectorRange: {
        expect(*n.kids[0], types::intT(), "lower bound");
        expect(*n.kids[1], types::intT(), "upper bound");
        return set(n, TypeRep::vector(value(*n.kids[2])));
      }
      case NodeKind::Let: return let(n);
      case NodeKind::InLet:
        expect(*n.kids[0], types::envT(), "environment");
        n.types = {value(*n.kids[1])};
        return set(n, types::voidT());
      case NodeKind::TypeDecl:
        scopes_.back().types[n.text] = resolveType(*n.tsyn[0]);
        return set(n, types::voidT());
      case NodeKind::Drop:
        expect(*n.kids[0], types::envT(), "environment");
        return set(n, types::voidT());
      case NodeKind::Assign: return assign(n);
    }
    fail(n, "unsupported construct");
  }

  void noteFree(const Node& n, const VarInfo& v) {
    for (auto& f : fns_) {
      if (f.level <= v.level) continue;
      FreeRef ref;
      ref.span = n.span;
      ref.binding = Binding::frameLocation(nullptr, v.slot, v.type, v.isMutable);
      ref.binding.hops = f.level - 1 - v.level;
      ref.binding.envLoc = v.useVar;
      ref.binding.name = v.useVar ? v.entry : n.text;
      f.info->frees.push_back(std::move(ref));
    }
  }

  void notePlanted(const Node& n, const Binding& b) {
    for (auto& f : fns_) {
      if (f.level == 0) continue;
      FreeRef ref;
      ref.span = n.span;
      ref.binding = b;
      ref.planted = true;
      f.info->frees.push_back(std::move(ref));
    }
  }

  TypePtr ident(Node& n) {
    if (const auto* v = lookupVar(n.text)) {
      n.res.kind = v->useVar ? Resolution::Kind::UseVar : Resolution::Kind::Local;
      n.res.hops = fn().level - v->level;
      n.res.slot = v->slot;
      n.res.name = v->entry;
      noteFree(n, *v);
      return set(n, v->type);
    }
    if (const auto* e = lookupTable(n.text)) {
      if (e->target.kind == BindingKind::Type) fail(n, "type " + n.text + " used as a value");
      n.res.kind = Resolution::Kind::Planted;
      n.res.planted = e->target;
      notePlanted(n, e->target);
      return set(n, e->target.type);
    }
    if (const auto* def = BuiltinRegistry::instance().find(n.text)) {
      if (def->isIntrinsic()) fail(n, "procedure " + n.text + " must be applied to arguments");
      n.res.kind = Resolution::Kind::Builtin;
      n.res.builtin = def;
      return set(n, def->type);
    }
    fail(n, "unknown identifier " + n.text);
  }

  bool mutableTarget(const Node& n) const {
    switch (n.res.kind) {
      case Resolution::Kind::Local: {
        const auto* v = lookupVar(n.text);
        return v && v->isMutable;
      }
      case Resolution::Kind::UseVar: return true;
      case Resolution::Kind::Planted: return n.res.planted.isLocation() && n.res.planted.isMutable;
      default: return false;
    }
  }

  TypePtr assign(Node& n) {
    Node& lhs = *n.kids[0];
    TypePtr t;
    if (lhs.kind == NodeKind::Ident) {
      t = ident(lhs);
      if (!mutableTarget(lhs)) fail(lhs, "cannot assign to " + lhs.text);
    } else if (lhs.kind == NodeKind::Apply) {
      t = apply(lhs);
      if (lhs.res.kind != Resolution::Kind::Field && lhs.res.kind != Resolution::Kind::Index) {
        fail(lhs, "cannot assign to this expression");
      }
    } else {
      fail(lhs, "cannot assign to this expression");
    }
    expect(*n.kids[1], t, "assigned value");
    return set(n, types::voidT());
  }

  void checkArgs(Node& n, const std::vector<NameAndType>& params, const std::string& what) {
    std::size_t argc = n.kids.size() - 1;
    if (argc != params.size()) {
      fail(n, what + " expects " + std::to_string(params.size()) + " arguments, given " + std::to_string(argc));
    }
    for (std::size_t i = 0; i < argc; ++i) {
      if (!n.names[i].empty()) fail(*n.kids[i + 1], "unexpected argument label " + n.names[i]);
      expect(*n.kids[i + 1], params[i].type, "argument " + std::to_string(i + 1));
    }
  }

  TypePtr construct(Node& n, const TypePtr& t, const std::string& name) {
    std::size_t argc = n.kids.size() - 1;
    if (t->is(TypeCtor::Structure)) {
      checkArgs(n, t->fields(), name);
      n.res.kind = Resolution::Kind::Construct;
      return set(n, t);
    }
    if (t->is(TypeCtor::Variant)) {
      if (argc != 1 || n.names[0].empty()) fail(n, "variant " + name + " needs one labelled argument");
      const TypeRep* bt = t->field(n.names[0]);
      if (!bt) fail(n, "variant " + name + " has no branch " + n.names[0]);
      for (const auto& f : t->fields()) {
        if (f.name == n.names[0]) expect(*n.kids[1], f.type, "branch " + f.name);
      }
      n.res.kind = Resolution::Kind::VariantCons;
      n.res.name = n.names[0];
      return set(n, t);
    }
    fail(n, "type " + name + " has no constructor");
  }

  TypePtr apply(Node& n) {
    Node& callee = *n.kids[0];
    std::size_t argc = n.kids.size() - 1;
    if (callee.kind == NodeKind::Ident && !lookupVar(callee.text)) {
      if (TypePtr t = lookupTypeName(callee.text)) {
        callee.type = t;
        if (const auto* e = lookupTable(callee.text)) notePlanted(callee, e->target);
        return construct(n, t, callee.text);
      }
      if (!lookupTable(callee.text)) {
        const auto* def = BuiltinRegistry::instance().find(callee.text);
        if (def && def->isIntrinsic()) {
          std::vector<TypePtr> argTypes;
          for (std::size_t i = 1; i <= argc; ++i) {
            if (!n.names[i - 1].empty()) fail(*n.kids[i], "unexpected argument label " + n.names[i - 1]);
            argTypes.push_back(value(*n.kids[i]));
          }
          std::string err;
          TypePtr r = def->typer(argTypes, err);
          if (!r) fail(n, "in call of " + def->name + ": " + err);
          n.res.kind = Resolution::Kind::Intrinsic;
          n.res.builtin = def;
          callee.res.kind = Resolution::Kind::Builtin;
          callee.res.builtin = def;
          return set(n, r);
        }
      }
    }
    TypePtr ct = value(callee);
    if (ct->is(TypeCtor::Proc)) {
      checkArgs(n, ct->fields(), "procedure");
      n.res.kind = Resolution::Kind::Call;
      return set(n, ct->result() ? ct->result() : types::voidT());
    }
    if (ct->is(TypeCtor::Structure)) {
      Node* arg = argc == 1 ? n.kids[1].get() : nullptr;
      if (!arg || arg->kind != NodeKind::Ident || !n.names[0].empty()) {
        fail(n, "structure selection needs a field name");
      }
      for (std::size_t i = 0; i < ct->fields().size(); ++i) {
        if (ct->fields()[i].name == arg->text) {
          n.res.kind = Resolution::Kind::Field;
          n.res.index = static_cast<int>(i);
          n.res.name = arg->text;
          arg->type = ct->fields()[i].type;
          return set(n, ct->fields()[i].type);
        }
      }
      fail(*arg, "structure " + show(ct) + " has no field " + arg->text);
    }
    if (ct->is(TypeCtor::Vector)) {
      if (argc != 1 || !n.names[0].empty()) fail(n, "vector subscript needs one index");
      expect(*n.kids[1], types::intT(), "index");
      n.res.kind = Resolution::Kind::Index;
      return set(n, ct->elem());
    }
    fail(n, "cannot apply a value of type " + show(ct));
  }

  TypePtr binary(Node& n) {
    const std::string& op = n.text;
    TypePtr a = value(*n.kids[0]);
    TypePtr b = value(*n.kids[1]);
    auto mismatch = [&] { fail(n, "operands of " + op + " have types " + show(a) + " and " + show(b)); };
    if (op == "and" || op == "or") {
      if (!a->is(TypeCtor::Bool) || !b->is(TypeCtor::Bool)) mismatch();
      return set(n, types::boolT());
    }
    if (op == "=" || op == "~=") {
      if (!equalType(a, b)) mismatch();
      return set(n, types::boolT());
    }
    if (!equalType(a, b)) mismatch();
    if (op == "<" || op == "<=" || op == ">" || op == ">=") {
      if (!a->is(TypeCtor::Int) && !a->is(TypeCtor::Real) && !a->is(TypeCtor::String)) mismatch();
      return set(n, types::boolT());
    }
    if (op == "++") {
      if (!a->is(TypeCtor::String) && !a->is(TypeCtor::Vector)) mismatch();
      return set(n, a);
    }
    if (op == "rem") {
      if (!a->is(TypeCtor::Int)) mismatch();
      return set(n, a);
    }
    if (!a->is(TypeCtor::Int) && !a->is(TypeCtor::Real)) mismatch();
    return set(n, a);
  }

  TypePtr procTypeOf(Node& n) {
    std::vector<TypePtr> params;
    std::size_t np = n.names.size();
    for (std::size_t i = 0; i < np; ++i) params.push_back(resolveType(*n.tsyn[i]));
    TypePtr result = n.flag ? resolveType(*n.tsyn[np]) : nullptr;
    return TypeRep::proc(std::move(params), result);
  }

  TypePtr procLit(Node& n) {
    TypePtr pt = procTypeOf(n);
    auto info = std::make_shared<ProcInfo>();
    info->level = fn().level + 1;
    n.proc = info;
    procs_.push_back(&n);
    fns_.push_back({&n, info.get(), info->level});
    scopes_.emplace_back();
    for (std::size_t i = 0; i < n.names.size(); ++i) {
      if (scopes_.back().vars.count(n.names[i])) failAt(n.nameSpans[i].start, "duplicate parameter " + n.names[i]);
      declare(n.names[i], {false, pt->fields()[i].type, info->level, alloc(), false, {}});
    }
    TypePtr body = check(*n.kids[0]);
    if (pt->result() && !equalType(body, pt->result())) {
      fail(*n.kids[0], "procedure body has type " + show(body) + ", expected " + show(pt->result()));
    }
    scopes_.pop_back();
    fns_.pop_back();
    return set(n, pt);
  }

  TypePtr let(Node& n) {
    Node& init = *n.kids[0];
    if (n.rec) {
      if (init.kind != NodeKind::ProcLit) fail(n, "rec let requires a procedure literal");
      TypePtr t = procTypeOf(init);
      n.slot = alloc();
      declare(n.text, {false, t, fn().level, n.slot, n.flag, {}});
      check(init);
      n.types = {t};
      return set(n, types::voidT());
    }
    TypePtr t = value(init);
    n.slot = alloc();
    declare(n.text, {false, t, fn().level, n.slot, n.flag, {}});
    n.types = {t};
    return set(n, types::voidT());
  }

  TypePtr use(Node& n) {
    expect(*n.kids[0], types::envT(), "environment");
    n.slot = alloc();
    scopes_.emplace_back();
    n.types.clear();
    for (std::size_t i = 0; i < n.names.size(); ++i) {
      TypePtr t = resolveType(*n.tsyn[i]);
      n.types.push_back(t);
      declare(n.names[i], {true, t, fn().level, n.slot, true, n.names[i]});
    }
    TypePtr t = check(*n.kids[1]);
    scopes_.pop_back();
    return set(n, isVoid(t) ? types::voidT() : t);
  }

  TypePtr project(Node& n) {
    TypePtr subject = value(*n.kids[0]);
    bool onVariant = subject->is(TypeCtor::Variant);
    if (!onVariant && !subject->is(TypeCtor::Any)) {
      fail(*n.kids[0], "project needs an any or variant value, found " + show(subject));
    }
    if (!n.flag) fail(n, "project requires a default branch");
    n.slot = alloc();
    n.types.clear();
    std::vector<TypePtr> results;
    std::size_t arms = n.tsyn.size();
    for (std::size_t i = 0; i < arms; ++i) {
      TypePtr bound;
      if (onVariant) {
        const auto& ts = *n.tsyn[i];
        if (ts.kind != TypeSyntax::Kind::Name) failAt(ts.span.start, "expected a branch name");
        for (const auto& f : subject->fields()) {
          if (f.name == ts.name) bound = f.type;
        }
        if (!bound) failAt(ts.span.start, "variant has no branch " + ts.name);
      } else {
        bound = resolveType(*n.tsyn[i]);
      }
      n.types.push_back(bound);
      scopes_.emplace_back();
      declare(n.text, {false, bound, fn().level, n.slot, false, {}});
      results.push_back(check(*n.kids[1 + i]));
      scopes_.pop_back();
    }
    scopes_.emplace_back();
    declare(n.text, {false, subject, fn().level, n.slot, false, {}});
    results.push_back(check(*n.kids.back()));
    scopes_.pop_back();
    TypePtr t = results.front();
    for (const auto& r : results) {
      if (isVoid(r) || !equalType(r, t)) return set(n, types::voidT());
    }
    return set(n, t);
  }

  std::u32string_view src_;
  const CheckOptions& opts_;
  std::vector<Scope> scopes_;
  std::vector<Fn> fns_;
  std::vector<Node*> procs_;
};

}  // namespace

CheckedProgram typecheck(const NodePtr& program, std::u32string_view src, const CheckOptions& opts) {
  return Checker(src, opts).run(program);
}

TypePtr resolveTypeSyntax(const TypeSyntax& t, const CheckOptions& opts, std::string& err) {
  try {
    Checker c({}, opts);
    return c.resolveType(t);
  } catch (const TypeException& e) {
    err = e.err.message;
    return nullptr;
  }
}

}  // namespace hpk
