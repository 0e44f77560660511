#include "hpk/interp.hpp"

#include <limits>

#include "hpk/builtins.hpp"
#include "hpk/error.hpp"

namespace hpk {

namespace {

struct DepthScope {
  DepthScope(int& d, int max) : d(d) {
    if (++d > max) {
      --d;
      throw RuntimeFault("recursion too deep");
    }
  }
  ~DepthScope() { --d; }
  int& d;
};

std::int64_t wrapAdd(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrapSub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
std::int64_t wrapMul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

EnvObj& envOf(const Value& v) {
  auto e = v.as<EnvObj>();
  if (!e) throw RuntimeFault("not an environment");
  return *e;
}

}  // namespace

std::shared_ptr<const HyperSource> bindSource(const ProcInfo& info, const FramePtr& frame) {
  if (!info.source || !info.sourceHasFrames) return info.source;
  auto out = std::make_shared<HyperSource>(*info.source);
  for (auto& s : out->bindings) {
    Binding& b = s.val;
    if (b.kind != BindingKind::FrameLocation || b.frame) continue;
    FramePtr f = frame;
    for (int i = 0; i < b.hops && f; ++i) f = f->parent;
    if (!f) continue;
    if (b.envLoc) {
      auto env = f->slots[static_cast<std::size_t>(b.slot)].as<EnvObj>();
      b = Binding::envLocation(env, b.name, b.type, true);
    } else {
      b.frame = f;
      b.hops = 0;
    }
  }
  return out;
}

FrameObj& Interp::frameAt(const FramePtr& frame, int hops) {
  FrameObj* f = frame.get();
  for (int i = 0; i < hops; ++i) f = f->parent.get();
  return *f;
}

Value Interp::makeClosure(const NodePtr& procLit, const FramePtr& frame) {
  auto c = std::make_shared<ClosureObj>();
  c->type = procLit->type;
  c->code = procLit;
  c->frame = frame;
  c->source = bindSource(*procLit->proc, frame);
  return Value::object(std::move(c));
}

Value Interp::call(const Value& f, std::vector<Value> args) {
  if (!f.isObject()) throw RuntimeFault("call of a non-procedure");
  const auto& obj = f.asObject();
  if (obj->kind() == ObjKind::Builtin) {
    const auto* def = static_cast<const BuiltinObj&>(*obj).def;
    if (def->type && def->type->fields().size() != args.size()) throw RuntimeFault("arity");
    DepthScope guard(depth_, maxDepth);
    return def->fn(*this, args);
  }
  if (obj->kind() != ObjKind::Closure) throw RuntimeFault("call of a non-procedure");
  const auto& c = static_cast<const ClosureObj&>(*obj);
  const Node& lit = *c.code;
  if (lit.names.size() != args.size()) throw RuntimeFault("arity");
  DepthScope guard(depth_, maxDepth);
  auto frame = std::make_shared<FrameObj>(static_cast<std::size_t>(lit.proc->frameSize), c.frame, lit.proc->level);
  for (std::size_t i = 0; i < args.size(); ++i) frame->slots[i] = std::move(args[i]);
  Value r = eval(*lit.kids[0], frame);
  return lit.flag ? r : Value();
}

Value Interp::eval(const Node& n, const FramePtr& frame) {
  switch (n.kind) {
    case NodeKind::IntLit: return Value::integer(n.ival);
    case NodeKind::RealLit: return Value::real(n.rval);
    case NodeKind::BoolLit: return Value::boolean(n.flag);
    case NodeKind::StringLit: return Value::string(n.text);
    case NodeKind::NilLit: return Value::nil();
    case NodeKind::Ident:
      switch (n.res.kind) {
        case Resolution::Kind::Local:
          return frameAt(frame, n.res.hops).slots[static_cast<std::size_t>(n.res.slot)];
        case Resolution::Kind::UseVar: {
          auto& env = envOf(frameAt(frame, n.res.hops).slots[static_cast<std::size_t>(n.res.slot)]);
          const auto* e = env.find(n.res.name);
          if (!e) throw RuntimeFault("absent: " + n.res.name);
          return e->value;
        }
        case Resolution::Kind::Planted: return readBinding(n.res.planted);
        case Resolution::Kind::Builtin: return Value::object(n.res.builtin->object);
        default: throw RuntimeFault("unresolved identifier " + n.text);
      }
    case NodeKind::Apply: return evalApply(n, frame);
    case NodeKind::Binary: return evalBinary(n, frame);
    case NodeKind::Unary: {
      Value v = eval(*n.kids[0], frame);
      if (n.text == "~") return Value::boolean(!v.asBool());
      if (v.isInt()) return Value::integer(wrapSub(0, v.asInt()));
      return Value::real(-v.asReal());
    }
    case NodeKind::AnyInject: return makeAny(n.kids[0]->type, eval(*n.kids[0], frame));
    case NodeKind::ProcLit:
      return makeClosure(std::const_pointer_cast<Node>(n.shared_from_this()), frame);
    case NodeKind::Block: {
      Value last;
      for (const auto& k : n.kids) last = eval(*k, frame);
      return n.type && n.type->is(TypeCtor::Void) ? Value() : last;
    }
    case NodeKind::If: {
      if (eval(*n.kids[0], frame).asBool()) {
        Value v = eval(*n.kids[1], frame);
        return n.flag ? v : Value();
      }
      if (n.flag) return eval(*n.kids[2], frame);
      return {};
    }
    case NodeKind::For: {
      std::int64_t lo = eval(*n.kids[0], frame).asInt();
      std::int64_t hi = eval(*n.kids[1], frame).asInt();
      for (std::int64_t i = lo; i <= hi; ++i) {
        frame->slots[static_cast<std::size_t>(n.slot)] = Value::integer(i);
        eval(*n.kids[2], frame);
        if (i == std::numeric_limits<std::int64_t>::max()) break;
      }
      return {};
    }
    case NodeKind::While:
      while (eval(*n.kids[0], frame).asBool()) eval(*n.kids[1], frame);
      return {};
    case NodeKind::Project: {
      Value subject = eval(*n.kids[0], frame);
      auto& slot = frame->slots[static_cast<std::size_t>(n.slot)];
      std::size_t arms = n.tsyn.size();
      if (auto a = subject.as<AnyObj>()) {
        for (std::size_t i = 0; i < arms; ++i) {
          if (equalType(a->type, n.types[i])) {
            slot = a->value;
            return eval(*n.kids[1 + i], frame);
          }
        }
      } else if (auto v = subject.as<VariantObj>()) {
        for (std::size_t i = 0; i < arms; ++i) {
          if (v->branch == n.tsyn[i]->name) {
            slot = v->payload;
            return eval(*n.kids[1 + i], frame);
          }
        }
      }
      slot = subject;
      return eval(*n.kids.back(), frame);
    }
    case NodeKind::Use: {
      Value envVal = eval(*n.kids[0], frame);
      auto& env = envOf(envVal);
      for (std::size_t i = 0; i < n.names.size(); ++i) {
        const auto* e = env.find(n.names[i]);
        if (!e) throw RuntimeFault("absent: " + n.names[i]);
        if (!equalType(e->type, n.types[i])) {
          throw RuntimeFault("type mismatch: " + n.names[i] + " is " + writeType(e->type) + ", expected " +
                             writeType(n.types[i]));
        }
      }
      frame->slots[static_cast<std::size_t>(n.slot)] = envVal;
      return eval(*n.kids[1], frame);
    }
    case NodeKind::StructLit: {
      std::vector<Value> slots;
      slots.reserve(n.kids.size());
      for (const auto& k : n.kids) slots.push_back(eval(*k, frame));
      return Value::object(std::make_shared<StructObj>(n.type, std::move(slots)));
    }
    case NodeKind::VectorLit: {
      std::int64_t lb = eval(*n.kids[0], frame).asInt();
      std::vector<Value> cells;
      cells.reserve(n.kids.size() - 1);
      for (std::size_t i = 1; i < n.kids.size(); ++i) cells.push_back(eval(*n.kids[i], frame));
      return Value::object(std::make_shared<VectorObj>(n.type, lb, std::move(cells)));
    }
    case NodeKind::VectorRange: {
      std::int64_t lb = eval(*n.kids[0], frame).asInt();
      std::int64_t ub = eval(*n.kids[1], frame).asInt();
      Value init = eval(*n.kids[2], frame);
      std::int64_t count = ub >= lb ? ub - lb + 1 : 0;
      if (count > (1 << 26)) throw RuntimeFault("vector too large");
      return Value::object(
          std::make_shared<VectorObj>(n.type, lb, std::vector<Value>(static_cast<std::size_t>(count), init)));
    }
    case NodeKind::Let:
      frame->slots[static_cast<std::size_t>(n.slot)] = eval(*n.kids[0], frame);
      return {};
    case NodeKind::InLet: {
      Value envVal = eval(*n.kids[0], frame);
      Value v = eval(*n.kids[1], frame);
      envOf(envVal).bind(n.text, n.types[0], std::move(v), n.flag);
      return {};
    }
    case NodeKind::TypeDecl: return {};
    case NodeKind::Drop: {
      Value envVal = eval(*n.kids[0], frame);
      if (!envOf(envVal).drop(n.text)) throw RuntimeFault("absent: " + n.text);
      return {};
    }
    case NodeKind::Assign: {
      Value v = eval(*n.kids[1], frame);
      assign(*n.kids[0], std::move(v), frame);
      return {};
    }
  }
  throw RuntimeFault("unsupported construct");
}

void Interp::assign(const Node& lhs, Value v, const FramePtr& frame) {
  if (lhs.kind == NodeKind::Ident) {
    switch (lhs.res.kind) {
      case Resolution::Kind::Local:
        frameAt(frame, lhs.res.hops).slots[static_cast<std::size_t>(lhs.res.slot)] = std::move(v);
        return;
      case Resolution::Kind::UseVar: {
        auto& env = envOf(frameAt(frame, lhs.res.hops).slots[static_cast<std::size_t>(lhs.res.slot)]);
        auto* e = env.find(lhs.res.name);
        if (!e) throw RuntimeFault("absent: " + lhs.res.name);
        if (!e->mutable_) throw RuntimeFault("assignment to constant " + lhs.res.name);
        e->value = std::move(v);
        return;
      }
      case Resolution::Kind::Planted: writeBinding(lhs.res.planted, std::move(v)); return;
      default: throw RuntimeFault("cannot assign to " + lhs.text);
    }
  }
  Value container = eval(*lhs.kids[0], frame);
  if (lhs.res.kind == Resolution::Kind::Field) {
    auto s = container.as<StructObj>();
    auto idx = static_cast<std::size_t>(lhs.res.index);
    if (idx >= s->slots.size() || s->type->fields()[idx].name != lhs.res.name) {
      idx = static_cast<std::size_t>(s->indexOf(lhs.res.name));
    }
    s->slots[idx] = std::move(v);
    return;
  }
  auto vec = container.as<VectorObj>();
  std::int64_t i = eval(*lhs.kids[1], frame).asInt();
  if (!vec->inBounds(i)) throw RuntimeFault("index out of bounds: " + std::to_string(i));
  vec->cells[static_cast<std::size_t>(i - vec->lower)] = std::move(v);
}

Value Interp::evalApply(const Node& n, const FramePtr& frame) {
  switch (n.res.kind) {
    case Resolution::Kind::Field: {
      Value container = eval(*n.kids[0], frame);
      auto s = container.as<StructObj>();
      auto idx = static_cast<std::size_t>(n.res.index);
      if (idx >= s->slots.size() || s->type->fields()[idx].name != n.res.name) {
        idx = static_cast<std::size_t>(s->indexOf(n.res.name));
      }
      return s->slots[idx];
    }
    case Resolution::Kind::Index: {
      Value container = eval(*n.kids[0], frame);
      auto vec = container.as<VectorObj>();
      std::int64_t i = eval(*n.kids[1], frame).asInt();
      if (!vec->inBounds(i)) throw RuntimeFault("index out of bounds: " + std::to_string(i));
      return vec->cells[static_cast<std::size_t>(i - vec->lower)];
    }
    case Resolution::Kind::Construct: {
      std::vector<Value> slots;
      for (std::size_t i = 1; i < n.kids.size(); ++i) slots.push_back(eval(*n.kids[i], frame));
      return Value::object(std::make_shared<StructObj>(n.type, std::move(slots)));
    }
    case Resolution::Kind::VariantCons:
      return Value::object(std::make_shared<VariantObj>(n.type, n.res.name, eval(*n.kids[1], frame)));
    case Resolution::Kind::Intrinsic: {
      std::vector<Value> args;
      for (std::size_t i = 1; i < n.kids.size(); ++i) args.push_back(eval(*n.kids[i], frame));
      DepthScope guard(depth_, maxDepth);
      return n.res.builtin->fn(*this, args);
    }
    default: {
      Value f = eval(*n.kids[0], frame);
      std::vector<Value> args;
      args.reserve(n.kids.size() - 1);
      for (std::size_t i = 1; i < n.kids.size(); ++i) args.push_back(eval(*n.kids[i], frame));
      return call(f, std::move(args));
    }
  }
}

Value Interp::evalBinary(const Node& n, const FramePtr& frame) {
  const std::string& op = n.text;
  if (op == "and") {
    return Value::boolean(eval(*n.kids[0], frame).asBool() && eval(*n.kids[1], frame).asBool());
  }
  if (op == "or") {
    return Value::boolean(eval(*n.kids[0], frame).asBool() || eval(*n.kids[1], frame).asBool());
  }
  Value a = eval(*n.kids[0], frame);
  Value b = eval(*n.kids[1], frame);
  if (op == "=") return Value::boolean(identical(a, b));
  if (op == "~=") return Value::boolean(!identical(a, b));
  if (op == "++") {
    if (a.isString()) return Value::string(a.asString() + b.asString());
    auto va = a.as<VectorObj>();
    auto vb = b.as<VectorObj>();
    std::vector<Value> cells = va->cells;
    cells.insert(cells.end(), vb->cells.begin(), vb->cells.end());
    return Value::object(std::make_shared<VectorObj>(va->type, va->lower, std::move(cells)));
  }
  auto cmp = [&](auto x, auto y) -> Value {
    if (op == "<") return Value::boolean(x < y);
    if (op == "<=") return Value::boolean(x <= y);
    if (op == ">") return Value::boolean(x > y);
    return Value::boolean(x >= y);
  };
  bool isCmp = op == "<" || op == "<=" || op == ">" || op == ">=";
  if (a.isString()) return cmp(a.asString(), b.asString());
  if (a.isReal()) {
    double x = a.asReal(), y = b.asReal();
    if (isCmp) return cmp(x, y);
    if (op == "+") return Value::real(x + y);
    if (op == "-") return Value::real(x - y);
    if (op == "*") return Value::real(x * y);
    return Value::real(x / y);
  }
  std::int64_t x = a.asInt(), y = b.asInt();
  if (isCmp) return cmp(x, y);
  if (op == "+") return Value::integer(wrapAdd(x, y));
  if (op == "-") return Value::integer(wrapSub(x, y));
  if (op == "*") return Value::integer(wrapMul(x, y));
  if (y == 0) throw RuntimeFault("division by zero");
  if (y == -1) return Value::integer(op == "rem" ? 0 : wrapSub(0, x));
  return Value::integer(op == "rem" ? x % y : x / y);
}

}  // namespace hpk
