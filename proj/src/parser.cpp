#include "hpk/parser.hpp"

namespace hpk {

const char* nodeKindName(NodeKind k) {
  switch (k) {
    case NodeKind::IntLit: return "IntLit";
    case NodeKind::RealLit: return "RealLit";
    case NodeKind::BoolLit: return "BoolLit";
    case NodeKind::StringLit: return "StringLit";
    case NodeKind::NilLit: return "NilLit";
    case NodeKind::Ident: return "Ident";
    case NodeKind::Apply: return "Apply";
    case NodeKind::Binary: return "Binary";
    case NodeKind::Unary: return "Unary";
    case NodeKind::AnyInject: return "AnyInject";
    case NodeKind::ProcLit: return "ProcLit";
    case NodeKind::Block: return "Block";
    case NodeKind::If: return "If";
    case NodeKind::For: return "For";
    case NodeKind::While: return "While";
    case NodeKind::Project: return "Project";
    case NodeKind::Use: return "Use";
    case NodeKind::StructLit: return "StructLit";
    case NodeKind::VectorLit: return "VectorLit";
    case NodeKind::VectorRange: return "VectorRange";
    case NodeKind::Let: return "Let";
    case NodeKind::InLet: return "InLet";
    case NodeKind::TypeDecl: return "TypeDecl";
    case NodeKind::Drop: return "Drop";
    case NodeKind::Assign: return "Assign";
  }
  return "?";
}

namespace {

constexpr int kMaxDepth = 400;

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  NodePtr program() {
    if (peek().kind == Tok::End) throw SyntaxException({1, 1, "empty program"});
    auto block = sequence(peek().span.start);
    if (peek().kind != Tok::End) fail("unexpected '" + describe(peek()) + "'");
    if (block->kids.empty()) throw SyntaxException({1, 1, "empty program"});
    return block;
  }

  TypeSyntaxPtr typeOnly() {
    auto t = type();
    if (peek().kind != Tok::End) fail("unexpected '" + describe(peek()) + "' after type");
    return t;
  }

 private:
  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p(p) {
      if (++p.depth_ > kMaxDepth) p.fail("program nested too deeply");
    }
    ~DepthGuard() { --p.depth_; }
    Parser& p;
  };

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    last_ = t.span.finish;
    return t;
  }
  bool acceptSym(std::string_view s) {
    if (!peek().sym(s)) return false;
    next();
    return true;
  }
  bool acceptKw(std::string_view s) {
    if (!peek().kw(s)) return false;
    next();
    return true;
  }
  void expectSym(std::string_view s) {
    if (!acceptSym(s)) fail("expected '" + std::string(s) + "' but found '" + describe(peek()) + "'");
  }
  void expectKw(std::string_view s) {
    if (!acceptKw(s)) fail("expected '" + std::string(s) + "' but found '" + describe(peek()) + "'");
  }
  const Token& expectIdent() {
    if (peek().kind != Tok::Ident) fail("expected identifier but found '" + describe(peek()) + "'");
    return next();
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End: return "end of text";
      case Tok::String: return "\"" + t.text + "\"";
      default: return t.text;
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw SyntaxException({t.line, t.column, msg});
  }

  NodePtr make(NodeKind k, std::int64_t start) { return std::make_shared<Node>(k, Span{start, last_}); }
  void close(Node& n) { n.span.finish = last_; }

  static bool endsSequence(const Token& t) {
    return t.kind == Tok::End || t.kw("end") || t.sym("}");
  }

  NodePtr sequence(std::int64_t start) {
    auto block = std::make_shared<Node>(NodeKind::Block, Span{start, start - 1});
    while (acceptSym(";")) {
    }
    while (!endsSequence(peek())) {
      block->kids.push_back(clause());
      while (acceptSym(";")) {
      }
    }
    if (!block->kids.empty()) {
      block->span.start = block->kids.front()->span.start;
      block->span.finish = block->kids.back()->span.finish;
    }
    return block;
  }

  NodePtr clause() {
    DepthGuard guard(*this);
    const Token& t = peek();
    auto start = t.span.start;
    if (t.kw("let") || t.kw("rec")) {
      bool rec = acceptKw("rec");
      expectKw("let");
      const Token& id = expectIdent();
      auto n = std::make_shared<Node>(NodeKind::Let, Span{start, start});
      n->text = id.text;
      n->nameSpans.push_back(id.span);
      n->rec = rec;
      if (acceptSym(":=")) {
        n->flag = true;
      } else {
        expectSym("=");
      }
      n->kids.push_back(expr());
      close(*n);
      return n;
    }
    if (t.kw("type")) {
      next();
      const Token& id = expectIdent();
      auto n = std::make_shared<Node>(NodeKind::TypeDecl, Span{start, start});
      n->text = id.text;
      n->nameSpans.push_back(id.span);
      expectKw("is");
      n->tsyn.push_back(type());
      close(*n);
      return n;
    }
    if (t.kw("in")) {
      next();
      auto n = std::make_shared<Node>(NodeKind::InLet, Span{start, start});
      n->kids.push_back(expr());
      expectKw("let");
      const Token& id = expectIdent();
      n->text = id.text;
      n->nameSpans.push_back(id.span);
      if (acceptSym(":=")) {
        n->flag = true;
      } else {
        expectSym("=");
      }
      n->kids.push_back(expr());
      close(*n);
      return n;
    }
    if (t.kw("drop")) {
      next();
      const Token& id = expectIdent();
      auto n = std::make_shared<Node>(NodeKind::Drop, Span{start, start});
      n->text = id.text;
      n->nameSpans.push_back(id.span);
      expectKw("from");
      n->kids.push_back(expr());
      close(*n);
      return n;
    }
    if (t.kw("use")) {
      next();
      auto n = std::make_shared<Node>(NodeKind::Use, Span{start, start});
      n->kids.push_back(expr());
      expectKw("with");
      for (;;) {
        std::vector<const Token*> ids{&expectIdent()};
        while (acceptSym(",")) ids.push_back(&expectIdent());
        expectSym(":");
        auto ty = type();
        for (const Token* id : ids) {
          n->names.push_back(id->text);
          n->nameSpans.push_back(id->span);
          n->tsyn.push_back(ty);
        }
        if (!acceptSym(";")) break;
        if (peek().kw("in")) break;
      }
      expectKw("in");
      n->kids.push_back(clause());
      close(*n);
      return n;
    }
    auto e = expr();
    if (acceptSym(":=")) {
      auto n = std::make_shared<Node>(NodeKind::Assign, Span{start, start});
      n->kids.push_back(std::move(e));
      n->kids.push_back(expr());
      close(*n);
      return n;
    }
    return e;
  }

  // Expressions, loosest first: or, and, ~, comparison, additive,
  // multiplicative, unary minus, application.
  NodePtr expr() {
    DepthGuard guard(*this);
    return orExpr();
  }

  NodePtr binary(std::string op, NodePtr l, NodePtr r) {
    auto n = std::make_shared<Node>(NodeKind::Binary, Span{l->span.start, r->span.finish});
    n->text = std::move(op);
    n->kids = {std::move(l), std::move(r)};
    return n;
  }

  NodePtr orExpr() {
    auto l = andExpr();
    while (peek().kw("or")) {
      next();
      l = binary("or", std::move(l), andExpr());
    }
    return l;
  }

  NodePtr andExpr() {
    auto l = notExpr();
    while (peek().kw("and")) {
      next();
      l = binary("and", std::move(l), notExpr());
    }
    return l;
  }

  NodePtr notExpr() {
    if (peek().sym("~")) {
      DepthGuard guard(*this);
      auto start = next().span.start;
      auto operand = notExpr();
      auto n = make(NodeKind::Unary, start);
      n->text = "~";
      n->kids.push_back(std::move(operand));
      close(*n);
      return n;
    }
    return comparison();
  }

  NodePtr comparison() {
    auto l = additive();
    for (const char* op : {"=", "~=", "<", "<=", ">", ">="}) {
      if (peek().sym(op)) {
        next();
        return binary(op, std::move(l), additive());
      }
    }
    return l;
  }

  NodePtr additive() {
    auto l = multiplicative();
    for (;;) {
      const Token& t = peek();
      if (t.sym("+") || t.sym("-") || t.sym("++")) {
        std::string op = next().text;
        l = binary(op, std::move(l), multiplicative());
      } else {
        return l;
      }
    }
  }

  NodePtr multiplicative() {
    auto l = unary();
    for (;;) {
      const Token& t = peek();
      if (t.sym("*") || t.sym("/") || t.kw("rem")) {
        std::string op = next().text;
        l = binary(op, std::move(l), unary());
      } else {
        return l;
      }
    }
  }

  NodePtr unary() {
    if (peek().sym("-")) {
      DepthGuard guard(*this);
      auto start = next().span.start;
      auto operand = unary();
      auto n = make(NodeKind::Unary, start);
      n->text = "-";
      n->kids.push_back(std::move(operand));
      close(*n);
      return n;
    }
    return postfix();
  }

  NodePtr postfix() {
    auto e = primary();
    // An application's parenthesis must be on the callee's line, so that a
    // parenthesised expression starting a new line is not taken as a call.
    while (peek().sym("(") && !peek().newlineBefore) {
      DepthGuard guard(*this);
      next();
      auto n = std::make_shared<Node>(NodeKind::Apply, e->span);
      n->kids.push_back(std::move(e));
      if (!peek().sym(")")) {
        for (;;) {
          if (peek().kind == Tok::Ident && peek(1).sym(":")) {
            n->names.push_back(next().text);
            next();
          } else {
            n->names.emplace_back();
          }
          n->kids.push_back(clauseExpr());
          if (!acceptSym(",")) break;
        }
      }
      expectSym(")");
      close(*n);
      e = std::move(n);
    }
    return e;
  }

  // Expression that may be an assignment-free clause form (if/for/...);
  // those are already expressions here, so this is expr().
  NodePtr clauseExpr() { return expr(); }

  NodePtr primary() {
    const Token& t = peek();
    auto start = t.span.start;
    switch (t.kind) {
      case Tok::Int: {
        auto n = make(NodeKind::IntLit, start);
        n->ival = next().ival;
        close(*n);
        return n;
      }
      case Tok::Real: {
        auto n = make(NodeKind::RealLit, start);
        n->rval = next().rval;
        close(*n);
        return n;
      }
      case Tok::String: {
        auto n = make(NodeKind::StringLit, start);
        n->text = next().text;
        close(*n);
        return n;
      }
      case Tok::Ident: {
        auto n = make(NodeKind::Ident, start);
        n->text = next().text;
        close(*n);
        return n;
      }
      case Tok::End: fail("unexpected end of text");
      default: break;
    }
    if (t.kw("true") || t.kw("false")) {
      auto n = make(NodeKind::BoolLit, start);
      n->flag = next().text == "true";
      close(*n);
      return n;
    }
    if (t.kw("nil")) {
      next();
      return make(NodeKind::NilLit, start);
    }
    if (t.sym("(")) {
      next();
      auto e = clause();
      expectSym(")");
      return e;
    }
    if (t.kw("begin")) {
      next();
      auto block = sequence(start);
      expectKw("end");
      block->span = {start, last_};
      return block;
    }
    if (t.sym("{")) {
      next();
      auto block = sequence(start);
      expectSym("}");
      block->span = {start, last_};
      return block;
    }
    if (t.kw("proc")) return procLiteral();
    if (t.kw("if")) {
      next();
      auto n = std::make_shared<Node>(NodeKind::If, Span{start, start});
      n->kids.push_back(expr());
      if (acceptKw("do")) {
        n->kids.push_back(clause());
      } else {
        expectKw("then");
        n->kids.push_back(clause());
        expectKw("else");
        n->kids.push_back(clause());
        n->flag = true;
      }
      close(*n);
      return n;
    }
    if (t.kw("for")) {
      next();
      auto n = std::make_shared<Node>(NodeKind::For, Span{start, start});
      const Token& id = expectIdent();
      n->text = id.text;
      n->nameSpans.push_back(id.span);
      expectSym("=");
      n->kids.push_back(expr());
      expectKw("to");
      n->kids.push_back(expr());
      expectKw("do");
      n->kids.push_back(clause());
      close(*n);
      return n;
    }
    if (t.kw("while")) {
      next();
      auto n = std::make_shared<Node>(NodeKind::While, Span{start, start});
      n->kids.push_back(expr());
      expectKw("do");
      n->kids.push_back(clause());
      close(*n);
      return n;
    }
    if (t.kw("project")) return project();
    if (t.kw("struct")) {
      next();
      auto n = std::make_shared<Node>(NodeKind::StructLit, Span{start, start});
      expectSym("(");
      if (!peek().sym(")")) {
        for (;;) {
          const Token& id = expectIdent();
          n->names.push_back(id.text);
          n->nameSpans.push_back(id.span);
          expectSym("=");
          n->kids.push_back(expr());
          if (!acceptSym(";") && !acceptSym(",")) break;
        }
      }
      expectSym(")");
      close(*n);
      return n;
    }
    if (t.kw("vector")) return vector();
    if (t.kw("any")) {
      next();
      auto n = std::make_shared<Node>(NodeKind::AnyInject, Span{start, start});
      expectSym("(");
      n->kids.push_back(expr());
      expectSym(")");
      close(*n);
      return n;
    }
    fail("unexpected '" + describe(t) + "'");
  }

  NodePtr procLiteral() {
    auto start = next().span.start;
    auto n = std::make_shared<Node>(NodeKind::ProcLit, Span{start, start});
    expectSym("(");
    if (!peek().sym(")") && !peek().sym("->")) {
      for (;;) {
        std::vector<const Token*> ids{&expectIdent()};
        while (acceptSym(",")) ids.push_back(&expectIdent());
        expectSym(":");
        auto ty = type();
        for (const Token* id : ids) {
          n->names.push_back(id->text);
          n->nameSpans.push_back(id->span);
          n->tsyn.push_back(ty);
        }
        if (!acceptSym(";")) break;
      }
    }
    if (acceptSym("->")) {
      n->tsyn.push_back(type());
      n->flag = true;
    }
    expectSym(")");
    acceptSym(";");
    n->kids.push_back(clause());
    close(*n);
    return n;
  }

  // Does an arm (`type :`) start here? Parses the type speculatively.
  TypeSyntaxPtr tryArm() {
    auto saved = pos_;
    auto savedLast = last_;
    try {
      auto ty = type();
      if (acceptSym(":")) return ty;
    } catch (const SyntaxException&) {
    }
    pos_ = saved;
    last_ = savedLast;
    return nullptr;
  }

  NodePtr project() {
    auto start = next().span.start;
    auto n = std::make_shared<Node>(NodeKind::Project, Span{start, start});
    n->kids.push_back(expr());
    expectKw("as");
    const Token& id = expectIdent();
    n->text = id.text;
    n->nameSpans.push_back(id.span);
    expectKw("onto");
    for (;;) {
      while (acceptSym(";")) {
      }
      if (peek().kw("default")) {
        next();
        expectSym(":");
        n->kids.push_back(clause());
        n->flag = true;
        break;
      }
      auto ty = tryArm();
      if (!ty) break;
      n->tsyn.push_back(ty);
      n->kids.push_back(clause());
    }
    if (n->tsyn.empty() && !n->flag) fail("expected a projection branch");
    close(*n);
    return n;
  }

  NodePtr vector() {
    auto start = next().span.start;
    if (acceptSym("@")) {
      auto n = std::make_shared<Node>(NodeKind::VectorLit, Span{start, start});
      n->kids.push_back(unary());
      expectKw("of");
      if (!peek().sym("[")) n->tsyn.push_back(type());
      expectSym("[");
      if (!peek().sym("]")) {
        for (;;) {
          n->kids.push_back(expr());
          if (!acceptSym(",")) break;
        }
      }
      expectSym("]");
      close(*n);
      return n;
    }
    auto n = std::make_shared<Node>(NodeKind::VectorRange, Span{start, start});
    n->kids.push_back(additive());
    expectKw("to");
    n->kids.push_back(additive());
    expectKw("of");
    n->kids.push_back(expr());
    close(*n);
    return n;
  }

  TypeSyntaxPtr type() {
    DepthGuard guard(*this);
    const Token& t = peek();
    auto ts = std::make_shared<TypeSyntax>();
    ts->span.start = t.span.start;
    static const std::pair<const char*, TypeCtor> bases[] = {
        {"int", TypeCtor::Int},   {"real", TypeCtor::Real}, {"bool", TypeCtor::Bool},
        {"string", TypeCtor::String}, {"null", TypeCtor::Null}, {"any", TypeCtor::Any},
        {"env", TypeCtor::Env},   {"typerep", TypeCtor::TypeRep}, {"set", TypeCtor::Set},
    };
    for (const auto& [word, ctor] : bases) {
      if (t.kw(word)) {
        next();
        ts->kind = TypeSyntax::Kind::Base;
        ts->base = ctor;
        ts->span.finish = last_;
        return ts;
      }
    }
    if (t.kind == Tok::Ident) {
      ts->kind = TypeSyntax::Kind::Name;
      ts->name = next().text;
    } else if (t.sym("*")) {
      next();
      ts->kind = TypeSyntax::Kind::Vector;
      ts->elem = type();
    } else if (t.kw("structure") || t.kw("variant")) {
      ts->kind = t.kw("structure") ? TypeSyntax::Kind::Structure : TypeSyntax::Kind::Variant;
      next();
      expectSym("(");
      if (!peek().sym(")")) {
        for (;;) {
          std::vector<std::string> names{expectIdent().text};
          while (acceptSym(",")) names.push_back(expectIdent().text);
          expectSym(":");
          auto ft = type();
          for (auto& nm : names) ts->fields.emplace_back(std::move(nm), ft);
          if (!acceptSym(";")) break;
        }
      }
      expectSym(")");
    } else if (t.kw("proc")) {
      next();
      ts->kind = TypeSyntax::Kind::Proc;
      expectSym("(");
      if (!peek().sym(")") && !peek().sym("->")) {
        for (;;) {
          ts->params.push_back(type());
          if (!acceptSym(",")) break;
        }
      }
      if (acceptSym("->")) ts->result = type();
      expectSym(")");
    } else {
      fail("expected a type but found '" + describe(t) + "'");
    }
    ts->span.finish = last_;
    return ts;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::int64_t last_ = 0;
  int depth_ = 0;
};

}  // namespace

NodePtr parseProgram(std::u32string_view src) { return Parser(tokenize(src)).program(); }

TypeSyntaxPtr parseTypeText(std::u32string_view src) { return Parser(tokenize(src)).typeOnly(); }

}  // namespace hpk
