#include "hpk/compiler.hpp"

#include <algorithm>

#include "hpk/error.hpp"
#include "hpk/parser.hpp"
#include "hpk/typecheck.hpp"

namespace hpk {

namespace {

std::string errorText(const SyntaxError& e) { return "error at line " + std::to_string(e.line) + ": " + e.message; }

// Builds the attached source of one literal: its text, the original links
// inside it, and a link for every identifier declared outside it.
std::shared_ptr<const HyperSource> captureSource(const Node& lit, const HyperSource& original,
                                                 const CompilerForm* cf, bool& hasFrames) {
  CodeRegion span = cf ? cf->toOriginal(lit.span) : lit.span;
  std::vector<Substitution> links;
  for (const auto& s : original.bindings) {
    if (s.region.start >= span.start && s.region.finish <= span.finish) links.push_back(s);
  }
  hasFrames = false;
  for (const auto& ref : lit.proc->frees) {
    if (ref.planted && cf && cf->pieceAt(ref.span) >= 0) continue;
    CodeRegion r = cf ? cf->toOriginal(ref.span) : ref.span;
    links.push_back({ref.binding, r});
    if (ref.binding.kind == BindingKind::FrameLocation && !ref.binding.frame) hasFrames = true;
  }
  std::stable_sort(links.begin(), links.end(),
                   [](const Substitution& a, const Substitution& b) { return a.region.start < b.region.start; });
  auto out = std::make_shared<HyperSource>();
  out->code = original.code.substr(static_cast<std::size_t>(span.start - 1),
                                   static_cast<std::size_t>(span.finish - span.start + 1));
  std::int64_t prev = 0;
  for (auto& s : links) {
    if (s.region.start <= prev) continue;
    prev = s.region.finish;
    s.region.start -= span.start - 1;
    s.region.finish -= span.start - 1;
    out->bindings.push_back(std::move(s));
  }
  return out;
}

}  // namespace

CompileResult compileSource(Kernel& k, const HyperSource& h, const std::vector<const SymbolTable*>& tables) {
  ++k.compilations;
  CompileResult out;
  std::optional<CompilerForm> cf;
  CheckOptions opts;
  std::u32string_view text = h.code;
  try {
    if (!h.bindings.empty()) {
      cf = toCompilerForm(h);
      text = cf->text;
      opts.tables.push_back(&cf->table);
    }
  } catch (const Error& e) {
    out.error = "error at line 1: " + std::string(e.what());
    return out;
  }
  opts.tables.insert(opts.tables.end(), tables.begin(), tables.end());
  opts.shared = &k.store().shared();
  CheckedProgram checked;
  try {
    auto program = parseProgram(text);
    checked = typecheck(program, text, opts);
  } catch (const SyntaxException& e) {
    out.error = errorText(e.err);
    return out;
  } catch (const TypeException& e) {
    out.error = errorText(e.err);
    return out;
  }
  for (Node* lit : checked.procLiterals) {
    bool hasFrames = false;
    lit->proc->source = captureSource(*lit, h, cf ? &*cf : nullptr, hasFrames);
    lit->proc->sourceHasFrames = hasFrames;
  }
  checked.entry->proc->source = std::make_shared<HyperSource>(h);
  out.ok = true;
  out.resultType = checked.resultType;
  out.thunk = k.interp().makeClosure(checked.entry, nullptr);
  return out;
}

Value compileHyper(Kernel& k, const HyperSource& h) {
  auto r = compileSource(k, h, {});
  if (!r.ok) return makeAny(types::stringT(), Value::string(r.error));
  return makeAny(typeOfValue(r.thunk), r.thunk);
}

Value compileString(Kernel& k, std::string_view text) { return compileHyper(k, mkHyperSource(text)); }

Value compileWithTables(Kernel& k, SourceReader& reader, const std::vector<const SymbolTable*>& tables,
                        const std::vector<std::string>& options) {
  if (!options.empty()) {
    ++k.compilations;
    return makeAny(types::stringT(), Value::string("error at line 1: unknown compiler option " + options.front()));
  }
  HyperSource h;
  while (!reader.atEnd()) h.code.push_back(reader.next());
  auto r = compileSource(k, h, tables);
  if (!r.ok) return makeAny(types::stringT(), Value::string(r.error));
  return makeAny(typeOfValue(r.thunk), r.thunk);
}

Value evalHyper(Kernel& k, const HyperSource& h) {
  auto r = compileSource(k, h, {});
  if (!r.ok) throw Error(r.error);
  return k.interp().call(r.thunk, {});
}

Value evalString(Kernel& k, std::string_view text) { return evalHyper(k, mkHyperSource(text)); }

HyperSource getProcSource(const Value& f) {
  auto c = f.as<ClosureObj>();
  if (!c || !c->source) throw Error("no source");
  return *c->source;
}

void sharedTableAdd(Kernel& k, const std::string& name, Binding b) {
  if (!k.store().shared().add(name, std::move(b))) throw Error("already in shared table: " + name);
}

void sharedTableRemove(Kernel& k, const std::string& name) {
  if (!k.store().shared().remove(name)) throw Error("absent: " + name);
}

std::vector<std::string> sharedTableList(Kernel& k) {
  std::vector<std::string> out;
  for (const auto& e : k.store().shared().entries()) out.push_back(e.name);
  return out;
}

}  // namespace hpk
