#include "hpk/generator.hpp"

#include <algorithm>

#include "hpk/builtins.hpp"
#include "hpk/compiler.hpp"
#include "hpk/error.hpp"

namespace hpk {

namespace {

std::int64_t len(const HyperSource& h) { return static_cast<std::int64_t>(h.code.size()); }

void sortGenerators(std::vector<GenSubstitution>& gens) {
  std::stable_sort(gens.begin(), gens.end(),
                   [](const GenSubstitution& a, const GenSubstitution& b) { return a.region.start < b.region.start; });
}

EnvPtr callPrelude(Kernel& k, const Value& prelude, EnvPtr env) {
  if (prelude.isVoid()) return env;
  Value r = k.interp().call(prelude, {Value::object(env)});
  auto out = r.as<EnvObj>();
  if (!out) throw RuntimeFault("prelude did not return an environment");
  return out;
}

}  // namespace

GeneratorPtr mkGenerator(Value prelude, GeneratorResult result) {
  auto g = std::make_shared<GeneratorObj>();
  g->prelude = std::move(prelude);
  g->result = std::move(result);
  return g;
}

GeneratorResult literalResult(GeneratorSource s) {
  GeneratorResult r;
  r.literal = true;
  r.source = std::move(s);
  return r;
}

GeneratorResult exprResult(Value proc) {
  GeneratorResult r;
  r.literal = false;
  r.expression = std::move(proc);
  return r;
}

GeneratorSource mkGeneratorSource(HyperSource h) { return GeneratorSource{std::move(h), {}}; }

GeneratorSource concatGeneratorSource(const GeneratorSource& a, const GeneratorSource& b) {
  GeneratorSource out{concatHyperSource(a.code, b.code), a.generators};
  for (auto g : b.generators) {
    g.region.start += len(a.code);
    g.region.finish += len(a.code);
    out.generators.push_back(std::move(g));
  }
  return out;
}

GeneratorSource extractGeneratorSource(const GeneratorSource& s, std::int64_t start, std::int64_t finish) {
  GeneratorSource out{extractHyperSource(s.code, start, finish), {}};
  CodeRegion cut{start, finish};
  for (auto g : s.generators) {
    if (g.region.start >= start && g.region.finish <= finish) {
      g.region.start -= start - 1;
      g.region.finish -= start - 1;
      out.generators.push_back(std::move(g));
    } else if (g.region.overlaps(cut)) {
      throw Error("cut through generator");
    }
  }
  return out;
}

GeneratorSource addSubGenerator(const GeneratorSource& s, std::int64_t start, std::int64_t finish, GeneratorPtr g) {
  if (!g) throw Error("no generator");
  CodeRegion r{start, finish};
  if (start < 1 || finish < start || finish > len(s.code)) {
    throw Error("bad region " + std::to_string(start) + ".." + std::to_string(finish));
  }
  for (const auto& b : s.code.bindings) {
    if (b.region.overlaps(r)) throw Error("place-holder overlaps a link");
  }
  for (const auto& other : s.generators) {
    if (other.region.overlaps(r)) throw Error("place-holder overlaps another");
  }
  GeneratorSource out = s;
  out.generators.push_back({std::move(g), r});
  sortGenerators(out.generators);
  return out;
}

Value nullPrelude() { return BuiltinRegistry::instance().value("nullPrelude"); }

SourceAndEnv resultOf(Kernel& k, const GeneratorObj& g, EnvPtr initial) {
  EnvPtr enriched = callPrelude(k, g.prelude, std::move(initial));
  if (g.result.literal) return {g.result.source, enriched};
  Value r = k.interp().call(g.result.expression, {Value::object(enriched)});
  auto gs = r.as<GenSourceObj>();
  if (!gs) throw RuntimeFault("generator expression did not return a GeneratorSource");
  return {gs->src, enriched};
}

SourceAndEnv dropAndEval(Kernel& k, const GeneratorObj& g, EnvPtr initial) {
  SourceAndEnv result = resultOf(k, g, std::move(initial));
  if (result.source.generators.empty()) return result;
  GeneratorSource src = result.source;
  EnvPtr envir = result.envir;
  HyperSource code = src.code;
  std::vector<GenSubstitution> remaining;
  std::int64_t delta = 0;
  auto subs = src.generators;
  sortGenerators(subs);
  for (const auto& sub : subs) {
    SourceAndEnv expanded = resultOf(k, *sub.gen, envir);
    envir = expanded.envir;
    CodeRegion at{sub.region.start + delta, sub.region.finish + delta};
    code = substituteRegion(code, at, expanded.source.code);
    for (auto nested : expanded.source.generators) {
      nested.region.start += at.start - 1;
      nested.region.finish += at.start - 1;
      remaining.push_back(std::move(nested));
    }
    delta += len(expanded.source.code) - sub.region.length();
  }
  sortGenerators(remaining);
  return {GeneratorSource{std::move(code), std::move(remaining)}, envir};
}

HyperSource expandGenerator(Kernel& k, const GeneratorPtr& g, EnvPtr initial) {
  if (!g) throw Error("no generator");
  int rounds = 1;
  SourceAndEnv result = dropAndEval(k, *g, std::move(initial));
  while (!result.source.generators.empty()) {
    if (++rounds > k.expansionLimit) throw Error("expansion did not terminate");
    auto next = mkGenerator(nullPrelude(), literalResult(result.source));
    result = dropAndEval(k, *next, result.envir);
  }
  return result.source.code;
}

HyperSource evalWithString(Kernel& k, const GeneratorPtr& g, const std::string& s) {
  auto env = std::make_shared<EnvObj>();
  env->bind("stringVal", types::stringT(), Value::string(s), false);
  return expandGenerator(k, g, env);
}

void compileAndProcess(Kernel& k, const HyperSource& h, const Value& consumer) {
  Value box = compileHyper(k, h);
  k.interp().call(consumer, {box});
}

GeneratorSource sourceTemplate(std::string_view text, const std::map<std::string, GeneratorPtr>& gens,
                               const std::map<std::string, HyperSource>& links) {
  static const std::string open = "\xE2\x9F\xA6";   // ⟦
  static const std::string close = "\xE2\x9F\xA7";  // ⟧
  GeneratorSource out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t at = text.find(open, pos);
    if (at == std::string_view::npos) {
      out.code = concatHyperSource(out.code, mkHyperSource(text.substr(pos)));
      break;
    }
    out.code = concatHyperSource(out.code, mkHyperSource(text.substr(pos, at - pos)));
    std::size_t end = text.find(close, at);
    if (end == std::string_view::npos) throw Error("unterminated marker in template");
    std::string name(text.substr(at + open.size(), end - at - open.size()));
    pos = end + close.size();
    if (auto g = gens.find(name); g != gens.end()) {
      auto start = len(out.code) + 1;
      out.code = concatHyperSource(out.code, mkHyperSource(name));
      out.generators.push_back({g->second, {start, len(out.code)}});
    } else if (auto l = links.find(name); l != links.end()) {
      out.code = concatHyperSource(out.code, l->second);
    } else {
      throw Error("unknown marker " + name);
    }
  }
  return out;
}

}  // namespace hpk
