#pragma once

#include <initializer_list>
#include <random>
#include <string>

#include "hpk/compiler.hpp"
#include "hpk/error.hpp"
#include "hpk/hyperprog.hpp"
#include "hpk/kernel.hpp"

namespace hpk::test {

inline HyperSource hyper(std::initializer_list<HyperSource> parts) {
  HyperSource out;
  for (const auto& p : parts) out = concatHyperSource(out, p);
  return out;
}

inline HyperSource text(const std::string& s) { return mkHyperSource(s); }

inline std::string regionText(const HyperSource& h, const CodeRegion& r) {
  return utf8::encode(h.code.substr(static_cast<std::size_t>(r.start - 1), static_cast<std::size_t>(r.length())));
}

// Unboxes the any returned by compileString and friends.
inline Value unboxed(const Value& v) {
  auto a = v.as<AnyObj>();
  return a ? a->value : v;
}

inline Value root(Kernel& k, const std::string& name) {
  auto* e = k.store().root()->find(name);
  if (!e) throw Error("absent: " + name);
  return e->value;
}

}  // namespace hpk::test
