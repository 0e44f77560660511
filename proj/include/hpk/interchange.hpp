#pragma once

#include <string>
#include <string_view>

#include "hpk/hyperprog.hpp"
#include "hpk/store.hpp"

namespace hpk {

// The .hsrc text form of a hyper-program:
//
//   code text with each link shown as ⟦k⟧ (k = 1, 2, ...)
//   ---bindings---
//   k <kind> <path> <type text>
//
// kind is value, envLocation, structLocation, vectorLocation,
// frameLocation, type, builtin or literal. Paths use the StorePath
// syntax; a type link's path is `-` (the type text alone defines it), a
// builtin's path is its name, and a literal's path is the JSON text of a
// scalar.

// Throws Error for links with no path form (a type-representation value).
std::string exportHsrc(Store& store, const HyperSource& h);

// Resolves every path against `store`, checking presence and that the
// target's type matches the recorded type text. Errors name the path.
HyperSource importHsrc(Store& store, std::string_view text);

// Parses type text in the writeType grammar; throws Error.
TypePtr readType(Store& store, std::string_view text);

}  // namespace hpk
