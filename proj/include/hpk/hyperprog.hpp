#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hpk/symbols.hpp"
#include "hpk/utf8.hpp"
#include "hpk/value.hpp"

namespace hpk {

// Operations on hyper-program text. All are pure; errors throw Error.

HyperSource mkHyperSource(std::string_view utf8Text);
HyperSource concatHyperSource(const HyperSource& a, const HyperSource& b);
// Characters start..finish inclusive; fails with "cut through link" when a
// link region straddles either boundary.
HyperSource extractHyperSource(const HyperSource& h, std::int64_t start, std::int64_t finish);
// Replaces the text of `r` by `repl`; `r` must not overlap a link.
HyperSource substituteRegion(const HyperSource& h, CodeRegion r, const HyperSource& repl);

// Single-token hyper-sources. An empty label picks a default.
HyperSource linkTo(Binding b, std::string label);
HyperSource mkLink(TypePtr type, Value v);
HyperSource mkEnvLocLink(const EnvPtr& env, const std::string& name);
HyperSource mkStructLocLink(const Value& structure, const std::string& field);
HyperSource mkVecLocLink(const Value& vector, std::int64_t index);
HyperSource mkTypeLink(TypePtr t);

bool sameBinding(const Binding& a, const Binding& b);
bool compareHyperSource(const HyperSource& a, const HyperSource& b);

// Checks the sorted/disjoint/in-range invariants.
bool wellFormed(const HyperSource& h);

struct CompilerForm {
  std::u32string text;
  SymbolTable table;
  struct Piece {
    CodeRegion original;  // the link's region in the hyper-source
    CodeRegion emitted;   // its replacement text in `text`
  };
  std::vector<Piece> pieces;  // one per substitution, in order

  // Maps a region of `text` back to the hyper-source. A region touching
  // an emitted link maps to that link's whole original region.
  CodeRegion toOriginal(CodeRegion r) const;
  // Index of the piece whose emitted text contains `r`, or -1.
  int pieceAt(CodeRegion r) const;
};

// Replaces each link by a fresh identifier uniqueIdN bound in `table`;
// structure and vector locations become `uniqueIdN( field )` /
// `uniqueIdN( index )` over the container.
CompilerForm toCompilerForm(const HyperSource& h);

// Text with links shown as their labels (the plain code string).
inline std::string hyperText(const HyperSource& h) { return utf8::encode(h.code); }

}  // namespace hpk
