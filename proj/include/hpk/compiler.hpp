#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hpk/hyperprog.hpp"
#include "hpk/kernel.hpp"
#include "hpk/symbols.hpp"

namespace hpk {

// Character source for compileWithTables.
class SourceReader {
 public:
  virtual ~SourceReader() = default;
  virtual bool atEnd() = 0;
  virtual char32_t next() = 0;
};

class StringReader final : public SourceReader {
 public:
  explicit StringReader(std::string_view utf8Text) : text_(utf8::decode(utf8Text)) {}
  bool atEnd() override { return pos_ >= text_.size(); }
  char32_t next() override { return text_[pos_++]; }

 private:
  std::u32string text_;
  std::size_t pos_ = 0;
};

struct CompileResult {
  bool ok = false;
  Value thunk;         // zero-argument closure running the program
  TypePtr resultType;  // the program's value type (void if none)
  std::string error;   // "error at line L: message"
};

// The compiler pipeline shared by every entry point: links in `h` become
// table entries, identifiers resolve through `tables` then the shared
// table, and each procedure literal keeps its source.
CompileResult compileSource(Kernel& k, const HyperSource& h, const std::vector<const SymbolTable*>& tables);

// In-band entry points: an any holding the thunk, or a string on failure.
Value compileString(Kernel& k, std::string_view text);
Value compileWithTables(Kernel& k, SourceReader& reader, const std::vector<const SymbolTable*>& tables,
                        const std::vector<std::string>& options);
Value compileHyper(Kernel& k, const HyperSource& h);

// Compiles and runs; throws Error with the compiler message on failure.
Value evalString(Kernel& k, std::string_view text);
Value evalHyper(Kernel& k, const HyperSource& h);

// Source attached to a closure; throws Error("no source") for builtins.
HyperSource getProcSource(const Value& f);

void sharedTableAdd(Kernel& k, const std::string& name, Binding b);
void sharedTableRemove(Kernel& k, const std::string& name);
std::vector<std::string> sharedTableList(Kernel& k);

}  // namespace hpk
