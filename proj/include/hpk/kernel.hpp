#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>

#include "hpk/interp.hpp"
#include "hpk/store.hpp"

namespace hpk {

// A running system: the store, the evaluator, and the I/O streams used by
// readString/writeString. Not thread-safe; callers serialise access.
class Kernel {
 public:
  Kernel();
  ~Kernel();
  Kernel(const Kernel&) = delete;
  Kernel& operator=(const Kernel&) = delete;

  Store& store() { return *store_; }
  Interp& interp() { return interp_; }

  // Swaps in a freshly loaded store.
  void replaceStore(std::unique_ptr<Store> s) { store_ = std::move(s); }

  std::istream& in() { return *in_; }
  std::ostream& out() { return *out_; }
  void setInput(std::istream& s) { in_ = &s; }
  void setOutput(std::ostream& s) { out_ = &s; }

  // Rounds of generator expansion before giving up.
  int expansionLimit = 64;
  // Number of times the compiler pipeline has been entered.
  std::uint64_t compilations = 0;

 private:
  std::unique_ptr<Store> store_;
  Interp interp_;
  std::istream* in_;
  std::ostream* out_;
};

// Registers the standard environment (builtins and predefined types).
// Idempotent; the Kernel constructor calls it.
void installStandardLibrary();

}  // namespace hpk
