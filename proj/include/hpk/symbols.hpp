#pragma once

#include <map>
#include <string>
#include <vector>

#include "hpk/value.hpp"

namespace hpk {

struct SymbolEntry {
  std::string name;
  Binding target;  // target.type is the entry's type; a Type binding names a type
};

// Name -> binding map with insertion-order iteration. Used for the extra
// tables handed to the compiler and for the store's shared table.
class SymbolTable {
 public:
  // False if the name is already present.
  bool add(std::string name, Binding target);
  bool remove(const std::string& name);
  const SymbolEntry* find(const std::string& name) const;
  const std::vector<SymbolEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  void clear() {
    entries_.clear();
    index_.clear();
  }

 private:
  std::vector<SymbolEntry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace hpk
