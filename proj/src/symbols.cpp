#include "hpk/symbols.hpp"

namespace hpk {

bool SymbolTable::add(std::string name, Binding target) {
  if (index_.count(name)) return false;
  index_.emplace(name, entries_.size());
  entries_.push_back({std::move(name), std::move(target)});
  return true;
}

bool SymbolTable::remove(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) return false;
  entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(it->second));
  index_.clear();
  for (std::size_t i = 0; i < entries_.size(); ++i) index_.emplace(entries_[i].name, i);
  return true;
}

const SymbolEntry* SymbolTable::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

}  // namespace hpk
