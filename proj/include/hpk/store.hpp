#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hpk/ast.hpp"
#include "hpk/symbols.hpp"
#include "hpk/value.hpp"

namespace hpk {

// One step of an access path from the root environment. The text form is
// `/name` (environment binding), `.field`, `[i]`, `!branch`; a path may
// start with `#id` to begin at a known object instead of the root.
struct PathStep {
  enum class Kind { Env, Field, Index, Branch };
  Kind kind = Kind::Env;
  std::string name;
  std::int64_t index = 0;
};

struct StorePath {
  ObjectId base = 0;  // 0: the root environment
  std::vector<PathStep> steps;
};

// Throws Error on malformed text.
StorePath parseStorePath(std::string_view text);
std::string formatStorePath(const StorePath& p);

enum class Want { Value, Location, Type };

// The persistent object graph: root environment, shared table, display
// procedure cache, and results retained for the workbench.
class Store {
 public:
  Store();

  const EnvPtr& root() const { return root_; }
  SymbolTable& shared() { return shared_; }
  const SymbolTable& shared() const { return shared_; }

  struct DisplayEntry {
    TypePtr type;
    Value proc;
  };
  std::vector<DisplayEntry>& displayCache() { return displayCache_; }

  // Values kept alive as roots until released, keyed by their object id.
  std::map<ObjectId, Value>& retained() { return retained_; }

  // Object identity, assigned on first request and never reused.
  ObjectId idOf(const ObjRef& o);
  // Object with a known id, if still alive.
  ObjRef find(ObjectId id) const;
  // Records an object under a fixed id (snapshot loading).
  void adopt(const ObjRef& o, ObjectId id);

  // Identity for a compiled procedure literal; same id space as objects.
  ObjectId codeIdOf(const NodePtr& procLit);
  NodePtr findCode(ObjectId id) const;
  void adoptCode(const NodePtr& procLit, ObjectId id);

  ObjectId nextId() const { return nextId_; }
  void setNextId(ObjectId n) { nextId_ = n; }
  void setRoot(EnvPtr e) { root_ = std::move(e); }

  // Follows a path. Throws Error ("absent: x", kind mismatch, bounds).
  Binding resolve(const StorePath& path, Want want);

 private:
  EnvPtr root_;
  SymbolTable shared_;
  std::vector<DisplayEntry> displayCache_;
  std::map<ObjectId, Value> retained_;
  std::unordered_map<ObjectId, std::weak_ptr<Object>> objects_;
  std::unordered_map<ObjectId, std::weak_ptr<Node>> code_;
  ObjectId nextId_ = 1;
};

}  // namespace hpk
