#pragma once

#include <string>
#include <vector>

#include "hpk/kernel.hpp"

namespace hpk {

struct MenuEntry {
  std::string label;
  bool selectable = false;
  std::string target;  // StorePath text; resolves while the parent is shown
  std::string detail;  // extra text, e.g. the bounds of a vector
};

// What the browser shows for one value.
struct DisplayModel {
  enum class Kind { ScalarText, Menu, ProcMenu, VectorMenu };
  Kind kind = Kind::ScalarText;
  std::string title;
  std::string text;  // ScalarText only
  std::vector<MenuEntry> entries;
};

const char* displayKindName(DisplayModel::Kind k);

// Kind, text, and each entry's label and selectability agree.
bool sameDisplay(const DisplayModel& a, const DisplayModel& b);

// Short type text for menu labels: base and opaque types by name,
// constructed types by their constructor ("structure", "*int", "proc").
std::string typeSummary(const TypePtr& t);

// Direct display by host introspection.
DisplayModel describeValue(Store& store, const Value& v);
// Throws Error when the path does not resolve.
DisplayModel describePath(Store& store, const std::string& path);

// The reflective path: display procedures of type
//   proc( any -> *structure( label : string ; selectable : bool ;
//                            browse : proc( -> any ) ) )
// generated per type and kept in the store's display cache.
class Browser {
 public:
  explicit Browser(Kernel& k);

  // Scalars, opaque values and procedures get preloaded procedures; a
  // constructed type is generated and compiled on first encounter, then
  // served from the cache. Environments are generated afresh from
  // `sample`'s current bindings and never cached.
  Value displayProcFor(const TypePtr& t, const Value& sample = {});

  // Runs the display procedure for v's type and converts its menu.
  DisplayModel reflectiveDisplay(const Value& v);

  // Source text of the display procedure generated for t.
  static std::string generatedSource(const TypePtr& t, const Value& sample);

 private:
  Value compile(const std::string& src);

  Kernel& kernel_;
  Value scalarDisplay_;
  Value procDisplay_;
};

}  // namespace hpk
