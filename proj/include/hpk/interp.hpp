#pragma once

#include <vector>

#include "hpk/ast.hpp"
#include "hpk/value.hpp"

namespace hpk {

class Kernel;

// Tree-walking evaluator over type-checked ASTs. One activation frame per
// procedure call; identifiers are addressed as (static-link hops, slot).
class Interp {
 public:
  explicit Interp(Kernel& k) : kernel(k) {}

  // Closure for a checked procedure literal, capturing `frame`; the
  // attached source gets its frame links bound to `frame`'s chain.
  Value makeClosure(const NodePtr& procLit, const FramePtr& frame);

  // Applies a closure or builtin. Faults with "arity" on a count mismatch.
  Value call(const Value& f, std::vector<Value> args);

  Value eval(const Node& n, const FramePtr& frame);

  Kernel& kernel;
  int maxDepth = 2000;

 private:
  Value evalApply(const Node& n, const FramePtr& frame);
  Value evalBinary(const Node& n, const FramePtr& frame);
  void assign(const Node& lhs, Value v, const FramePtr& frame);
  static FrameObj& frameAt(const FramePtr& frame, int hops);

  int depth_ = 0;
};

// Attached source of a closure with its frame links bound to `frame`.
std::shared_ptr<const HyperSource> bindSource(const ProcInfo& info, const FramePtr& frame);

}  // namespace hpk
