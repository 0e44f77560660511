#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hpk/generator.hpp"
#include "hpk/genlib.hpp"

namespace hpk {

// The generic natural join as a generator. Its input environment holds
// type1, type2 : typerep, the tuple types of the two relations; it expands
// to a program of type proc( set, set -> set ). Relations are sets of
// structures.
GeneratorPtr naturalJoinGenerator(Kernel& k);

// Binds the generator in the root environment as `naturalJoin` (once).
GeneratorPtr installNaturalJoin(Kernel& k);

// Tuple type of the result: the union of the two field sets.
TypePtr joinResultType(Interp& in, const TypePtr& t1, const TypePtr& t2);

// Expanded join program for the two tuple types.
HyperSource joinSource(Kernel& k, const TypePtr& t1, const TypePtr& t2);
// Expanded, compiled and run: the join procedure itself.
Value joinProcedure(Kernel& k, const TypePtr& t1, const TypePtr& t2);

// Untyped rows for building relations and for the oracle.
using Row = std::map<std::string, Value>;

// A comparison on tuples of type t: equal when every field is equal.
ComparisonPtr tupleComparison(Kernel& k, const TypePtr& t);
// A relation of structures of type t; each row supplies every field.
Value relation(Kernel& k, const TypePtr& t, const std::vector<Row>& rows);
std::vector<Row> rowsOf(const Value& relation);

// Nested-loop join on the shared attribute names, with no type analysis.
std::vector<Row> bruteForceJoin(const std::vector<Row>& r, const std::vector<Row>& s);
// Same rows regardless of order.
bool sameRows(const std::vector<Row>& a, const std::vector<Row>& b);

// Joins two small seeded relations with the generated procedure and checks
// the result against bruteForceJoin; writes a report to `out`.
bool naturalJoinDemo(Kernel& k, std::ostream& out);

}  // namespace hpk
