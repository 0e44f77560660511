#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hpk/hyperprog.hpp"
#include "hpk/interp.hpp"

namespace hpk {

using SetPtr = std::shared_ptr<SetObj>;
using ComparisonPtr = std::shared_ptr<ComparisonObj>;

// A comparison over `elem` whose equality is the procedure value `equal`
// (a closure or builtin of type proc( T, T -> bool )).
ComparisonPtr mkComparison(Value equal);
ComparisonPtr mkComparison(TypePtr elem, Value equal);
SetPtr mkEmptySet(ComparisonPtr cmp);

// Set operations. Sets are persistent: every operation returns a new set.
// Element equality is cmp.equal; order is insertion order.
bool setEqual(Interp& in, const SetObj& s, const Value& a, const Value& b);
bool memberOf(Interp& in, const Value& x, const SetObj& s);
SetPtr insert(Interp& in, const SetObj& s, const Value& x);
SetPtr remove(Interp& in, const SetObj& s, const Value& x);
SetPtr setUnion(Interp& in, const SetObj& a, const SetObj& b);
SetPtr intersection(Interp& in, const SetObj& a, const SetObj& b);
SetPtr difference(Interp& in, const SetObj& a, const SetObj& b);
// Every element of b is in a.
bool includes(Interp& in, const SetObj& a, const SetObj& b);
// Visits in order until `visit` returns false.
void iterate(Interp& in, const SetObj& s, const Value& visit);
// First element satisfying `pred`, or void.
Value scan(Interp& in, const SetObj& s, const Value& pred);
SetPtr mapSet(Interp& in, const SetObj& s, const Value& f, ComparisonPtr resultCmp);
SetPtr rest(const SetObj& s);

// Builds a set from host values (inserting in order, dropping duplicates).
SetPtr setOf(Interp& in, ComparisonPtr cmp, const std::vector<Value>& elems);

// Structure-field sets: NameAndType elements, equal when names are equal
// and types equivalent.
ComparisonPtr nameAndTypeComparison();
Value nameAndType(const std::string& name, TypePtr t);
SetPtr getStructureFields(Interp& in, const TypePtr& t);
// Fails with "duplicate field name x" or on a non-NameAndType set.
TypePtr mkStructureType(const SetObj& fields);

// NameAndValue elements, equal when names are equal.
ComparisonPtr nameAndValueComparison();
Value nameAndValue(const std::string& name, HyperSource value);
// HyperSource elements compared with compareHyperSource.
ComparisonPtr hyperSourceComparison();

// `(e1) and (e2) and ... and true`; the empty set gives "true".
HyperSource andCompose(const SetObj& s);
// `(e1) or (e2) or ... or false`; the empty set gives "false".
HyperSource orCompose(const SetObj& s);
// `struct( n1 = v1 ; n2 = v2 )`; fails on duplicate names.
HyperSource mkStruct(const SetObj& s);

}  // namespace hpk
