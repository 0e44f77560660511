#pragma once

#include <map>
#include <string>
#include <string_view>

#include "hpk/hyperprog.hpp"
#include "hpk/kernel.hpp"

namespace hpk {

struct SourceAndEnv {
  GeneratorSource source;
  EnvPtr envir;
};

GeneratorPtr mkGenerator(Value prelude, GeneratorResult result);
GeneratorResult literalResult(GeneratorSource s);
GeneratorResult exprResult(Value proc);
GeneratorSource mkGeneratorSource(HyperSource h);
GeneratorSource concatGeneratorSource(const GeneratorSource& a, const GeneratorSource& b);
GeneratorSource extractGeneratorSource(const GeneratorSource& s, std::int64_t start, std::int64_t finish);
// Marks characters start..finish as a place-holder for `g`.
GeneratorSource addSubGenerator(const GeneratorSource& s, std::int64_t start, std::int64_t finish, GeneratorPtr g);
// The identity prelude.
Value nullPrelude();

// Runs the prelude, then yields the literal source or the expression's.
SourceAndEnv resultOf(Kernel& k, const GeneratorObj& g, EnvPtr initial);
// resultOf plus one level of sub-generator expansion, threading the
// environment left to right.
SourceAndEnv dropAndEval(Kernel& k, const GeneratorObj& g, EnvPtr initial);
// Expands until no place-holders remain; fails with "expansion did not
// terminate" after k.expansionLimit rounds.
HyperSource expandGenerator(Kernel& k, const GeneratorPtr& g, EnvPtr initial);
// expandGenerator over an environment holding stringVal = s.
HyperSource evalWithString(Kernel& k, const GeneratorPtr& g, const std::string& s);
// Calls `consumer` once with compileHyper(h).
void compileAndProcess(Kernel& k, const HyperSource& h, const Value& consumer);

// Builds a generator source from text with ⟦name⟧ markers: a name in
// `gens` becomes a place-holder whose text is the name, a name in `links`
// is replaced by that hyper-source.
GeneratorSource sourceTemplate(std::string_view text, const std::map<std::string, GeneratorPtr>& gens,
                               const std::map<std::string, HyperSource>& links = {});

}  // namespace hpk
