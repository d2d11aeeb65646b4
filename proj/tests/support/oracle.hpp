#pragma once

// Reference implementations used only by tests. They go through the
// tree-walking evaluator of model-core and plain enumeration, never through
// the compiled evaluator, the solver or the decision diagram.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ipmgen/model.hpp"

namespace oracle {

using ipmgen::Assignment;
using ipmgen::BigInt;
using ipmgen::Ipm;
using ipmgen::Rational;

/// Visits every full assignment, last parameter fastest.
void forEachAssignment(const Ipm& ipm, const std::function<void(const Assignment&)>& visit);

std::uint64_t countValid(const Ipm& ipm);
bool solvable(const Ipm& ipm);

/// Valid t-tuples over all t-tuples, checking each tuple against every valid test.
Rational tupleRatio(const Ipm& ipm, std::size_t t);

struct ModelShape {
    std::size_t minParams = 1, maxParams = 5;
    std::size_t maxCard = 4;
    std::size_t maxConstraints = 3;
    std::size_t maxDepth = 3;
    bool booleans = true;
    bool enums = true;
    bool ranges = true;
    bool ordering = true;     // < <= > >=
    bool arithmetic = true;
    bool paramPairs = true;   // atoms comparing two parameters
    std::uint64_t maxTotalTests = 10'000;
};

/// Random well-formed model; structure is independent of the library generator.
Ipm randomModel(std::mt19937_64& rng, const ModelShape& shape, const std::string& name = "m");

/// Random constraint over `ipm`'s parameters with exactly `binaries` connectives.
ipmgen::Expr randomExpr(std::mt19937_64& rng, const Ipm& ipm, const ModelShape& shape, std::size_t binaries);

}  // namespace oracle
