#pragma once

// Profiles an existing model into the quantities a generator configuration
// is made of: category, counts, bounds, constraint form and ratios.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ipmgen/model.hpp"
#include "ipmgen/ratios.hpp"

namespace ipmgen {

enum class Category { UB, UA, M, BC, MC, NC };

/// "UB", "UA", "M", "BC", "MC", "NC".
std::string_view abbreviation(Category category);
/// "UNIFORM_BOOLEAN", "UNIFORM_ALL", "MCA", "BOOLC", "MCAC", "NUMC".
std::string_view longName(Category category);
/// Accepts either spelling, case-sensitively.
std::optional<Category> parseCategory(std::string_view text);
bool isConstrained(Category category);

/// Without constraints: all Boolean -> UB, all one cardinality -> UA, else M.
/// With constraints: all Boolean -> BC, no ranges -> MC, else NC.
Category inferCategory(const Ipm& ipm);

/// A conjunction of clauses, each a disjunction of atoms. An atom is a
/// comparison or literal, optionally negated.
bool isCnf(const Expr& expr);

/// `NOT (P1 = v1 AND ... AND Pn = vn)` or `P1 != v1 OR ... OR Pn != vn`
/// over distinct parameters. Boolean literals count as `P = true`.
bool isForbiddenTuple(const Expr& expr);

struct StructuralProfile {
    Category category = Category::UB;
    std::size_t parameterCount = 0;
    std::size_t constraintCount = 0;
    std::size_t booleanCount = 0;
    std::size_t enumCount = 0;
    std::size_t rangeCount = 0;
    std::size_t minCardinality = 0;
    std::size_t maxCardinality = 0;
    std::optional<std::int64_t> minInt;  // over range bounds
    std::optional<std::int64_t> maxInt;
    std::optional<std::size_t> minComplexity;  // absent without constraints
    std::optional<std::size_t> maxComplexity;
    bool allCnf = true;               // vacuously true without constraints
    bool allForbiddenTuples = true;
    bool hasBetweenParams = false;    // some comparison mentions parameters on both sides
    bool hasArithmetic = false;
};

StructuralProfile profile(const Ipm& ipm);

struct AnalysisOptions {
    std::size_t strength = 2;
    McParams mc;
    std::optional<std::uint64_t> fixedSampleCount;
    std::uint64_t seed = 0;
    bool computeRatios = true;
    ExactOptions exact;
    TupleRatioOptions tuple;
};

struct AnalysisReport {
    std::string modelName;
    StructuralProfile structure;

    std::size_t strength = 2;
    std::optional<Rational> tupleRatio;
    std::optional<std::string> tupleRatioError;

    std::optional<RatioMethod> testMethod;
    std::optional<ExactRatio> testRatioExact;
    std::optional<McResult> testRatioMc;
    McParams mcParams;
    std::optional<std::string> testRatioError;

    /// Exact value or Monte Carlo estimate, whichever was computed.
    std::optional<double> testRatioValue() const;
};

/// Ratio failures are recorded in the *Error fields and never prevent the
/// structural profile from being reported.
AnalysisReport analyze(const Ipm& ipm, const AnalysisOptions& options = {});

/// Stable key names; see docs/cli.md.
std::string toJson(const AnalysisReport& report);
std::string toTable(const AnalysisReport& report);

}  // namespace ipmgen
