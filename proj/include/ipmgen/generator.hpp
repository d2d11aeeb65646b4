#pragma once

// Randomized synthesis of benchmark models per category, with retry until
// every configured structural, solvability and ratio requirement holds.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ipmgen/analyzer.hpp"
#include "ipmgen/dictionary.hpp"
#include "ipmgen/exporters.hpp"
#include "ipmgen/model.hpp"
#include "ipmgen/random.hpp"
#include "ipmgen/ratios.hpp"

namespace ipmgen {

enum class ConstraintForm { General, Cnf, ForbiddenTuples };
enum class RatioMode { Max, Band };

std::string_view toString(ConstraintForm form);
/// Accepts "general", "cnf" and "forbidden".
std::optional<ConstraintForm> parseConstraintForm(std::string_view text);
std::string_view toString(RatioMode mode);
std::optional<RatioMode> parseRatioMode(std::string_view text);

struct GeneratorConfig {
    Category category = Category::UB;
    std::string modelName;  // defaults to the category's long name
    std::size_t nBenchmarks = 1;

    std::size_t kMin = 2, kMax = 10;          // parameter count
    std::size_t vMin = 2, vMax = 10;          // cardinality; ignored for UB and BC
    std::int64_t lInt = -50, uInt = 50;       // range bounds; NC only
    std::size_t cMin = 1, cMax = 5;           // constraint count; BC, MC, NC
    std::size_t dMin = 1, dMax = 3;           // constraint complexity; BC, MC, NC
    bool useCBtwP = false;
    ConstraintForm form = ConstraintForm::General;

    bool useTupleRatio = false;
    double tupleRatio = 0.1;
    std::size_t strength = 2;

    bool useTestRatio = false;
    McParams mc;
    std::optional<std::uint64_t> fixedSampleCount;

    /// Max accepts a measured ratio <= the threshold. Band accepts a test
    /// ratio inside [(1-e)r, (1+e)r]; the tuple ratio is always a maximum.
    RatioMode ratioMode = RatioMode::Max;

    std::vector<ExportFormat> formats{ExportFormat::Ctwedge};
    std::uint64_t seed = 0;
    std::optional<Dictionary> dictionary;

    std::size_t maxRounds = 100;         // global cap, in rounds of attemptsPerRound
    std::size_t attemptsPerRound = 10;
    unsigned jobs = 1;

    SolverOptions solver{100'000};          // candidates over budget are redrawn
    ExactOptions exact{MddOptions{200'000}, 2'000'000};
    TupleRatioOptions tuple{SolverOptions{100'000}};

    /// Throws ConfigError for inconsistent or unreachable settings.
    void validate() const;
    std::string effectiveName() const;
};

/// `nParams` parameters named PAR<i>, enum labels PAR<i>_<j>, or
/// dictionary entries when a compatible unused one exists.
std::vector<Parameter> defineParameters(Category category, std::size_t nParams, std::int64_t lInt,
                                        std::int64_t uInt, std::size_t vMin, std::size_t vMax,
                                        const Dictionary* dictionary, Rng& rng);

struct ConstraintDraw {
    std::vector<Expr> constraints;
    std::size_t clamped = 0;  // forbidden-tuple draws reduced to parameterCount - 1
};

/// Random constraints with exact complexity: every constraint's complexity is drawn
/// uniformly in [dMin, dMax] and realized exactly (after clamping, for
/// forbidden tuples, to parameterCount - 1).
ConstraintDraw defineConstraints(const std::vector<Parameter>& params, std::size_t nCnstr,
                                 std::size_t dMin, std::size_t dMax, bool useCBtwP,
                                 ConstraintForm form, Category category, Rng& rng);

struct ModelReport {
    std::size_t index = 0;
    std::size_t attempts = 0;
    std::size_t clampedConstraints = 0;
    std::optional<Rational> tupleRatio;  // exact when the scan completed
    std::optional<Rational> tupleRatioAtMost;  // proven bound when the scan stopped early
    std::optional<double> testRatio;
    std::optional<RatioMethod> testMethod;
    std::optional<McResult> mc;
    double seconds = 0.0;
};

struct GeneratedModel {
    Ipm model;
    ModelReport report;
};

struct GenerationFailure {
    std::size_t index = 0;
    std::size_t attempts = 0;
    std::string message;
};

struct GenerationResult {
    std::vector<GeneratedModel> models;      // in index order
    std::vector<GenerationFailure> failures; // indices whose attempt cap ran out
    bool complete() const noexcept { return failures.empty(); }
};

/// Generates `nBenchmarks` models. Index i draws from substream i of the seed, so the output does not
/// depend on `jobs`. Every index is attempted; an exhausted cap is reported
/// in `failures` with counts per rejection reason.
GenerationResult generateBenchmarks(const GeneratorConfig& config);

/// One index of generateBenchmarks; nullopt with `failure` filled on exhaustion.
std::optional<GeneratedModel> generateOne(const GeneratorConfig& config, std::size_t index,
                                          GenerationFailure* failure = nullptr);

/// Structural requirements only: category, counts, bounds, complexities, form.
/// Returns the first violated requirement, or nullopt.
std::optional<std::string> structuralViolation(const GeneratorConfig& config, const Ipm& ipm);

/// Seeds a configuration from an analysis of a baseline model: category,
/// count, cardinality, integer and complexity bounds, form, and the
/// between-parameters flag. Ratio thresholds are copied but not enabled.
GeneratorConfig configFromReport(const AnalysisReport& report);

}  // namespace ipmgen
