#pragma once

// Tuple validity ratio (exact) and test validity ratio (exact or sampled).

#include <cstdint>
#include <optional>
#include <string_view>

#include "ipmgen/mdd.hpp"
#include "ipmgen/model.hpp"
#include "ipmgen/solver.hpp"

namespace ipmgen {

struct McParams {
    double targetRatio = 0.1;  // in (0, 1]
    double probability = 0.75; // in (0, 1)
    double maxError = 0.1;     // in (0, 1)

    /// Throws ConfigError when a field is out of range.
    void validate() const;
};

struct McResult {
    std::uint64_t sampleCount = 0;
    std::uint64_t validCount = 0;
    double estimate = 0.0;
    bool accepted = false;  // (1-e)r <= estimate <= (1+e)r
    std::uint64_t seed = 0;
};

/// (1/r) * 4 ln(2/(1-p)) / e^2 before rounding.
double sampleBound(const McParams& params);
/// Ceiling of sampleBound.
std::uint64_t sampleSize(const McParams& params);

bool withinBand(double estimate, double target, double maxError);

/// Builds the result record for `validCount` successes out of `sampleCount` draws.
McResult assessSamples(std::uint64_t sampleCount, std::uint64_t validCount, const McParams& params,
                       std::uint64_t seed = 0);

struct McOptions {
    std::optional<std::uint64_t> fixedSampleCount;  // overrides sampleSize
    unsigned jobs = 1;
};

/// Draws assignments uniformly and independently and checks them against the
/// constraints directly. Sample i uses substream i of `seed`, so the result
/// does not depend on `jobs`.
McResult testValidityRatioMc(const Ipm& ipm, const McParams& params, std::uint64_t seed,
                             McOptions options = {});

enum class RatioMethod { ExactMdd, ExactBruteForce, MonteCarlo };
std::string_view toString(RatioMethod method);

struct ExactRatio {
    Rational value;
    BigInt valid;
    BigInt total;
    RatioMethod method = RatioMethod::ExactMdd;
};

struct ExactOptions {
    MddOptions mdd;
    std::uint64_t bruteForceBudget = 2'000'000;  // largest totalTests for enumeration
};

/// V/N through the decision diagram when supported and within its node
/// budget, otherwise by exhaustive counting when totalTests fits the
/// brute-force budget. Throws MethodUnavailable when neither applies.
ExactRatio testValidityRatioExact(const Ipm& ipm, ExactOptions options = {});

/// Exhaustive count of satisfying assignments with subtree pruning.
BigInt countSatisfying(const Ipm& ipm);

struct TupleRatioOptions {
    SolverOptions solver;
    std::uint64_t tupleLimit = 100'000'000;  // larger tuple spaces throw ResourceError
};

/// Valid t-tuples over all t-tuples, exactly.
Rational tupleValidityRatio(const Ipm& ipm, std::size_t strength, TupleRatioOptions options = {});

struct TupleRatioBound {
    bool atMost = false;            // ratio <= threshold
    std::optional<Rational> exact;  // set when the scan ran to completion
};

/// Decides ratio <= threshold, stopping as soon as the answer is known.
TupleRatioBound tupleValidityRatioAtMost(const Ipm& ipm, std::size_t strength,
                                         const Rational& threshold, TupleRatioOptions options = {});

}  // namespace ipmgen
