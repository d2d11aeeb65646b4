#include "ipmgen/ratios.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "compiled.hpp"
#include "ipmgen/errors.hpp"
#include "ipmgen/random.hpp"

namespace ipmgen {

using detail::CompiledModel;
using detail::Truth;

void McParams::validate() const {
    if (!(targetRatio > 0.0 && targetRatio <= 1.0))
        throw ConfigError("target ratio must lie in (0, 1]");
    if (!(probability > 0.0 && probability < 1.0))
        throw ConfigError("probability must lie in (0, 1)");
    if (!(maxError > 0.0 && maxError < 1.0)) throw ConfigError("maximum error must lie in (0, 1)");
}

double sampleBound(const McParams& params) {
    params.validate();
    return (1.0 / params.targetRatio) * 4.0 * std::log(2.0 / (1.0 - params.probability)) /
           (params.maxError * params.maxError);
}

std::uint64_t sampleSize(const McParams& params) {
    return static_cast<std::uint64_t>(std::ceil(sampleBound(params)));
}

bool withinBand(double estimate, double target, double maxError) {
    return (1.0 - maxError) * target <= estimate && estimate <= (1.0 + maxError) * target;
}

McResult assessSamples(std::uint64_t sampleCount, std::uint64_t validCount, const McParams& params,
                       std::uint64_t seed) {
    if (validCount > sampleCount) throw std::invalid_argument("more valid samples than samples");
    McResult r;
    r.sampleCount = sampleCount;
    r.validCount = validCount;
    r.estimate = sampleCount ? static_cast<double>(validCount) / static_cast<double>(sampleCount) : 0.0;
    r.accepted = withinBand(r.estimate, params.targetRatio, params.maxError);
    r.seed = seed;
    return r;
}

McResult testValidityRatioMc(const Ipm& ipm, const McParams& params, std::uint64_t seed,
                             McOptions options) {
    params.validate();
    if (ipm.size() == 0) throw std::invalid_argument("model has no parameters");
    const std::uint64_t n = options.fixedSampleCount ? *options.fixedSampleCount : sampleSize(params);
    if (n == 0) throw ConfigError("sample count must be positive");
    const CompiledModel model(ipm);
    const auto& cards = model.cardinalities();

    auto countRange = [&](std::uint64_t begin, std::uint64_t end) {
        std::vector<std::size_t> values(cards.size());
        std::uint64_t valid = 0;
        for (std::uint64_t i = begin; i < end; ++i) {
            Rng rng(substreamSeed(seed, i));
            for (std::size_t p = 0; p < cards.size(); ++p) values[p] = rng.below(cards[p]);
            if (model.satisfiesAll(values)) ++valid;
        }
        return valid;
    };

    const unsigned jobs = std::max(1u, options.jobs);
    std::uint64_t valid = 0;
    if (jobs == 1 || n < 1024) {
        valid = countRange(0, n);
    } else {
        std::vector<std::uint64_t> partial(jobs, 0);
        std::vector<std::thread> workers;
        for (unsigned j = 0; j < jobs; ++j) {
            const std::uint64_t begin = n * j / jobs;
            const std::uint64_t end = n * (j + 1) / jobs;
            workers.emplace_back([&, j, begin, end] { partial[j] = countRange(begin, end); });
        }
        for (auto& w : workers) w.join();
        for (std::uint64_t v : partial) valid += v;
    }
    return assessSamples(n, valid, params, seed);
}

std::string_view toString(RatioMethod method) {
    switch (method) {
        case RatioMethod::ExactMdd: return "exact-mdd";
        case RatioMethod::ExactBruteForce: return "exact-bruteforce";
        case RatioMethod::MonteCarlo: return "monte-carlo";
    }
    return "?";
}

namespace {

class Counter {
public:
    explicit Counter(const CompiledModel& model) : model_(model) {
        const auto& cards = model.cardinalities();
        values_.assign(cards.size(), 0);
        assigned_.assign(cards.size(), 0);
        suffix_.assign(cards.size() + 1, BigInt(1));
        for (std::size_t l = cards.size(); l-- > 0;) suffix_[l] = suffix_[l + 1] * cards[l];
    }

    BigInt run() {
        std::vector<std::size_t> pending(model_.constraintCount());
        for (std::size_t c = 0; c < pending.size(); ++c) pending[c] = c;
        return count(0, pending);
    }

private:
    BigInt count(std::size_t depth, const std::vector<std::size_t>& pending) {
        std::vector<std::size_t> open;
        for (std::size_t c : pending) {
            Truth t = model_.holdsPartial(c, values_, assigned_);
            if (t == Truth::False) return 0;
            if (t == Truth::Unknown) open.push_back(c);
        }
        if (open.empty()) return suffix_[depth];
        // Unknown constraints always leave an unassigned parameter.
        BigInt sum = 0;
        const std::size_t card = model_.cardinalities()[depth];
        assigned_[depth] = 1;
        for (std::size_t v = 0; v < card; ++v) {
            values_[depth] = v;
            sum += count(depth + 1, open);
        }
        assigned_[depth] = 0;
        values_[depth] = 0;
        return sum;
    }

    const CompiledModel& model_;
    std::vector<std::size_t> values_;
    std::vector<std::uint8_t> assigned_;
    std::vector<BigInt> suffix_;
};

}  // namespace

BigInt countSatisfying(const Ipm& ipm) {
    const CompiledModel model(ipm);
    return Counter(model).run();
}

ExactRatio testValidityRatioExact(const Ipm& ipm, ExactOptions options) {
    ExactRatio out;
    out.total = totalTests(ipm);
    bool done = false;
    if (supportsMdd(ipm)) {
        try {
            out.valid = buildMdd(ipm, true, options.mdd).cardinality();
            out.method = RatioMethod::ExactMdd;
            done = true;
        } catch (const ResourceError&) {
        }
    }
    if (!done) {
        if (out.total > options.bruteForceBudget)
            throw MethodUnavailable("no exact method applies: decision diagram unsupported or over budget, "
                                    "and " + out.total.str() + " tests exceed the enumeration budget of " +
                                    std::to_string(options.bruteForceBudget));
        out.valid = countSatisfying(ipm);
        out.method = RatioMethod::ExactBruteForce;
    }
    out.value = Rational(out.valid, out.total);
    return out;
}

namespace {

struct TupleScan {
    std::uint64_t valid = 0;
    std::uint64_t total = 0;
    bool complete = false;
    bool atMost = false;
};

// Counts valid t-tuples. Every witness found marks the tuple it covers in
// each parameter subset, so only uncovered tuples reach the solver.
TupleScan scanTuples(const Ipm& ipm, std::size_t t, std::optional<Rational> threshold,
                     const TupleRatioOptions& options) {
    const std::size_t k = ipm.size();
    if (t == 0 || t > k) throw std::invalid_argument("strength must lie in [1, parameter count]");
    const BigInt totalBig = countTuples(ipm, t);
    if (totalBig > options.tupleLimit)
        throw ResourceError("tuple space of " + totalBig.str() + " exceeds the limit of " +
                            std::to_string(options.tupleLimit));
    TupleScan scan;
    scan.total = static_cast<std::uint64_t>(totalBig);

    std::uint64_t limit = scan.total;  // largest valid count still <= threshold
    if (threshold) {
        if (*threshold < 0) {
            scan.atMost = false;
            return scan;
        }
        Rational cap = *threshold * Rational(totalBig);
        BigInt floorCap = boost::multiprecision::numerator(cap) / boost::multiprecision::denominator(cap);
        limit = floorCap >= totalBig ? scan.total : static_cast<std::uint64_t>(floorCap);
    }

    const Solver solver(ipm, options.solver);
    const auto& cards = solver.compiled().cardinalities();

    std::vector<std::vector<std::size_t>> subsets;
    {
        std::vector<std::size_t> s(t);
        for (std::size_t i = 0; i < t; ++i) s[i] = i;
        while (true) {
            subsets.push_back(s);
            std::size_t i = t;
            while (i > 0 && s[i - 1] == k - t + i - 1) --i;
            if (i == 0) break;
            ++s[i - 1];
            for (std::size_t j = i; j < t; ++j) s[j] = s[j - 1] + 1;
        }
    }
    std::vector<std::vector<std::uint8_t>> covered(subsets.size());
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        std::size_t size = 1;
        for (std::size_t p : subsets[i]) size *= cards[p];
        covered[i].assign(size, 0);
    }
    auto indexOf = [&](const std::vector<std::size_t>& subset, auto valueOf) {
        std::size_t idx = 0;
        for (std::size_t p : subset) idx = idx * cards[p] + valueOf(p);
        return idx;
    };
    std::uint64_t coveredCount = 0;
    auto markWitness = [&](const Assignment& a) {
        for (std::size_t i = 0; i < subsets.size(); ++i) {
            auto& cell = covered[i][indexOf(subsets[i], [&](std::size_t p) { return a[p]; })];
            coveredCount += cell == 0;
            cell = 1;
        }
    };
    // Covered tuples are valid, so enough of them settle a threshold query.
    auto overLimit = [&] { return threshold && coveredCount > limit; };

    auto root = solver.solve();
    if (!root) {
        scan.complete = true;
        scan.atMost = true;
        return scan;
    }
    markWitness(*root);
    if (overLimit()) return scan;

    std::vector<std::vector<std::uint8_t>> unitOk(k);
    for (std::size_t p = 0; p < k; ++p) {
        unitOk[p].assign(cards[p], 0);
        for (std::size_t v = 0; v < cards[p]; ++v) {
            if ((*root)[p] == v) {
                unitOk[p][v] = 1;
                continue;
            }
            if (auto w = solver.solve({{p, v}})) {
                unitOk[p][v] = 1;
                markWitness(*w);
                if (overLimit()) return scan;
            }
        }
    }

    std::uint64_t seen = 0;
    Tuple tuple(t);
    std::vector<std::size_t> vals(t);
    for (std::size_t si = 0; si < subsets.size(); ++si) {
        const auto& subset = subsets[si];
        std::fill(vals.begin(), vals.end(), 0);
        for (std::size_t idx = 0; idx < covered[si].size(); ++idx) {
            // vals is the mixed-radix decoding of idx, last position fastest
            bool ok = covered[si][idx] != 0;
            if (!ok) {
                bool units = true;
                for (std::size_t j = 0; j < t && units; ++j) units = unitOk[subset[j]][vals[j]] != 0;
                if (units) {
                    for (std::size_t j = 0; j < t; ++j) tuple[j] = {subset[j], vals[j]};
                    if (auto w = solver.solve(tuple)) {
                        ok = true;
                        markWitness(*w);
                    }
                }
            }
            if (ok) ++scan.valid;
            ++seen;
            if (threshold) {
                if (scan.valid > limit) {
                    scan.atMost = false;
                    return scan;
                }
                if (scan.valid + (scan.total - seen) <= limit) {
                    scan.atMost = true;
                    return scan;
                }
            }
            for (std::size_t j = t; j-- > 0;) {
                if (++vals[j] < cards[subset[j]]) break;
                vals[j] = 0;
            }
        }
    }
    scan.complete = true;
    scan.atMost = scan.valid <= limit;
    return scan;
}

}  // namespace

Rational tupleValidityRatio(const Ipm& ipm, std::size_t strength, TupleRatioOptions options) {
    TupleScan scan = scanTuples(ipm, strength, std::nullopt, options);
    return Rational(BigInt(scan.valid), BigInt(scan.total));
}

TupleRatioBound tupleValidityRatioAtMost(const Ipm& ipm, std::size_t strength,
                                         const Rational& threshold, TupleRatioOptions options) {
    TupleScan scan = scanTuples(ipm, strength, threshold, options);
    TupleRatioBound out;
    out.atMost = scan.atMost;
    if (scan.complete) out.exact = Rational(BigInt(scan.valid), BigInt(scan.total));
    return out;
}

}  // namespace ipmgen
