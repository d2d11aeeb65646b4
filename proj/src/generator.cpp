#include "ipmgen/generator.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "ipmgen/errors.hpp"
#include "ipmgen/solver.hpp"

namespace ipmgen {

std::string_view toString(ConstraintForm form) {
    switch (form) {
        case ConstraintForm::General: return "general";
        case ConstraintForm::Cnf: return "cnf";
        case ConstraintForm::ForbiddenTuples: return "forbidden";
    }
    return "?";
}

std::optional<ConstraintForm> parseConstraintForm(std::string_view text) {
    for (ConstraintForm f : {ConstraintForm::General, ConstraintForm::Cnf, ConstraintForm::ForbiddenTuples})
        if (text == toString(f)) return f;
    return std::nullopt;
}

std::string_view toString(RatioMode mode) { return mode == RatioMode::Max ? "max" : "band"; }

std::optional<RatioMode> parseRatioMode(std::string_view text) {
    if (text == "max") return RatioMode::Max;
    if (text == "band") return RatioMode::Band;
    return std::nullopt;
}

namespace {

bool hasCardinalityBounds(Category c) { return c != Category::UB && c != Category::BC; }

// The decimal a user typed, e.g. 0.1 -> 1/10, rather than the binary double.
Rational decimalRational(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    std::string text(buf, res.ptr);
    std::int64_t exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string::npos) {
        exponent = std::stoll(text.substr(e + 1));
        text.resize(e);
    }
    bool negative = !text.empty() && text[0] == '-';
    if (negative) text.erase(0, 1);
    if (auto dot = text.find('.'); dot != std::string::npos) {
        exponent -= static_cast<std::int64_t>(text.size() - dot - 1);
        text.erase(dot, 1);
    }
    text.erase(0, std::min(text.find_first_not_of('0'), text.size()));
    BigInt mantissa(text.empty() ? "0" : text);
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::abs(exponent)));
    Rational q = exponent >= 0 ? Rational(mantissa * scale) : Rational(mantissa, scale);
    return negative ? Rational(-q) : q;
}

std::size_t maxCardinalityFor(const GeneratorConfig& c) {
    if (!hasCardinalityBounds(c.category)) return 2;
    return c.vMax;
}

}  // namespace

std::string GeneratorConfig::effectiveName() const {
    return modelName.empty() ? std::string(longName(category)) : modelName;
}

void GeneratorConfig::validate() const {
    auto need = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    need(kMin >= 1, "kMin must be at least 1");
    need(kMin <= kMax, "kMin must not exceed kMax");
    need(isIdentifier(effectiveName()) && !isReservedWord(effectiveName()),
         "model name '" + effectiveName() + "' is not an identifier");
    if (hasCardinalityBounds(category)) {
        need(vMin >= 1, "vMin must be at least 1");
        need(vMin <= vMax, "vMin must not exceed vMax");
    }
    if (category == Category::NC) {
        need(lInt <= uInt, "lInt must not exceed uInt");
        need(lInt >= -kMaxRangeMagnitude && uInt <= kMaxRangeMagnitude, "integer bounds out of supported range");
        const std::int64_t span = uInt - lInt + 1;
        need(static_cast<std::int64_t>(vMin) <= span,
             "vMin " + std::to_string(vMin) + " exceeds the " + std::to_string(span) +
                 " values available in [" + std::to_string(lInt) + ", " + std::to_string(uInt) + "]");
    }
    if (category == Category::M) {
        need(kMax >= 2, "MCA models need at least two parameters of different cardinality (kMax >= 2)");
        need(vMin < vMax, "MCA models need differing cardinalities, so vMin must be below vMax");
    }
    if (isConstrained(category)) {
        need(cMin <= cMax, "cMin must not exceed cMax");
        need(cMax >= 1, "constrained categories need cMax >= 1");
        need(dMin <= dMax, "dMin must not exceed dMax");
        if (form == ConstraintForm::ForbiddenTuples)
            need(dMin + 1 <= kMax,
                 "forbidden tuples of complexity " + std::to_string(dMin) + " need at least " +
                     std::to_string(dMin + 1) + " parameters, but kMax is " + std::to_string(kMax));
    } else {
        need(!useTupleRatio && !useTestRatio,
             std::string("ratio checks need a constrained category; ") + std::string(longName(category)) +
                 " models always have ratio 1");
    }
    if (useTupleRatio) {
        need(tupleRatio > 0.0 && tupleRatio <= 1.0, "tuple ratio must lie in (0, 1]");
        need(strength >= 1 && strength <= kMax, "strength must lie in [1, kMax]");
        // Every parameter subset of a solvable model keeps at least one valid tuple.
        const Rational floor = Rational(1, boost::multiprecision::pow(BigInt(maxCardinalityFor(*this)),
                                                                       static_cast<unsigned>(strength)));
        need(decimalRational(tupleRatio) >= floor,
             "tuple ratio " + decimalRational(tupleRatio).str() + " is unreachable: every solvable model with at most " +
                 std::to_string(maxCardinalityFor(*this)) + " values per parameter has ratio >= " + floor.str() +
                 " at strength " + std::to_string(strength));
    }
    if (useTestRatio) mc.validate();
    if (fixedSampleCount) need(*fixedSampleCount >= 1, "fixed sample count must be positive");
    need(maxRounds >= 1 && attemptsPerRound >= 1, "attempt caps must be positive");
}

// ---------------------------------------------------------------------------
// Parameters

namespace {

struct RangeDraw {
    std::int64_t lower;
    std::int64_t upper;
};

RangeDraw randomRange(std::int64_t lInt, std::int64_t uInt, std::size_t vMin, std::size_t vMax, Rng& rng) {
    const std::int64_t span = uInt - lInt + 1;
    const std::int64_t sMin = std::max<std::int64_t>(static_cast<std::int64_t>(vMin), 1);
    const std::int64_t sMax = std::min<std::int64_t>(static_cast<std::int64_t>(vMax), span);
    if (sMin > sMax) throw ConfigError("no integer range of the requested cardinality fits the bounds");
    const std::int64_t size = rng.between(sMin, sMax);
    const std::int64_t lo = rng.between(lInt, uInt - size + 1);
    return {lo, lo + size - 1};
}

}  // namespace

std::vector<Parameter> defineParameters(Category category, std::size_t nParams, std::int64_t lInt,
                                        std::int64_t uInt, std::size_t vMin, std::size_t vMax,
                                        const Dictionary* dictionary, Rng& rng) {
    if (nParams == 0) throw ConfigError("at least one parameter is required");
    const bool boolAllowed = !hasCardinalityBounds(category) || (vMin <= 2 && 2 <= vMax);

    std::vector<ParamKind> kinds(nParams, ParamKind::Boolean);
    std::size_t uniformCard = 0;
    switch (category) {
        case Category::UB:
        case Category::BC: break;
        case Category::UA:
            uniformCard = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(vMin),
                                                               static_cast<std::int64_t>(vMax)));
            std::fill(kinds.begin(), kinds.end(), ParamKind::Enumerative);
            break;
        case Category::M:
        case Category::MC: {
            for (auto& k : kinds) k = boolAllowed && rng.coin() ? ParamKind::Boolean : ParamKind::Enumerative;
            if (std::none_of(kinds.begin(), kinds.end(), [](ParamKind k) { return k == ParamKind::Enumerative; }))
                kinds[rng.below(nParams)] = ParamKind::Enumerative;
            break;
        }
        case Category::NC: {
            std::vector<ParamKind> options{ParamKind::Enumerative, ParamKind::IntegerRange};
            if (boolAllowed) options.insert(options.begin(), ParamKind::Boolean);
            for (auto& k : kinds) k = rng.pick(options);
            if (std::none_of(kinds.begin(), kinds.end(), [](ParamKind k) { return k == ParamKind::IntegerRange; }))
                kinds[rng.below(nParams)] = ParamKind::IntegerRange;
            break;
        }
    }

    std::set<std::string> usedNames;
    std::vector<std::uint8_t> usedEntries(dictionary ? dictionary->size() : 0, 0);
    auto fromDictionary = [&](auto fits) -> const DictionaryEntry* {
        if (!dictionary) return nullptr;
        std::vector<std::size_t> candidates;
        for (std::size_t i = 0; i < dictionary->size(); ++i)
            if (!usedEntries[i] && !usedNames.count((*dictionary)[i].name) && fits((*dictionary)[i]))
                candidates.push_back(i);
        if (candidates.empty()) return nullptr;
        const std::size_t pick = rng.pick(candidates);
        usedEntries[pick] = 1;
        return &(*dictionary)[pick];
    };
    auto cardFits = [&](std::size_t card) {
        return uniformCard ? card == uniformCard : (vMin <= card && card <= vMax);
    };

    std::vector<Parameter> out;
    std::vector<std::size_t> synthetic;  // positions named later, after dictionary names are known
    std::vector<std::optional<Parameter>> slots(nParams);
    std::vector<std::size_t> enumCards(nParams, 0);
    std::vector<RangeDraw> ranges(nParams, RangeDraw{0, 0});
    for (std::size_t i = 0; i < nParams; ++i) {
        switch (kinds[i]) {
            case ParamKind::Boolean:
                if (auto e = fromDictionary([](const DictionaryEntry& d) {
                        return d.type == DictionaryEntry::Type::Boolean;
                    })) {
                    slots[i] = Parameter::boolean(e->name);
                }
                break;
            case ParamKind::Enumerative:
                if (auto e = fromDictionary([&](const DictionaryEntry& d) {
                        return d.type == DictionaryEntry::Type::Enum && cardFits(d.cardinality());
                    })) {
                    slots[i] = Parameter::enumerative(e->name, e->values);
                } else {
                    enumCards[i] = uniformCard ? uniformCard
                                               : static_cast<std::size_t>(rng.between(
                                                     static_cast<std::int64_t>(vMin), static_cast<std::int64_t>(vMax)));
                }
                break;
            case ParamKind::IntegerRange:
                if (auto e = fromDictionary([&](const DictionaryEntry& d) {
                        return d.type == DictionaryEntry::Type::Integer && d.lowerBound >= lInt &&
                               d.upperBound <= uInt && cardFits(d.cardinality());
                    })) {
                    slots[i] = Parameter::range(e->name, e->lowerBound, e->upperBound);
                } else {
                    ranges[i] = randomRange(lInt, uInt, vMin, vMax, rng);
                }
                break;
        }
        if (slots[i]) usedNames.insert(slots[i]->name());
    }
    for (std::size_t i = 0; i < nParams; ++i) {
        if (slots[i]) {
            out.push_back(std::move(*slots[i]));
            continue;
        }
        std::string name = "PAR" + std::to_string(i);
        for (char suffix = 'a'; usedNames.count(name); ++suffix) name = "PAR" + std::to_string(i) + suffix;
        usedNames.insert(name);
        switch (kinds[i]) {
            case ParamKind::Boolean: out.push_back(Parameter::boolean(name)); break;
            case ParamKind::Enumerative: {
                std::vector<std::string> labels;
                for (std::size_t j = 0; j < enumCards[i]; ++j) labels.push_back(name + "_" + std::to_string(j));
                out.push_back(Parameter::enumerative(name, std::move(labels)));
                break;
            }
            case ParamKind::IntegerRange:
                out.push_back(Parameter::range(name, ranges[i].lower, ranges[i].upper));
                break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Constraints

namespace {

const Relation kAllRelations[] = {Relation::Eq, Relation::Ne, Relation::Lt,
                                  Relation::Le, Relation::Gt, Relation::Ge};
const Connective kConnectives[] = {Connective::And, Connective::Or, Connective::Implies, Connective::Iff};

std::int64_t applyOp(ArithOp op, std::int64_t a, std::int64_t b) {
    switch (op) {
        case ArithOp::Add: return a + b;
        case ArithOp::Sub: return a - b;
        case ArithOp::Mul: return a * b;
    }
    return 0;
}

class ConstraintMaker {
public:
    ConstraintMaker(const std::vector<Parameter>& params, Category category, bool useCBtwP, Rng& rng)
        : params_(params), category_(category), useCBtwP_(useCBtwP), rng_(rng) {
        for (std::size_t i = 0; i < params.size(); ++i)
            if (params[i].kind() == ParamKind::IntegerRange) ranges_.push_back(i);
    }

    Expr general(std::size_t d) {
        if (d == 0) return atom(true);
        const Connective op = kConnectives[rng_.below(4)];
        const std::size_t rest = d - 1;
        Expr lhs = general(rest - rest / 2);
        Expr rhs = general(rest / 2);
        return Expr::binary(op, std::move(lhs), std::move(rhs));
    }

    Expr cnf(std::size_t d) {
        const std::size_t atoms = d + 1;
        const std::size_t clauses = static_cast<std::size_t>(rng_.between(1, static_cast<std::int64_t>(atoms)));
        // Clause sizes: a uniformly random composition of `atoms` into `clauses` parts.
        std::vector<std::size_t> cuts(d);
        for (std::size_t i = 0; i < d; ++i) cuts[i] = i + 1;
        rng_.shuffle(cuts);
        cuts.resize(clauses - 1);
        std::sort(cuts.begin(), cuts.end());
        cuts.push_back(atoms);
        std::optional<Expr> conj;
        std::size_t prev = 0;
        for (std::size_t cut : cuts) {
            std::optional<Expr> clause;
            for (std::size_t a = prev; a < cut; ++a) {
                Expr x = atom(false);
                clause = clause ? Expr::binary(Connective::Or, std::move(*clause), std::move(x)) : std::move(x);
            }
            prev = cut;
            conj = conj ? Expr::binary(Connective::And, std::move(*conj), std::move(*clause)) : std::move(*clause);
        }
        return std::move(*conj);
    }

    // A tuple already excluded by an earlier forbidden tuple of this model
    // (same or fewer parameters, matching values) is redrawn a few times.
    Expr forbiddenTuple(std::size_t d) {
        constexpr int kRedraws = 10;
        std::vector<std::size_t> order(params_.size());
        Tuple tuple;
        for (int attempt = 0;; ++attempt) {
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            rng_.shuffle(order);
            std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(d + 1));
            std::sort(chosen.begin(), chosen.end());
            tuple.clear();
            for (std::size_t p : chosen) tuple.push_back({p, static_cast<std::size_t>(rng_.below(params_[p].cardinality()))});
            if (attempt == kRedraws || !alreadyForbidden(tuple)) break;
        }
        forbidden_.push_back(tuple);
        const bool negatedConjunction = rng_.coin();
        const Relation rel = negatedConjunction ? Relation::Eq : Relation::Ne;
        const Connective join = negatedConjunction ? Connective::And : Connective::Or;
        std::optional<Expr> body;
        for (const auto& e : tuple) {
            Expr x = Expr::compare(rel, Term::param(e.param), valueTerm(e.param, e.value));
            body = body ? Expr::binary(join, std::move(*body), std::move(x)) : std::move(x);
        }
        return negatedConjunction ? Expr::negate(std::move(*body)) : std::move(*body);
    }

private:
    bool alreadyForbidden(const Tuple& tuple) const {
        return std::any_of(forbidden_.begin(), forbidden_.end(), [&](const Tuple& f) {
            return std::all_of(f.begin(), f.end(), [&](const TupleEntry& e) {
                return std::find(tuple.begin(), tuple.end(), e) != tuple.end();
            });
        });
    }

    Term randomValue(std::size_t p) {
        return valueTerm(p, static_cast<std::size_t>(rng_.below(params_[p].cardinality())));
    }

    Term valueTerm(std::size_t p, std::size_t v) const {
        const Parameter& par = params_[p];
        switch (par.kind()) {
            case ParamKind::Boolean: return Term::boolean(v == 1);
            case ParamKind::Enumerative: return Term::label(p, v);
            case ParamKind::IntegerRange: return Term::integer(par.lower() + static_cast<std::int64_t>(v));
        }
        return Term::boolean(false);
    }

    // A different parameter of the same kind whose values can coincide with x's.
    std::optional<std::size_t> partner(std::size_t x) {
        std::vector<std::size_t> out;
        const Parameter& px = params_[x];
        for (std::size_t y = 0; y < params_.size(); ++y) {
            if (y == x || params_[y].kind() != px.kind()) continue;
            if (px.kind() == ParamKind::Enumerative) {
                const auto& ly = params_[y].labels();
                bool shared = std::any_of(px.labels().begin(), px.labels().end(), [&](const std::string& l) {
                    return std::find(ly.begin(), ly.end(), l) != ly.end();
                });
                if (!shared) continue;
            }
            out.push_back(y);
        }
        if (out.empty()) return std::nullopt;
        return rng_.pick(out);
    }

    Expr maybeNegate(Expr e, bool allowed) {
        if (allowed && rng_.coin()) return Expr::negate(std::move(e));
        return e;
    }

    // General form negates any atom half the time; CNF only Boolean literals.
    Expr atom(bool general) {
        const std::size_t x = static_cast<std::size_t>(rng_.below(params_.size()));
        const Parameter& px = params_[x];
        if (category_ == Category::BC) {
            if (useCBtwP_ && rng_.coin()) {
                if (auto y = partner(x)) {
                    const Relation rel = rng_.coin() ? Relation::Eq : Relation::Ne;
                    return maybeNegate(Expr::compare(rel, Term::param(x), Term::param(*y)), general);
                }
            }
            return maybeNegate(Expr::literal(Term::param(x)), true);
        }
        if (px.kind() != ParamKind::IntegerRange) {
            const Relation rel = rng_.coin() ? Relation::Eq : Relation::Ne;
            if (useCBtwP_ && rng_.coin()) {
                if (auto y = partner(x))
                    return maybeNegate(Expr::compare(rel, Term::param(x), Term::param(*y)), general);
            }
            return maybeNegate(Expr::compare(rel, Term::param(x), randomValue(x)), general);
        }
        // Integer range, NC only.
        std::vector<std::size_t> others;
        for (std::size_t r : ranges_)
            if (r != x) others.push_back(r);
        const bool betweenOk = useCBtwP_ && !others.empty();
        const std::size_t shape = static_cast<std::size_t>(rng_.below(betweenOk ? 3 : 2));
        const Relation rel = kAllRelations[rng_.below(6)];
        if (shape == 0) return maybeNegate(Expr::compare(rel, Term::param(x), randomValue(x)), general);
        if (shape == 2) {
            const std::size_t y = rng_.pick(others);
            return maybeNegate(Expr::compare(rel, Term::param(x), Term::param(y)), general);
        }
        // x op (y | k) rel C, with C the value of the left side at a random point.
        const ArithOp op = static_cast<ArithOp>(rng_.below(3));
        const std::int64_t x0 = rng_.between(px.lower(), px.upper());
        Term second = Term::integer(0);
        std::int64_t y0 = 0;
        if (betweenOk && rng_.coin()) {
            const std::size_t y = rng_.pick(others);
            y0 = rng_.between(params_[y].lower(), params_[y].upper());
            second = Term::param(y);
        } else {
            y0 = rng_.between(px.lower(), px.upper());
            second = Term::integer(y0);
        }
        const std::int64_t c = applyOp(op, x0, y0);
        return maybeNegate(Expr::compare(rel, Term::arith(op, Term::param(x), std::move(second)), Term::integer(c)),
                           general);
    }

    const std::vector<Parameter>& params_;
    Category category_;
    bool useCBtwP_;
    Rng& rng_;
    std::vector<std::size_t> ranges_;
    std::vector<Tuple> forbidden_;
};

}  // namespace

ConstraintDraw defineConstraints(const std::vector<Parameter>& params, std::size_t nCnstr, std::size_t dMin,
                                 std::size_t dMax, bool useCBtwP, ConstraintForm form, Category category,
                                 Rng& rng) {
    if (params.empty()) throw ConfigError("constraints need at least one parameter");
    if (dMin > dMax) throw ConfigError("dMin must not exceed dMax");
    ConstraintMaker maker(params, category, useCBtwP, rng);
    ConstraintDraw out;
    for (std::size_t i = 0; i < nCnstr; ++i) {
        std::size_t d = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(dMin),
                                                            static_cast<std::int64_t>(dMax)));
        switch (form) {
            case ConstraintForm::General: out.constraints.push_back(maker.general(d)); break;
            case ConstraintForm::Cnf: out.constraints.push_back(maker.cnf(d)); break;
            case ConstraintForm::ForbiddenTuples:
                if (d + 1 > params.size()) {
                    d = params.size() - 1;
                    ++out.clamped;
                }
                out.constraints.push_back(maker.forbiddenTuple(d));
                break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Generation loop

std::optional<std::string> structuralViolation(const GeneratorConfig& config, const Ipm& ipm) {
    const StructuralProfile s = profile(ipm);
    auto range = [](auto lo, auto hi) { return "[" + std::to_string(lo) + ", " + std::to_string(hi) + "]"; };
    if (s.category != config.category)
        return "category: expected " + std::string(longName(config.category)) + ", got " +
               std::string(longName(s.category));
    if (s.parameterCount < config.kMin || s.parameterCount > config.kMax)
        return "parameter count: " + std::to_string(s.parameterCount) + " outside " + range(config.kMin, config.kMax);
    if (hasCardinalityBounds(config.category) && s.parameterCount &&
        (s.minCardinality < config.vMin || s.maxCardinality > config.vMax))
        return "cardinality: " + range(s.minCardinality, s.maxCardinality) + " outside " +
               range(config.vMin, config.vMax);
    if (config.category == Category::NC && s.minInt && (*s.minInt < config.lInt || *s.maxInt > config.uInt))
        return "integer bounds: " + range(*s.minInt, *s.maxInt) + " outside " + range(config.lInt, config.uInt);
    if (!isConstrained(config.category)) {
        if (s.constraintCount != 0) return "constraint count: unconstrained category has constraints";
        return std::nullopt;
    }
    if (s.constraintCount < config.cMin || s.constraintCount > config.cMax)
        return "constraint count: " + std::to_string(s.constraintCount) + " outside " + range(config.cMin, config.cMax);
    if (s.minComplexity && (*s.minComplexity < config.dMin || *s.maxComplexity > config.dMax))
        return "complexity: " + range(*s.minComplexity, *s.maxComplexity) + " outside " +
               range(config.dMin, config.dMax);
    if (config.form == ConstraintForm::Cnf && !s.allCnf) return "form: constraint not in CNF";
    if (config.form == ConstraintForm::ForbiddenTuples && !s.allForbiddenTuples)
        return "form: constraint is not a forbidden tuple";
    return std::nullopt;
}

namespace {

std::string reasonKey(const std::string& message) { return message.substr(0, message.find(':')); }

std::string formatRatio(double r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

}  // namespace

std::optional<GeneratedModel> generateOne(const GeneratorConfig& config, std::size_t index,
                                          GenerationFailure* failure) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(substreamSeed(config.seed, index));
    const std::size_t cap = config.maxRounds * config.attemptsPerRound;
    const std::string name = config.effectiveName() + "_" + std::to_string(index);
    const Dictionary* dict = config.dictionary ? &*config.dictionary : nullptr;
    const Rational tupleThreshold = decimalRational(config.tupleRatio);
    const Rational testThreshold = decimalRational(config.mc.targetRatio);
    const Rational eps = decimalRational(config.mc.maxError);
    std::map<std::string, std::size_t> rejections;
    auto reject = [&](const std::string& why) { ++rejections[why]; };

    for (std::size_t attempt = 1; attempt <= cap; ++attempt) {
        const std::size_t k = static_cast<std::size_t>(
            rng.between(static_cast<std::int64_t>(config.kMin), static_cast<std::int64_t>(config.kMax)));
        std::vector<Parameter> params =
            defineParameters(config.category, k, config.lInt, config.uInt, config.vMin, config.vMax, dict, rng);
        ConstraintDraw draw;
        if (isConstrained(config.category)) {
            const std::size_t n = static_cast<std::size_t>(
                rng.between(static_cast<std::int64_t>(config.cMin), static_cast<std::int64_t>(config.cMax)));
            draw = defineConstraints(params, n, config.dMin, config.dMax, config.useCBtwP, config.form,
                                     config.category, rng);
        }
        const std::uint64_t mcSeed = rng();

        std::optional<Ipm> ipm;
        try {
            ipm.emplace(name, std::move(params), std::move(draw.constraints));
        } catch (const ModelError&) {
            reject("ill-formed candidate");
            continue;
        }
        if (auto v = structuralViolation(config, *ipm)) {
            reject(reasonKey(*v));
            continue;
        }

        ModelReport report;
        report.index = index;
        report.attempts = attempt;
        report.clampedConstraints = draw.clamped;
        try {
            if (!Solver(*ipm, config.solver).solve()) {
                reject("unsolvable");
                continue;
            }
            if (config.useTestRatio) {
                bool ok = false;
                try {
                    ExactRatio exact = testValidityRatioExact(*ipm, config.exact);
                    report.testRatio = static_cast<double>(exact.value);
                    report.testMethod = exact.method;
                    ok = config.ratioMode == RatioMode::Max
                             ? exact.value <= testThreshold
                             : ((1 - eps) * testThreshold <= exact.value && exact.value <= (1 + eps) * testThreshold);
                } catch (const MethodUnavailable&) {
                    McOptions mo;
                    mo.fixedSampleCount = config.fixedSampleCount;
                    McResult mc = testValidityRatioMc(*ipm, config.mc, mcSeed, mo);
                    report.testRatio = mc.estimate;
                    report.testMethod = RatioMethod::MonteCarlo;
                    report.mc = mc;
                    ok = config.ratioMode == RatioMode::Max ? mc.estimate <= config.mc.targetRatio : mc.accepted;
                }
                if (!ok) {
                    reject(config.ratioMode == RatioMode::Max
                               ? "test ratio above " + formatRatio(config.mc.targetRatio)
                               : "test ratio outside the band around " + formatRatio(config.mc.targetRatio));
                    continue;
                }
            }
            if (config.useTupleRatio) {
                if (config.strength > ipm->size()) {
                    reject("strength exceeds parameter count");
                    continue;
                }
                TupleRatioBound b = tupleValidityRatioAtMost(*ipm, config.strength, tupleThreshold, config.tuple);
                if (!b.atMost) {
                    reject("tuple ratio above " + formatRatio(config.tupleRatio));
                    continue;
                }
                report.tupleRatio = b.exact;
                if (!b.exact) report.tupleRatioAtMost = tupleThreshold;
            }
        } catch (const ResourceError&) {
            reject("resource budget exceeded");
            continue;
        }
        report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return GeneratedModel{std::move(*ipm), std::move(report)};
    }

    if (failure) {
        std::vector<std::pair<std::size_t, std::string>> sorted;
        for (auto& [why, n] : rejections) sorted.emplace_back(n, why);
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        std::ostringstream os;
        os << "benchmark " << index << ": no candidate met every requirement in " << cap << " attempts";
        for (std::size_t i = 0; i < sorted.size(); ++i)
            os << (i ? ", " : "; rejected for ") << sorted[i].second << " (" << sorted[i].first << ")";
        failure->index = index;
        failure->attempts = cap;
        failure->message = os.str();
    }
    return std::nullopt;
}

GenerationResult generateBenchmarks(const GeneratorConfig& config) {
    config.validate();
    const std::size_t n = config.nBenchmarks;
    std::vector<std::optional<GeneratedModel>> slots(n);
    std::vector<std::optional<GenerationFailure>> failed(n);
    auto work = [&](std::size_t i) {
        GenerationFailure f;
        slots[i] = generateOne(config, i, &f);
        if (!slots[i]) failed[i] = std::move(f);
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex errorMutex;
        std::vector<std::thread> workers;
        for (unsigned j = 0; j < jobs; ++j) {
            workers.emplace_back([&] {
                for (std::size_t i; (i = next++) < n;) {
                    try {
                        work(i);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(errorMutex);
                        if (!error) error = std::current_exception();
                    }
                }
            });
        }
        for (auto& w : workers) w.join();
        if (error) std::rethrow_exception(error);
    }
    GenerationResult out;
    for (std::size_t i = 0; i < n; ++i) {
        if (slots[i]) out.models.push_back(std::move(*slots[i]));
        if (failed[i]) out.failures.push_back(std::move(*failed[i]));
    }
    return out;
}

GeneratorConfig configFromReport(const AnalysisReport& report) {
    const StructuralProfile& s = report.structure;
    GeneratorConfig c;
    c.category = s.category;
    if (isIdentifier(report.modelName) && !isReservedWord(report.modelName)) c.modelName = report.modelName;
    c.kMin = c.kMax = std::max<std::size_t>(s.parameterCount, 1);
    if (s.parameterCount) {
        c.vMin = s.minCardinality;
        c.vMax = s.maxCardinality;
    }
    if (s.minInt) {
        c.lInt = *s.minInt;
        c.uInt = *s.maxInt;
    }
    if (isConstrained(s.category)) {
        c.cMin = c.cMax = s.constraintCount;
        c.dMin = s.minComplexity.value_or(0);
        c.dMax = s.maxComplexity.value_or(0);
        c.form = s.allForbiddenTuples ? ConstraintForm::ForbiddenTuples
                 : s.allCnf           ? ConstraintForm::Cnf
                                      : ConstraintForm::General;
        c.useCBtwP = s.hasBetweenParams;
    }
    c.strength = report.strength;
    if (report.tupleRatio && *report.tupleRatio > 0) c.tupleRatio = static_cast<double>(*report.tupleRatio);
    if (auto v = report.testRatioValue(); v && *v > 0) c.mc.targetRatio = *v;
    c.mc.probability = report.mcParams.probability;
    c.mc.maxError = report.mcParams.maxError;
    return c;
}

}  // namespace ipmgen
