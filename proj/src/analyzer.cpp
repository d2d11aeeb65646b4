#include "ipmgen/analyzer.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ipmgen/errors.hpp"

namespace ipmgen {

std::string_view abbreviation(Category category) {
    switch (category) {
        case Category::UB: return "UB";
        case Category::UA: return "UA";
        case Category::M: return "M";
        case Category::BC: return "BC";
        case Category::MC: return "MC";
        case Category::NC: return "NC";
    }
    return "?";
}

std::string_view longName(Category category) {
    switch (category) {
        case Category::UB: return "UNIFORM_BOOLEAN";
        case Category::UA: return "UNIFORM_ALL";
        case Category::M: return "MCA";
        case Category::BC: return "BOOLC";
        case Category::MC: return "MCAC";
        case Category::NC: return "NUMC";
    }
    return "?";
}

std::optional<Category> parseCategory(std::string_view text) {
    for (Category c : {Category::UB, Category::UA, Category::M, Category::BC, Category::MC, Category::NC})
        if (text == abbreviation(c) || text == longName(c)) return c;
    return std::nullopt;
}

bool isConstrained(Category category) {
    return category == Category::BC || category == Category::MC || category == Category::NC;
}

Category inferCategory(const Ipm& ipm) {
    bool allBool = true;
    bool anyRange = false;
    bool uniform = true;
    for (const auto& p : ipm.parameters()) {
        allBool = allBool && p.kind() == ParamKind::Boolean;
        anyRange = anyRange || p.kind() == ParamKind::IntegerRange;
        uniform = uniform && p.cardinality() == ipm.parameters().front().cardinality();
    }
    if (ipm.constraints().empty()) {
        if (allBool) return Category::UB;
        return uniform ? Category::UA : Category::M;
    }
    if (allBool) return Category::BC;
    return anyRange ? Category::NC : Category::MC;
}

namespace {

bool isAtom(const Expr& e) {
    if (e.kind() == Expr::Kind::Not) {
        const Expr& c = e.child();
        return c.kind() == Expr::Kind::Compare || c.kind() == Expr::Kind::Literal;
    }
    return e.kind() == Expr::Kind::Compare || e.kind() == Expr::Kind::Literal;
}

bool isClause(const Expr& e) {
    if (e.kind() == Expr::Kind::Binary && e.connective() == Connective::Or)
        return isClause(e.lhs()) && isClause(e.rhs());
    return isAtom(e);
}

bool isConstant(const Term& t) {
    return t.kind() == Term::Kind::Bool || t.kind() == Term::Kind::Int || t.kind() == Term::Kind::Label;
}

// Parameter of a `P rel const` comparison with the given relation, if any.
std::optional<std::size_t> paramConstCompare(const Expr& e, Relation rel) {
    if (e.kind() != Expr::Kind::Compare || e.relation() != rel) return std::nullopt;
    if (e.left().kind() == Term::Kind::Param && isConstant(e.right())) return e.left().paramIndex();
    if (e.right().kind() == Term::Kind::Param && isConstant(e.left())) return e.right().paramIndex();
    return std::nullopt;
}

std::optional<std::size_t> literalParam(const Expr& e) {
    if (e.kind() == Expr::Kind::Literal && e.term().kind() == Term::Kind::Param)
        return e.term().paramIndex();
    return std::nullopt;
}

// `P = v` shapes: comparison, bare literal, negated literal.
std::optional<std::size_t> equalityParam(const Expr& e) {
    if (auto p = paramConstCompare(e, Relation::Eq)) return p;
    if (auto p = literalParam(e)) return p;
    if (e.kind() == Expr::Kind::Not) return literalParam(e.child());
    return std::nullopt;
}

// `P != v` shapes: comparison, negated equality, or a literal.
std::optional<std::size_t> inequalityParam(const Expr& e) {
    if (auto p = paramConstCompare(e, Relation::Ne)) return p;
    if (e.kind() == Expr::Kind::Not) {
        if (auto p = paramConstCompare(e.child(), Relation::Eq)) return p;
        return literalParam(e.child());
    }
    return literalParam(e);
}

bool collectChain(const Expr& e, Connective op,
                  std::optional<std::size_t> (*atom)(const Expr&), std::set<std::size_t>& seen) {
    if (e.kind() == Expr::Kind::Binary && e.connective() == op)
        return collectChain(e.lhs(), op, atom, seen) && collectChain(e.rhs(), op, atom, seen);
    auto p = atom(e);
    return p && seen.insert(*p).second;
}

bool mentionsParam(const Term& t) {
    if (t.kind() == Term::Kind::Param) return true;
    if (t.kind() == Term::Kind::Arith) return mentionsParam(t.lhs()) || mentionsParam(t.rhs());
    return false;
}

void scanAtoms(const Expr& e, StructuralProfile& out) {
    switch (e.kind()) {
        case Expr::Kind::Not: scanAtoms(e.child(), out); return;
        case Expr::Kind::Binary:
            scanAtoms(e.lhs(), out);
            scanAtoms(e.rhs(), out);
            return;
        case Expr::Kind::Literal: return;
        case Expr::Kind::Compare:
            if (e.left().kind() == Term::Kind::Arith || e.right().kind() == Term::Kind::Arith)
                out.hasArithmetic = true;
            if (mentionsParam(e.left()) && mentionsParam(e.right())) out.hasBetweenParams = true;
            return;
    }
}

}  // namespace

bool isCnf(const Expr& expr) {
    if (expr.kind() == Expr::Kind::Binary && expr.connective() == Connective::And)
        return isCnf(expr.lhs()) && isCnf(expr.rhs());
    return isClause(expr);
}

bool isForbiddenTuple(const Expr& expr) {
    std::set<std::size_t> seen;
    if (expr.kind() == Expr::Kind::Not &&
        collectChain(expr.child(), Connective::And, &equalityParam, seen))
        return true;
    seen.clear();
    return collectChain(expr, Connective::Or, &inequalityParam, seen);
}

StructuralProfile profile(const Ipm& ipm) {
    StructuralProfile out;
    out.category = inferCategory(ipm);
    out.parameterCount = ipm.size();
    out.constraintCount = ipm.constraints().size();
    bool first = true;
    for (const auto& p : ipm.parameters()) {
        switch (p.kind()) {
            case ParamKind::Boolean: ++out.booleanCount; break;
            case ParamKind::Enumerative: ++out.enumCount; break;
            case ParamKind::IntegerRange:
                ++out.rangeCount;
                out.minInt = out.minInt ? std::min(*out.minInt, p.lower()) : p.lower();
                out.maxInt = out.maxInt ? std::max(*out.maxInt, p.upper()) : p.upper();
                break;
        }
        out.minCardinality = first ? p.cardinality() : std::min(out.minCardinality, p.cardinality());
        out.maxCardinality = first ? p.cardinality() : std::max(out.maxCardinality, p.cardinality());
        first = false;
    }
    for (const Expr& c : ipm.constraints()) {
        const std::size_t d = complexity(c);
        out.minComplexity = out.minComplexity ? std::min(*out.minComplexity, d) : d;
        out.maxComplexity = out.maxComplexity ? std::max(*out.maxComplexity, d) : d;
        out.allCnf = out.allCnf && isCnf(c);
        out.allForbiddenTuples = out.allForbiddenTuples && isForbiddenTuple(c);
        scanAtoms(c, out);
    }
    return out;
}

std::optional<double> AnalysisReport::testRatioValue() const {
    if (testRatioExact) return static_cast<double>(testRatioExact->value);
    if (testRatioMc) return testRatioMc->estimate;
    return std::nullopt;
}

AnalysisReport analyze(const Ipm& ipm, const AnalysisOptions& options) {
    AnalysisReport r;
    r.modelName = ipm.name();
    r.structure = profile(ipm);
    r.strength = options.strength;
    r.mcParams = options.mc;
    if (!options.computeRatios) return r;

    if (options.strength == 0 || options.strength > ipm.size()) {
        r.tupleRatioError = "strength " + std::to_string(options.strength) +
                            " is outside [1, parameter count]";
    } else {
        try {
            r.tupleRatio = tupleValidityRatio(ipm, options.strength, options.tuple);
        } catch (const Error& e) {
            r.tupleRatioError = e.what();
        }
    }

    try {
        r.testRatioExact = testValidityRatioExact(ipm, options.exact);
        r.testMethod = r.testRatioExact->method;
    } catch (const MethodUnavailable&) {
        try {
            McOptions mo;
            mo.fixedSampleCount = options.fixedSampleCount;
            r.testRatioMc = testValidityRatioMc(ipm, options.mc, options.seed, mo);
            r.testMethod = RatioMethod::MonteCarlo;
        } catch (const std::exception& e) {
            r.testRatioError = e.what();
        }
    } catch (const Error& e) {
        r.testRatioError = e.what();
    }
    return r;
}

namespace {

nlohmann::json rationalJson(const Rational& q) {
    return {{"value", static_cast<double>(q)},
            {"numerator", boost::multiprecision::numerator(q).str()},
            {"denominator", boost::multiprecision::denominator(q).str()}};
}

template <class T>
nlohmann::json rangeJson(const std::optional<T>& lo, const std::optional<T>& hi) {
    if (!lo || !hi) return nullptr;
    return {{"min", *lo}, {"max", *hi}};
}

}  // namespace

std::string toJson(const AnalysisReport& r) {
    const StructuralProfile& s = r.structure;
    nlohmann::ordered_json j;
    j["model"] = r.modelName;
    j["category"] = abbreviation(s.category);
    j["categoryName"] = longName(s.category);
    j["parameters"] = s.parameterCount;
    j["constraints"] = s.constraintCount;
    j["booleans"] = s.booleanCount;
    j["enumeratives"] = s.enumCount;
    j["ranges"] = s.rangeCount;
    j["cardinality"] = s.parameterCount ? nlohmann::json{{"min", s.minCardinality}, {"max", s.maxCardinality}}
                                        : nlohmann::json(nullptr);
    j["integerBounds"] = rangeJson(s.minInt, s.maxInt);
    j["complexity"] = rangeJson(s.minComplexity, s.maxComplexity);
    j["allCnf"] = s.allCnf;
    j["allForbiddenTuples"] = s.allForbiddenTuples;
    j["hasBetweenParams"] = s.hasBetweenParams;
    j["hasArithmetic"] = s.hasArithmetic;

    nlohmann::ordered_json tp;
    tp["strength"] = r.strength;
    if (r.tupleRatio) {
        const auto q = rationalJson(*r.tupleRatio);
        for (auto& [k, v] : q.items()) tp[k] = v;
    }
    if (r.tupleRatioError) tp["error"] = *r.tupleRatioError;
    j["tupleRatio"] = tp;

    nlohmann::ordered_json ts;
    if (r.testMethod) ts["method"] = toString(*r.testMethod);
    if (r.testRatioExact) {
        const auto q = rationalJson(r.testRatioExact->value);
        for (auto& [k, v] : q.items()) ts[k] = v;
        ts["validTests"] = r.testRatioExact->valid.str();
        ts["totalTests"] = r.testRatioExact->total.str();
    }
    if (r.testRatioMc) {
        ts["value"] = r.testRatioMc->estimate;
        ts["samples"] = r.testRatioMc->sampleCount;
        ts["validSamples"] = r.testRatioMc->validCount;
        ts["seed"] = r.testRatioMc->seed;
        ts["target"] = r.mcParams.targetRatio;
        ts["probability"] = r.mcParams.probability;
        ts["maxError"] = r.mcParams.maxError;
        ts["withinBand"] = r.testRatioMc->accepted;
    }
    if (r.testRatioError) ts["error"] = *r.testRatioError;
    j["testRatio"] = ts;
    return j.dump(2) + "\n";
}

std::string toTable(const AnalysisReport& r) {
    const StructuralProfile& s = r.structure;
    std::ostringstream os;
    auto row = [&](std::string_view key, const std::string& value) {
        os << std::left << std::setw(22) << key << value << '\n';
    };
    auto span = [](auto lo, auto hi) { return std::to_string(lo) + " .. " + std::to_string(hi); };
    row("model", r.modelName);
    row("category", std::string(abbreviation(s.category)) + " (" + std::string(longName(s.category)) + ")");
    row("parameters", std::to_string(s.parameterCount) + " (" + std::to_string(s.booleanCount) +
                          " Boolean, " + std::to_string(s.enumCount) + " enum, " +
                          std::to_string(s.rangeCount) + " range)");
    row("constraints", std::to_string(s.constraintCount));
    if (s.parameterCount) row("cardinality", span(s.minCardinality, s.maxCardinality));
    if (s.minInt) row("integer bounds", span(*s.minInt, *s.maxInt));
    if (s.minComplexity) row("complexity", span(*s.minComplexity, *s.maxComplexity));
    row("all CNF", s.allCnf ? "yes" : "no");
    row("all forbidden tuples", s.allForbiddenTuples ? "yes" : "no");
    row("between parameters", s.hasBetweenParams ? "yes" : "no");
    row("arithmetic", s.hasArithmetic ? "yes" : "no");
    const std::string tpKey = "tuple ratio (t=" + std::to_string(r.strength) + ")";
    if (r.tupleRatio) {
        std::ostringstream v;
        v << static_cast<double>(*r.tupleRatio) << " (" << *r.tupleRatio << ")";
        row(tpKey, v.str());
    } else if (r.tupleRatioError) {
        row(tpKey, "unavailable: " + *r.tupleRatioError);
    }
    if (r.testRatioExact) {
        std::ostringstream v;
        v << static_cast<double>(r.testRatioExact->value) << " (" << r.testRatioExact->valid << "/"
          << r.testRatioExact->total << ", " << toString(r.testRatioExact->method) << ")";
        row("test ratio", v.str());
    } else if (r.testRatioMc) {
        std::ostringstream v;
        v << r.testRatioMc->estimate << " (" << r.testRatioMc->validCount << "/"
          << r.testRatioMc->sampleCount << " samples, monte-carlo)";
        row("test ratio", v.str());
    } else if (r.testRatioError) {
        row("test ratio", "unavailable: " + *r.testRatioError);
    }
    return os.str();
}

}  // namespace ipmgen
