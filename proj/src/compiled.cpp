#include "compiled.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace ipmgen::detail {

namespace {

struct Interval {
    BigInt lo;
    BigInt hi;
};

bool fitsInt64(const Interval& i) {
    static const BigInt kMin = std::numeric_limits<std::int64_t>::min();
    static const BigInt kMax = std::numeric_limits<std::int64_t>::max();
    return i.lo >= kMin && i.hi <= kMax;
}

// Bounds of a term over all assignments; enum/bool terms never reach here.
Interval termBounds(const Ipm& ipm, const Term& t) {
    switch (t.kind()) {
        case Term::Kind::Param: {
            const Parameter& p = ipm.parameter(t.paramIndex());
            if (p.kind() == ParamKind::IntegerRange) return {BigInt(p.lower()), BigInt(p.upper())};
            return {BigInt(0), BigInt(std::max<std::size_t>(p.cardinality(), 1) - 1)};
        }
        case Term::Kind::Int: return {BigInt(t.intValue()), BigInt(t.intValue())};
        case Term::Kind::Bool: return {BigInt(0), BigInt(1)};
        case Term::Kind::Label: return {BigInt(0), BigInt(0)};
        case Term::Kind::Arith: {
            Interval a = termBounds(ipm, t.lhs());
            Interval b = termBounds(ipm, t.rhs());
            switch (t.arithOp()) {
                case ArithOp::Add: return {a.lo + b.lo, a.hi + b.hi};
                case ArithOp::Sub: return {a.lo - b.hi, a.hi - b.lo};
                case ArithOp::Mul: {
                    BigInt c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
                    return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
                }
            }
        }
    }
    return {BigInt(0), BigInt(0)};
}

bool termIsWide(const Ipm& ipm, const Term& t) {
    if (t.kind() != Term::Kind::Arith) return false;
    return !fitsInt64(termBounds(ipm, t)) || termIsWide(ipm, t.lhs()) || termIsWide(ipm, t.rhs());
}

template <class T>
bool relate(Relation rel, const T& l, const T& r) {
    switch (rel) {
        case Relation::Eq: return l == r;
        case Relation::Ne: return l != r;
        case Relation::Lt: return l < r;
        case Relation::Le: return l <= r;
        case Relation::Gt: return l > r;
        case Relation::Ge: return l >= r;
    }
    return false;
}

class Interner {
public:
    std::int64_t id(const std::string& label) {
        auto [it, inserted] = ids_.emplace(label, static_cast<std::int64_t>(ids_.size()));
        return it->second;
    }

private:
    std::map<std::string, std::int64_t> ids_;
};

}  // namespace

namespace {
// Context needed only while compiling.
struct CompileContext {
    const Ipm* ipm;
    Interner labels;
};
thread_local CompileContext* gContext = nullptr;
}  // namespace

CompiledModel::CompiledModel(const Ipm& ipm) {
    CompileContext ctx{&ipm, {}};
    gContext = &ctx;
    try {
        for (std::size_t p = 0; p < ipm.size(); ++p) {
            const Parameter& par = ipm.parameter(p);
            cards_.push_back(par.cardinality());
            std::vector<std::int64_t> map(par.cardinality());
            for (std::size_t v = 0; v < map.size(); ++v) {
                switch (par.kind()) {
                    case ParamKind::Boolean: map[v] = static_cast<std::int64_t>(v); break;
                    case ParamKind::IntegerRange: map[v] = par.lower() + static_cast<std::int64_t>(v); break;
                    case ParamKind::Enumerative: map[v] = ctx.labels.id(par.labels()[v]); break;
                }
            }
            valueMap_.push_back(std::move(map));
        }
        for (const Expr& c : ipm.constraints()) {
            roots_.push_back(compileExpr(c));
            vars_.push_back(referencedParameters(c));
        }
    } catch (...) {
        gContext = nullptr;
        throw;
    }
    gContext = nullptr;
}

std::uint32_t CompiledModel::compileTerm(const Term& t) {
    TermNode node{TermOp::Const};
    switch (t.kind()) {
        case Term::Kind::Param:
            node.op = TermOp::Var;
            node.param = static_cast<std::uint32_t>(t.paramIndex());
            break;
        case Term::Kind::Bool: node.value = t.boolValue() ? 1 : 0; break;
        case Term::Kind::Int: node.value = t.intValue(); break;
        case Term::Kind::Label: {
            const Parameter& p = gContext->ipm->parameter(t.labelParam());
            node.value = gContext->labels.id(p.labels()[t.labelValue()]);
            break;
        }
        case Term::Kind::Arith: {
            std::uint32_t a = compileTerm(t.lhs());
            std::uint32_t b = compileTerm(t.rhs());
            node.op = t.arithOp() == ArithOp::Add   ? TermOp::Add
                      : t.arithOp() == ArithOp::Sub ? TermOp::Sub
                                                     : TermOp::Mul;
            node.a = a;
            node.b = b;
            break;
        }
    }
    terms_.push_back(node);
    return static_cast<std::uint32_t>(terms_.size() - 1);
}

std::uint32_t CompiledModel::compileExpr(const Expr& e) {
    Node node{Op::Not};
    switch (e.kind()) {
        case Expr::Kind::Not: node.a = compileExpr(e.child()); break;
        case Expr::Kind::Binary: {
            node.a = compileExpr(e.lhs());
            node.b = compileExpr(e.rhs());
            switch (e.connective()) {
                case Connective::And: node.op = Op::And; break;
                case Connective::Or: node.op = Op::Or; break;
                case Connective::Implies: node.op = Op::Implies; break;
                case Connective::Iff: node.op = Op::Iff; break;
            }
            break;
        }
        case Expr::Kind::Literal:
            if (e.term().kind() == Term::Kind::Param) {
                node.op = Op::LitParam;
                node.a = static_cast<std::uint32_t>(e.term().paramIndex());
            } else {
                node.op = Op::LitConst;
                node.a = e.term().boolValue() ? 1 : 0;
            }
            break;
        case Expr::Kind::Compare: {
            const Ipm& ipm = *gContext->ipm;
            Comparison cmp{e.relation(), compileTerm(e.left()), compileTerm(e.right()),
                           termIsWide(ipm, e.left()) || termIsWide(ipm, e.right()), {}};
            for (std::size_t p : referencedParameters(e)) cmp.vars.push_back(static_cast<std::uint32_t>(p));
            comparisons_.push_back(std::move(cmp));
            node.op = Op::Compare;
            node.a = static_cast<std::uint32_t>(comparisons_.size() - 1);
            break;
        }
    }
    nodes_.push_back(node);
    return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::int64_t CompiledModel::evalTerm(std::uint32_t t, std::span<const std::size_t> v, Override o) const {
    const TermNode& n = terms_[t];
    switch (n.op) {
        case TermOp::Var: return valueOf(n.param, n.param == o.param ? o.index : v[n.param]);
        case TermOp::Const: return n.value;
        case TermOp::Add: return evalTerm(n.a, v, o) + evalTerm(n.b, v, o);
        case TermOp::Sub: return evalTerm(n.a, v, o) - evalTerm(n.b, v, o);
        case TermOp::Mul: return evalTerm(n.a, v, o) * evalTerm(n.b, v, o);
    }
    return 0;
}

BigInt CompiledModel::evalTermWide(std::uint32_t t, std::span<const std::size_t> v, Override o) const {
    const TermNode& n = terms_[t];
    switch (n.op) {
        case TermOp::Var: return BigInt(valueOf(n.param, n.param == o.param ? o.index : v[n.param]));
        case TermOp::Const: return BigInt(n.value);
        case TermOp::Add: return evalTermWide(n.a, v, o) + evalTermWide(n.b, v, o);
        case TermOp::Sub: return evalTermWide(n.a, v, o) - evalTermWide(n.b, v, o);
        case TermOp::Mul: return evalTermWide(n.a, v, o) * evalTermWide(n.b, v, o);
    }
    return BigInt(0);
}

bool CompiledModel::evalComparison(const Comparison& c, std::span<const std::size_t> v, Override o) const {
    if (c.wide) return relate(c.rel, evalTermWide(c.lhs, v, o), evalTermWide(c.rhs, v, o));
    return relate(c.rel, evalTerm(c.lhs, v, o), evalTerm(c.rhs, v, o));
}

bool CompiledModel::evalNode(std::uint32_t idx, std::span<const std::size_t> v) const {
    const Node& n = nodes_[idx];
    switch (n.op) {
        case Op::Not: return !evalNode(n.a, v);
        case Op::And: return evalNode(n.a, v) && evalNode(n.b, v);
        case Op::Or: return evalNode(n.a, v) || evalNode(n.b, v);
        case Op::Implies: return !evalNode(n.a, v) || evalNode(n.b, v);
        case Op::Iff: return evalNode(n.a, v) == evalNode(n.b, v);
        case Op::Compare: return evalComparison(comparisons_[n.a], v);
        case Op::LitParam: return v[n.a] == 1;
        case Op::LitConst: return n.a != 0;
    }
    return false;
}

Truth CompiledModel::evalPartialNode(std::uint32_t idx, std::span<const std::size_t> v,
                                     std::span<const std::uint8_t> assigned, const Domains* live) const {
    const Node& n = nodes_[idx];
    auto neg = [](Truth t) {
        return t == Truth::Unknown ? t : (t == Truth::True ? Truth::False : Truth::True);
    };
    switch (n.op) {
        case Op::Not: return neg(evalPartialNode(n.a, v, assigned, live));
        case Op::And: {
            Truth l = evalPartialNode(n.a, v, assigned, live);
            if (l == Truth::False) return Truth::False;
            Truth r = evalPartialNode(n.b, v, assigned, live);
            if (r == Truth::False) return Truth::False;
            return (l == Truth::True && r == Truth::True) ? Truth::True : Truth::Unknown;
        }
        case Op::Or: {
            Truth l = evalPartialNode(n.a, v, assigned, live);
            if (l == Truth::True) return Truth::True;
            Truth r = evalPartialNode(n.b, v, assigned, live);
            if (r == Truth::True) return Truth::True;
            return (l == Truth::False && r == Truth::False) ? Truth::False : Truth::Unknown;
        }
        case Op::Implies: {
            Truth l = evalPartialNode(n.a, v, assigned, live);
            if (l == Truth::False) return Truth::True;
            Truth r = evalPartialNode(n.b, v, assigned, live);
            if (r == Truth::True) return Truth::True;
            return (l == Truth::True && r == Truth::False) ? Truth::False : Truth::Unknown;
        }
        case Op::Iff: {
            Truth l = evalPartialNode(n.a, v, assigned, live);
            if (l == Truth::Unknown) return Truth::Unknown;
            Truth r = evalPartialNode(n.b, v, assigned, live);
            if (r == Truth::Unknown) return Truth::Unknown;
            return l == r ? Truth::True : Truth::False;
        }
        case Op::Compare: {
            const Comparison& c = comparisons_[n.a];
            std::uint32_t open = kNoParam;
            for (std::uint32_t p : c.vars) {
                if (assigned[p]) continue;
                if (open != kNoParam || !live) return Truth::Unknown;
                open = p;
            }
            if (open == kNoParam) return evalComparison(c, v) ? Truth::True : Truth::False;
            // One parameter left: decide over its live values.
            bool someTrue = false, someFalse = false;
            const auto& dom = (*live)[open];
            for (std::size_t i = 0; i < dom.size(); ++i) {
                if (!dom[i]) continue;
                (evalComparison(c, v, {open, i}) ? someTrue : someFalse) = true;
                if (someTrue && someFalse) return Truth::Unknown;
            }
            return someTrue ? Truth::True : Truth::False;
        }
        case Op::LitParam:
            if (!assigned[n.a]) {
                if (!live) return Truth::Unknown;
                const auto& dom = (*live)[n.a];
                if (dom[0] && dom[1]) return Truth::Unknown;
                return dom[1] ? Truth::True : Truth::False;
            }
            return v[n.a] == 1 ? Truth::True : Truth::False;
        case Op::LitConst: return n.a != 0 ? Truth::True : Truth::False;
    }
    return Truth::Unknown;
}

bool CompiledModel::holds(std::size_t c, std::span<const std::size_t> values) const {
    return evalNode(roots_[c], values);
}

bool CompiledModel::satisfiesAll(std::span<const std::size_t> values) const {
    for (std::uint32_t r : roots_)
        if (!evalNode(r, values)) return false;
    return true;
}

Truth CompiledModel::holdsPartial(std::size_t c, std::span<const std::size_t> values,
                                  std::span<const std::uint8_t> assigned, const Domains* live) const {
    return evalPartialNode(roots_[c], values, assigned, live);
}

}  // namespace ipmgen::detail
