#include "ipmgen/model.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <stdexcept>
#include <unordered_set>
#include <variant>

#include "ipmgen/errors.hpp"

namespace ipmgen {

namespace {

constexpr std::array<std::string_view, 10> kReserved = {
    "Model", "Parameters", "Constraints", "Boolean", "AND", "OR", "NOT", "true", "false", "step"};

}  // namespace

bool isIdentifier(std::string_view text) {
    if (text.empty()) return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(text.front())) return false;
    return std::all_of(text.begin(), text.end(), [&](char c) { return alpha(c) || digit(c); });
}

bool isReservedWord(std::string_view text) {
    return std::find(kReserved.begin(), kReserved.end(), text) != kReserved.end();
}

std::string_view toString(ParamKind kind) {
    switch (kind) {
        case ParamKind::Boolean: return "Boolean";
        case ParamKind::Enumerative: return "Enumerative";
        case ParamKind::IntegerRange: return "IntegerRange";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Parameter

Parameter Parameter::boolean(std::string name) {
    return Parameter(std::move(name), ParamKind::Boolean);
}

Parameter Parameter::enumerative(std::string name, std::vector<std::string> labels) {
    Parameter p(std::move(name), ParamKind::Enumerative);
    p.labels_ = std::move(labels);
    p.upper_ = static_cast<std::int64_t>(p.labels_.size()) - 1;
    return p;
}

Parameter Parameter::range(std::string name, std::int64_t lower, std::int64_t upper) {
    Parameter p(std::move(name), ParamKind::IntegerRange);
    p.lower_ = lower;
    p.upper_ = upper;
    return p;
}

std::size_t Parameter::cardinality() const noexcept {
    switch (kind_) {
        case ParamKind::Boolean: return 2;
        case ParamKind::Enumerative: return labels_.size();
        case ParamKind::IntegerRange:
            return upper_ < lower_ ? 0 : static_cast<std::size_t>(upper_ - lower_) + 1;
    }
    return 0;
}

std::string Parameter::valueText(std::size_t index) const {
    if (index >= cardinality()) throw std::out_of_range("domain index out of range for " + name_);
    switch (kind_) {
        case ParamKind::Boolean: return index == 0 ? "false" : "true";
        case ParamKind::Enumerative: return labels_[index];
        case ParamKind::IntegerRange:
            return std::to_string(lower_ + static_cast<std::int64_t>(index));
    }
    return {};
}

std::optional<std::size_t> Parameter::labelIndex(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels_.begin());
}

std::optional<std::size_t> Parameter::integerIndex(std::int64_t value) const {
    if (kind_ != ParamKind::IntegerRange || value < lower_ || value > upper_) return std::nullopt;
    return static_cast<std::size_t>(value - lower_);
}

// ---------------------------------------------------------------------------
// Operators

std::string_view toString(ArithOp op) {
    switch (op) {
        case ArithOp::Add: return "+";
        case ArithOp::Sub: return "-";
        case ArithOp::Mul: return "*";
    }
    return "?";
}

std::string_view toString(Relation rel) {
    switch (rel) {
        case Relation::Eq: return "=";
        case Relation::Ne: return "!=";
        case Relation::Lt: return "<";
        case Relation::Le: return "<=";
        case Relation::Gt: return ">";
        case Relation::Ge: return ">=";
    }
    return "?";
}

std::string_view toString(Connective op) {
    switch (op) {
        case Connective::And: return "AND";
        case Connective::Or: return "OR";
        case Connective::Implies: return "=>";
        case Connective::Iff: return "<=>";
    }
    return "?";
}

bool isOrdering(Relation rel) { return rel != Relation::Eq && rel != Relation::Ne; }

Relation mirrored(Relation rel) {
    switch (rel) {
        case Relation::Lt: return Relation::Gt;
        case Relation::Le: return Relation::Ge;
        case Relation::Gt: return Relation::Lt;
        case Relation::Ge: return Relation::Le;
        default: return rel;
    }
}

// ---------------------------------------------------------------------------
// Term

struct Term::Node {
    Kind kind;
    std::size_t a = 0;  // param index / label param
    std::size_t b = 0;  // label value
    std::int64_t i = 0;  // integer or boolean payload
    ArithOp op = ArithOp::Add;
    std::optional<Term> lhs;
    std::optional<Term> rhs;
};

Term Term::param(std::size_t index) {
    return Term(std::make_shared<const Node>(Node{Kind::Param, index}));
}
Term Term::boolean(bool value) {
    return Term(std::make_shared<const Node>(Node{Kind::Bool, 0, 0, value ? 1 : 0}));
}
Term Term::integer(std::int64_t value) {
    return Term(std::make_shared<const Node>(Node{Kind::Int, 0, 0, value}));
}
Term Term::label(std::size_t param, std::size_t value) {
    return Term(std::make_shared<const Node>(Node{Kind::Label, param, value}));
}
Term Term::arith(ArithOp op, Term lhs, Term rhs) {
    return Term(std::make_shared<const Node>(
        Node{Kind::Arith, 0, 0, 0, op, std::move(lhs), std::move(rhs)}));
}

Term::Kind Term::kind() const noexcept { return node_->kind; }

namespace {
template <class K>
void requireKind(K actual, K expected, const char* what) {
    if (actual != expected) throw std::logic_error(std::string("term/expr accessor misuse: ") + what);
}
}  // namespace

std::size_t Term::paramIndex() const { requireKind(kind(), Kind::Param, "paramIndex"); return node_->a; }
bool Term::boolValue() const { requireKind(kind(), Kind::Bool, "boolValue"); return node_->i != 0; }
std::int64_t Term::intValue() const { requireKind(kind(), Kind::Int, "intValue"); return node_->i; }
std::size_t Term::labelParam() const { requireKind(kind(), Kind::Label, "labelParam"); return node_->a; }
std::size_t Term::labelValue() const { requireKind(kind(), Kind::Label, "labelValue"); return node_->b; }
ArithOp Term::arithOp() const { requireKind(kind(), Kind::Arith, "arithOp"); return node_->op; }
const Term& Term::lhs() const { requireKind(kind(), Kind::Arith, "lhs"); return *node_->lhs; }
const Term& Term::rhs() const { requireKind(kind(), Kind::Arith, "rhs"); return *node_->rhs; }

bool Term::operator==(const Term& other) const {
    if (node_ == other.node_) return true;
    if (kind() != other.kind()) return false;
    const Node& x = *node_;
    const Node& y = *other.node_;
    switch (x.kind) {
        case Kind::Param: return x.a == y.a;
        case Kind::Bool:
        case Kind::Int: return x.i == y.i;
        case Kind::Label: return x.a == y.a && x.b == y.b;
        case Kind::Arith: return x.op == y.op && *x.lhs == *y.lhs && *x.rhs == *y.rhs;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Expr

struct Expr::Node {
    Kind kind;
    Connective connective = Connective::And;
    Relation relation = Relation::Eq;
    std::optional<Expr> a;
    std::optional<Expr> b;
    std::optional<Term> left;
    std::optional<Term> right;
};

Expr Expr::negate(Expr child) {
    Node n{Kind::Not};
    n.a = std::move(child);
    return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::binary(Connective op, Expr lhs, Expr rhs) {
    Node n{Kind::Binary, op};
    n.a = std::move(lhs);
    n.b = std::move(rhs);
    return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::compare(Relation rel, Term lhs, Term rhs) {
    Node n{Kind::Compare};
    n.relation = rel;
    n.left = std::move(lhs);
    n.right = std::move(rhs);
    return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::literal(Term term) {
    Node n{Kind::Literal};
    n.left = std::move(term);
    return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }
const Expr& Expr::child() const { requireKind(kind(), Kind::Not, "child"); return *node_->a; }
Connective Expr::connective() const { requireKind(kind(), Kind::Binary, "connective"); return node_->connective; }
const Expr& Expr::lhs() const { requireKind(kind(), Kind::Binary, "lhs"); return *node_->a; }
const Expr& Expr::rhs() const { requireKind(kind(), Kind::Binary, "rhs"); return *node_->b; }
Relation Expr::relation() const { requireKind(kind(), Kind::Compare, "relation"); return node_->relation; }
const Term& Expr::left() const { requireKind(kind(), Kind::Compare, "left"); return *node_->left; }
const Term& Expr::right() const { requireKind(kind(), Kind::Compare, "right"); return *node_->right; }
const Term& Expr::term() const { requireKind(kind(), Kind::Literal, "term"); return *node_->left; }

bool Expr::operator==(const Expr& other) const {
    if (node_ == other.node_) return true;
    if (kind() != other.kind()) return false;
    const Node& x = *node_;
    const Node& y = *other.node_;
    switch (x.kind) {
        case Kind::Not: return *x.a == *y.a;
        case Kind::Binary: return x.connective == y.connective && *x.a == *y.a && *x.b == *y.b;
        case Kind::Compare: return x.relation == y.relation && *x.left == *y.left && *x.right == *y.right;
        case Kind::Literal: return *x.left == *y.left;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Well-formedness

namespace {

enum class ValueType { Bool, Int, Enum };

struct TypeInfo {
    ValueType type;
    bool constant;
    std::optional<std::size_t> enumParam;  // set for enum-typed terms
};

class Checker {
public:
    explicit Checker(const std::vector<Parameter>& params) : params_(params) {}

    void check(const Expr& e) const {
        switch (e.kind()) {
            case Expr::Kind::Not: check(e.child()); return;
            case Expr::Kind::Binary:
                check(e.lhs());
                check(e.rhs());
                return;
            case Expr::Kind::Literal: {
                const Term& t = e.term();
                if (t.kind() == Term::Kind::Bool) return;
                if (t.kind() == Term::Kind::Param) {
                    const Parameter& p = paramAt(t.paramIndex());
                    if (p.kind() == ParamKind::Boolean) return;
                    throw ModelError("parameter '" + p.name() + "' is not Boolean and cannot be used as a predicate");
                }
                throw ModelError("only Boolean parameters or true/false may appear as predicates");
            }
            case Expr::Kind::Compare: checkCompare(e); return;
        }
    }

private:
    const Parameter& paramAt(std::size_t index) const {
        if (index >= params_.size())
            throw ModelError("reference to undeclared parameter #" + std::to_string(index));
        return params_[index];
    }

    TypeInfo typeOf(const Term& t) const {
        switch (t.kind()) {
            case Term::Kind::Param: {
                const Parameter& p = paramAt(t.paramIndex());
                switch (p.kind()) {
                    case ParamKind::Boolean: return {ValueType::Bool, false, std::nullopt};
                    case ParamKind::IntegerRange: return {ValueType::Int, false, std::nullopt};
                    case ParamKind::Enumerative: return {ValueType::Enum, false, t.paramIndex()};
                }
                break;
            }
            case Term::Kind::Bool: return {ValueType::Bool, true, std::nullopt};
            case Term::Kind::Int: return {ValueType::Int, true, std::nullopt};
            case Term::Kind::Label: {
                const Parameter& p = paramAt(t.labelParam());
                if (p.kind() != ParamKind::Enumerative || t.labelValue() >= p.cardinality())
                    throw ModelError("enum constant bound to invalid value of '" + p.name() + "'");
                return {ValueType::Enum, true, t.labelParam()};
            }
            case Term::Kind::Arith: {
                TypeInfo l = typeOf(t.lhs());
                TypeInfo r = typeOf(t.rhs());
                if (l.type != ValueType::Int || r.type != ValueType::Int)
                    throw ModelError("arithmetic operands must be integer ranges or integer constants");
                return {ValueType::Int, l.constant && r.constant, std::nullopt};
            }
        }
        throw ModelError("malformed term");
    }

    void checkCompare(const Expr& e) const {
        const Term& lt = e.left();
        const Term& rt = e.right();
        TypeInfo l = typeOf(lt);
        TypeInfo r = typeOf(rt);
        if (l.constant && r.constant) throw ModelError("comparison between two constants");
        if (l.type != r.type) throw ModelError("comparison between incompatible types");
        if (isOrdering(e.relation()) && l.type != ValueType::Int)
            throw ModelError("ordering relation '" + std::string(toString(e.relation())) +
                             "' applied to non-integer operands");
        if (l.type == ValueType::Enum) {
            // A label constant must belong to the parameter on the other side.
            if (lt.kind() == Term::Kind::Label && rt.kind() == Term::Kind::Param &&
                lt.labelParam() != rt.paramIndex())
                throw ModelError("enum constant compared with a parameter of a different domain");
            if (rt.kind() == Term::Kind::Label && lt.kind() == Term::Kind::Param &&
                rt.labelParam() != lt.paramIndex())
                throw ModelError("enum constant compared with a parameter of a different domain");
        }
        if (l.type == ValueType::Int && !isOrdering(e.relation())) {
            auto checkDomain = [&](const Term& p, const Term& c) {
                if (p.kind() == Term::Kind::Param && c.kind() == Term::Kind::Int) {
                    const Parameter& par = paramAt(p.paramIndex());
                    if (!par.integerIndex(c.intValue()))
                        throw ModelError("constant " + std::to_string(c.intValue()) +
                                         " is outside the domain of '" + par.name() + "'");
                }
            };
            checkDomain(lt, rt);
            checkDomain(rt, lt);
        }
    }

    const std::vector<Parameter>& params_;
};

void validateParameter(const Parameter& p) {
    if (!isIdentifier(p.name()) || isReservedWord(p.name()))
        throw ModelError("invalid parameter name '" + p.name() + "'");
    switch (p.kind()) {
        case ParamKind::Boolean: break;
        case ParamKind::Enumerative: {
            if (p.labels().empty()) throw ModelError("enumerative '" + p.name() + "' has no values");
            std::unordered_set<std::string> seen;
            for (const auto& l : p.labels()) {
                if (!isIdentifier(l) || isReservedWord(l))
                    throw ModelError("invalid value label '" + l + "' in '" + p.name() + "'");
                if (!seen.insert(l).second)
                    throw ModelError("duplicate value '" + l + "' in '" + p.name() + "'");
            }
            break;
        }
        case ParamKind::IntegerRange:
            if (p.lower() > p.upper())
                throw ModelError("range '" + p.name() + "' has lower bound above upper bound");
            if (p.lower() < -kMaxRangeMagnitude || p.upper() > kMaxRangeMagnitude)
                throw ModelError("range '" + p.name() + "' exceeds the supported bound magnitude");
            break;
    }
}

}  // namespace

Ipm::Ipm(std::string name, std::vector<Parameter> parameters, std::vector<Expr> constraints)
    : name_(std::move(name)), parameters_(std::move(parameters)), constraints_(std::move(constraints)) {
    if (!isIdentifier(name_) || isReservedWord(name_))
        throw ModelError("invalid model name '" + name_ + "'");
    std::unordered_set<std::string> names;
    for (const auto& p : parameters_) {
        validateParameter(p);
        if (!names.insert(p.name()).second)
            throw ModelError("duplicate parameter name '" + p.name() + "'");
    }
    // Labels share the identifier namespace with parameters in constraint text.
    for (const auto& p : parameters_)
        for (const auto& l : p.labels())
            if (names.count(l))
                throw ModelError("value label '" + l + "' of '" + p.name() +
                                 "' clashes with a parameter name");
    Checker checker(parameters_);
    for (const auto& c : constraints_) checker.check(c);
}

std::optional<std::size_t> Ipm::findParameter(std::string_view name) const {
    for (std::size_t i = 0; i < parameters_.size(); ++i)
        if (parameters_[i].name() == name) return i;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Measures

std::size_t complexity(const Expr& expr) {
    switch (expr.kind()) {
        case Expr::Kind::Not: return complexity(expr.child());
        case Expr::Kind::Binary: return 1 + complexity(expr.lhs()) + complexity(expr.rhs());
        case Expr::Kind::Compare:
        case Expr::Kind::Literal: return 0;
    }
    return 0;
}

namespace {

// Value of a term: Boolean, exact integer, or enum label text.
using Scalar = std::variant<bool, BigInt, std::string_view>;

Scalar termValue(const Ipm& ipm, const Term& t, const Assignment& a) {
    switch (t.kind()) {
        case Term::Kind::Param: {
            const Parameter& p = ipm.parameter(t.paramIndex());
            std::size_t v = a[t.paramIndex()];
            switch (p.kind()) {
                case ParamKind::Boolean: return v == 1;
                case ParamKind::IntegerRange: return BigInt(p.lower() + static_cast<std::int64_t>(v));
                case ParamKind::Enumerative: return std::string_view(p.labels()[v]);
            }
            break;
        }
        case Term::Kind::Bool: return t.boolValue();
        case Term::Kind::Int: return BigInt(t.intValue());
        case Term::Kind::Label:
            return std::string_view(ipm.parameter(t.labelParam()).labels()[t.labelValue()]);
        case Term::Kind::Arith: {
            BigInt l = std::get<BigInt>(termValue(ipm, t.lhs(), a));
            BigInt r = std::get<BigInt>(termValue(ipm, t.rhs(), a));
            switch (t.arithOp()) {
                case ArithOp::Add: return BigInt(l + r);
                case ArithOp::Sub: return BigInt(l - r);
                case ArithOp::Mul: return BigInt(l * r);
            }
        }
    }
    throw std::logic_error("malformed term");
}

template <class T>
bool applyRelation(Relation rel, const T& l, const T& r) {
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

bool eval(const Ipm& ipm, const Expr& e, const Assignment& a) {
    switch (e.kind()) {
        case Expr::Kind::Not: return !eval(ipm, e.child(), a);
        case Expr::Kind::Binary: {
            bool l = eval(ipm, e.lhs(), a);
            switch (e.connective()) {
                case Connective::And: return l && eval(ipm, e.rhs(), a);
                case Connective::Or: return l || eval(ipm, e.rhs(), a);
                case Connective::Implies: return !l || eval(ipm, e.rhs(), a);
                case Connective::Iff: return l == eval(ipm, e.rhs(), a);
            }
            break;
        }
        case Expr::Kind::Literal: return std::get<bool>(termValue(ipm, e.term(), a));
        case Expr::Kind::Compare: {
            Scalar l = termValue(ipm, e.left(), a);
            Scalar r = termValue(ipm, e.right(), a);
            return std::visit(
                [&](const auto& x) -> bool {
                    using X = std::decay_t<decltype(x)>;
                    return applyRelation(e.relation(), x, std::get<X>(r));
                },
                l);
        }
    }
    throw std::logic_error("malformed expression");
}

void checkAssignment(const Ipm& ipm, const Assignment& a) {
    if (a.size() != ipm.size())
        throw std::invalid_argument("assignment size does not match the model's parameter count");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] >= ipm.parameter(i).cardinality())
            throw std::invalid_argument("assignment value out of domain for '" +
                                        ipm.parameter(i).name() + "'");
}

}  // namespace

bool evaluate(const Ipm& ipm, const Expr& expr, const Assignment& assignment) {
    checkAssignment(ipm, assignment);
    for (std::size_t p : referencedParameters(expr))
        if (p >= ipm.size()) throw std::invalid_argument("expression references an unknown parameter");
    return eval(ipm, expr, assignment);
}

bool satisfiesAll(const Ipm& ipm, const Assignment& assignment) {
    checkAssignment(ipm, assignment);
    return std::all_of(ipm.constraints().begin(), ipm.constraints().end(),
                       [&](const Expr& c) { return eval(ipm, c, assignment); });
}

BigInt totalTests(const Ipm& ipm) {
    BigInt n = 1;
    for (const auto& p : ipm.parameters()) n *= p.cardinality();
    return n;
}

BigInt countTuples(const Ipm& ipm, std::size_t strength) {
    const std::size_t k = ipm.size();
    if (strength < 1 || strength > k)
        throw std::invalid_argument("strength must lie in [1, number of parameters]");
    // Elementary symmetric polynomial of the cardinalities, degree `strength`.
    std::vector<BigInt> e(strength + 1, BigInt(0));
    e[0] = 1;
    for (const auto& p : ipm.parameters())
        for (std::size_t j = strength; j >= 1; --j) e[j] += e[j - 1] * p.cardinality();
    return e[strength];
}

TupleEnumerator::TupleEnumerator(const Ipm& ipm, std::size_t strength) : strength_(strength) {
    if (strength < 1 || strength > ipm.size())
        throw std::invalid_argument("strength must lie in [1, number of parameters]");
    for (const auto& p : ipm.parameters()) cards_.push_back(p.cardinality());
}

bool TupleEnumerator::advanceSubset() {
    const std::size_t k = cards_.size();
    std::size_t i = strength_;
    while (i > 0) {
        --i;
        if (subset_[i] < k - strength_ + i) {
            ++subset_[i];
            for (std::size_t j = i + 1; j < strength_; ++j) subset_[j] = subset_[j - 1] + 1;
            return true;
        }
    }
    return false;
}

bool TupleEnumerator::next(Tuple& out) {
    if (done_) return false;
    if (!started_) {
        started_ = true;
        subset_.resize(strength_);
        for (std::size_t i = 0; i < strength_; ++i) subset_[i] = i;
        values_.assign(strength_, 0);
    } else {
        // Odometer over the current subset's values, last position fastest.
        std::size_t i = strength_;
        bool carried = true;
        while (carried && i > 0) {
            --i;
            if (++values_[i] < cards_[subset_[i]]) {
                carried = false;
            } else {
                values_[i] = 0;
            }
        }
        if (carried) {
            if (!advanceSubset()) {
                done_ = true;
                return false;
            }
            values_.assign(strength_, 0);
        }
    }
    out.resize(strength_);
    for (std::size_t i = 0; i < strength_; ++i) out[i] = {subset_[i], values_[i]};
    return true;
}

void forEachTuple(const Ipm& ipm, std::size_t strength,
                  const std::function<void(const Tuple&)>& visit) {
    TupleEnumerator it(ipm, strength);
    Tuple t;
    while (it.next(t)) visit(t);
}

namespace {
void collectTermParams(const Term& t, std::set<std::size_t>& out) {
    switch (t.kind()) {
        case Term::Kind::Param: out.insert(t.paramIndex()); break;
        case Term::Kind::Arith:
            collectTermParams(t.lhs(), out);
            collectTermParams(t.rhs(), out);
            break;
        default: break;
    }
}
void collectParams(const Expr& e, std::set<std::size_t>& out) {
    switch (e.kind()) {
        case Expr::Kind::Not: collectParams(e.child(), out); break;
        case Expr::Kind::Binary:
            collectParams(e.lhs(), out);
            collectParams(e.rhs(), out);
            break;
        case Expr::Kind::Compare:
            collectTermParams(e.left(), out);
            collectTermParams(e.right(), out);
            break;
        case Expr::Kind::Literal: collectTermParams(e.term(), out); break;
    }
}
}  // namespace

std::vector<std::size_t> referencedParameters(const Expr& expr) {
    std::set<std::size_t> s;
    collectParams(expr, s);
    return {s.begin(), s.end()};
}

}  // namespace ipmgen
