#pragma once

// Input parameter models: parameters with finite domains, constraint
// expression trees over them, and the basic measures defined on both.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace ipmgen {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Largest magnitude accepted for an integer-range bound.
inline constexpr std::int64_t kMaxRangeMagnitude = std::int64_t{1} << 31;

bool isIdentifier(std::string_view text);
bool isReservedWord(std::string_view text);

enum class ParamKind { Boolean, Enumerative, IntegerRange };

std::string_view toString(ParamKind kind);

class Parameter {
public:
    static Parameter boolean(std::string name);
    static Parameter enumerative(std::string name, std::vector<std::string> labels);
    static Parameter range(std::string name, std::int64_t lower, std::int64_t upper);

    const std::string& name() const noexcept { return name_; }
    ParamKind kind() const noexcept { return kind_; }

    /// Enumerative labels in declaration order; empty for other kinds.
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::int64_t lower() const noexcept { return lower_; }
    std::int64_t upper() const noexcept { return upper_; }

    /// Boolean: 2, Enumerative: label count, IntegerRange: upper - lower + 1.
    std::size_t cardinality() const noexcept;

    /// Domain index -> printable value. Boolean domain order is {false, true}.
    std::string valueText(std::size_t index) const;
    std::optional<std::size_t> labelIndex(std::string_view label) const;
    std::optional<std::size_t> integerIndex(std::int64_t value) const;

    bool operator==(const Parameter&) const = default;

private:
    Parameter(std::string name, ParamKind kind) : name_(std::move(name)), kind_(kind) {}

    std::string name_;
    ParamKind kind_;
    std::vector<std::string> labels_;
    std::int64_t lower_ = 0;
    std::int64_t upper_ = 1;
};

enum class ArithOp { Add, Sub, Mul };
enum class Relation { Eq, Ne, Lt, Le, Gt, Ge };
enum class Connective { And, Or, Implies, Iff };

std::string_view toString(ArithOp op);
std::string_view toString(Relation rel);
std::string_view toString(Connective op);
bool isOrdering(Relation rel);
Relation mirrored(Relation rel);

/// Operand of a comparison. Parameters are referenced by their index in the
/// owning model; enum constants are bound to the parameter whose domain they
/// were resolved against.
class Term {
public:
    enum class Kind { Param, Bool, Int, Label, Arith };

    static Term param(std::size_t index);
    static Term boolean(bool value);
    static Term integer(std::int64_t value);
    static Term label(std::size_t param, std::size_t value);
    static Term arith(ArithOp op, Term lhs, Term rhs);

    Kind kind() const noexcept;
    std::size_t paramIndex() const;   // Param
    bool boolValue() const;           // Bool
    std::int64_t intValue() const;    // Int
    std::size_t labelParam() const;   // Label
    std::size_t labelValue() const;   // Label
    ArithOp arithOp() const;          // Arith
    const Term& lhs() const;          // Arith
    const Term& rhs() const;          // Arith

    bool operator==(const Term& other) const;

private:
    struct Node;
    explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

/// Immutable constraint tree. Copies share structure.
class Expr {
public:
    enum class Kind { Not, Binary, Compare, Literal };

    static Expr negate(Expr child);
    static Expr binary(Connective op, Expr lhs, Expr rhs);
    static Expr compare(Relation rel, Term lhs, Term rhs);
    /// A Boolean-valued term used as a predicate: a Boolean parameter or true/false.
    static Expr literal(Term term);

    Kind kind() const noexcept;
    const Expr& child() const;        // Not
    Connective connective() const;    // Binary
    const Expr& lhs() const;          // Binary
    const Expr& rhs() const;          // Binary
    Relation relation() const;        // Compare
    const Term& left() const;         // Compare
    const Term& right() const;        // Compare
    const Term& term() const;         // Literal

    bool operator==(const Expr& other) const;

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

/// A named model. The constructor checks every well-formedness rule and
/// throws ModelError on violation, so an Ipm instance is always valid.
class Ipm {
public:
    Ipm(std::string name, std::vector<Parameter> parameters, std::vector<Expr> constraints = {});

    const std::string& name() const noexcept { return name_; }
    const std::vector<Parameter>& parameters() const noexcept { return parameters_; }
    const std::vector<Expr>& constraints() const noexcept { return constraints_; }
    const Parameter& parameter(std::size_t index) const { return parameters_.at(index); }
    std::size_t size() const noexcept { return parameters_.size(); }
    std::optional<std::size_t> findParameter(std::string_view name) const;

    bool operator==(const Ipm&) const = default;

private:
    std::string name_;
    std::vector<Parameter> parameters_;
    std::vector<Expr> constraints_;
};

/// One domain index per parameter, in declaration order.
using Assignment = std::vector<std::size_t>;

struct TupleEntry {
    std::size_t param;
    std::size_t value;
    bool operator==(const TupleEntry&) const = default;
};

/// Values for t distinct parameters, sorted by parameter index.
using Tuple = std::vector<TupleEntry>;

/// Number of binary connectives (AND, OR, =>, <=>). Negations and atoms count zero.
std::size_t complexity(const Expr& expr);

/// Whether `expr` holds under a total assignment. Arithmetic is exact.
/// Throws std::invalid_argument when the assignment does not fit the model.
bool evaluate(const Ipm& ipm, const Expr& expr, const Assignment& assignment);
bool satisfiesAll(const Ipm& ipm, const Assignment& assignment);

/// Product of all domain sizes, ignoring constraints.
BigInt totalTests(const Ipm& ipm);

/// Number of t-tuples: sum over t-subsets of parameters of the product of their cardinalities.
BigInt countTuples(const Ipm& ipm, std::size_t strength);

/// Streams every t-tuple exactly once: t-subsets in lexicographic order of
/// parameter indices, and within a subset values in domain order (last
/// parameter varies fastest).
class TupleEnumerator {
public:
    TupleEnumerator(const Ipm& ipm, std::size_t strength);

    /// Writes the next tuple into `out`; false once exhausted.
    bool next(Tuple& out);

private:
    bool advanceSubset();

    std::vector<std::size_t> cards_;
    std::size_t strength_;
    std::vector<std::size_t> subset_;
    std::vector<std::size_t> values_;
    bool started_ = false;
    bool done_ = false;
};

void forEachTuple(const Ipm& ipm, std::size_t strength,
                  const std::function<void(const Tuple&)>& visit);

/// Parameter indices referenced anywhere in `expr`, sorted and unique.
std::vector<std::size_t> referencedParameters(const Expr& expr);

}  // namespace ipmgen
