#pragma once

// Flattened, integer-only form of a model's constraints for the hot loops
// (search, exhaustive counting, sampling). Every parameter value is mapped to
// an int64: Booleans to 0/1, ranges to their integer, enum values to a label
// id interned over the whole model so equal label text compares equal.

#include <cstdint>
#include <span>
#include <vector>

#include "ipmgen/model.hpp"

namespace ipmgen::detail {

enum class Truth : std::uint8_t { False, True, Unknown };

class CompiledModel {
public:
    explicit CompiledModel(const Ipm& ipm);

    std::size_t parameterCount() const noexcept { return cards_.size(); }
    std::size_t constraintCount() const noexcept { return roots_.size(); }
    const std::vector<std::size_t>& cardinalities() const noexcept { return cards_; }

    /// Parameters each constraint mentions (sorted, unique).
    const std::vector<std::size_t>& constraintVars(std::size_t c) const { return vars_[c]; }

    bool holds(std::size_t c, std::span<const std::size_t> values) const;
    bool satisfiesAll(std::span<const std::size_t> values) const;

    using Domains = std::vector<std::vector<std::uint8_t>>;

    /// Kleene evaluation; `assigned[p]` marks which entries of `values` are
    /// meaningful. With `live`, an atom over a single unassigned parameter is
    /// decided when it has the same truth value on all of its live values.
    Truth holdsPartial(std::size_t c, std::span<const std::size_t> values,
                       std::span<const std::uint8_t> assigned, const Domains* live = nullptr) const;

private:
    enum class Op : std::uint8_t { Not, And, Or, Implies, Iff, Compare, LitParam, LitConst };
    struct Node {
        Op op;
        std::uint32_t a = 0;  // child / compare index / param index / constant
        std::uint32_t b = 0;
    };
    enum class TermOp : std::uint8_t { Var, Const, Add, Sub, Mul };
    struct TermNode {
        TermOp op;
        std::uint32_t param = 0;
        std::int64_t value = 0;
        std::uint32_t a = 0;
        std::uint32_t b = 0;
    };
    struct Comparison {
        Relation rel;
        std::uint32_t lhs;
        std::uint32_t rhs;
        bool wide;  // arithmetic may leave the int64 range; evaluate exactly
        std::vector<std::uint32_t> vars;
    };

    static constexpr std::uint32_t kNoParam = static_cast<std::uint32_t>(-1);
    struct Override {
        std::uint32_t param;  // evaluated at `index` instead of its entry in values
        std::size_t index;
    };

    std::uint32_t compileExpr(const Expr& e);
    std::uint32_t compileTerm(const Term& t);

    bool evalNode(std::uint32_t n, std::span<const std::size_t> v) const;
    Truth evalPartialNode(std::uint32_t n, std::span<const std::size_t> v,
                          std::span<const std::uint8_t> assigned, const Domains* live) const;
    bool evalComparison(const Comparison& c, std::span<const std::size_t> v) const {
        return evalComparison(c, v, Override{kNoParam, 0});
    }
    bool evalComparison(const Comparison& c, std::span<const std::size_t> v, Override o) const;
    std::int64_t evalTerm(std::uint32_t t, std::span<const std::size_t> v, Override o) const;
    BigInt evalTermWide(std::uint32_t t, std::span<const std::size_t> v, Override o) const;
    std::int64_t valueOf(std::uint32_t param, std::size_t index) const {
        return valueMap_[param][index];
    }

    std::vector<std::size_t> cards_;
    std::vector<std::vector<std::int64_t>> valueMap_;
    std::vector<Node> nodes_;
    std::vector<TermNode> terms_;
    std::vector<Comparison> comparisons_;
    std::vector<std::uint32_t> roots_;
    std::vector<std::vector<std::size_t>> vars_;
};

}  // namespace ipmgen::detail
