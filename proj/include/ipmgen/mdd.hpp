#pragma once

// Multi-valued decision diagrams over a model's parameters, one level per
// parameter in declaration order, used to count satisfying assignments.

#include <cstdint>
#include <string>
#include <vector>

#include "ipmgen/model.hpp"

namespace ipmgen {

/// Fully reduced diagram: a node whose edges all lead to the same child is
/// skipped, and no two nodes share level and edges. Immutable once built.
class Mdd {
public:
    using NodeId = std::uint32_t;
    static constexpr NodeId kFalse = 0;
    static constexpr NodeId kTrue = 1;

    NodeId root() const noexcept { return root_; }
    std::size_t levelCount() const noexcept { return cards_.size(); }
    const std::vector<std::size_t>& cardinalities() const noexcept { return cards_; }

    /// Non-terminal nodes; ids run from 2 to nodeCount() + 1.
    std::size_t nodeCount() const noexcept { return level_.size() - 2; }
    bool isTerminal(NodeId n) const noexcept { return n < 2; }
    /// Terminals sit at level levelCount().
    std::size_t level(NodeId n) const { return level_.at(n); }
    NodeId child(NodeId n, std::size_t value) const;

    /// Number of assignments reaching T. Each node is visited once.
    BigInt cardinality() const;
    /// Node visits made by the most recent cardinality() call.
    std::uint64_t lastVisitCount() const noexcept { return visits_; }

    bool accepts(const Assignment& assignment) const;

    /// Graphviz rendering; edges to F are omitted.
    std::string toDot(const Ipm& ipm) const;

private:
    friend class MddBuilder;
    std::vector<std::size_t> cards_;
    std::vector<std::uint32_t> level_;
    std::vector<std::size_t> offset_;
    std::vector<NodeId> edges_;
    NodeId root_ = kTrue;
    mutable std::uint64_t visits_ = 0;
};

struct MddOptions {
    std::size_t nodeBudget = 10'000'000;
};

/// False when a constraint uses arithmetic, an ordering relation, or compares
/// two parameters.
bool supportsMdd(const Ipm& ipm);

/// Without constraints the diagram accepts every assignment, for any model.
/// With them, the constraints are conjoined one at a time in declaration
/// order (or in `order`, a permutation of constraint indices). Throws
/// MethodUnavailable for unsupported models and ResourceError when the node
/// budget is exceeded.
Mdd buildMdd(const Ipm& ipm, bool withConstraints, MddOptions options = {});
Mdd buildMdd(const Ipm& ipm, const std::vector<std::size_t>& order, MddOptions options = {});

}  // namespace ipmgen
