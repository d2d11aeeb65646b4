#pragma once

// Finite-domain satisfiability for a model's constraint conjunction.

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "ipmgen/model.hpp"

namespace ipmgen {

namespace detail {
class CompiledModel;
}

/// Integer image of every domain value. Booleans map to {0,1}, ranges to
/// themselves, and each enumerative gets its own block after every other
/// value used so far, so blocks of distinct parameters never overlap.
struct Encoding {
    std::vector<std::int64_t> offset;                          // value = offset + index
    std::vector<std::pair<std::int64_t, std::int64_t>> bounds;  // inclusive interval per parameter

    std::int64_t encode(std::size_t param, std::size_t index) const {
        return offset[param] + static_cast<std::int64_t>(index);
    }
};

Encoding makeEncoding(const Ipm& ipm);

struct SolverOptions {
    std::uint64_t nodeBudget = 10'000'000;
};

/// Backtracking search with forward checking and conflict-directed
/// backjumping; the smallest live domain is branched on first. Choices
/// depend only on the model and the fixed tuple, so results are
/// deterministic. Exceeding the node budget throws ResourceError; that
/// outcome is never reported as unsatisfiable.
class Solver {
public:
    explicit Solver(const Ipm& ipm, SolverOptions options = {});
    ~Solver();
    Solver(Solver&&) noexcept;
    Solver& operator=(Solver&&) noexcept;

    /// A satisfying total assignment extending `fixed`, or nullopt if none
    /// exists. `nodes`, when given, receives the number of search nodes used.
    std::optional<Assignment> solve(const Tuple& fixed = {}, std::uint64_t* nodes = nullptr) const;

    const detail::CompiledModel& compiled() const noexcept { return *compiled_; }

private:
    std::unique_ptr<detail::CompiledModel> compiled_;
    std::vector<std::vector<std::size_t>> watch_;  // constraints per parameter
    SolverOptions options_;
};

bool isSolvable(const Ipm& ipm, SolverOptions options = {});

/// Throws std::invalid_argument when the tuple names a parameter twice or
/// holds an out-of-domain value.
bool isTupleValid(const Ipm& ipm, const Tuple& tuple, SolverOptions options = {});

}  // namespace ipmgen
