#include "ipmgen/solver.hpp"

#include <algorithm>
#include <stdexcept>

#include "compiled.hpp"
#include "ipmgen/errors.hpp"

namespace ipmgen {

using detail::CompiledModel;
using detail::Truth;

Encoding makeEncoding(const Ipm& ipm) {
    Encoding enc;
    std::int64_t next = 1;
    for (const auto& p : ipm.parameters()) {
        if (p.kind() == ParamKind::IntegerRange) next = std::max(next, p.upper());
    }
    ++next;
    for (const auto& p : ipm.parameters()) {
        std::int64_t off = 0;
        switch (p.kind()) {
            case ParamKind::Boolean: off = 0; break;
            case ParamKind::IntegerRange: off = p.lower(); break;
            case ParamKind::Enumerative:
                off = next;
                next += static_cast<std::int64_t>(p.cardinality());
                break;
        }
        enc.offset.push_back(off);
        enc.bounds.emplace_back(off, off + static_cast<std::int64_t>(p.cardinality()) - 1);
    }
    return enc;
}

namespace {

class VarSet {
public:
    explicit VarSet(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
    void insert(std::size_t p) { words_[p / 64] |= std::uint64_t{1} << (p % 64); }
    void erase(std::size_t p) { words_[p / 64] &= ~(std::uint64_t{1} << (p % 64)); }
    void merge(const VarSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    }
    void clear() { std::fill(words_.begin(), words_.end(), 0); }
    template <class F>
    void forEach(F f) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            for (std::uint64_t w = words_[i]; w; w &= w - 1)
                f(i * 64 + static_cast<std::size_t>(__builtin_ctzll(w)));
    }

private:
    std::vector<std::uint64_t> words_;
};

// Forward checking with conflict-directed backjumping. The next variable is
// the one with the fewest live values among those still in an undecided
// constraint; variables outside every undecided constraint are filled in at
// the end without branching.
class Search {
public:
    Search(const CompiledModel& model, const std::vector<std::vector<std::size_t>>& watch,
           std::uint64_t budget)
        : model_(model), watch_(watch), budget_(budget) {
        const auto& cards = model.cardinalities();
        const std::size_t k = cards.size();
        values_.assign(k, 0);
        assigned_.assign(k, 0);
        depthOf_.assign(k, kNoDepth);
        for (std::size_t c : cards) {
            live_.emplace_back(c, 1);
            pruned_.emplace_back(c, kNoConstraint);
        }
        liveCount_ = cards;
        decided_.assign(model.constraintCount(), 0);
        open_.assign(k, 0);
        for (std::size_t p = 0; p < k; ++p) open_[p] = watch[p].size();
        conflict_.assign(k, VarSet(k));
    }

    std::optional<Assignment> run(const Tuple& fixed) {
        for (const auto& e : fixed) {
            values_[e.param] = e.value;
            assigned_[e.param] = 1;
        }
        VarSet scratch(values_.size());
        for (std::size_t c = 0; c < model_.constraintCount(); ++c)
            if (!propagate(c, scratch)) return std::nullopt;
        if (dfs(0) != kSuccess) return std::nullopt;
        return values_;
    }

    std::uint64_t nodes() const noexcept { return nodes_; }

private:
    static constexpr std::size_t kNoDepth = static_cast<std::size_t>(-1);
    static constexpr std::uint32_t kNoConstraint = static_cast<std::uint32_t>(-1);
    static constexpr long kSuccess = -1;
    static constexpr long kUnsat = -2;

    // Decision variables among the assigned parameters of c, except `skip`.
    void addReason(std::size_t c, std::size_t skip, VarSet& out) const {
        for (std::size_t p : model_.constraintVars(c))
            if (p != skip && depthOf_[p] != kNoDepth) out.insert(p);
    }

    void explainPruned(std::size_t u, VarSet& out) const {
        for (std::size_t v = 0; v < pruned_[u].size(); ++v)
            if (!live_[u][v]) addReason(pruned_[u][v], u, out);
    }

    void markDecided(std::size_t c) {
        decided_[c] = 1;
        for (std::size_t p : model_.constraintVars(c)) --open_[p];
        decidedTrail_.push_back(c);
    }

    // Kleene check of c, then domain filtering when it has a single
    // unassigned parameter left. On failure `why` receives the explanation.
    bool propagate(std::size_t c, VarSet& why) {
        if (decided_[c]) return true;
        Truth t = model_.holdsPartial(c, values_, assigned_, &live_);
        if (t == Truth::False) {
            addReason(c, kNoDepth, why);
            for (std::size_t p : model_.constraintVars(c))
                if (!assigned_[p]) explainPruned(p, why);
            return false;
        }
        if (t == Truth::True) {
            markDecided(c);
            return true;
        }
        std::size_t open = 0;
        std::size_t u = 0;
        for (std::size_t p : model_.constraintVars(c)) {
            if (!assigned_[p]) {
                ++open;
                u = p;
            }
        }
        if (open != 1) return true;
        assigned_[u] = 1;
        const std::size_t saved = values_[u];
        for (std::size_t v = 0; v < live_[u].size(); ++v) {
            if (!live_[u][v]) continue;
            values_[u] = v;
            if (model_.holdsPartial(c, values_, assigned_) == Truth::False) {
                live_[u][v] = 0;
                pruned_[u][v] = static_cast<std::uint32_t>(c);
                --liveCount_[u];
                trail_.emplace_back(u, v);
            }
        }
        values_[u] = saved;
        assigned_[u] = 0;
        if (liveCount_[u] > 0) return true;
        explainPruned(u, why);
        return false;
    }

    void undo(std::size_t mark, std::size_t decidedMark) {
        while (trail_.size() > mark) {
            auto [p, v] = trail_.back();
            trail_.pop_back();
            live_[p][v] = 1;
            pruned_[p][v] = kNoConstraint;
            ++liveCount_[p];
        }
        while (decidedTrail_.size() > decidedMark) {
            std::size_t c = decidedTrail_.back();
            decidedTrail_.pop_back();
            decided_[c] = 0;
            for (std::size_t p : model_.constraintVars(c)) ++open_[p];
        }
    }

    std::optional<std::size_t> pickVariable() const {
        std::optional<std::size_t> best;
        for (std::size_t p = 0; p < values_.size(); ++p) {
            if (assigned_[p] || open_[p] == 0) continue;
            if (!best || liveCount_[p] < liveCount_[*best] ||
                (liveCount_[p] == liveCount_[*best] && open_[p] > open_[*best]))
                best = p;
        }
        return best;
    }

    // kSuccess, kUnsat, or the depth to resume at.
    long dfs(std::size_t depth) {
        const auto pick = pickVariable();
        if (!pick) {
            // Every remaining constraint is decided; free parameters take any live value.
            for (std::size_t p = 0; p < values_.size(); ++p) {
                if (assigned_[p]) continue;
                std::size_t v = 0;
                while (!live_[p][v]) ++v;
                values_[p] = v;
                assigned_[p] = 1;
            }
            return kSuccess;
        }
        const std::size_t var = *pick;
        depthOf_[var] = depth;
        VarSet& conf = conflict_[var];
        conf.clear();
        VarSet why(values_.size());
        for (std::size_t v = 0; v < live_[var].size(); ++v) {
            if (!live_[var][v]) continue;
            if (++nodes_ > budget_)
                throw ResourceError("search node budget of " + std::to_string(budget_) + " exceeded");
            values_[var] = v;
            assigned_[var] = 1;
            const std::size_t mark = trail_.size();
            const std::size_t decidedMark = decidedTrail_.size();
            why.clear();
            bool ok = true;
            for (std::size_t c : watch_[var]) {
                if (!propagate(c, why)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                const long r = dfs(depth + 1);
                if (r == kSuccess) return kSuccess;
                if (r == kUnsat || r < static_cast<long>(depth)) {
                    undo(mark, decidedMark);
                    assigned_[var] = 0;
                    values_[var] = 0;
                    depthOf_[var] = kNoDepth;
                    return r;
                }
            } else {
                why.erase(var);
                conf.merge(why);
            }
            undo(mark, decidedMark);
            assigned_[var] = 0;
        }
        values_[var] = 0;
        depthOf_[var] = kNoDepth;
        VarSet all = conf;
        explainPruned(var, all);
        all.erase(var);
        long target = kUnsat;
        all.forEach([&](std::size_t p) { target = std::max(target, static_cast<long>(depthOf_[p])); });
        if (target == kUnsat) return kUnsat;
        std::size_t culprit = 0;
        all.forEach([&](std::size_t p) {
            if (static_cast<long>(depthOf_[p]) == target) culprit = p;
        });
        all.erase(culprit);
        conflict_[culprit].merge(all);
        return target;
    }

    const CompiledModel& model_;
    const std::vector<std::vector<std::size_t>>& watch_;
    std::uint64_t budget_;
    std::uint64_t nodes_ = 0;
    std::vector<std::size_t> values_;
    std::vector<std::uint8_t> assigned_;
    std::vector<std::size_t> depthOf_;
    std::vector<std::vector<std::uint8_t>> live_;
    std::vector<std::vector<std::uint32_t>> pruned_;  // constraint that removed each value
    std::vector<std::size_t> liveCount_;
    std::vector<std::uint8_t> decided_;
    std::vector<std::size_t> decidedTrail_;
    std::vector<std::size_t> open_;  // undecided constraints per parameter
    std::vector<VarSet> conflict_;
    std::vector<std::pair<std::size_t, std::size_t>> trail_;
};

}  // namespace

Solver::Solver(const Ipm& ipm, SolverOptions options)
    : compiled_(std::make_unique<CompiledModel>(ipm)), watch_(ipm.size()), options_(options) {
    for (std::size_t c = 0; c < compiled_->constraintCount(); ++c)
        for (std::size_t p : compiled_->constraintVars(c)) watch_[p].push_back(c);
}

Solver::~Solver() = default;
Solver::Solver(Solver&&) noexcept = default;
Solver& Solver::operator=(Solver&&) noexcept = default;

std::optional<Assignment> Solver::solve(const Tuple& fixed, std::uint64_t* nodes) const {
    const auto& cards = compiled_->cardinalities();
    std::vector<std::uint8_t> seen(cards.size(), 0);
    for (const auto& e : fixed) {
        if (e.param >= cards.size()) throw std::invalid_argument("tuple names an unknown parameter");
        if (e.value >= cards[e.param]) throw std::invalid_argument("tuple value outside the domain");
        if (seen[e.param]++) throw std::invalid_argument("tuple names a parameter twice");
    }
    Search search(*compiled_, watch_, options_.nodeBudget);
    auto result = search.run(fixed);
    if (nodes) *nodes = search.nodes();
    return result;
}

bool isSolvable(const Ipm& ipm, SolverOptions options) {
    return Solver(ipm, options).solve().has_value();
}

bool isTupleValid(const Ipm& ipm, const Tuple& tuple, SolverOptions options) {
    return Solver(ipm, options).solve(tuple).has_value();
}

}  // namespace ipmgen
