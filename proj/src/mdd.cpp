#include "ipmgen/mdd.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "ipmgen/errors.hpp"

namespace ipmgen {

Mdd::NodeId Mdd::child(NodeId n, std::size_t value) const {
    if (isTerminal(n)) throw std::out_of_range("terminal nodes have no edges");
    if (value >= cards_[level_[n]]) throw std::out_of_range("edge value outside the domain");
    return edges_[offset_[n] + value];
}

BigInt Mdd::cardinality() const {
    visits_ = 0;
    const std::size_t n = cards_.size();
    // suffix[l] = product of cardinalities of levels l..n-1
    std::vector<BigInt> suffix(n + 1, BigInt(1));
    for (std::size_t l = n; l-- > 0;) suffix[l] = suffix[l + 1] * cards_[l];

    // Number of completions of levels [level(node), n) reaching T.
    std::vector<BigInt> memo(level_.size());
    std::vector<std::uint8_t> done(level_.size(), 0);
    memo[kFalse] = 0;
    memo[kTrue] = 1;
    done[kFalse] = done[kTrue] = 1;

    auto gap = [&](std::uint32_t from, std::uint32_t to) {
        // product of cardinalities for levels strictly between from and to
        return suffix[from + 1] / suffix[to];
    };
    std::vector<std::pair<NodeId, bool>> stack{{root_, false}};
    while (!stack.empty()) {
        auto [node, expanded] = stack.back();
        stack.pop_back();
        if (done[node]) continue;
        const std::size_t l = level_[node];
        if (!expanded) {
            ++visits_;
            stack.emplace_back(node, true);
            for (std::size_t v = 0; v < cards_[l]; ++v) {
                NodeId c = edges_[offset_[node] + v];
                if (!done[c]) stack.emplace_back(c, false);
            }
            continue;
        }
        BigInt sum = 0;
        for (std::size_t v = 0; v < cards_[l]; ++v) {
            NodeId c = edges_[offset_[node] + v];
            if (c == kFalse) continue;
            sum += memo[c] * gap(static_cast<std::uint32_t>(l), level_[c]);
        }
        memo[node] = std::move(sum);
        done[node] = 1;
    }
    return memo[root_] * (suffix[0] / suffix[level_[root_]]);
}

bool Mdd::accepts(const Assignment& assignment) const {
    if (assignment.size() != cards_.size()) throw std::invalid_argument("assignment size mismatch");
    NodeId n = root_;
    while (!isTerminal(n)) n = edges_[offset_[n] + assignment[level_[n]]];
    return n == kTrue;
}

std::string Mdd::toDot(const Ipm& ipm) const {
    std::ostringstream os;
    os << "digraph mdd {\n  n0 [label=\"F\", shape=box];\n  n1 [label=\"T\", shape=box];\n";
    for (NodeId n = 2; n < level_.size(); ++n) {
        const Parameter& p = ipm.parameter(level_[n]);
        os << "  n" << n << " [label=\"" << p.name() << "\"];\n";
        for (std::size_t v = 0; v < cards_[level_[n]]; ++v) {
            NodeId c = edges_[offset_[n] + v];
            if (c == kFalse) continue;
            os << "  n" << n << " -> n" << c << " [label=\"" << p.valueText(v) << "\"];\n";
        }
    }
    os << "}\n";
    return os.str();
}

bool supportsMdd(const Ipm& ipm) {
    auto constant = [](const Term& t) {
        return t.kind() == Term::Kind::Bool || t.kind() == Term::Kind::Int ||
               t.kind() == Term::Kind::Label;
    };
    std::function<bool(const Expr&)> ok = [&](const Expr& e) -> bool {
        switch (e.kind()) {
            case Expr::Kind::Literal: return true;
            case Expr::Kind::Not: return ok(e.child());
            case Expr::Kind::Binary: return ok(e.lhs()) && ok(e.rhs());
            case Expr::Kind::Compare: {
                if (isOrdering(e.relation())) return false;
                const Term& l = e.left();
                const Term& r = e.right();
                return (l.kind() == Term::Kind::Param && constant(r)) ||
                       (r.kind() == Term::Kind::Param && constant(l));
            }
        }
        return false;
    };
    for (const Expr& c : ipm.constraints())
        if (!ok(c)) return false;
    return true;
}

class MddBuilder {
public:
    MddBuilder(const Ipm& ipm, std::size_t budget) : ipm_(ipm), budget_(budget) {
        for (const auto& p : ipm.parameters()) cards_.push_back(p.cardinality());
        const auto n = static_cast<std::uint32_t>(cards_.size());
        level_ = {n, n};
        offset_ = {0, 0};
    }

    Mdd::NodeId compile(const Expr& e) {
        switch (e.kind()) {
            case Expr::Kind::Literal:
                if (e.term().kind() == Term::Kind::Param) return atom(e.term().paramIndex(), 1, true);
                return e.term().boolValue() ? Mdd::kTrue : Mdd::kFalse;
            case Expr::Kind::Not: return negate(compile(e.child()));
            case Expr::Kind::Binary: {
                Mdd::NodeId a = compile(e.lhs());
                Mdd::NodeId b = compile(e.rhs());
                switch (e.connective()) {
                    case Connective::And: return apply(Op::And, a, b);
                    case Connective::Or: return apply(Op::Or, a, b);
                    case Connective::Implies: return apply(Op::Or, negate(a), b);
                    case Connective::Iff: return apply(Op::Iff, a, b);
                }
                break;
            }
            case Expr::Kind::Compare: {
                const Term* var = &e.left();
                const Term* val = &e.right();
                if (var->kind() != Term::Kind::Param) std::swap(var, val);
                if (var->kind() != Term::Kind::Param || val->kind() == Term::Kind::Param ||
                    val->kind() == Term::Kind::Arith || isOrdering(e.relation()))
                    throw MethodUnavailable("constraint not representable as a decision diagram");
                const std::size_t p = var->paramIndex();
                const bool eq = e.relation() == Relation::Eq;
                std::optional<std::size_t> index;
                switch (val->kind()) {
                    case Term::Kind::Bool: index = val->boolValue() ? 1 : 0; break;
                    case Term::Kind::Int: index = ipm_.parameter(p).integerIndex(val->intValue()); break;
                    case Term::Kind::Label: index = val->labelValue(); break;
                    default: break;
                }
                if (!index) return eq ? Mdd::kFalse : Mdd::kTrue;
                return atom(p, *index, eq);
            }
        }
        return Mdd::kFalse;
    }

    Mdd::NodeId conjoin(Mdd::NodeId a, Mdd::NodeId b) { return apply(Op::And, a, b); }

    Mdd finish(Mdd::NodeId root) const {
        Mdd out;
        out.cards_ = cards_;
        const auto n = static_cast<std::uint32_t>(cards_.size());
        out.level_ = {n, n};
        out.offset_ = {0, 0};
        std::unordered_map<Mdd::NodeId, Mdd::NodeId> remap{{Mdd::kFalse, Mdd::kFalse},
                                                           {Mdd::kTrue, Mdd::kTrue}};
        // Children are created before parents, so ascending ids are a valid order.
        std::vector<Mdd::NodeId> reachable;
        std::vector<std::uint8_t> mark(level_.size(), 0);
        std::vector<Mdd::NodeId> stack{root};
        while (!stack.empty()) {
            Mdd::NodeId x = stack.back();
            stack.pop_back();
            if (x < 2 || mark[x]) continue;
            mark[x] = 1;
            reachable.push_back(x);
            for (std::size_t v = 0; v < cards_[level_[x]]; ++v) stack.push_back(edges_[offset_[x] + v]);
        }
        std::sort(reachable.begin(), reachable.end());
        for (Mdd::NodeId x : reachable) {
            const auto id = static_cast<Mdd::NodeId>(out.level_.size());
            out.level_.push_back(level_[x]);
            out.offset_.push_back(out.edges_.size());
            for (std::size_t v = 0; v < cards_[level_[x]]; ++v)
                out.edges_.push_back(remap.at(edges_[offset_[x] + v]));
            remap[x] = id;
        }
        out.root_ = remap.at(root);
        return out;
    }

private:
    enum class Op : std::uint64_t { And = 0, Or = 1, Iff = 2 };

    struct KeyHash {
        std::size_t operator()(const std::vector<std::uint32_t>& k) const noexcept {
            std::size_t h = 1469598103934665603ull;
            for (std::uint32_t x : k) h = (h ^ x) * 1099511628211ull;
            return h;
        }
    };

    Mdd::NodeId make(std::uint32_t level, const std::vector<Mdd::NodeId>& kids) {
        bool same = true;
        for (std::size_t i = 1; i < kids.size() && same; ++i) same = kids[i] == kids[0];
        if (same) return kids[0];
        std::vector<std::uint32_t> key;
        key.reserve(kids.size() + 1);
        key.push_back(level);
        key.insert(key.end(), kids.begin(), kids.end());
        auto it = unique_.find(key);
        if (it != unique_.end()) return it->second;
        if (level_.size() - 2 >= budget_)
            throw ResourceError("decision diagram node budget of " + std::to_string(budget_) +
                                " exceeded");
        const auto id = static_cast<Mdd::NodeId>(level_.size());
        level_.push_back(level);
        offset_.push_back(edges_.size());
        edges_.insert(edges_.end(), kids.begin(), kids.end());
        unique_.emplace(std::move(key), id);
        return id;
    }

    Mdd::NodeId atom(std::size_t param, std::size_t value, bool equal) {
        std::vector<Mdd::NodeId> kids(cards_[param], equal ? Mdd::kFalse : Mdd::kTrue);
        kids[value] = equal ? Mdd::kTrue : Mdd::kFalse;
        return make(static_cast<std::uint32_t>(param), kids);
    }

    Mdd::NodeId edge(Mdd::NodeId n, std::uint32_t level, std::size_t v) const {
        return level_[n] == level ? edges_[offset_[n] + v] : n;
    }

    Mdd::NodeId negate(Mdd::NodeId f) {
        if (f == Mdd::kTrue) return Mdd::kFalse;
        if (f == Mdd::kFalse) return Mdd::kTrue;
        auto it = negMemo_.find(f);
        if (it != negMemo_.end()) return it->second;
        const std::uint32_t l = level_[f];
        std::vector<Mdd::NodeId> kids(cards_[l]);
        for (std::size_t v = 0; v < kids.size(); ++v) kids[v] = negate(edges_[offset_[f] + v]);
        Mdd::NodeId r = make(l, kids);
        negMemo_.emplace(f, r);
        return r;
    }

    Mdd::NodeId apply(Op op, Mdd::NodeId f, Mdd::NodeId g) {
        switch (op) {
            case Op::And:
                if (f == Mdd::kFalse || g == Mdd::kFalse) return Mdd::kFalse;
                if (f == Mdd::kTrue) return g;
                if (g == Mdd::kTrue || f == g) return f;
                break;
            case Op::Or:
                if (f == Mdd::kTrue || g == Mdd::kTrue) return Mdd::kTrue;
                if (f == Mdd::kFalse) return g;
                if (g == Mdd::kFalse || f == g) return f;
                break;
            case Op::Iff:
                if (f == g) return Mdd::kTrue;
                if (f == Mdd::kTrue) return g;
                if (g == Mdd::kTrue) return f;
                if (f == Mdd::kFalse) return negate(g);
                if (g == Mdd::kFalse) return negate(f);
                break;
        }
        if (f > g) std::swap(f, g);
        const std::uint64_t key = (static_cast<std::uint64_t>(op) << 62) |
                                  (static_cast<std::uint64_t>(f) << 31) | g;
        auto it = applyMemo_.find(key);
        if (it != applyMemo_.end()) return it->second;
        const std::uint32_t l = std::min(level_[f], level_[g]);
        std::vector<Mdd::NodeId> kids(cards_[l]);
        for (std::size_t v = 0; v < kids.size(); ++v) kids[v] = apply(op, edge(f, l, v), edge(g, l, v));
        Mdd::NodeId r = make(l, kids);
        applyMemo_.emplace(key, r);
        return r;
    }

    const Ipm& ipm_;
    std::size_t budget_;
    std::vector<std::size_t> cards_;
    std::vector<std::uint32_t> level_;
    std::vector<std::size_t> offset_;
    std::vector<Mdd::NodeId> edges_;
    std::unordered_map<std::vector<std::uint32_t>, Mdd::NodeId, KeyHash> unique_;
    std::unordered_map<std::uint64_t, Mdd::NodeId> applyMemo_;
    std::unordered_map<Mdd::NodeId, Mdd::NodeId> negMemo_;
};

namespace {

Mdd build(const Ipm& ipm, const std::vector<std::size_t>& order, MddOptions options) {
    MddBuilder builder(ipm, options.nodeBudget);
    Mdd::NodeId root = Mdd::kTrue;
    for (std::size_t c : order) root = builder.conjoin(root, builder.compile(ipm.constraints()[c]));
    return builder.finish(root);
}

void requireSupported(const Ipm& ipm) {
    if (!supportsMdd(ipm))
        throw MethodUnavailable("model uses arithmetic, ordering or parameter-parameter comparisons");
}

}  // namespace

Mdd buildMdd(const Ipm& ipm, const std::vector<std::size_t>& order, MddOptions options) {
    requireSupported(ipm);
    std::vector<std::uint8_t> seen(ipm.constraints().size(), 0);
    for (std::size_t c : order) {
        if (c >= seen.size() || seen[c]++)
            throw std::invalid_argument("constraint order must be a permutation of constraint indices");
    }
    if (order.size() != seen.size())
        throw std::invalid_argument("constraint order must be a permutation of constraint indices");
    return build(ipm, order, options);
}

Mdd buildMdd(const Ipm& ipm, bool withConstraints, MddOptions options) {
    std::vector<std::size_t> order;
    if (withConstraints) {
        requireSupported(ipm);
        order.resize(ipm.constraints().size());
        std::iota(order.begin(), order.end(), std::size_t{0});
    }
    return build(ipm, order, options);
}

}  // namespace ipmgen
