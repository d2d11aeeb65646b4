#include "ipmgen/ctwedge.hpp"

#include <charconv>
#include <memory>
#include <optional>
#include <sstream>
#include <unordered_set>
#include <vector>

#include "ipmgen/errors.hpp"

namespace ipmgen {

namespace {

// ---------------------------------------------------------------------------
// Lexer

struct Pos {
    std::size_t line = 1;
    std::size_t column = 1;
};

enum class Tok { Ident, Int, Sym, End };

struct Token {
    Tok kind;
    std::string text;
    Pos pos;
};

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    Pos pos;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++pos.line;
                pos.column = 1;
            } else {
                ++pos.column;
            }
        }
    };
    auto isAlpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto isDigit = [](char c) { return c >= '0' && c <= '9'; };

    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (src.substr(i, 2) == "//") {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (src.substr(i, 2) == "/*") {
            Pos start = pos;
            std::size_t end = src.find("*/", i + 2);
            if (end == std::string_view::npos)
                throw SyntaxError(start.line, start.column, "unterminated comment");
            advance(end + 2 - i);
            continue;
        }
        Pos start = pos;
        if (isAlpha(c)) {
            std::size_t j = i;
            while (j < src.size() && (isAlpha(src[j]) || isDigit(src[j]))) ++j;
            out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), start});
            advance(j - i);
            continue;
        }
        if (isDigit(c)) {
            std::size_t j = i;
            while (j < src.size() && isDigit(src[j])) ++j;
            out.push_back({Tok::Int, std::string(src.substr(i, j - i)), start});
            advance(j - i);
            continue;
        }
        static constexpr std::string_view kSymbols[] = {
            "<=>", "=>", "<=", ">=", "!=", "..", "=", "<", ">", "!", "(", ")",
            "{",   "}",  "[",  "]",  ",",  ":",  "#", "+", "-", "*", "&&", "||"};
        bool matched = false;
        for (std::string_view s : kSymbols) {
            if (src.substr(i, s.size()) == s) {
                out.push_back({Tok::Sym, std::string(s), start});
                advance(s.size());
                matched = true;
                break;
            }
        }
        if (!matched)
            throw SyntaxError(start.line, start.column,
                              std::string("unexpected character '") + c + "'");
    }
    out.push_back({Tok::End, "", pos});
    return out;
}

// ---------------------------------------------------------------------------
// Raw syntax tree (names unresolved)

struct RawTerm {
    enum Kind { Ident, Int, Bool, Arith } kind;
    Pos pos;
    std::string name;
    std::int64_t value = 0;
    bool flag = false;
    ArithOp op = ArithOp::Add;
    std::unique_ptr<RawTerm> lhs, rhs;
};

struct RawExpr {
    enum Kind { Not, Binary, Compare, Atom } kind;
    Pos pos;
    Connective connective = Connective::And;
    Relation relation = Relation::Eq;
    std::unique_ptr<RawExpr> a, b;
    std::unique_ptr<RawTerm> left, right;
};

using RawTermPtr = std::unique_ptr<RawTerm>;
using RawExprPtr = std::unique_ptr<RawExpr>;

struct RawParam {
    Parameter param;
    Pos pos;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    std::string modelName;
    Pos modelNamePos;
    std::vector<RawParam> params;
    std::vector<RawExprPtr> constraints;

    void parseModel() {
        expectKeyword("Model");
        modelNamePos = peek().pos;
        modelName = expectIdent("model name");
        expectKeyword("Parameters");
        expectSym(":");
        while (peek().kind == Tok::Ident && !isKeyword(peek(), "Constraints")) parseParam();
        if (isKeyword(peek(), "Constraints")) {
            next();
            expectSym(":");
            while (isSym(peek(), "#")) {
                next();
                constraints.push_back(parseIff());
                expectSym("#");
            }
        }
        if (peek().kind != Tok::End) {
            const Token& t = peek();
            if (t.kind == Tok::Ident && isSym(peek(1), ":"))
                throw SyntaxError(t.pos.line, t.pos.column,
                                  "unsupported construct: section '" + t.text + "'");
            fail(t, "expected '#' to start a constraint or end of input");
        }
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t k = std::min(idx_ + ahead, toks_.size() - 1);
        return toks_[k];
    }
    const Token& next() {
        const Token& t = toks_[idx_];
        if (idx_ + 1 < toks_.size()) ++idx_;
        return t;
    }
    static bool isSym(const Token& t, std::string_view s) { return t.kind == Tok::Sym && t.text == s; }
    static bool isKeyword(const Token& t, std::string_view s) { return t.kind == Tok::Ident && t.text == s; }

    [[noreturn]] void fail(const Token& t, const std::string& expected) const {
        std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw SyntaxError(t.pos.line, t.pos.column, expected + ", found " + found);
    }

    void expectSym(std::string_view s) {
        if (!isSym(peek(), s)) fail(peek(), "expected '" + std::string(s) + "'");
        next();
    }
    void expectKeyword(std::string_view s) {
        if (!isKeyword(peek(), s)) fail(peek(), "expected '" + std::string(s) + "'");
        next();
    }
    std::string expectIdent(const std::string& what) {
        const Token& t = peek();
        if (t.kind != Tok::Ident || isReservedWord(t.text)) fail(t, "expected " + what);
        return next().text;
    }

    std::int64_t parseSignedInt() {
        bool negative = false;
        if (isSym(peek(), "-")) {
            next();
            negative = true;
        }
        return parseIntToken(negative);
    }

    std::int64_t parseIntToken(bool negative) {
        const Token& t = peek();
        if (t.kind != Tok::Int) fail(t, "expected integer");
        std::uint64_t magnitude = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), magnitude);
        constexpr auto kMax = static_cast<std::uint64_t>(INT64_MAX);
        if (ec != std::errc() || magnitude > kMax + (negative ? 1 : 0))
            throw SyntaxError(t.pos.line, t.pos.column, "integer literal out of range");
        next();
        if (negative) return magnitude == kMax + 1 ? INT64_MIN : -static_cast<std::int64_t>(magnitude);
        return static_cast<std::int64_t>(magnitude);
    }

    void parseParam() {
        Pos pos = peek().pos;
        std::string name = expectIdent("parameter name");
        expectSym(":");
        const Token& t = peek();
        if (isKeyword(t, "Boolean")) {
            next();
            params.push_back({Parameter::boolean(std::move(name)), pos});
        } else if (isSym(t, "{")) {
            next();
            std::vector<std::string> labels;
            labels.push_back(expectIdent("enum value"));
            while (isSym(peek(), ",")) {
                next();
                labels.push_back(expectIdent("enum value"));
            }
            expectSym("}");
            params.push_back({Parameter::enumerative(std::move(name), std::move(labels)), pos});
        } else if (isSym(t, "[")) {
            next();
            std::int64_t lo = parseSignedInt();
            expectSym("..");
            std::int64_t hi = parseSignedInt();
            if (isKeyword(peek(), "step"))
                throw SyntaxError(peek().pos.line, peek().pos.column,
                                  "unsupported construct: stepped range");
            expectSym("]");
            params.push_back({Parameter::range(std::move(name), lo, hi), pos});
        } else {
            fail(t, "expected 'Boolean', '{' or '['");
        }
    }

    // -- Boolean layer --------------------------------------------------------

    static RawExprPtr makeBinary(Connective op, RawExprPtr l, RawExprPtr r, Pos pos) {
        auto e = std::make_unique<RawExpr>(RawExpr{RawExpr::Binary, pos});
        e->connective = op;
        e->a = std::move(l);
        e->b = std::move(r);
        return e;
    }

    RawExprPtr parseIff() {
        RawExprPtr l = parseImplies();
        while (isSym(peek(), "<=>")) {
            Pos pos = next().pos;
            l = makeBinary(Connective::Iff, std::move(l), parseImplies(), pos);
        }
        return l;
    }

    RawExprPtr parseImplies() {
        RawExprPtr l = parseOr();
        if (isSym(peek(), "=>")) {
            Pos pos = next().pos;
            return makeBinary(Connective::Implies, std::move(l), parseImplies(), pos);
        }
        return l;
    }

    RawExprPtr parseOr() {
        RawExprPtr l = parseAnd();
        while (isKeyword(peek(), "OR") || isSym(peek(), "||")) {
            Pos pos = next().pos;
            l = makeBinary(Connective::Or, std::move(l), parseAnd(), pos);
        }
        return l;
    }

    RawExprPtr parseAnd() {
        RawExprPtr l = parseUnary();
        while (isKeyword(peek(), "AND") || isSym(peek(), "&&")) {
            Pos pos = next().pos;
            l = makeBinary(Connective::And, std::move(l), parseUnary(), pos);
        }
        return l;
    }

    RawExprPtr parseUnary() {
        if (isKeyword(peek(), "NOT") || isSym(peek(), "!")) {
            Pos pos = next().pos;
            auto e = std::make_unique<RawExpr>(RawExpr{RawExpr::Not, pos});
            e->a = parseUnary();
            return e;
        }
        return parsePrimary();
    }

    static bool startsTermContinuation(const Token& t) {
        if (t.kind != Tok::Sym) return false;
        static const std::unordered_set<std::string> ops = {"=", "!=", "<", "<=", ">",
                                                            ">=", "+", "-", "*"};
        return ops.count(t.text) > 0;
    }

    RawExprPtr parsePrimary() {
        if (!isSym(peek(), "(")) return parseAtom();
        // '(' opens either a nested formula or a parenthesized arithmetic term.
        const std::size_t mark = idx_;
        std::optional<SyntaxError> formulaError;
        try {
            next();
            RawExprPtr e = parseIff();
            expectSym(")");
            if (!startsTermContinuation(peek())) return e;
        } catch (const SyntaxError& err) {
            formulaError = err;
        }
        const std::size_t formulaReach = idx_;
        idx_ = mark;
        try {
            return parseAtom();
        } catch (const SyntaxError&) {
            if (formulaError && formulaReach >= idx_) throw *formulaError;
            throw;
        }
    }

    std::optional<Relation> peekRelation() const {
        const Token& t = peek();
        if (t.kind != Tok::Sym) return std::nullopt;
        if (t.text == "=") return Relation::Eq;
        if (t.text == "!=") return Relation::Ne;
        if (t.text == "<") return Relation::Lt;
        if (t.text == "<=") return Relation::Le;
        if (t.text == ">") return Relation::Gt;
        if (t.text == ">=") return Relation::Ge;
        return std::nullopt;
    }

    RawExprPtr parseAtom() {
        Pos pos = peek().pos;
        RawTermPtr lhs = parseTerm();
        if (auto rel = peekRelation()) {
            next();
            auto e = std::make_unique<RawExpr>(RawExpr{RawExpr::Compare, pos});
            e->relation = *rel;
            e->left = std::move(lhs);
            e->right = parseTerm();
            return e;
        }
        if (lhs->kind != RawTerm::Ident && lhs->kind != RawTerm::Bool)
            fail(peek(), "expected relational operator");
        auto e = std::make_unique<RawExpr>(RawExpr{RawExpr::Atom, pos});
        e->left = std::move(lhs);
        return e;
    }

    // -- Term layer -------------------------------------------------------------

    static RawTermPtr makeArith(ArithOp op, RawTermPtr l, RawTermPtr r, Pos pos) {
        auto t = std::make_unique<RawTerm>(RawTerm{RawTerm::Arith, pos});
        t->op = op;
        t->lhs = std::move(l);
        t->rhs = std::move(r);
        return t;
    }

    RawTermPtr parseTerm() {
        RawTermPtr l = parseProduct();
        while (isSym(peek(), "+") || isSym(peek(), "-")) {
            const Token& op = next();
            ArithOp a = op.text == "+" ? ArithOp::Add : ArithOp::Sub;
            l = makeArith(a, std::move(l), parseProduct(), op.pos);
        }
        return l;
    }

    RawTermPtr parseProduct() {
        RawTermPtr l = parseTermPrimary();
        while (isSym(peek(), "*")) {
            Pos pos = next().pos;
            l = makeArith(ArithOp::Mul, std::move(l), parseTermPrimary(), pos);
        }
        return l;
    }

    RawTermPtr parseTermPrimary() {
        const Token& t = peek();
        Pos pos = t.pos;
        if (isSym(t, "(")) {
            next();
            RawTermPtr inner = parseTerm();
            expectSym(")");
            return inner;
        }
        if (isSym(t, "-") || t.kind == Tok::Int) {
            auto term = std::make_unique<RawTerm>(RawTerm{RawTerm::Int, pos});
            term->value = parseSignedInt();
            return term;
        }
        if (t.kind == Tok::Ident) {
            if (t.text == "true" || t.text == "false") {
                auto term = std::make_unique<RawTerm>(RawTerm{RawTerm::Bool, pos});
                term->flag = t.text == "true";
                next();
                return term;
            }
            if (isReservedWord(t.text)) fail(t, "expected operand");
            auto term = std::make_unique<RawTerm>(RawTerm{RawTerm::Ident, pos});
            term->name = next().text;
            return term;
        }
        fail(t, "expected operand");
    }

    std::vector<Token> toks_;
    std::size_t idx_ = 0;
};

// ---------------------------------------------------------------------------
// Name resolution

[[noreturn]] void semanticError(Pos pos, const std::string& message) {
    throw ModelError("line " + std::to_string(pos.line) + ", column " +
                     std::to_string(pos.column) + ": " + message);
}

class Resolver {
public:
    explicit Resolver(const std::vector<Parameter>& params) : params_(params) {}

    Expr resolve(const RawExpr& e) const {
        switch (e.kind) {
            case RawExpr::Not: return Expr::negate(resolve(*e.a));
            case RawExpr::Binary: return Expr::binary(e.connective, resolve(*e.a), resolve(*e.b));
            case RawExpr::Atom: {
                const RawTerm& t = *e.left;
                if (t.kind == RawTerm::Bool) return Expr::literal(Term::boolean(t.flag));
                return Expr::literal(Term::param(paramIndex(t)));
            }
            case RawExpr::Compare: {
                auto leftEnum = enumParamOf(*e.left);
                auto rightEnum = enumParamOf(*e.right);
                Term l = resolveTerm(*e.left, rightEnum);
                Term r = resolveTerm(*e.right, leftEnum);
                return Expr::compare(e.relation, std::move(l), std::move(r));
            }
        }
        throw std::logic_error("malformed raw expression");
    }

private:
    std::optional<std::size_t> find(const std::string& name) const {
        for (std::size_t i = 0; i < params_.size(); ++i)
            if (params_[i].name() == name) return i;
        return std::nullopt;
    }

    std::size_t paramIndex(const RawTerm& t) const {
        if (auto idx = find(t.name)) return *idx;
        semanticError(t.pos, "unknown parameter '" + t.name + "'");
    }

    std::optional<std::size_t> enumParamOf(const RawTerm& t) const {
        if (t.kind != RawTerm::Ident) return std::nullopt;
        auto idx = find(t.name);
        if (idx && params_[*idx].kind() == ParamKind::Enumerative) return idx;
        return std::nullopt;
    }

    // `context` is the enumerative on the opposite side of the comparison, if any;
    // bare identifiers that are not parameters resolve against its labels.
    Term resolveTerm(const RawTerm& t, std::optional<std::size_t> context) const {
        switch (t.kind) {
            case RawTerm::Int: return Term::integer(t.value);
            case RawTerm::Bool: return Term::boolean(t.flag);
            case RawTerm::Arith:
                return Term::arith(t.op, resolveTerm(*t.lhs, std::nullopt),
                                   resolveTerm(*t.rhs, std::nullopt));
            case RawTerm::Ident: {
                if (auto idx = find(t.name)) return Term::param(*idx);
                if (!context) semanticError(t.pos, "unknown identifier '" + t.name + "'");
                const Parameter& p = params_[*context];
                auto value = p.labelIndex(t.name);
                if (!value)
                    semanticError(t.pos, "'" + t.name + "' is not a value of '" + p.name() + "'");
                return Term::label(*context, *value);
            }
        }
        throw std::logic_error("malformed raw term");
    }

    const std::vector<Parameter>& params_;
};

}  // namespace

Ipm parseCtwedge(std::string_view text) {
    Parser parser(tokenize(text));
    parser.parseModel();

    std::vector<Parameter> params;
    for (std::size_t i = 0; i < parser.params.size(); ++i) {
        const RawParam& rp = parser.params[i];
        for (std::size_t j = 0; j < i; ++j)
            if (params[j].name() == rp.param.name())
                semanticError(rp.pos, "duplicate parameter name '" + rp.param.name() + "'");
        try {
            Ipm single("M", {rp.param});
        } catch (const ModelError& err) {
            semanticError(rp.pos, err.what());
        }
        params.push_back(rp.param);
    }
    try {
        Ipm check(parser.modelName, params);
    } catch (const ModelError& err) {
        semanticError(parser.modelNamePos, err.what());
    }

    Resolver resolver(params);
    std::vector<Expr> constraints;
    for (const auto& raw : parser.constraints) {
        Expr e = resolver.resolve(*raw);
        try {
            Ipm check(parser.modelName, params, {e});
        } catch (const ModelError& err) {
            semanticError(raw->pos, err.what());
        }
        constraints.push_back(std::move(e));
    }
    return Ipm(parser.modelName, std::move(params), std::move(constraints));
}

// ---------------------------------------------------------------------------
// Printer

namespace {

int arithPrecedence(ArithOp op) { return op == ArithOp::Mul ? 2 : 1; }

void printTermTo(std::ostream& os, const Ipm& ipm, const Term& t) {
    switch (t.kind()) {
        case Term::Kind::Param: os << ipm.parameter(t.paramIndex()).name(); return;
        case Term::Kind::Bool: os << (t.boolValue() ? "true" : "false"); return;
        case Term::Kind::Int: os << t.intValue(); return;
        case Term::Kind::Label: os << ipm.parameter(t.labelParam()).labels()[t.labelValue()]; return;
        case Term::Kind::Arith: {
            const int prec = arithPrecedence(t.arithOp());
            auto side = [&](const Term& c, bool right) {
                bool parens = c.kind() == Term::Kind::Arith &&
                              (arithPrecedence(c.arithOp()) < prec ||
                               (right && arithPrecedence(c.arithOp()) == prec));
                if (parens) os << '(';
                printTermTo(os, ipm, c);
                if (parens) os << ')';
            };
            side(t.lhs(), false);
            os << ' ' << toString(t.arithOp()) << ' ';
            side(t.rhs(), true);
            return;
        }
    }
}

void printExprTo(std::ostream& os, const Ipm& ipm, const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Literal: printTermTo(os, ipm, e.term()); return;
        case Expr::Kind::Compare:
            printTermTo(os, ipm, e.left());
            os << ' ' << toString(e.relation()) << ' ';
            printTermTo(os, ipm, e.right());
            return;
        case Expr::Kind::Not:
            if (e.child().kind() == Expr::Kind::Literal) {
                os << "NOT ";
                printExprTo(os, ipm, e.child());
            } else {
                os << "NOT (";
                printExprTo(os, ipm, e.child());
                os << ')';
            }
            return;
        case Expr::Kind::Binary: {
            // Every nested binary operand is parenthesized, so the printed
            // grouping never depends on precedence or associativity.
            auto side = [&](const Expr& c) {
                bool parens = c.kind() == Expr::Kind::Binary;
                if (parens) os << '(';
                printExprTo(os, ipm, c);
                if (parens) os << ')';
            };
            side(e.lhs());
            os << ' ' << toString(e.connective()) << ' ';
            side(e.rhs());
            return;
        }
    }
}

}  // namespace

std::string printTerm(const Ipm& ipm, const Term& term) {
    std::ostringstream os;
    printTermTo(os, ipm, term);
    return os.str();
}

std::string printExpr(const Ipm& ipm, const Expr& expr) {
    std::ostringstream os;
    printExprTo(os, ipm, expr);
    return os.str();
}

std::string printCtwedge(const Ipm& ipm) {
    std::ostringstream os;
    os << "Model " << ipm.name() << "\n\nParameters:\n";
    for (const auto& p : ipm.parameters()) {
        os << p.name() << " : ";
        switch (p.kind()) {
            case ParamKind::Boolean: os << "Boolean"; break;
            case ParamKind::Enumerative: {
                os << '{';
                for (std::size_t i = 0; i < p.labels().size(); ++i)
                    os << (i ? ", " : "") << p.labels()[i];
                os << '}';
                break;
            }
            case ParamKind::IntegerRange: os << '[' << p.lower() << " .. " << p.upper() << ']'; break;
        }
        os << '\n';
    }
    if (!ipm.constraints().empty()) {
        os << "\nConstraints:\n";
        for (const auto& c : ipm.constraints()) os << "# " << printExpr(ipm, c) << " #\n";
    }
    return os.str();
}

}  // namespace ipmgen
