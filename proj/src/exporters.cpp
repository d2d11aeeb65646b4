#include "ipmgen/exporters.hpp"

#include "ipmgen/ctwedge.hpp"
#include "ipmgen/errors.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace ipmgen {

namespace {

void writeValueList(std::ostream& os, const Parameter& p) {
    for (std::size_t i = 0; i < p.cardinality(); ++i) os << (i ? ", " : "") << p.valueText(i);
}

// ---------------------------------------------------------------------------
// ACTS

std::string actsRelation(Relation rel) { return std::string(toString(rel)); }

std::string actsConnective(Connective op) {
    switch (op) {
        case Connective::And: return "&&";
        case Connective::Or: return "||";
        case Connective::Implies: return "=>";
        case Connective::Iff: return "<=>";
    }
    return "?";
}

void actsTerm(std::ostream& os, const Ipm& ipm, const Term& t) {
    switch (t.kind()) {
        case Term::Kind::Param: os << ipm.parameter(t.paramIndex()).name(); return;
        case Term::Kind::Bool: os << (t.boolValue() ? "true" : "false"); return;
        case Term::Kind::Int: os << t.intValue(); return;
        case Term::Kind::Label:
            os << '"' << ipm.parameter(t.labelParam()).labels()[t.labelValue()] << '"';
            return;
        case Term::Kind::Arith: {
            auto side = [&](const Term& c) {
                bool parens = c.kind() == Term::Kind::Arith;
                if (parens) os << '(';
                actsTerm(os, ipm, c);
                if (parens) os << ')';
            };
            side(t.lhs());
            os << ' ' << toString(t.arithOp()) << ' ';
            side(t.rhs());
            return;
        }
    }
}

void actsExpr(std::ostream& os, const Ipm& ipm, const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Literal:
            if (e.term().kind() == Term::Kind::Param) {
                os << ipm.parameter(e.term().paramIndex()).name() << " = true";
            } else {
                os << (e.term().boolValue() ? "true" : "false");
            }
            return;
        case Expr::Kind::Compare:
            actsTerm(os, ipm, e.left());
            os << ' ' << actsRelation(e.relation()) << ' ';
            actsTerm(os, ipm, e.right());
            return;
        case Expr::Kind::Not:
            os << "!(";
            actsExpr(os, ipm, e.child());
            os << ')';
            return;
        case Expr::Kind::Binary: {
            auto side = [&](const Expr& c) {
                bool parens = c.kind() == Expr::Kind::Binary;
                if (parens) os << '(';
                actsExpr(os, ipm, c);
                if (parens) os << ')';
            };
            side(e.lhs());
            os << ' ' << actsConnective(e.connective()) << ' ';
            side(e.rhs());
            return;
        }
    }
}

// ---------------------------------------------------------------------------
// PICT

std::string pictRelation(Relation rel) {
    return rel == Relation::Ne ? std::string("<>") : std::string(toString(rel));
}

std::string pictValue(const Parameter& p, std::size_t index) {
    if (p.kind() == ParamKind::IntegerRange) return p.valueText(index);
    return '"' + p.valueText(index) + '"';
}

std::string pictRef(const Ipm& ipm, std::size_t param) {
    return '[' + ipm.parameter(param).name() + ']';
}

// Predicates that are constantly true/false, written against the first parameter.
std::string pictConstant(const Ipm& ipm, bool value) {
    const std::string ref = pictRef(ipm, 0);
    const std::string v = pictValue(ipm.parameter(0), 0);
    return value ? "(" + ref + " = " + v + " OR " + ref + " <> " + v + ")"
                 : "(" + ref + " = " + v + " AND " + ref + " <> " + v + ")";
}

struct Expansion {
    enum Kind { True, False, Text } kind;
    std::string text;
};

// Expands an arithmetic atom over the values of the parameters it mentions.
class AtomExpander {
public:
    AtomExpander(const Ipm& ipm, const Expr& atom)
        : ipm_(ipm), atom_(atom), vars_(referencedParameters(atom)), scratch_(ipm.size(), 0) {}

    Expansion run() { return expand(0); }

private:
    Expansion expand(std::size_t depth) {
        const std::size_t var = vars_[depth];
        const Parameter& p = ipm_.parameter(var);
        std::vector<std::string> parts;
        std::size_t trueCount = 0;
        if (depth + 1 == vars_.size()) {
            std::vector<std::size_t> allowed;
            for (std::size_t v = 0; v < p.cardinality(); ++v) {
                scratch_[var] = v;
                if (evaluate(ipm_, atom_, scratch_)) allowed.push_back(v);
            }
            if (allowed.empty()) return {Expansion::False, {}};
            if (allowed.size() == p.cardinality()) return {Expansion::True, {}};
            if (allowed.size() == 1)
                return {Expansion::Text, pictRef(ipm_, var) + " = " + pictValue(p, allowed[0])};
            std::string s = pictRef(ipm_, var) + " IN {";
            for (std::size_t i = 0; i < allowed.size(); ++i)
                s += (i ? ", " : "") + pictValue(p, allowed[i]);
            return {Expansion::Text, s + "}"};
        }
        for (std::size_t v = 0; v < p.cardinality(); ++v) {
            scratch_[var] = v;
            Expansion sub = expand(depth + 1);
            const std::string eq = pictRef(ipm_, var) + " = " + pictValue(p, v);
            if (sub.kind == Expansion::False) continue;
            if (sub.kind == Expansion::True) {
                ++trueCount;
                parts.push_back(eq);
            } else {
                parts.push_back("(" + eq + " AND (" + sub.text + "))");
            }
        }
        if (parts.empty()) return {Expansion::False, {}};
        if (trueCount == p.cardinality()) return {Expansion::True, {}};
        std::string s;
        for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? " OR " : "") + parts[i];
        return {Expansion::Text, s};
    }

    const Ipm& ipm_;
    const Expr& atom_;
    std::vector<std::size_t> vars_;
    Assignment scratch_;
};

bool hasArith(const Term& t) { return t.kind() == Term::Kind::Arith; }

std::string pictCompare(const Ipm& ipm, const Expr& e) {
    const Term* lhs = &e.left();
    const Term* rhs = &e.right();
    Relation rel = e.relation();
    if (hasArith(*lhs) || hasArith(*rhs)) {
        Expansion x = AtomExpander(ipm, e).run();
        if (x.kind == Expansion::Text) return x.text;
        return pictConstant(ipm, x.kind == Expansion::True);
    }
    if (lhs->kind() != Term::Kind::Param) {
        std::swap(lhs, rhs);
        rel = mirrored(rel);
    }
    const std::size_t param = lhs->paramIndex();
    std::string out = pictRef(ipm, param) + " " + pictRelation(rel) + " ";
    switch (rhs->kind()) {
        case Term::Kind::Param: out += pictRef(ipm, rhs->paramIndex()); break;
        case Term::Kind::Bool: out += rhs->boolValue() ? "\"true\"" : "\"false\""; break;
        case Term::Kind::Int: out += std::to_string(rhs->intValue()); break;
        case Term::Kind::Label:
            out += '"' + ipm.parameter(rhs->labelParam()).labels()[rhs->labelValue()] + '"';
            break;
        case Term::Kind::Arith: break;  // handled above
    }
    return out;
}

std::string pictExpr(const Ipm& ipm, const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Literal:
            if (e.term().kind() == Term::Kind::Param)
                return pictRef(ipm, e.term().paramIndex()) + " = \"true\"";
            return pictConstant(ipm, e.term().boolValue());
        case Expr::Kind::Compare: return pictCompare(ipm, e);
        case Expr::Kind::Not: return "NOT (" + pictExpr(ipm, e.child()) + ")";
        case Expr::Kind::Binary: {
            const std::string l = pictExpr(ipm, e.lhs());
            const std::string r = pictExpr(ipm, e.rhs());
            switch (e.connective()) {
                case Connective::And: return "(" + l + ") AND (" + r + ")";
                case Connective::Or: return "(" + l + ") OR (" + r + ")";
                case Connective::Implies: return "(NOT (" + l + ") OR (" + r + "))";
                case Connective::Iff:
                    return "((" + l + ") AND (" + r + ")) OR (NOT (" + l + ") AND NOT (" + r + "))";
            }
        }
    }
    return {};
}

}  // namespace

std::string exportActs(const Ipm& ipm) {
    std::ostringstream os;
    os << "[System]\nName: " << ipm.name() << "\n\n[Parameter]\n";
    for (const auto& p : ipm.parameters()) {
        os << p.name() << ' ';
        switch (p.kind()) {
            case ParamKind::Boolean: os << "(boolean)"; break;
            case ParamKind::Enumerative: os << "(enum)"; break;
            case ParamKind::IntegerRange: os << "(int)"; break;
        }
        os << " : ";
        if (p.kind() == ParamKind::Boolean) {
            os << "true, false";
        } else {
            writeValueList(os, p);
        }
        os << '\n';
    }
    os << "\n[Constraint]\n";
    for (const auto& c : ipm.constraints()) {
        actsExpr(os, ipm, c);
        os << '\n';
    }
    return os.str();
}

std::string exportPict(const Ipm& ipm) {
    std::ostringstream os;
    for (const auto& p : ipm.parameters()) {
        os << p.name() << ": ";
        if (p.kind() == ParamKind::Boolean) {
            os << "true, false";
        } else {
            writeValueList(os, p);
        }
        os << '\n';
    }
    if (!ipm.constraints().empty()) {
        os << '\n';
        for (const auto& c : ipm.constraints()) {
            if (c.kind() == Expr::Kind::Binary && c.connective() == Connective::Implies) {
                os << "IF " << pictExpr(ipm, c.lhs()) << " THEN " << pictExpr(ipm, c.rhs()) << ";\n";
            } else {
                os << pictExpr(ipm, c) << ";\n";
            }
        }
    }
    return os.str();
}

std::string_view toString(ExportFormat format) {
    switch (format) {
        case ExportFormat::Ctwedge: return "ctwedge";
        case ExportFormat::Acts: return "acts";
        case ExportFormat::Pict: return "pict";
    }
    return "?";
}

std::optional<ExportFormat> parseExportFormat(std::string_view text) {
    for (ExportFormat f : {ExportFormat::Ctwedge, ExportFormat::Acts, ExportFormat::Pict})
        if (text == toString(f)) return f;
    return std::nullopt;
}

std::string_view fileExtension(ExportFormat format) {
    switch (format) {
        case ExportFormat::Ctwedge: return ".ctw";
        case ExportFormat::Acts: return ".acts.txt";
        case ExportFormat::Pict: return ".pict.txt";
    }
    return "";
}

std::string render(const Ipm& ipm, ExportFormat format) {
    switch (format) {
        case ExportFormat::Ctwedge: return printCtwedge(ipm);
        case ExportFormat::Acts: return exportActs(ipm);
        case ExportFormat::Pict: return exportPict(ipm);
    }
    return {};
}

std::vector<std::filesystem::path> writeModelFiles(const Ipm& ipm,
                                                   const std::vector<ExportFormat>& formats,
                                                   const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> out;
    for (ExportFormat f : formats) {
        std::filesystem::path path = dir / (ipm.name() + std::string(fileExtension(f)));
        std::ofstream file(path, std::ios::binary);
        file << render(ipm, f);
        if (!file) throw Error("cannot write " + path.string());
        out.push_back(std::move(path));
    }
    return out;
}

}  // namespace ipmgen
