#include "stcsp/parser.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace stcsp {

ModelSource ModelSource::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return {ss.str(), path};
}

std::string ParseDiagnostic::format(const std::string& origin) const {
    std::ostringstream os;
    os << origin << ':' << line << ':' << column << ": "
       << (severity == Severity::Error ? "error" : "warning") << ": " << message;
    return os.str();
}

namespace {

enum class Tok {
    End, Ident, Int,
    Semi, Comma, LBracket, RBracket, DotDot, LParen, RParen,
    Plus, Minus, Star, Slash, Percent, At,
    Lt, Le, EqEq, Ge, Gt, NotEq, Arrow,
    // keywords
    KwVar, KwWith, KwAlphabet, KwUntil, KwIf, KwThen, KwElse, KwFby, KwFirst, KwNext,
    KwAbs, KwNot, KwAnd, KwOr, KwLt, KwLe, KwEq, KwGe, KwGt, KwNe,
    Bad,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    Value number = 0;
    int line = 1;
    int column = 1;
};

const std::unordered_map<std::string, Tok>& keywords() {
    static const std::unordered_map<std::string, Tok> kw = {
        {"var", Tok::KwVar},     {"with", Tok::KwWith},   {"alphabet", Tok::KwAlphabet},
        {"until", Tok::KwUntil}, {"if", Tok::KwIf},       {"then", Tok::KwThen},
        {"else", Tok::KwElse},   {"fby", Tok::KwFby},     {"first", Tok::KwFirst},
        {"next", Tok::KwNext},   {"abs", Tok::KwAbs},     {"not", Tok::KwNot},
        {"and", Tok::KwAnd},     {"or", Tok::KwOr},       {"lt", Tok::KwLt},
        {"le", Tok::KwLe},       {"eq", Tok::KwEq},       {"ge", Tok::KwGe},
        {"gt", Tok::KwGt},       {"ne", Tok::KwNe},
    };
    return kw;
}

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= text_.size()) {
                out.push_back(t);
                return out;
            }
            char c = text_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t start = pos_;
                while (pos_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                    advance();
                t.text = text_.substr(start, pos_ - start);
                auto it = keywords().find(t.text);
                t.kind = it == keywords().end() ? Tok::Ident : it->second;
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t start = pos_;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
                t.text = text_.substr(start, pos_ - start);
                auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
                t.kind = ec == std::errc() ? Tok::Int : Tok::Bad;
            } else {
                t.kind = punct(t.text);
            }
            out.push_back(std::move(t));
        }
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else {
                return;
            }
        }
    }

    bool take(std::string_view s) {
        if (text_.compare(pos_, s.size(), s) != 0) return false;
        for (std::size_t i = 0; i < s.size(); ++i) advance();
        return true;
    }

    Tok punct(std::string& text) {
        struct P { std::string_view s; Tok t; };
        static constexpr P table[] = {
            {"..", Tok::DotDot}, {"->", Tok::Arrow}, {"<=", Tok::Le}, {">=", Tok::Ge},
            {"==", Tok::EqEq},   {"!=", Tok::NotEq}, {";", Tok::Semi}, {",", Tok::Comma},
            {"[", Tok::LBracket}, {"]", Tok::RBracket}, {"(", Tok::LParen}, {")", Tok::RParen},
            {"+", Tok::Plus},    {"-", Tok::Minus},  {"*", Tok::Star}, {"/", Tok::Slash},
            {"%", Tok::Percent}, {"@", Tok::At},     {"<", Tok::Lt},   {">", Tok::Gt},
        };
        for (const auto& p : table) {
            if (take(p.s)) {
                text = std::string(p.s);
                return p.t;
            }
        }
        text = std::string(1, text_[pos_]);
        advance();
        return Tok::Bad;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

struct SyntaxError {
    std::string message;
    int line;
    int column;
};

std::string describe(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    return "'" + t.text + "'";
}

class Parser {
public:
    Parser(std::vector<Token> toks, std::vector<ParseDiagnostic>& diags)
        : toks_(std::move(toks)), diags_(diags) {}

    StCsp run() {
        while (peek().kind != Tok::End) {
            try {
                if (peek().kind == Tok::KwVar) {
                    declaration();
                } else {
                    model_.add_constraint(constraint());
                }
            } catch (const SyntaxError& e) {
                diags_.push_back({ParseDiagnostic::Severity::Error, e.message, e.line, e.column});
                recover();
            }
        }
        return std::move(model_);
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        next();
        return true;
    }
    [[noreturn]] void fail(const Token& at, const std::string& msg) const { throw SyntaxError{msg, at.line, at.column}; }
    const Token& expect(Tok k, const char* what) {
        if (peek().kind != k) fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
        return next();
    }

    void recover() {
        while (peek().kind != Tok::End && peek().kind != Tok::Semi) next();
        accept(Tok::Semi);
    }

    Value signed_int(const char* what) {
        bool neg = accept(Tok::Minus);
        const Token& t = expect(Tok::Int, what);
        return neg ? -t.number : t.number;
    }

    void declaration() {
        expect(Tok::KwVar, "'var'");
        std::vector<Token> names;
        do {
            names.push_back(expect(Tok::Ident, "variable name"));
        } while (accept(Tok::Comma));
        expect(Tok::KwWith, "'with'");
        expect(Tok::KwAlphabet, "'alphabet'");
        const Token& open = expect(Tok::LBracket, "'['");
        Value lo = signed_int("alphabet lower bound");
        expect(Tok::DotDot, "'..'");
        Value hi = signed_int("alphabet upper bound");
        expect(Tok::RBracket, "']'");
        if (lo > hi) fail(open, "malformed alphabet: lower bound " + std::to_string(lo) + " exceeds upper bound " + std::to_string(hi));
        for (std::size_t i = 0; i < names.size(); ++i) {
            bool repeated = model_.find(names[i].text).has_value();
            for (std::size_t j = 0; j < i; ++j) repeated = repeated || names[j].text == names[i].text;
            if (repeated) fail(names[i], "duplicate declaration of '" + names[i].text + "'");
        }
        expect(Tok::Semi, "';'");
        for (const auto& n : names) model_.add_var(n.text, Alphabet(lo, hi));
    }

    Constraint constraint() {
        Expr lhs = expr();
        const Token& rel = peek();
        Constraint c;
        switch (rel.kind) {
        case Tok::Lt: next(); c = Constraint::relation(lhs, Op::Lt, expr()); break;
        case Tok::Le: next(); c = Constraint::relation(lhs, Op::Le, expr()); break;
        case Tok::EqEq: next(); c = Constraint::relation(lhs, Op::Eq, expr()); break;
        case Tok::Ge: next(); c = Constraint::relation(lhs, Op::Ge, expr()); break;
        case Tok::Gt: next(); c = Constraint::relation(lhs, Op::Gt, expr()); break;
        case Tok::NotEq: next(); c = Constraint::relation(lhs, Op::Ne, expr()); break;
        case Tok::Arrow: next(); c = Constraint::implies(lhs, expr()); break;
        case Tok::KwUntil: next(); c = Constraint::until(lhs, expr()); break;
        default:
            fail(rel, "expected a constraint relation (<, <=, ==, >=, >, !=, ->, until), found " + describe(rel));
        }
        expect(Tok::Semi, "';'");
        return c;
    }

    // expr := ite ("fby" expr)?
    Expr expr() {
        Expr lhs = ite();
        if (accept(Tok::KwFby)) return Expr::binary(Op::Fby, lhs, expr());
        return lhs;
    }

    Expr ite() {
        if (!accept(Tok::KwIf)) return disjunction();
        Expr c = disjunction();
        expect(Tok::KwThen, "'then'");
        Expr a = ite();
        expect(Tok::KwElse, "'else'");
        Expr b = ite();
        return Expr::ite(c, a, b);
    }

    Expr disjunction() {
        Expr lhs = conjunction();
        while (accept(Tok::KwOr)) lhs = Expr::binary(Op::Or, lhs, conjunction());
        return lhs;
    }

    Expr conjunction() {
        Expr lhs = negation();
        while (accept(Tok::KwAnd)) lhs = Expr::binary(Op::And, lhs, negation());
        return lhs;
    }

    Expr negation() {
        if (accept(Tok::KwNot)) return Expr::unary(Op::Not, negation());
        return relational();
    }

    static std::optional<Op> relational_op(Tok k) {
        switch (k) {
        case Tok::KwLt: return Op::Lt;
        case Tok::KwLe: return Op::Le;
        case Tok::KwEq: return Op::Eq;
        case Tok::KwGe: return Op::Ge;
        case Tok::KwGt: return Op::Gt;
        case Tok::KwNe: return Op::Ne;
        default: return std::nullopt;
        }
    }

    Expr relational() {
        Expr lhs = additive();
        while (auto op = relational_op(peek().kind)) {
            next();
            lhs = Expr::binary(*op, lhs, additive());
        }
        return lhs;
    }

    Expr additive() {
        Expr lhs = multiplicative();
        for (;;) {
            if (accept(Tok::Plus)) lhs = Expr::binary(Op::Add, lhs, multiplicative());
            else if (accept(Tok::Minus)) lhs = Expr::binary(Op::Sub, lhs, multiplicative());
            else return lhs;
        }
    }

    Expr multiplicative() {
        Expr lhs = prefix();
        for (;;) {
            if (accept(Tok::Star)) lhs = Expr::binary(Op::Mul, lhs, prefix());
            else if (accept(Tok::Slash)) lhs = Expr::binary(Op::Div, lhs, prefix());
            else if (accept(Tok::Percent)) lhs = Expr::binary(Op::Mod, lhs, prefix());
            else return lhs;
        }
    }

    Expr prefix() {
        switch (peek().kind) {
        case Tok::Minus: {
            next();
            Expr e = prefix();
            if (e.is_const()) return Expr::constant(-e.value());
            return Expr::unary(Op::Neg, e);
        }
        case Tok::KwAbs: next(); return Expr::unary(Op::Abs, prefix());
        case Tok::KwFirst: next(); return Expr::unary(Op::First, prefix());
        case Tok::KwNext: next(); return Expr::unary(Op::Next, prefix());
        default: return postfix();
        }
    }

    Expr postfix() {
        Expr e = primary();
        while (peek().kind == Tok::At) {
            const Token& at = next();
            if (peek().kind != Tok::Int) {
                fail(peek().kind == Tok::End ? at : peek(), "'@' requires an integer literal time index, found " + describe(peek()));
            }
            const Token& t = next();
            if (t.number < 1) fail(t, "'@' requires a time index t >= 1, found " + t.text);
            e = Expr::at(e, t.number);
        }
        return e;
    }

    Expr primary() {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::Int:
            next();
            return Expr::constant(t.number);
        case Tok::Ident: {
            next();
            auto v = model_.find(t.text);
            if (!v) fail(t, "unknown identifier '" + t.text + "'");
            return Expr::var(*v);
        }
        case Tok::LParen: {
            next();
            Expr e = expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        case Tok::KwIf:
            return ite();
        case Tok::KwNot:
            return negation();
        default:
            if (keywords().count(t.text)) fail(t, "reserved keyword '" + t.text + "' cannot start an expression");
            fail(t, "expected an expression, found " + describe(t));
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<ParseDiagnostic>& diags_;
    StCsp model_;
};

// ---- unparse --------------------------------------------------------------

enum Level : int {
    kFby = 1, kIte = 2, kOr = 3, kAnd = 4, kNot = 5, kRel = 6, kAdd = 7, kMul = 8, kPrefix = 9, kPostfix = 10, kPrimary = 11,
};

int level_of(const Expr& e) {
    switch (e.op()) {
    case Op::Fby: return kFby;
    case Op::Ite: return kIte;
    case Op::Or: return kOr;
    case Op::And: return kAnd;
    case Op::Not: return kNot;
    case Op::Lt: case Op::Le: case Op::Eq: case Op::Ge: case Op::Gt: case Op::Ne: return kRel;
    case Op::Add: case Op::Sub: return kAdd;
    case Op::Mul: case Op::Div: case Op::Mod: return kMul;
    case Op::Neg: case Op::Abs: case Op::First: case Op::Next: return kPrefix;
    case Op::At: return kPostfix;
    case Op::Const: return e.value() < 0 ? kPrefix : kPrimary;
    case Op::Var: return kPrimary;
    }
    return kPrimary;
}

class Printer {
public:
    explicit Printer(const VarNamer& name) : name_(name) {}

    void print(const Expr& e, int min_level) {
        bool paren = level_of(e) < min_level;
        if (paren) out_ << '(';
        print_bare(e);
        if (paren) out_ << ')';
    }

    std::string str() const { return out_.str(); }
    std::ostringstream& os() { return out_; }

private:
    void print_bare(const Expr& e) {
        switch (e.op()) {
        case Op::Const: out_ << e.value(); return;
        case Op::Var: out_ << name_(e.var_id()); return;
        case Op::Fby:
            print(e.child(0), kFby + 1);
            out_ << " fby ";
            print(e.child(1), kFby);
            return;
        case Op::Ite:
            out_ << "if ";
            print(e.child(0), kOr);
            out_ << " then ";
            print(e.child(1), kIte);
            out_ << " else ";
            print(e.child(2), kIte);
            return;
        case Op::Not:
            out_ << "not ";
            print(e.child(0), kNot);
            return;
        case Op::Neg:
            out_ << '-';
            // "-3" would read back as a literal, so keep the operand grouped
            print(e.child(0), e.child(0).is_const() ? kPrimary + 1 : kPrefix);
            return;
        case Op::Abs:
        case Op::First:
        case Op::Next:
            out_ << op_keyword(e.op()) << ' ';
            print(e.child(0), kPrefix);
            return;
        case Op::At:
            print(e.child(0), kPostfix);
            out_ << " @ " << e.value();
            return;
        default: {
            int lvl = level_of(e);
            print(e.child(0), lvl);
            out_ << ' ' << op_keyword(e.op()) << ' ';
            print(e.child(1), lvl + 1);
            return;
        }
        }
    }

    const VarNamer& name_;
    std::ostringstream out_;
};

std::string_view relation_symbol(Op op) {
    switch (op) {
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Eq: return "==";
    case Op::Ge: return ">=";
    case Op::Gt: return ">";
    case Op::Ne: return "!=";
    default: return "?";
    }
}

}  // namespace

ParseResult parse(const ModelSource& src) {
    ParseResult result;
    Lexer lexer(src.text);
    std::vector<Token> toks = lexer.run();
    for (const auto& t : toks) {
        if (t.kind == Tok::Bad) {
            result.diagnostics.push_back({ParseDiagnostic::Severity::Error, "unexpected character or malformed literal " + describe(t), t.line, t.column});
        }
    }
    if (!result.diagnostics.empty()) return result;
    Parser parser(std::move(toks), result.diagnostics);
    StCsp model = parser.run();
    if (result.diagnostics.empty()) result.model = std::move(model);
    return result;
}

StCsp parse_or_throw(const ModelSource& src) {
    ParseResult r = parse(src);
    if (r.ok()) return std::move(*r.model);
    std::string msg;
    for (const auto& d : r.diagnostics) msg += d.format(src.origin) + "\n";
    throw std::runtime_error(msg);
}

std::string unparse(const Expr& e, const VarNamer& name) {
    Printer p(name);
    p.print(e, kFby);
    return p.str();
}

std::string unparse(const Constraint& c, const VarNamer& name) {
    Printer p(name);
    p.print(c.lhs, kFby);
    switch (c.kind) {
    case ConstraintKind::Rel: p.os() << ' ' << relation_symbol(c.rel) << ' '; break;
    case ConstraintKind::Implies: p.os() << " -> "; break;
    case ConstraintKind::Until: p.os() << " until "; break;
    }
    p.print(c.rhs, kFby);
    return p.str();
}

std::string unparse(const StCsp& p) {
    std::ostringstream os;
    const auto& vars = p.vars();
    for (std::size_t i = 0; i < vars.size();) {
        std::size_t j = i + 1;
        while (j < vars.size() && vars[j].alphabet == vars[i].alphabet) ++j;
        os << "var ";
        for (std::size_t k = i; k < j; ++k) os << (k > i ? ", " : "") << vars[k].name;
        os << " with alphabet [" << vars[i].alphabet.lo << ".." << vars[i].alphabet.hi << "];\n";
        i = j;
    }
    VarNamer namer = [&](VarId v) { return p.var(v).name; };
    for (const auto& c : p.constraints()) os << unparse(c, namer) << ";\n";
    return os.str();
}

}  // namespace stcsp
