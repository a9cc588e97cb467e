#pragma once

#include "telesum/atoms.hpp"
#include "telesum/expr.hpp"

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

namespace telesum {

struct ParseError : std::runtime_error {
    int line, col;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " (line " + std::to_string(line_) + ", col " + std::to_string(col_) + ")"),
          line(line_), col(col_) {}
};

namespace detail {

struct Token {
    enum Type { Int, Name, Punct, End } type;
    std::string text;
    int line, col;
};

class Lexer {
public:
    explicit Lexer(const std::string& s) : s_(s) { advance(); }
    const Token& cur() const { return tok_; }
    void advance() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) bump();
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= s_.size()) {
            tok_ = {Token::End, "", line_, col_};
            return;
        }
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t st = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) bump();
            tok_ = {Token::Int, s_.substr(st, pos_ - st), tok_.line, tok_.col};
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t st = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                bump();
            tok_ = {Token::Name, s_.substr(st, pos_ - st), tok_.line, tok_.col};
            return;
        }
        static const std::string punct = "+-*/^()[],=";
        if (punct.find(c) != std::string::npos) {
            bump();
            tok_ = {Token::Punct, std::string(1, c), tok_.line, tok_.col};
            return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
    }

private:
    void bump() {
        if (s_[pos_] == '\n') { ++line_; col_ = 1; }
        else ++col_;
        ++pos_;
    }
    const std::string& s_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_{};
};

class ExprParser {
public:
    explicit ExprParser(const std::string& s) : lex_(s) {}

    SumExpr parse_full() {
        SumExpr e = parse_expr();
        expect_end();
        return e;
    }

    /// Parses "lhs = rhs".
    std::pair<SumExpr, SumExpr> parse_identity() {
        SumExpr lhs = parse_expr();
        if (!is_punct("=")) fail("'=' expected");
        lex_.advance();
        SumExpr rhs = parse_expr();
        expect_end();
        return {lhs, rhs};
    }

    SumExpr parse_expr() {
        std::vector<SumExpr> terms;
        bool neg = false;
        if (is_punct("-")) { neg = true; lex_.advance(); }
        else if (is_punct("+")) lex_.advance();
        SumExpr t = parse_term();
        terms.push_back(neg ? negate(t) : t);
        for (;;) {
            if (is_punct("+")) {
                lex_.advance();
                terms.push_back(parse_term());
            } else if (is_punct("-")) {
                lex_.advance();
                terms.push_back(negate(parse_term()));
            } else break;
        }
        return SumExpr::add(std::move(terms));
    }

private:
    Lexer lex_;
    std::vector<std::string> bound_;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, lex_.cur().line, lex_.cur().col);
    }
    bool is_punct(const std::string& p) const {
        return lex_.cur().type == Token::Punct && lex_.cur().text == p;
    }
    void expect_punct(const std::string& p) {
        if (!is_punct(p)) fail("'" + p + "' expected");
        lex_.advance();
    }
    void expect_end() {
        if (lex_.cur().type != Token::End) fail("trailing input");
    }

    SumExpr parse_term() {
        SumExpr r = parse_unary();
        for (;;) {
            if (is_punct("*")) {
                lex_.advance();
                r = SumExpr::mul({r, parse_unary()});
            } else if (is_punct("/")) {
                lex_.advance();
                r = SumExpr::mul({r, invert(parse_unary())});
            } else break;
        }
        return r;
    }

    static SumExpr negate(const SumExpr& e) {
        if (e.kind() == NodeKind::Const) return SumExpr::constant(-e.node().cval);
        return SumExpr::mul({SumExpr::constant(-1), e});
    }

    SumExpr parse_unary() {
        if (is_punct("-")) {
            lex_.advance();
            return negate(parse_unary());
        }
        return parse_factor();
    }

    SumExpr parse_factor() {
        SumExpr b = parse_base();
        if (is_punct("^")) {
            lex_.advance();
            if (lex_.cur().type == Token::Int) {
                int e = std::stoi(lex_.cur().text);
                lex_.advance();
                return SumExpr::pow(b, e);
            }
            // symbolic exponent: q^E desugars to the pow atom, (-1)^E to the
            // sign atom; the base must be scalar
            SumExpr e;
            if (lex_.cur().type == Token::Name) {
                e = SumExpr::variable(lex_.cur().text);
                lex_.advance();
            } else if (is_punct("(")) {
                lex_.advance();
                e = parse_expr();
                expect_punct(")");
            } else {
                fail("exponent expected");
            }
            const ExprNode& bn = b.node();
            if (bn.kind == NodeKind::Const && bn.cval == BigRational(-1))
                return SumExpr::atom("altsign", {e});
            if (bn.kind == NodeKind::Const || bn.kind == NodeKind::Var || bn.kind == NodeKind::Rat)
                return SumExpr::atom("pow", {b, e});
            fail("symbolic exponent requires a scalar base");
        }
        return b;
    }

    SumExpr parse_base() {
        const Token t = lex_.cur();
        if (t.type == Token::Int) {
            lex_.advance();
            return SumExpr::constant(BigRational(BigInt(t.text)));
        }
        if (is_punct("(")) {
            lex_.advance();
            SumExpr e = parse_expr();
            expect_punct(")");
            return e;
        }
        if (t.type != Token::Name) fail("expression expected");
        lex_.advance();
        if (t.text == "Sum") {
            expect_punct("(");
            if (lex_.cur().type != Token::Name) fail("summation variable expected");
            std::string var = lex_.cur().text;
            for (const auto& b : bound_)
                if (b == var) throw ParseError("shadowed bound variable " + var, t.line, t.col);
            lex_.advance();
            expect_punct(",");
            bool neg = false;
            if (is_punct("-")) { neg = true; lex_.advance(); }
            if (lex_.cur().type != Token::Int) fail("integer lower bound expected");
            long long lo = std::stoll(lex_.cur().text);
            if (neg) lo = -lo;
            lex_.advance();
            expect_punct(",");
            SumExpr up = parse_expr();
            expect_punct(",");
            bound_.push_back(var);
            SumExpr body = parse_expr();
            bound_.pop_back();
            expect_punct(")");
            return SumExpr::sum(var, lo, up, body);
        }
        if (is_punct("[")) {
            lex_.advance();
            if (lex_.cur().type == Token::Int) {  // absolute index, e.g. X[2]
                long long abs = std::stoll(lex_.cur().text);
                lex_.advance();
                expect_punct("]");
                return SumExpr::generic(t.text, "", abs);
            }
            if (lex_.cur().type != Token::Name) fail("index variable expected");
            std::string idx = lex_.cur().text;
            lex_.advance();
            long long off = 0;
            if (is_punct("+") || is_punct("-")) {
                bool neg = is_punct("-");
                lex_.advance();
                if (lex_.cur().type != Token::Int) fail("integer offset expected");
                off = std::stoll(lex_.cur().text);
                if (neg) off = -off;
                lex_.advance();
            }
            expect_punct("]");
            return SumExpr::generic(t.text, idx, off);
        }
        if (is_punct("(")) {
            auto it = atom_signatures().find(t.text);
            if (it == atom_signatures().end())
                throw ParseError("unknown atom name " + t.text, t.line, t.col);
            lex_.advance();
            std::vector<SumExpr> args;
            if (!is_punct(")")) {
                args.push_back(parse_expr());
                while (is_punct(",")) {
                    lex_.advance();
                    args.push_back(parse_expr());
                }
            }
            expect_punct(")");
            if (static_cast<int>(args.size()) != it->second.arity)
                throw ParseError("atom " + t.text + " expects " + std::to_string(it->second.arity) +
                                     " arguments",
                                 t.line, t.col);
            return SumExpr::atom(t.text, std::move(args));
        }
        return SumExpr::variable(t.text);
    }

    /// Multiplicative inverse for division. Rational-only content inverts as
    /// a rational function; atoms invert through their registered partner.
    SumExpr invert(const SumExpr& e) {
        const ExprNode& n = e.node();
        switch (n.kind) {
            case NodeKind::Const:
                if (n.cval.is_zero()) fail("division by zero");
                return SumExpr::constant(n.cval.inverse());
            case NodeKind::Rat:
                return SumExpr::ratcoeff(n.rat.inverse());
            case NodeKind::Var:
                return SumExpr::ratcoeff(RatFunc::var(n.name, -1));
            case NodeKind::Pow:
                return SumExpr::pow(invert(n.args[0]), n.exp);
            case NodeKind::Mul: {
                std::vector<SumExpr> fs;
                for (const auto& f : n.args) fs.push_back(invert(f));
                return SumExpr::mul(std::move(fs));
            }
            case NodeKind::AtomCall: {
                auto it = atom_signatures().find(n.name);
                if (it != atom_signatures().end() && !it->second.inverse.empty())
                    return SumExpr::atom(it->second.inverse, n.args);
                if (n.name == "pow") return SumExpr::atom("pow", {invert(n.args[0]), n.args[1]});
                fail("cannot divide by atom " + n.name);
            }
            case NodeKind::Add: {
                if (auto rf = as_ratfunc(e)) return SumExpr::ratcoeff(rf->inverse());
                fail("cannot divide by a sum of non-rational terms");
            }
            default:
                fail("cannot divide by this expression");
        }
    }

    /// Expression made only of constants, variables and arithmetic,
    /// converted to a rational function; nullopt otherwise.
    static std::optional<RatFunc> as_ratfunc(const SumExpr& e) {
        const ExprNode& n = e.node();
        switch (n.kind) {
            case NodeKind::Const:
                return RatFunc(n.cval);
            case NodeKind::Var:
                return RatFunc::var(n.name);
            case NodeKind::Rat:
                return n.rat;
            case NodeKind::Add: {
                RatFunc r(0);
                for (const auto& a : n.args) {
                    auto v = as_ratfunc(a);
                    if (!v) return std::nullopt;
                    r += *v;
                }
                return r;
            }
            case NodeKind::Mul: {
                RatFunc r(1);
                for (const auto& a : n.args) {
                    auto v = as_ratfunc(a);
                    if (!v) return std::nullopt;
                    r *= *v;
                }
                return r;
            }
            case NodeKind::Pow: {
                auto v = as_ratfunc(n.args[0]);
                if (!v) return std::nullopt;
                return v->pow(n.exp);
            }
            default:
                return std::nullopt;
        }
    }
};

}  // namespace detail

/// Parses the expression grammar; throws ParseError with position info.
inline SumExpr parse_expr(const std::string& text) {
    detail::ExprParser p(text);
    return p.parse_full();
}

/// Parses "lhs = rhs".
inline std::pair<SumExpr, SumExpr> parse_identity(const std::string& text) {
    detail::ExprParser p(text);
    return p.parse_identity();
}

}  // namespace telesum
