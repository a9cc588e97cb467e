#pragma once

#include "telesum/ratfunc.hpp"

#include <json.hpp>

#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace telesum {

enum class NodeKind { Const, Var, Generic, AtomCall, Sum, Add, Mul, Pow, Rat };

class SumExpr;

struct ExprNode {
    NodeKind kind;
    BigRational cval;           // Const
    std::string name;           // Var name, Generic symbol, AtomCall name
    std::string index_var;      // Generic: X[index_var + offset]
    long long offset = 0;       // Generic offset
    std::vector<SumExpr> args;  // AtomCall args; Add/Mul children; Sum {upper, body}; Pow {base}
    std::string bound_var;      // Sum
    long long lower = 0;        // Sum lower bound
    int exp = 0;                // Pow exponent, >= 0
    RatFunc rat;                // Rat
};

/// Immutable expression tree for nested sums over generic sequences,
/// hypergeometric atoms and rational-function coefficients.
class SumExpr {
public:
    SumExpr() = default;
    const ExprNode& node() const { return *p_; }
    NodeKind kind() const { return p_->kind; }
    bool valid() const { return static_cast<bool>(p_); }

    static SumExpr constant(const BigRational& c) {
        ExprNode n;
        n.kind = NodeKind::Const;
        n.cval = c;
        return wrap(std::move(n));
    }
    static SumExpr constant(long long c) { return constant(BigRational(c)); }
    static SumExpr variable(const std::string& v) {
        ExprNode n;
        n.kind = NodeKind::Var;
        n.name = v;
        return wrap(std::move(n));
    }
    static SumExpr generic(const std::string& sym, const std::string& idx, long long off) {
        ExprNode n;
        n.kind = NodeKind::Generic;
        n.name = sym;
        n.index_var = idx;
        n.offset = off;
        return wrap(std::move(n));
    }
    static SumExpr atom(const std::string& name, std::vector<SumExpr> args) {
        ExprNode n;
        n.kind = NodeKind::AtomCall;
        n.name = name;
        n.args = std::move(args);
        return wrap(std::move(n));
    }
    static SumExpr sum(const std::string& var, long long lower, SumExpr upper, SumExpr body) {
        ExprNode n;
        n.kind = NodeKind::Sum;
        n.bound_var = var;
        n.lower = lower;
        n.args = {std::move(upper), std::move(body)};
        return wrap(std::move(n));
    }
    static SumExpr add(std::vector<SumExpr> children) {
        if (children.empty()) return constant(0);
        if (children.size() == 1) return children[0];
        ExprNode n;
        n.kind = NodeKind::Add;
        n.args = std::move(children);
        return wrap(std::move(n));
    }
    static SumExpr mul(std::vector<SumExpr> children) {
        if (children.empty()) return constant(1);
        if (children.size() == 1) return children[0];
        ExprNode n;
        n.kind = NodeKind::Mul;
        n.args = std::move(children);
        return wrap(std::move(n));
    }
    static SumExpr pow(SumExpr base, int e) {
        if (e < 0) throw std::domain_error("SumExpr: negative exponent");
        ExprNode n;
        n.kind = NodeKind::Pow;
        n.exp = e;
        n.args = {std::move(base)};
        return wrap(std::move(n));
    }
    static SumExpr ratcoeff(const RatFunc& f) {
        ExprNode n;
        n.kind = NodeKind::Rat;
        n.rat = f;
        return wrap(std::move(n));
    }

    const SumExpr& upper() const { return p_->args[0]; }
    const SumExpr& body() const { return p_->args[1]; }

    friend SumExpr operator+(const SumExpr& a, const SumExpr& b) { return add({a, b}); }
    friend SumExpr operator-(const SumExpr& a, const SumExpr& b) {
        return add({a, mul({constant(-1), b})});
    }
    friend SumExpr operator*(const SumExpr& a, const SumExpr& b) { return mul({a, b}); }

private:
    std::shared_ptr<const ExprNode> p_;
    static SumExpr wrap(ExprNode n) {
        SumExpr e;
        e.p_ = std::make_shared<const ExprNode>(std::move(n));
        return e;
    }
};

// ---------------------------------------------------------------------------
// Structural comparison (total order on trees; used for canonical ordering)
// ---------------------------------------------------------------------------

inline int expr_cmp(const SumExpr& a, const SumExpr& b) {
    const ExprNode& x = a.node();
    const ExprNode& y = b.node();
    if (x.kind != y.kind) return static_cast<int>(x.kind) < static_cast<int>(y.kind) ? -1 : 1;
    auto c3 = [](const auto& u, const auto& v) { return u < v ? -1 : (v < u ? 1 : 0); };
    switch (x.kind) {
        case NodeKind::Const:
            return c3(x.cval, y.cval);
        case NodeKind::Var:
            return c3(x.name, y.name);
        case NodeKind::Generic: {
            if (int c = c3(x.name, y.name)) return c;
            if (int c = c3(x.index_var, y.index_var)) return c;
            return c3(x.offset, y.offset);
        }
        case NodeKind::Rat:
            return c3(x.rat, y.rat);
        default:
            break;
    }
    if (x.kind == NodeKind::AtomCall)
        if (int c = c3(x.name, y.name)) return c;
    if (x.kind == NodeKind::Sum) {
        if (int c = c3(x.bound_var, y.bound_var)) return c;
        if (int c = c3(x.lower, y.lower)) return c;
    }
    if (x.kind == NodeKind::Pow)
        if (int c = c3(x.exp, y.exp)) return c;
    if (x.args.size() != y.args.size()) return x.args.size() < y.args.size() ? -1 : 1;
    for (size_t i = 0; i < x.args.size(); ++i)
        if (int c = expr_cmp(x.args[i], y.args[i])) return c;
    return 0;
}

inline bool expr_equal(const SumExpr& a, const SumExpr& b) { return expr_cmp(a, b) == 0; }

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

enum class PrintFormat { Plain, Latex, Json };

namespace detail {

inline std::string offset_suffix(long long off) {
    if (off == 0) return "";
    std::ostringstream os;
    if (off > 0) os << "+" << off;
    else os << "-" << -off;
    return os.str();
}

inline bool needs_parens_in_mul(const SumExpr& e) {
    return e.kind() == NodeKind::Add;
}

inline std::string print_plain(const SumExpr& e);

inline std::string print_factor(const SumExpr& e) {
    std::string s = print_plain(e);
    if (needs_parens_in_mul(e)) return "(" + s + ")";
    return s;
}

inline std::string print_plain(const SumExpr& e) {
    const ExprNode& n = e.node();
    std::ostringstream os;
    switch (n.kind) {
        case NodeKind::Const:
            if (n.cval.sign() < 0) return "(" + n.cval.str() + ")";
            return n.cval.str();
        case NodeKind::Var:
            return n.name;
        case NodeKind::Generic:
            if (n.index_var.empty()) os << n.name << "[" << n.offset << "]";
            else os << n.name << "[" << n.index_var << offset_suffix(n.offset) << "]";
            return os.str();
        case NodeKind::AtomCall: {
            auto exp_str = [&](const SumExpr& e2) {
                std::string s = print_plain(e2);
                if (e2.kind() == NodeKind::Var) return s;
                if (s.size() >= 2 && s.front() == '(' && s.back() == ')') return s;
                return "(" + s + ")";
            };
            if (n.name == "altsign") return "(-1)^" + exp_str(n.args[0]);
            if (n.name == "pow") {
                const ExprNode& b = n.args[0].node();
                bool scalar_base = b.kind == NodeKind::Var ||
                                   (b.kind == NodeKind::Const && b.cval.sign() > 0 && b.cval.is_integer());
                std::string bs = print_plain(n.args[0]);
                if (!scalar_base && !(bs.size() >= 2 && bs.front() == '(' && bs.back() == ')'))
                    bs = "(" + bs + ")";
                return bs + "^" + exp_str(n.args[1]);
            }
            os << n.name << "(";
            for (size_t i = 0; i < n.args.size(); ++i) {
                if (i) os << ",";
                os << print_plain(n.args[i]);
            }
            os << ")";
            return os.str();
        }
        case NodeKind::Sum:
            os << "Sum(" << n.bound_var << "," << n.lower << "," << print_plain(n.args[0]) << ","
               << print_plain(n.args[1]) << ")";
            return os.str();
        case NodeKind::Add: {
            for (size_t i = 0; i < n.args.size(); ++i) {
                std::string t = print_plain(n.args[i]);
                if (i == 0) { os << t; continue; }
                if (!t.empty() && t[0] == '-') os << " - " << t.substr(1);
                else os << " + " << t;
            }
            return os.str();
        }
        case NodeKind::Mul: {
            // a leading -1 constant prints as a sign
            size_t start = 0;
            const auto& f0 = n.args[0].node();
            if (f0.kind == NodeKind::Const && f0.cval == BigRational(-1) && n.args.size() > 1) {
                os << "-";
                start = 1;
            }
            for (size_t i = start; i < n.args.size(); ++i) {
                if (i > start) os << "*";
                os << print_factor(n.args[i]);
            }
            return os.str();
        }
        case NodeKind::Pow: {
            std::string b = print_plain(n.args[0]);
            NodeKind bk = n.args[0].kind();
            bool caret_atom = bk == NodeKind::AtomCall &&
                              (n.args[0].node().name == "altsign" || n.args[0].node().name == "pow");
            if (bk == NodeKind::Add || bk == NodeKind::Mul || bk == NodeKind::Pow || caret_atom)
                b = "(" + b + ")";
            os << b << "^" << n.exp;
            return os.str();
        }
        case NodeKind::Rat: {
            if (n.rat.is_constant()) {
                BigRational c = n.rat.constant_value();
                if (c.sign() < 0 || !c.is_integer()) return "(" + c.str() + ")";
                return c.str();
            }
            return "(" + n.rat.str() + ")";
        }
    }
    return "";
}

inline std::string print_latex(const SumExpr& e);

inline std::string latex_factor(const SumExpr& e) {
    std::string s = print_latex(e);
    if (e.kind() == NodeKind::Add) return "\\left(" + s + "\\right)";
    return s;
}

inline std::string print_latex(const SumExpr& e) {
    const ExprNode& n = e.node();
    std::ostringstream os;
    switch (n.kind) {
        case NodeKind::Const:
            if (!n.cval.is_integer())
                return "\\frac{" + n.cval.numerator().str() + "}{" + n.cval.denominator().str() + "}";
            return n.cval.str();
        case NodeKind::Var:
            return n.name;
        case NodeKind::Generic:
            os << n.name << "_{" << n.index_var << offset_suffix(n.offset) << "}";
            return os.str();
        case NodeKind::AtomCall: {
            if (n.name == "binom" && n.args.size() == 2)
                return "\\binom{" + print_latex(n.args[0]) + "}{" + print_latex(n.args[1]) + "}";
            if (n.name == "invbinom" && n.args.size() == 2)
                return "\\binom{" + print_latex(n.args[0]) + "}{" + print_latex(n.args[1]) + "}^{-1}";
            if (n.name == "harmonic" && n.args.size() == 1)
                return "H_{" + print_latex(n.args[0]) + "}";
            if (n.name == "altsign" && n.args.size() == 1)
                return "(-1)^{" + print_latex(n.args[0]) + "}";
            if (n.name == "pow" && n.args.size() == 2)
                return "{" + print_latex(n.args[0]) + "}^{" + print_latex(n.args[1]) + "}";
            os << "\\operatorname{" << n.name << "}(";
            for (size_t i = 0; i < n.args.size(); ++i) {
                if (i) os << ",";
                os << print_latex(n.args[i]);
            }
            os << ")";
            return os.str();
        }
        case NodeKind::Sum:
            os << "\\sum_{" << n.bound_var << "=" << n.lower << "}^{" << print_latex(n.args[0])
               << "} " << latex_factor(n.args[1]);
            return os.str();
        case NodeKind::Add: {
            for (size_t i = 0; i < n.args.size(); ++i) {
                std::string t = print_latex(n.args[i]);
                if (i == 0) { os << t; continue; }
                if (!t.empty() && t[0] == '-') os << " - " << t.substr(1);
                else os << " + " << t;
            }
            return os.str();
        }
        case NodeKind::Mul: {
            size_t start = 0;
            const auto& f0 = n.args[0].node();
            if (f0.kind == NodeKind::Const && f0.cval == BigRational(-1) && n.args.size() > 1) {
                os << "-";
                start = 1;
            }
            for (size_t i = start; i < n.args.size(); ++i) {
                if (i > start) os << " \\, ";
                os << latex_factor(n.args[i]);
            }
            return os.str();
        }
        case NodeKind::Pow: {
            std::string b = print_latex(n.args[0]);
            NodeKind bk = n.args[0].kind();
            if (bk == NodeKind::Add || bk == NodeKind::Mul || bk == NodeKind::Sum)
                b = "\\left(" + b + "\\right)";
            os << b << "^{" << n.exp << "}";
            return os.str();
        }
        case NodeKind::Rat:
            return n.rat.str();
    }
    return "";
}

}  // namespace detail

inline nlohmann::json expr_to_json(const SumExpr& e) {
    using nlohmann::json;
    const ExprNode& n = e.node();
    json j;
    switch (n.kind) {
        case NodeKind::Const:
            j["kind"] = "const";
            j["value"] = n.cval.str();
            break;
        case NodeKind::Var:
            j["kind"] = "var";
            j["name"] = n.name;
            break;
        case NodeKind::Generic:
            j["kind"] = "generic";
            j["symbol"] = n.name;
            j["index"] = n.index_var;
            j["offset"] = n.offset;
            break;
        case NodeKind::AtomCall: {
            j["kind"] = "atom";
            j["name"] = n.name;
            json args = json::array();
            for (const auto& a : n.args) args.push_back(expr_to_json(a));
            j["args"] = args;
            break;
        }
        case NodeKind::Sum:
            j["kind"] = "sum";
            j["var"] = n.bound_var;
            j["lower"] = n.lower;
            j["upper"] = expr_to_json(n.args[0]);
            j["body"] = expr_to_json(n.args[1]);
            break;
        case NodeKind::Add:
        case NodeKind::Mul: {
            j["kind"] = n.kind == NodeKind::Add ? "add" : "mul";
            json args = json::array();
            for (const auto& a : n.args) args.push_back(expr_to_json(a));
            j["args"] = args;
            break;
        }
        case NodeKind::Pow:
            j["kind"] = "pow";
            j["base"] = expr_to_json(n.args[0]);
            j["exp"] = n.exp;
            break;
        case NodeKind::Rat:
            j["kind"] = "rat";
            j["num"] = n.rat.num().str();
            j["den"] = n.rat.den().str();
            break;
    }
    return j;
}

inline SumExpr expr_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "const") return SumExpr::constant(BigRational::from_string(j.at("value").get<std::string>()));
    if (kind == "var") return SumExpr::variable(j.at("name").get<std::string>());
    if (kind == "generic")
        return SumExpr::generic(j.at("symbol").get<std::string>(), j.at("index").get<std::string>(),
                                j.at("offset").get<long long>());
    if (kind == "atom") {
        std::vector<SumExpr> args;
        for (const auto& a : j.at("args")) args.push_back(expr_from_json(a));
        return SumExpr::atom(j.at("name").get<std::string>(), std::move(args));
    }
    if (kind == "sum")
        return SumExpr::sum(j.at("var").get<std::string>(), j.at("lower").get<long long>(),
                            expr_from_json(j.at("upper")), expr_from_json(j.at("body")));
    if (kind == "add" || kind == "mul") {
        std::vector<SumExpr> args;
        for (const auto& a : j.at("args")) args.push_back(expr_from_json(a));
        return kind == "add" ? SumExpr::add(std::move(args)) : SumExpr::mul(std::move(args));
    }
    if (kind == "pow") return SumExpr::pow(expr_from_json(j.at("base")), j.at("exp").get<int>());
    if (kind == "rat")
        return SumExpr::ratcoeff(RatFunc(MultiPoly::parse(j.at("num").get<std::string>()),
                                         MultiPoly::parse(j.at("den").get<std::string>())));
    throw std::domain_error("expr_from_json: unknown node kind " + kind);
}

inline std::string print(const SumExpr& e, PrintFormat fmt = PrintFormat::Plain) {
    switch (fmt) {
        case PrintFormat::Plain:
            return detail::print_plain(e);
        case PrintFormat::Latex:
            return detail::print_latex(e);
        case PrintFormat::Json:
            return expr_to_json(e).dump();
    }
    return "";
}

// ---------------------------------------------------------------------------
// Free variables, shift, substitution
// ---------------------------------------------------------------------------

namespace detail {
inline void free_vars_rec(const SumExpr& e, std::set<std::string>& bound, std::set<std::string>& out) {
    const ExprNode& n = e.node();
    switch (n.kind) {
        case NodeKind::Var:
            if (!bound.count(n.name)) out.insert(n.name);
            return;
        case NodeKind::Generic:
            if (!n.index_var.empty() && !bound.count(n.index_var)) out.insert(n.index_var);
            return;
        case NodeKind::Rat:
            for (const auto& v : n.rat.num().vars())
                if (!bound.count(v)) out.insert(v);
            for (const auto& v : n.rat.den().vars())
                if (!bound.count(v)) out.insert(v);
            return;
        case NodeKind::Sum: {
            free_vars_rec(n.args[0], bound, out);
            bool inserted = bound.insert(n.bound_var).second;
            free_vars_rec(n.args[1], bound, out);
            if (inserted) bound.erase(n.bound_var);
            return;
        }
        default:
            for (const auto& a : n.args) free_vars_rec(a, bound, out);
    }
}
}  // namespace detail

inline std::set<std::string> free_vars(const SumExpr& e) {
    std::set<std::string> bound, out;
    detail::free_vars_rec(e, bound, out);
    return out;
}

/// Substitutes var -> var + m everywhere var occurs free: plain variables
/// become var+m, generic-atom offsets shift, sum upper bounds follow.
inline SumExpr shift(const SumExpr& e, const std::string& var, long long m) {
    if (m == 0) return e;
    const ExprNode& n = e.node();
    switch (n.kind) {
        case NodeKind::Const:
            return e;
        case NodeKind::Var:
            if (n.name == var) return SumExpr::variable(var) + SumExpr::constant(m);
            return e;
        case NodeKind::Generic:
            if (n.index_var == var) return SumExpr::generic(n.name, var, n.offset + m);
            return e;
        case NodeKind::Rat:
            if (n.rat.has_var(var)) return SumExpr::ratcoeff(n.rat.shift_var(var, m));
            return e;
        case NodeKind::Sum: {
            if (n.bound_var == var) return e;  // var not free below
            return SumExpr::sum(n.bound_var, n.lower, shift(n.args[0], var, m), shift(n.args[1], var, m));
        }
        case NodeKind::AtomCall: {
            std::vector<SumExpr> as;
            as.reserve(n.args.size());
            for (const auto& a : n.args) as.push_back(shift(a, var, m));
            return SumExpr::atom(n.name, std::move(as));
        }
        case NodeKind::Add:
        case NodeKind::Mul: {
            std::vector<SumExpr> as;
            as.reserve(n.args.size());
            for (const auto& a : n.args) as.push_back(shift(a, var, m));
            return n.kind == NodeKind::Add ? SumExpr::add(std::move(as)) : SumExpr::mul(std::move(as));
        }
        case NodeKind::Pow:
            return SumExpr::pow(shift(n.args[0], var, m), n.exp);
    }
    return e;
}

/// Renames a free variable (does not descend under a sum that rebinds it).
inline SumExpr rename_free_var(const SumExpr& e, const std::string& from, const std::string& to) {
    if (from == to) return e;
    const ExprNode& n = e.node();
    switch (n.kind) {
        case NodeKind::Var:
            return n.name == from ? SumExpr::variable(to) : e;
        case NodeKind::Generic:
            return n.index_var == from ? SumExpr::generic(n.name, to, n.offset) : e;
        case NodeKind::Rat: {
            if (!n.rat.has_var(from)) return e;
            return SumExpr::ratcoeff(
                RatFunc(n.rat.num().rename_var(from, to), n.rat.den().rename_var(from, to)));
        }
        case NodeKind::Sum: {
            if (n.bound_var == from) return e;
            return SumExpr::sum(n.bound_var, n.lower, rename_free_var(n.args[0], from, to),
                                rename_free_var(n.args[1], from, to));
        }
        case NodeKind::AtomCall:
        case NodeKind::Add:
        case NodeKind::Mul: {
            std::vector<SumExpr> as;
            as.reserve(n.args.size());
            for (const auto& a : n.args) as.push_back(rename_free_var(a, from, to));
            if (n.kind == NodeKind::AtomCall) return SumExpr::atom(n.name, std::move(as));
            return n.kind == NodeKind::Add ? SumExpr::add(std::move(as)) : SumExpr::mul(std::move(as));
        }
        case NodeKind::Pow:
            return SumExpr::pow(rename_free_var(n.args[0], from, to), n.exp);
        default:
            return e;
    }
}

/// Replaces every occurrence of the generic symbol: X[v+l] becomes the
/// replacement anchored at v, shifted by l. The replacement's free index
/// variable is `anchor`. Capture of a bound variable is an error.
inline SumExpr substitute_generic(const SumExpr& e, const std::string& sym, const SumExpr& replacement,
                                  const std::string& anchor) {
    struct Impl {
        const std::string& sym;
        const SumExpr& repl;
        const std::string& anchor;
        std::set<std::string> bound;
        SumExpr run(const SumExpr& e) {
            const ExprNode& n = e.node();
            switch (n.kind) {
                case NodeKind::Generic: {
                    if (n.name != sym) return e;
                    for (const auto& fv : free_vars(repl))
                        if (fv != anchor && bound.count(fv))
                            throw std::domain_error("substitute: replacement captures bound variable " + fv);
                    SumExpr anchored = rename_free_var(repl, anchor, n.index_var);
                    return shift(anchored, n.index_var, n.offset);
                }
                case NodeKind::Sum: {
                    SumExpr up = run(n.args[0]);
                    bool ins = bound.insert(n.bound_var).second;
                    SumExpr body = run(n.args[1]);
                    if (ins) bound.erase(n.bound_var);
                    return SumExpr::sum(n.bound_var, n.lower, up, body);
                }
                case NodeKind::AtomCall:
                case NodeKind::Add:
                case NodeKind::Mul: {
                    std::vector<SumExpr> as;
                    as.reserve(n.args.size());
                    for (const auto& a : n.args) as.push_back(run(a));
                    if (n.kind == NodeKind::AtomCall) return SumExpr::atom(n.name, std::move(as));
                    return n.kind == NodeKind::Add ? SumExpr::add(std::move(as))
                                                   : SumExpr::mul(std::move(as));
                }
                case NodeKind::Pow:
                    return SumExpr::pow(run(n.args[0]), n.exp);
                default:
                    return e;
            }
        }
    };
    Impl impl{sym, replacement, anchor, {}};
    return impl.run(e);
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

inline SumExpr normalize(const SumExpr& e);

namespace detail {

// splits a normalized factor list into (scalar coefficient, residual factors)
inline std::pair<RatFunc, std::vector<SumExpr>> split_coeff(const std::vector<SumExpr>& factors) {
    RatFunc coeff(1);
    std::vector<SumExpr> rest;
    for (const auto& f : factors) {
        const ExprNode& n = f.node();
        if (n.kind == NodeKind::Const) coeff *= RatFunc(n.cval);
        else if (n.kind == NodeKind::Rat) coeff *= n.rat;
        else rest.push_back(f);
    }
    return {coeff, rest};
}

inline SumExpr coeff_to_expr(const RatFunc& c) {
    if (c.is_constant()) return SumExpr::constant(c.constant_value());
    return SumExpr::ratcoeff(c);
}

SumExpr rebuild_term(const RatFunc& coeff, std::vector<SumExpr> rest);

}  // namespace detail

// forward-declared helpers defined after normalize()
inline SumExpr poly_to_expr(const MultiPoly& p);

namespace detail {

inline SumExpr rebuild_term(const RatFunc& coeff, std::vector<SumExpr> rest) {
    if (coeff.is_zero()) return SumExpr::constant(0);
    RatFunc c = coeff;
    if (!c.is_constant() && c.is_polynomial()) {
        // a polynomial scalar becomes a structural factor instead of a Rat node
        SumExpr pf = telesum::normalize(poly_to_expr(c.poly_value()));
        rest.push_back(pf);
        std::sort(rest.begin(), rest.end(),
                  [](const SumExpr& a, const SumExpr& b) { return expr_cmp(a, b) < 0; });
        c = RatFunc(1);
    }
    if (rest.empty()) return coeff_to_expr(c);
    bool coeff_one = c.is_constant() && c.constant_value().is_one();
    std::vector<SumExpr> fs;
    if (!coeff_one) fs.push_back(coeff_to_expr(c));
    for (auto& r : rest) fs.push_back(std::move(r));
    return SumExpr::mul(std::move(fs));
}

}  // namespace detail

/// True when the atom is the order-2 root-of-unity sign atom.
inline bool is_altsign_atom(const std::string& name) { return name == "altsign"; }

/// Polynomial rendered as an explicit Add-of-Mul expression (normal form
/// keeps polynomial content structural; Rat nodes are reserved for symbolic
/// denominators).
inline SumExpr poly_to_expr(const MultiPoly& p) {
    if (p.is_zero()) return SumExpr::constant(0);
    std::vector<SumExpr> terms;
    for (const auto& [mono, coeff] : p.terms()) {
        std::vector<SumExpr> fs;
        if (!coeff.is_one() || std::all_of(mono.begin(), mono.end(), [](int e) { return e == 0; }))
            fs.push_back(SumExpr::constant(coeff));
        for (size_t i = 0; i < p.vars().size(); ++i) {
            if (mono[i] == 0) continue;
            SumExpr v = SumExpr::variable(p.vars()[i]);
            fs.push_back(mono[i] == 1 ? v : SumExpr::pow(v, mono[i]));
        }
        terms.push_back(SumExpr::mul(std::move(fs)));
    }
    return SumExpr::add(std::move(terms));
}

/// Flattens sums and products, folds constants, merges like terms and like
/// factors, orders children canonically, applies the sign-atom relation
/// ((-1)^v)^2 = 1, and turns constant-empty ranges into 0. Idempotent.
inline SumExpr normalize(const SumExpr& e) {
    const ExprNode& n = e.node();
    switch (n.kind) {
        case NodeKind::Const:
        case NodeKind::Var:
        case NodeKind::Generic:
            return e;
        case NodeKind::Rat: {
            if (n.rat.is_constant()) return SumExpr::constant(n.rat.constant_value());
            if (n.rat.is_polynomial()) return normalize(poly_to_expr(n.rat.poly_value()));
            return e;
        }
        case NodeKind::AtomCall: {
            std::vector<SumExpr> as;
            as.reserve(n.args.size());
            for (const auto& a : n.args) as.push_back(normalize(a));
            return SumExpr::atom(n.name, std::move(as));
        }
        case NodeKind::Sum: {
            SumExpr up = normalize(n.args[0]);
            SumExpr body = normalize(n.args[1]);
            if (up.kind() == NodeKind::Const) {
                if (!up.node().cval.is_integer())
                    throw std::domain_error("Sum: non-integer constant upper bound");
                if (up.node().cval < BigRational(n.lower)) return SumExpr::constant(0);
            }
            if (body.kind() == NodeKind::Const && body.node().cval.is_zero())
                return SumExpr::constant(0);
            return SumExpr::sum(n.bound_var, n.lower, up, body);
        }
        case NodeKind::Pow: {
            SumExpr b = normalize(n.args[0]);
            int ex = n.exp;
            if (ex == 0) return SumExpr::constant(1);
            const ExprNode& bn = b.node();
            if (bn.kind == NodeKind::AtomCall && is_altsign_atom(bn.name)) ex %= 2;  // t^2 = 1
            if (ex == 0) return SumExpr::constant(1);
            if (ex == 1) return b;
            if (bn.kind == NodeKind::Const) return SumExpr::constant(bn.cval.pow(ex));
            if (bn.kind == NodeKind::Rat) return normalize(SumExpr::ratcoeff(bn.rat.pow(ex)));
            if (bn.kind == NodeKind::Pow) return normalize(SumExpr::pow(bn.args[0], bn.exp * ex));
            if (bn.kind == NodeKind::Mul) {
                std::vector<SumExpr> fs;
                for (const auto& f : bn.args) fs.push_back(SumExpr::pow(f, ex));
                return normalize(SumExpr::mul(std::move(fs)));
            }
            return SumExpr::pow(b, ex);
        }
        case NodeKind::Mul: {
            std::vector<SumExpr> flat;
            for (const auto& a : n.args) {
                SumExpr na = normalize(a);
                if (na.kind() == NodeKind::Mul)
                    for (const auto& f : na.node().args) flat.push_back(f);
                else flat.push_back(na);
            }
            auto [coeff, rest] = detail::split_coeff(flat);
            if (coeff.is_zero()) return SumExpr::constant(0);
            // merge equal bases into powers
            std::vector<std::pair<SumExpr, int>> bases;
            for (const auto& f : rest) {
                SumExpr base = f;
                int ex = 1;
                if (f.kind() == NodeKind::Pow) {
                    base = f.node().args[0];
                    ex = f.node().exp;
                }
                bool merged = false;
                for (auto& [b, x] : bases)
                    if (expr_equal(b, base)) { x += ex; merged = true; break; }
                if (!merged) bases.emplace_back(base, ex);
            }
            std::vector<SumExpr> fs;
            for (auto& [b, x] : bases) {
                int ex = x;
                const ExprNode& bn = b.node();
                if (bn.kind == NodeKind::AtomCall && is_altsign_atom(bn.name)) ex %= 2;
                if (ex == 0) continue;
                fs.push_back(ex == 1 ? b : SumExpr::pow(b, ex));
            }
            std::sort(fs.begin(), fs.end(), [](const SumExpr& a, const SumExpr& b) {
                return expr_cmp(a, b) < 0;
            });
            return detail::rebuild_term(coeff, std::move(fs));
        }
        case NodeKind::Add: {
            std::vector<SumExpr> flat;
            for (const auto& a : n.args) {
                SumExpr na = normalize(a);
                if (na.kind() == NodeKind::Add)
                    for (const auto& t : na.node().args) flat.push_back(t);
                else flat.push_back(na);
            }
            // combine like terms: key = canonical residual factor list
            std::vector<std::pair<std::vector<SumExpr>, RatFunc>> terms;
            for (const auto& t : flat) {
                std::vector<SumExpr> fs;
                if (t.kind() == NodeKind::Mul)
                    fs = t.node().args;
                else
                    fs = {t};
                auto [coeff, rest] = detail::split_coeff(fs);
                if (coeff.is_zero()) continue;
                bool merged = false;
                for (auto& [key, c] : terms) {
                    if (key.size() != rest.size()) continue;
                    bool eq = true;
                    for (size_t i = 0; i < key.size(); ++i)
                        if (!expr_equal(key[i], rest[i])) { eq = false; break; }
                    if (eq) { c += coeff; merged = true; break; }
                }
                if (!merged) terms.emplace_back(rest, coeff);
            }
            std::vector<SumExpr> out;
            for (auto& [key, c] : terms) {
                if (c.is_zero()) continue;
                out.push_back(detail::rebuild_term(c, key));
            }
            std::sort(out.begin(), out.end(), [](const SumExpr& a, const SumExpr& b) {
                return expr_cmp(a, b) < 0;
            });
            if (out.empty()) return SumExpr::constant(0);
            return SumExpr::add(std::move(out));
        }
    }
    return e;
}

}  // namespace telesum
