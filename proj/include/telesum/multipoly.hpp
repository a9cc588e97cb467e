#pragma once

#include "telesum/rational.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace telesum {

/// Sparse multivariate polynomial over BigRational.
///
/// Variables are held as a sorted name list; terms map exponent vectors
/// (aligned with the variable list) to nonzero coefficients, ordered
/// graded-lexicographically with the largest term first. Unused variables
/// are pruned, so structurally equal polynomials compare equal.
class MultiPoly {
public:
    using Mono = std::vector<int>;

    struct GrlexGreater {
        bool operator()(const Mono& a, const Mono& b) const {
            int da = std::accumulate(a.begin(), a.end(), 0);
            int db = std::accumulate(b.begin(), b.end(), 0);
            if (da != db) return da > db;
            return a > b;  // lexicographic tie-break
        }
    };
    using TermMap = std::map<Mono, BigRational, GrlexGreater>;

    MultiPoly() = default;
    MultiPoly(const BigRational& c) {  // NOLINT(google-explicit-constructor)
        if (!c.is_zero()) terms_[{}] = c;
    }
    MultiPoly(long long c) : MultiPoly(BigRational(c)) {}  // NOLINT(google-explicit-constructor)

    static MultiPoly var(const std::string& name, int exp = 1) {
        MultiPoly p;
        if (exp == 0) return MultiPoly(1);
        p.vars_ = {name};
        p.terms_[{exp}] = BigRational(1);
        return p;
    }

    static MultiPoly constant(const BigRational& c) { return MultiPoly(c); }

    const std::vector<std::string>& vars() const { return vars_; }
    const TermMap& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }
    BigRational constant_value() const {
        if (is_zero()) return BigRational(0);
        if (!is_constant()) throw std::domain_error("MultiPoly: not a constant");
        return terms_.begin()->second;
    }

    int total_degree() const {
        int d = 0;
        for (const auto& [m, c] : terms_)
            d = std::max(d, std::accumulate(m.begin(), m.end(), 0));
        return terms_.empty() ? -1 : d;
    }

    int degree(const std::string& v) const {
        auto it = std::find(vars_.begin(), vars_.end(), v);
        if (it == vars_.end()) return is_zero() ? -1 : 0;
        size_t idx = it - vars_.begin();
        int d = -1;
        for (const auto& [m, c] : terms_) d = std::max(d, m[idx]);
        return is_zero() ? -1 : d;
    }

    bool has_var(const std::string& v) const { return degree(v) > 0; }

    BigRational leading_coefficient() const {
        return is_zero() ? BigRational(0) : terms_.begin()->second;
    }

    MultiPoly operator-() const {
        MultiPoly r(*this);
        for (auto& [m, c] : r.terms_) c = -c;
        return r;
    }

    friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
        MultiPoly r;
        merge(a, b, r, false);
        return r;
    }
    friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) {
        MultiPoly r;
        merge(a, b, r, true);
        return r;
    }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
        if (a.is_zero() || b.is_zero()) return MultiPoly();
        std::vector<std::string> uv;
        auto ra = remap(a, b, uv);
        auto rb = remap(b, a, uv);
        MultiPoly r;
        r.vars_ = uv;
        for (const auto& [ma, ca] : ra)
            for (const auto& [mb, cb] : rb) {
                Mono m(uv.size());
                for (size_t i = 0; i < uv.size(); ++i) m[i] = ma[i] + mb[i];
                BigRational& slot = r.terms_[m];
                slot += ca * cb;
                if (slot.is_zero()) r.terms_.erase(m);
            }
        r.prune();
        return r;
    }
    MultiPoly& operator+=(const MultiPoly& o) { return *this = *this + o; }
    MultiPoly& operator-=(const MultiPoly& o) { return *this = *this - o; }
    MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }

    MultiPoly operator*(const BigRational& c) const {
        if (c.is_zero()) return MultiPoly();
        MultiPoly r(*this);
        for (auto& [m, v] : r.terms_) v *= c;
        return r;
    }
    MultiPoly operator/(const BigRational& c) const { return *this * c.inverse(); }

    friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
        return a.vars_ == b.vars_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const MultiPoly& a, const MultiPoly& b) { return !(a == b); }
    friend bool operator<(const MultiPoly& a, const MultiPoly& b) {
        if (a.vars_ != b.vars_) return a.vars_ < b.vars_;
        return std::lexicographical_compare(
            a.terms_.begin(), a.terms_.end(), b.terms_.begin(), b.terms_.end(),
            [](const auto& x, const auto& y) {
                GrlexGreater g;
                if (g(x.first, y.first)) return true;
                if (g(y.first, x.first)) return false;
                return x.second < y.second;
            });
    }

    MultiPoly pow(int e) const {
        if (e < 0) throw std::domain_error("MultiPoly: negative exponent");
        MultiPoly r(1), b(*this);
        while (e > 0) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }

    /// Substitute a polynomial for a variable.
    MultiPoly substitute(const std::string& v, const MultiPoly& repl) const {
        auto it = std::find(vars_.begin(), vars_.end(), v);
        if (it == vars_.end()) return *this;
        size_t idx = it - vars_.begin();
        MultiPoly r;
        for (const auto& [m, c] : terms_) {
            MultiPoly rest;
            rest.vars_ = vars_;
            Mono m2 = m;
            int e = m2[idx];
            m2[idx] = 0;
            rest.terms_[m2] = c;
            rest.prune();
            r += rest * repl.pow(e);
        }
        return r;
    }

    /// Substitute v -> v + delta.
    MultiPoly shift_var(const std::string& v, long long delta) const {
        if (delta == 0) return *this;
        return substitute(v, var(v) + MultiPoly(BigRational(delta)));
    }

    /// Rename a variable (target must not already occur).
    MultiPoly rename_var(const std::string& from, const std::string& to) const {
        if (from == to) return *this;
        if (std::find(vars_.begin(), vars_.end(), from) == vars_.end()) return *this;
        if (has_var(to)) throw std::domain_error("MultiPoly: rename collision on " + to);
        return substitute(from, var(to));
    }

    /// Full evaluation; every variable must be bound.
    BigRational eval(const std::map<std::string, BigRational>& point) const {
        BigRational r(0);
        for (const auto& [m, c] : terms_) {
            BigRational t = c;
            for (size_t i = 0; i < vars_.size(); ++i) {
                if (m[i] == 0) continue;
                auto it = point.find(vars_[i]);
                if (it == point.end()) throw std::domain_error("MultiPoly: unbound variable " + vars_[i]);
                t *= it->second.pow(m[i]);
            }
            r += t;
        }
        return r;
    }

    /// Partial evaluation: substitutes the supplied variables only.
    MultiPoly eval_partial(const std::map<std::string, BigRational>& point) const {
        MultiPoly r = *this;
        for (const auto& [v, val] : point)
            r = r.substitute(v, MultiPoly(val));
        return r;
    }

    /// Coefficient of v^power, as a polynomial in the remaining variables.
    MultiPoly coefficient_of(const std::string& v, int power) const {
        auto it = std::find(vars_.begin(), vars_.end(), v);
        if (it == vars_.end()) return power == 0 ? *this : MultiPoly();
        size_t idx = it - vars_.begin();
        MultiPoly r;
        r.vars_ = vars_;
        for (const auto& [m, c] : terms_) {
            if (m[idx] != power) continue;
            Mono m2 = m;
            m2[idx] = 0;
            r.terms_[m2] = c;
        }
        r.prune();
        return r;
    }

    /// All distinct exponents of v that occur.
    std::vector<int> exponents_of(const std::string& v) const {
        std::vector<int> es;
        auto it = std::find(vars_.begin(), vars_.end(), v);
        if (it == vars_.end()) {
            if (!is_zero()) es.push_back(0);
            return es;
        }
        size_t idx = it - vars_.begin();
        for (const auto& [m, c] : terms_)
            if (std::find(es.begin(), es.end(), m[idx]) == es.end()) es.push_back(m[idx]);
        std::sort(es.begin(), es.end());
        return es;
    }

    std::string str() const {
        if (is_zero()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            BigRational cc = c;
            if (first) {
                if (cc.sign() < 0) { os << "-"; cc = -cc; }
            } else {
                os << (cc.sign() < 0 ? " - " : " + ");
                cc = cc.abs();
            }
            first = false;
            bool any = false;
            std::ostringstream vs;
            for (size_t i = 0; i < vars_.size(); ++i) {
                if (m[i] == 0) continue;
                if (any) vs << "*";
                vs << vars_[i];
                if (m[i] != 1) vs << "^" << m[i];
                any = true;
            }
            if (!any) os << cc.str();
            else if (cc.is_one()) os << vs.str();
            else os << cc.str() << "*" << vs.str();
        }
        return os.str();
    }

    friend std::ostream& operator<<(std::ostream& os, const MultiPoly& p) { return os << p.str(); }

    /// Parses sums of terms like "2*k^2*n - 1/2*k + 3". Test/fixture helper.
    static MultiPoly parse(const std::string& s);

private:
    std::vector<std::string> vars_;
    TermMap terms_;

    void prune() {
        std::vector<bool> used(vars_.size(), false);
        for (const auto& [m, c] : terms_)
            for (size_t i = 0; i < vars_.size(); ++i)
                if (m[i] != 0) used[i] = true;
        if (std::all_of(used.begin(), used.end(), [](bool b) { return b; })) return;
        std::vector<std::string> nv;
        std::vector<size_t> keep;
        for (size_t i = 0; i < vars_.size(); ++i)
            if (used[i]) { nv.push_back(vars_[i]); keep.push_back(i); }
        TermMap nt;
        for (const auto& [m, c] : terms_) {
            Mono m2(keep.size());
            for (size_t i = 0; i < keep.size(); ++i) m2[i] = m[keep[i]];
            nt[m2] = c;
        }
        vars_ = std::move(nv);
        terms_ = std::move(nt);
    }

    // Exponent vectors of p re-aligned to the union of p's and q's variables.
    static TermMap remap(const MultiPoly& p, const MultiPoly& q, std::vector<std::string>& union_vars) {
        if (union_vars.empty()) {
            union_vars = p.vars_;
            for (const auto& v : q.vars_)
                if (std::find(union_vars.begin(), union_vars.end(), v) == union_vars.end())
                    union_vars.push_back(v);
            std::sort(union_vars.begin(), union_vars.end());
        }
        std::vector<size_t> pos(p.vars_.size());
        for (size_t i = 0; i < p.vars_.size(); ++i)
            pos[i] = std::find(union_vars.begin(), union_vars.end(), p.vars_[i]) - union_vars.begin();
        TermMap out;
        for (const auto& [m, c] : p.terms_) {
            Mono m2(union_vars.size(), 0);
            for (size_t i = 0; i < m.size(); ++i) m2[pos[i]] = m[i];
            out[m2] = c;
        }
        return out;
    }

    static void merge(const MultiPoly& a, const MultiPoly& b, MultiPoly& r, bool subtract) {
        std::vector<std::string> uv;
        auto ra = remap(a, b, uv);
        auto rb = remap(b, a, uv);
        r.vars_ = uv;
        r.terms_ = std::move(ra);
        for (const auto& [m, c] : rb) {
            BigRational& slot = r.terms_[m];
            slot += subtract ? -c : c;
            if (slot.is_zero()) r.terms_.erase(m);
        }
        r.prune();
    }
};

inline MultiPoly operator*(const BigRational& c, const MultiPoly& p) { return p * c; }

namespace detail {

class MiniPolyParser {
public:
    explicit MiniPolyParser(const std::string& s) : s_(s) {}

    MultiPoly parse_expr() {
        MultiPoly r = parse_term();
        for (;;) {
            skip_ws();
            if (peek() == '+') { ++pos_; r += parse_term(); }
            else if (peek() == '-') { ++pos_; r -= parse_term(); }
            else break;
        }
        return r;
    }

    void expect_end() {
        skip_ws();
        if (pos_ != s_.size()) throw std::domain_error("MultiPoly parse: trailing input at " + std::to_string(pos_));
    }

private:
    MultiPoly parse_term() {
        MultiPoly r = parse_factor();
        for (;;) {
            skip_ws();
            if (peek() == '*') { ++pos_; r *= parse_factor(); }
            else if (peek() == '/') {
                ++pos_;
                MultiPoly d = parse_factor();
                if (!d.is_constant()) throw std::domain_error("MultiPoly parse: non-constant divisor");
                r = r / d.constant_value();
            } else break;
        }
        return r;
    }

    MultiPoly parse_factor() {
        MultiPoly b = parse_base();
        skip_ws();
        if (peek() == '^') {
            ++pos_;
            skip_ws();
            size_t st = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (st == pos_) throw std::domain_error("MultiPoly parse: exponent expected");
            return b.pow(std::stoi(s_.substr(st, pos_ - st)));
        }
        return b;
    }

    MultiPoly parse_base() {
        skip_ws();
        char c = peek();
        if (c == '(') {
            ++pos_;
            MultiPoly r = parse_expr();
            skip_ws();
            if (peek() != ')') throw std::domain_error("MultiPoly parse: ')' expected");
            ++pos_;
            return r;
        }
        if (c == '-') { ++pos_; return -parse_base(); }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t st = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            return MultiPoly(BigRational(BigInt(s_.substr(st, pos_ - st))));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '@' || c == '_') {
            size_t st = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '@' ||
                    s_[pos_] == '_' || s_[pos_] == '#'))
                ++pos_;
            return MultiPoly::var(s_.substr(st, pos_ - st));
        }
        throw std::domain_error(std::string("MultiPoly parse: unexpected '") + c + "'");
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

    const std::string& s_;
    size_t pos_ = 0;
};

}  // namespace detail

inline MultiPoly MultiPoly::parse(const std::string& s) {
    detail::MiniPolyParser p(s);
    MultiPoly r = p.parse_expr();
    p.expect_end();
    return r;
}

// ---------------------------------------------------------------------------
// Division and gcd
// ---------------------------------------------------------------------------

/// Exact division; throws if b does not divide a.
inline MultiPoly divide_exact(MultiPoly a, const MultiPoly& b) {
    if (b.is_zero()) throw std::domain_error("MultiPoly: division by zero polynomial");
    if (a.is_zero()) return MultiPoly();
    if (b.is_constant()) return a / b.constant_value();
    MultiPoly q;
    while (!a.is_zero()) {
        // quotient term lt(a)/lt(b), exponentwise on named variables
        const auto& at = a.terms().begin();
        const auto& bt = b.terms().begin();
        std::map<std::string, int> ea, eb;
        for (size_t i = 0; i < a.vars().size(); ++i) ea[a.vars()[i]] = at->first[i];
        for (size_t i = 0; i < b.vars().size(); ++i) eb[b.vars()[i]] = bt->first[i];
        MultiPoly t(at->second / bt->second);
        for (const auto& [v, e] : eb) {
            ea[v] -= e;  // may introduce entries with 0
        }
        for (const auto& [v, e] : ea) {
            if (e < 0) throw std::domain_error("MultiPoly: inexact division");
            if (e > 0) t *= MultiPoly::var(v, e);
        }
        q += t;
        a -= t * b;
        // Progress check: grlex-leading of a strictly decreased; guaranteed when division exact.
    }
    return q;
}

namespace detail {

/// View of p as a univariate polynomial in v with MultiPoly coefficients.
inline std::vector<MultiPoly> univariate_coeffs(const MultiPoly& p, const std::string& v) {
    int d = std::max(p.degree(v), 0);
    std::vector<MultiPoly> cs(d + 1);
    for (int i = 0; i <= d; ++i) cs[i] = p.coefficient_of(v, i);
    return cs;
}

inline MultiPoly from_univariate(const std::vector<MultiPoly>& cs, const std::string& v) {
    MultiPoly r;
    for (size_t i = 0; i < cs.size(); ++i)
        if (!cs[i].is_zero()) r += cs[i] * MultiPoly::var(v, static_cast<int>(i));
    return r;
}

inline int udeg(const std::vector<MultiPoly>& cs) {
    for (int i = static_cast<int>(cs.size()) - 1; i >= 0; --i)
        if (!cs[i].is_zero()) return i;
    return -1;
}

MultiPoly gcd_impl(const MultiPoly& a, const MultiPoly& b);

/// gcd of all coefficients (multivariate content w.r.t. v).
inline MultiPoly poly_content(const std::vector<MultiPoly>& cs) {
    MultiPoly g;
    for (const auto& c : cs) {
        if (c.is_zero()) continue;
        g = g.is_zero() ? c : gcd_impl(g, c);
        if (g.is_constant()) break;
    }
    if (g.is_zero()) return MultiPoly();
    return g;
}

/// Pseudo-remainder of A by B w.r.t. v (both as coefficient vectors).
inline std::vector<MultiPoly> pseudo_rem(std::vector<MultiPoly> A, const std::vector<MultiPoly>& B,
                                         const std::string& v) {
    int db = udeg(B);
    const MultiPoly& lb = B[db];
    int da = udeg(A);
    while (da >= db && da >= 0) {
        // A := lb*A - la*x^(da-db)*B
        MultiPoly la = A[da];
        for (auto& c : A) c *= lb;
        for (int i = 0; i <= db; ++i) A[da - db + i] -= la * B[i];
        (void)v;
        da = udeg(A);
        if (static_cast<int>(A.size()) - 1 > da) A.resize(std::max(da + 1, 1));
    }
    return A;
}

inline std::vector<MultiPoly> make_primitive(std::vector<MultiPoly> cs) {
    MultiPoly c = poly_content(cs);
    if (c.is_zero() || c.is_constant()) {
        // normalize rational content to leading coefficient 1 of the content only
        if (!c.is_zero()) {
            BigRational k = c.constant_value();
            for (auto& p : cs) p = p / k;
        }
        return cs;
    }
    for (auto& p : cs) p = divide_exact(p, c);
    return cs;
}

inline MultiPoly gcd_impl(const MultiPoly& a, const MultiPoly& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.is_constant() || b.is_constant()) return MultiPoly(1);
    // main variable: first var occurring in either
    std::string v;
    {
        std::vector<std::string> cand = a.vars();
        for (const auto& w : b.vars())
            if (std::find(cand.begin(), cand.end(), w) == cand.end()) cand.push_back(w);
        std::sort(cand.begin(), cand.end());
        for (const auto& w : cand)
            if (a.has_var(w) || b.has_var(w)) { v = w; break; }
    }
    auto A = univariate_coeffs(a, v);
    auto B = univariate_coeffs(b, v);
    MultiPoly contA = poly_content(A), contB = poly_content(B);
    MultiPoly cont = gcd_impl(contA, contB);
    A = make_primitive(A);
    B = make_primitive(B);
    if (udeg(A) < udeg(B)) std::swap(A, B);
    for (;;) {
        auto R = pseudo_rem(A, B, v);
        if (udeg(R) < 0) break;            // B divides A
        if (udeg(R) == 0) return cont;     // coprime apart from content
        A = B;
        B = make_primitive(R);
    }
    return cont * from_univariate(B, v);
}

}  // namespace detail

/// Monic gcd (leading coefficient 1 under graded-lex); gcd(a, 0) = monic(a).
inline MultiPoly poly_gcd(const MultiPoly& a, const MultiPoly& b) {
    MultiPoly g = detail::gcd_impl(a, b);
    if (g.is_zero()) return g;
    return g / g.leading_coefficient();
}

}  // namespace telesum
