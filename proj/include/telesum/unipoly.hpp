#pragma once

#include "telesum/ratfunc.hpp"

#include <algorithm>
#include <vector>

namespace telesum {

/// Univariate polynomial with RatFunc coefficients. The main variable is
/// implicit (the caller tracks its name); coefficients must not involve it.
/// Coefficient index = power, trailing zeros trimmed.
struct UPoly {
    std::vector<RatFunc> c;

    UPoly() = default;
    explicit UPoly(std::vector<RatFunc> cs) : c(std::move(cs)) { trim(); }
    static UPoly constant(const RatFunc& v) { return UPoly(std::vector<RatFunc>{v}); }
    static UPoly monomial(const RatFunc& v, int deg) {
        std::vector<RatFunc> cs(deg + 1, RatFunc(0));
        cs[deg] = v;
        return UPoly(std::move(cs));
    }

    int deg() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }
    const RatFunc& lc() const {
        static const RatFunc zero(0);
        return c.empty() ? zero : c.back();
    }
    RatFunc coeff(int i) const { return (i >= 0 && i <= deg()) ? c[i] : RatFunc(0); }

    void trim() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }

    friend UPoly operator+(const UPoly& a, const UPoly& b) {
        std::vector<RatFunc> r(std::max(a.c.size(), b.c.size()), RatFunc(0));
        for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
        for (size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
        return UPoly(std::move(r));
    }
    friend UPoly operator-(const UPoly& a, const UPoly& b) {
        std::vector<RatFunc> r(std::max(a.c.size(), b.c.size()), RatFunc(0));
        for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
        for (size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
        return UPoly(std::move(r));
    }
    friend UPoly operator*(const UPoly& a, const UPoly& b) {
        if (a.is_zero() || b.is_zero()) return UPoly();
        std::vector<RatFunc> r(a.c.size() + b.c.size() - 1, RatFunc(0));
        for (size_t i = 0; i < a.c.size(); ++i)
            for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
        return UPoly(std::move(r));
    }
    UPoly operator*(const RatFunc& s) const {
        UPoly r(*this);
        for (auto& x : r.c) x *= s;
        r.trim();
        return r;
    }
    UPoly operator-() const { return *this * RatFunc(-1); }

    friend bool operator==(const UPoly& a, const UPoly& b) { return a.c == b.c; }

    /// Substitute x -> x + delta.
    UPoly shift(const BigRational& delta) const {
        if (c.empty()) return *this;
        // Horner from the top: r(x) = (...((c_d)(x+delta) + c_{d-1})(x+delta) + ...)
        UPoly xplus(std::vector<RatFunc>{RatFunc(delta), RatFunc(1)});
        UPoly r = UPoly::constant(c.back());
        for (int i = deg() - 1; i >= 0; --i) r = r * xplus + UPoly::constant(c[i]);
        return r;
    }

    RatFunc eval(const RatFunc& x) const {
        RatFunc r(0);
        for (int i = deg(); i >= 0; --i) r = r * x + c[i];
        return r;
    }

    RatFunc to_ratfunc(const std::string& var) const {
        RatFunc r(0);
        for (int i = 0; i <= deg(); ++i)
            if (!c[i].is_zero()) r += c[i] * RatFunc::var(var, i);
        return r;
    }
};

/// View of p as a polynomial in var; coefficients keep the other variables.
inline UPoly to_upoly(const MultiPoly& p, const std::string& var) {
    int d = std::max(p.degree(var), 0);
    std::vector<RatFunc> cs(d + 1, RatFunc(0));
    for (int i = 0; i <= d; ++i) cs[i] = RatFunc(p.coefficient_of(var, i));
    return UPoly(std::move(cs));
}

inline std::pair<UPoly, UPoly> upoly_divmod(UPoly a, const UPoly& b) {
    if (b.is_zero()) throw std::domain_error("UPoly: division by zero");
    std::vector<RatFunc> q(std::max(a.deg() - b.deg() + 1, 0), RatFunc(0));
    while (!a.is_zero() && a.deg() >= b.deg()) {
        RatFunc f = a.lc() / b.lc();
        int sh = a.deg() - b.deg();
        q[sh] = f;
        for (int i = 0; i <= b.deg(); ++i) a.c[i + sh] -= f * b.c[i];
        a.trim();
    }
    return {UPoly(std::move(q)), a};
}

inline UPoly upoly_gcd_monic(UPoly a, UPoly b) {
    while (!b.is_zero()) {
        auto [q, r] = upoly_divmod(a, b);
        a = b;
        b = r;
    }
    if (!a.is_zero()) a = a * a.lc().inverse();
    return a;
}

/// Resultant of a and b via the Euclidean recurrence.
inline RatFunc upoly_resultant(UPoly a, UPoly b) {
    if (a.is_zero() || b.is_zero()) return RatFunc(0);
    RatFunc res(1);
    while (b.deg() > 0) {
        auto [q, r] = upoly_divmod(a, b);
        if (r.is_zero()) return RatFunc(0);
        int sign = (a.deg() * b.deg()) % 2 ? -1 : 1;
        res *= RatFunc(sign) * b.lc().pow(a.deg() - r.deg());
        a = b;
        b = r;
    }
    // b constant: res *= b^deg(a)
    res *= b.lc().pow(a.deg());
    return res;
}

namespace detail {

/// Sturm chain of a squarefree rational polynomial (constant coefficients).
inline std::vector<UPoly> sturm_chain(const UPoly& f) {
    std::vector<UPoly> chain;
    chain.push_back(f);
    // derivative
    std::vector<RatFunc> dc(std::max(f.deg(), 0), RatFunc(0));
    for (int i = 1; i <= f.deg(); ++i) dc[i - 1] = f.c[i] * RatFunc(i);
    chain.emplace_back(std::move(dc));
    while (chain.back().deg() > 0) {
        UPoly r = upoly_divmod(chain[chain.size() - 2], chain.back()).second;
        if (r.is_zero()) break;
        chain.push_back(-r);
    }
    return chain;
}

inline int sturm_variations(const std::vector<UPoly>& chain, const BigRational& x) {
    int var = 0, prev = 0;
    for (const auto& p : chain) {
        if (p.is_zero()) continue;
        BigRational v(0);
        for (int i = p.deg(); i >= 0; --i) v = v * x + p.c[i].constant_value();
        int s = v.sign();
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++var;
        prev = s;
    }
    return var;
}

/// Nonnegative integer roots via a squarefree reduction, a Sturm chain and
/// interval bisection: exact for any coefficient size, logarithmic in the
/// root bound.
inline std::vector<long long> integer_roots_nonneg_q(std::vector<BigRational> cs) {
    std::vector<long long> roots;
    while (!cs.empty() && cs.back().is_zero()) cs.pop_back();
    if (cs.empty()) throw std::domain_error("integer roots of the zero polynomial");
    // strip powers of x
    size_t low = 0;
    while (low < cs.size() && cs[low].is_zero()) ++low;
    if (low > 0) {
        roots.push_back(0);
        cs.erase(cs.begin(), cs.begin() + static_cast<long>(low));
    }
    if (cs.size() <= 1) return roots;

    std::vector<RatFunc> rc(cs.size());
    for (size_t i = 0; i < cs.size(); ++i) rc[i] = RatFunc(cs[i]);
    UPoly f(std::move(rc));
    // squarefree part f / gcd(f, f')
    {
        std::vector<RatFunc> dc(f.deg(), RatFunc(0));
        for (int i = 1; i <= f.deg(); ++i) dc[i - 1] = f.c[i] * RatFunc(i);
        UPoly g = upoly_gcd_monic(f, UPoly(std::move(dc)));
        if (g.deg() > 0) f = upoly_divmod(f, g).first;
    }
    auto exact_zero = [&](const BigInt& x) {
        BigRational r(0), xq(x);
        for (int i = f.deg(); i >= 0; --i) r = r * xq + f.c[i].constant_value();
        return r.is_zero();
    };
    // Cauchy bound: every root has |x| < 1 + max |a_i| / |a_d|
    BigRational lc = f.lc().constant_value().abs();
    BigRational maxq(0);
    for (int i = 0; i < f.deg(); ++i) {
        BigRational q = f.c[i].constant_value().abs() / lc;
        if (q > maxq) maxq = q;
    }
    BigInt bound = (maxq + BigRational(2)).numerator() / (maxq + BigRational(2)).denominator() + 1;

    auto chain = detail::sturm_chain(f);
    auto push_root = [&](const BigInt& x) {
        if (x > std::numeric_limits<long long>::max())
            throw std::domain_error("integer root out of range");
        roots.push_back(static_cast<long long>(x));
    };
    // roots in (a, b] located by bisection on the variation count
    struct Iv { BigInt a, b; };
    std::vector<Iv> stack;
    stack.push_back({BigInt(0), bound});
    while (!stack.empty()) {
        Iv iv = stack.back();
        stack.pop_back();
        int count = sturm_variations(chain, BigRational(iv.a)) - sturm_variations(chain, BigRational(iv.b));
        if (count <= 0) continue;
        if (iv.b - iv.a == 1) {
            if (exact_zero(iv.b)) push_root(iv.b);
            continue;
        }
        BigInt mid = (iv.a + iv.b) / 2;
        if (exact_zero(mid)) push_root(mid);
        stack.push_back({iv.a, mid});
        stack.push_back({mid, iv.b});
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

}  // namespace detail

/// Nonnegative integer roots of a rational-coefficient polynomial.
inline std::vector<long long> integer_roots_nonneg_q_public(std::vector<BigRational> cs) {
    bool all_zero = true;
    for (const auto& c : cs)
        if (!c.is_zero()) all_zero = false;
    if (all_zero) throw std::domain_error("integer roots of the zero polynomial");
    return detail::integer_roots_nonneg_q(std::move(cs));
}

/// Nonnegative integer roots of w, whose coefficients may involve parameter
/// variables: an integer j0 is a root only if every parameter-monomial
/// component of w vanishes at j0, so the search reduces to the gcd of those
/// purely rational components.
inline std::vector<long long> integer_roots_nonneg(const UPoly& w) {
    if (w.is_zero()) throw std::domain_error("integer roots of the zero polynomial");
    // Clear coefficient denominators, then group by parameter monomial.
    MultiPoly den(1);
    for (const auto& f : w.c)
        if (!f.is_zero()) den = divide_exact(den * f.den(), poly_gcd(den, f.den()));
    // component polynomials in x, indexed by parameter monomials
    std::map<MultiPoly, std::vector<BigRational>> comp;
    for (int i = 0; i <= w.deg(); ++i) {
        if (w.c[i].is_zero()) continue;
        MultiPoly cleared = w.c[i].num() * divide_exact(den, w.c[i].den());
        // split cleared into monomials; each contributes to one component
        for (const auto& [mono, coef] : cleared.terms()) {
            MultiPoly key;
            {
                MultiPoly unit(1);
                for (size_t v = 0; v < cleared.vars().size(); ++v)
                    if (mono[v] != 0) unit *= MultiPoly::var(cleared.vars()[v], mono[v]);
                key = unit;
            }
            auto& vec = comp[key];
            if (static_cast<int>(vec.size()) <= i) vec.resize(i + 1, BigRational(0));
            vec[i] += coef;
        }
    }
    // gcd of the component polynomials (univariate over Q)
    UPoly g;
    for (auto& [key, vec] : comp) {
        std::vector<RatFunc> cs;
        cs.reserve(vec.size());
        for (auto& q : vec) cs.emplace_back(q);
        UPoly part(std::move(cs));
        if (part.is_zero()) continue;
        g = g.is_zero() ? part : upoly_gcd_monic(g, part);
        if (g.deg() == 0) return {};
    }
    if (g.is_zero()) throw std::domain_error("integer roots of the zero polynomial");
    if (g.deg() == 0) return {};
    std::vector<BigRational> qs(g.deg() + 1);
    for (int i = 0; i <= g.deg(); ++i) qs[i] = g.c[i].constant_value();
    return detail::integer_roots_nonneg_q(std::move(qs));
}

}  // namespace telesum
