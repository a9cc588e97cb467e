#pragma once

#include "telesum/embed.hpp"
#include "telesum/genring.hpp"
#include "telesum/oracle.hpp"

#include <map>
#include <string>
#include <vector>

namespace telesum {

// ---------------------------------------------------------------------------
// Canonical form for generic-sequence identities
//
// A generic closed form is a polynomial in sum objects Sum_{i=0}^{a} M(i)
// (M a monomial in i, shifted atoms X_{i+l} and (-1)^i) whose coefficients
// are "at-a" polynomials: elements of the generic ring read at index a
// (the variable k stands for a, X#l for X_{a+l}, @m for (-1)^a; absolute
// atom values X_j appear as X!j). Everything a-dependent lives in the
// at-a part, so terms merge exactly and structural equality is decidable.
// ---------------------------------------------------------------------------

namespace canon_detail {

/// Serializes a coefficient-1 generic monomial as a stable key.
inline std::string mono_key(const MultiPoly& m) { return m.str(); }

inline std::string abs_var(const std::string& sym, long long idx) {
    return sym + "!" + std::to_string(idx);
}

/// at-a evaluation at a concrete integer v: k -> v, X#l -> X[v+l] (0 below
/// index 0), @m -> (-1)^v; absolute vars stay.
inline MultiPoly at_part_at(const MultiPoly& p, long long v) {
    MultiPoly out;
    const auto& vars = p.vars();
    for (const auto& [mono, coeff] : p.terms()) {
        MultiPoly term(coeff);
        bool dead = false;
        for (size_t i = 0; i < vars.size() && !dead; ++i) {
            int e = mono[i];
            if (e == 0) continue;
            const std::string& var = vars[i];
            if (var == "k") {
                term *= MultiPoly(BigRational(v)).pow(e);
            } else if (var == genring::kSignVar) {
                if (v % 2 != 0 && e % 2 != 0) term = -term;
            } else if (auto av = genring::parse_atom_var(var)) {
                long long idx = av->second + v;
                if (idx < 0) { dead = true; break; }
                term *= MultiPoly::var(abs_var(av->first, idx), e);
            } else {
                term *= MultiPoly::var(var, e);
            }
        }
        if (!dead) out += term;
    }
    return out;
}

}  // namespace canon_detail

/// Canonical generic closed form. Keys are sorted (body-key, exponent)
/// lists; the stored MultiPoly is the at-a part.
struct GenCanon {
    using SumMono = std::vector<std::pair<std::string, int>>;
    std::map<SumMono, MultiPoly> terms;
    std::map<std::string, MultiPoly> bodies;  // key -> body monomial (index variable k)
    long long threshold = 0;                  // identities asserted for a >= threshold

    bool is_zero() const { return terms.empty(); }

    void add_term(const SumMono& mono, const MultiPoly& at, const std::map<std::string, MultiPoly>& bd) {
        if (at.is_zero()) return;
        for (const auto& [key, body] : bd)
            if (!bodies.count(key)) bodies[key] = body;
        MultiPoly& slot = terms[mono];
        slot += at;
        if (slot.is_zero()) terms.erase(mono);
    }

    friend GenCanon operator+(const GenCanon& a, const GenCanon& b) {
        GenCanon r = a;
        r.threshold = std::max(a.threshold, b.threshold);
        for (const auto& [m, c] : b.terms) r.add_term(m, c, b.bodies);
        for (const auto& [k, v] : b.bodies)
            if (!r.bodies.count(k)) r.bodies[k] = v;
        return r;
    }

    friend GenCanon operator*(const GenCanon& a, const GenCanon& b) {
        GenCanon r;
        r.threshold = std::max(a.threshold, b.threshold);
        for (const auto& [k, v] : a.bodies) r.bodies[k] = v;
        for (const auto& [k, v] : b.bodies)
            if (!r.bodies.count(k)) r.bodies[k] = v;
        for (const auto& [ma, ca] : a.terms)
            for (const auto& [mb, cb] : b.terms) {
                SumMono m = ma;
                for (const auto& [key, e] : mb) {
                    bool merged = false;
                    for (auto& [k2, e2] : m)
                        if (k2 == key) { e2 += e; merged = true; break; }
                    if (!merged) m.emplace_back(key, e);
                }
                std::sort(m.begin(), m.end());
                MultiPoly c = genring::reduce_sign(ca * cb);
                r.add_term(m, c, {});
            }
        return r;
    }

    GenCanon pow(int e) const {
        GenCanon r = constant(MultiPoly(1));
        GenCanon b = *this;
        while (e > 0) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

    static GenCanon constant(const MultiPoly& at) {
        GenCanon r;
        if (!at.is_zero()) r.terms[{}] = at;
        return r;
    }

    friend bool operator==(const GenCanon& a, const GenCanon& b) { return a.terms == b.terms; }
};

// ---------------------------------------------------------------------------
// SumExpr -> GenCanon
// ---------------------------------------------------------------------------

namespace canon_detail {

/// Converts an expression in the index variable `idx` into a generic-ring
/// polynomial (variables k, X#l, @m, parameters). Throws UnsupportedError
/// outside the generic fragment.
inline MultiPoly expr_to_genpoly(const SumExpr& e, const std::string& idx) {
    const ExprNode& n = e.node();
    switch (n.kind) {
        case NodeKind::Const:
            return MultiPoly(n.cval);
        case NodeKind::Var:
            if (n.name == idx) return MultiPoly::var("k");
            return MultiPoly::var(n.name);
        case NodeKind::Generic:
            if (n.index_var.empty()) {
                if (n.offset < 0) return MultiPoly();  // below index 0
                return MultiPoly::var(abs_var(n.name, n.offset));
            }
            if (n.index_var != idx)
                throw UnsupportedError("generic atom indexed by " + n.index_var + " under " + idx);
            return MultiPoly::var(genring::atom_var(n.name, n.offset));
        case NodeKind::AtomCall: {
            if (is_altsign_atom(n.name)) {
                SumExpr arg = normalize(n.args[0]);
                // (-1)^(idx + c)
                long long off = 0;
                if (arg.kind() == NodeKind::Var && arg.node().name == idx) off = 0;
                else if (arg.kind() == NodeKind::Add) {
                    bool seen = false;
                    for (const auto& t : arg.node().args) {
                        if (t.kind() == NodeKind::Var && t.node().name == idx && !seen) seen = true;
                        else if (t.kind() == NodeKind::Const && t.node().cval.is_integer())
                            off += t.node().cval.to_int64();
                        else throw UnsupportedError("sign atom argument");
                    }
                    if (!seen) throw UnsupportedError("sign atom argument");
                } else {
                    throw UnsupportedError("sign atom argument");
                }
                MultiPoly m = MultiPoly::var(genring::kSignVar);
                return (off % 2 == 0) ? m : -m;
            }
            throw UnsupportedError("concrete atom " + n.name + " in a generic context");
        }
        case NodeKind::Rat: {
            if (!n.rat.is_polynomial())
                throw UnsupportedError("rational coefficient in a generic context");
            return n.rat.poly_value().rename_var(idx, "k");
        }
        case NodeKind::Add: {
            MultiPoly r;
            for (const auto& a : n.args) r += expr_to_genpoly(a, idx);
            return r;
        }
        case NodeKind::Mul: {
            MultiPoly r(1);
            for (const auto& a : n.args) r *= expr_to_genpoly(a, idx);
            return genring::reduce_sign(r);
        }
        case NodeKind::Pow:
            return genring::reduce_sign(expr_to_genpoly(n.args[0], idx).pow(n.exp));
        case NodeKind::Sum:
            throw UnsupportedError("nested sum inside a generic summand");
    }
    throw UnsupportedError("bad node");
}

}  // namespace canon_detail

/// Canonical form of a generic-ring polynomial read at index a.
inline GenCanon gen_canon_at(const MultiPoly& at_part) {
    GenCanon r;
    if (!at_part.is_zero()) r.terms[{}] = at_part;
    return r;
}

/// The sum object Sum_{i=0}^{a} body(i) for a generic-ring body; the body is
/// split into monomials, with numeric/parameter coefficients pulled out.
inline GenCanon gen_canon_sum(const MultiPoly& body) {
    GenCanon r;
    const auto& vars = body.vars();
    for (const auto& [mono, coeff] : body.terms()) {
        MultiPoly key(BigRational(1));
        MultiPoly outside(coeff);
        for (size_t i = 0; i < vars.size(); ++i) {
            int e = mono[i];
            if (e == 0) continue;
            const std::string& v = vars[i];
            if (v == "k" || v == genring::kSignVar || genring::parse_atom_var(v))
                key *= MultiPoly::var(v, e);
            else
                outside *= MultiPoly::var(v, e);  // parameter
        }
        std::string ks = canon_detail::mono_key(key);
        GenCanon::SumMono sm{{ks, 1}};
        r.add_term(sm, outside, {{ks, key}});
    }
    return r;
}

/// Full conversion of an expression in the free variable `outer` (the grid
/// variable, e.g. a) to canonical form. Sums must run over [0, outer + d];
/// shifted upper bounds are peeled to outer with the sequence-equivalence
/// threshold recorded.
inline GenCanon to_gen_canon(const SumExpr& e_in, const std::string& outer) {
    SumExpr e = normalize(e_in);
    const ExprNode& n = e.node();
    switch (n.kind) {
        case NodeKind::Add: {
            GenCanon r;
            for (const auto& a : n.args) r = r + to_gen_canon(a, outer);
            return r;
        }
        case NodeKind::Mul: {
            GenCanon r = GenCanon::constant(MultiPoly(1));
            for (const auto& a : n.args) r = r * to_gen_canon(a, outer);
            return r;
        }
        case NodeKind::Pow:
            return to_gen_canon(n.args[0], outer).pow(n.exp);
        case NodeKind::Sum: {
            if (n.lower != 0) throw UnsupportedError("generic sums must start at 0");
            // upper = outer + delta
            SumExpr up = normalize(n.args[0]);
            long long delta = 0;
            if (up.kind() == NodeKind::Var && up.node().name == outer) delta = 0;
            else if (up.kind() == NodeKind::Add) {
                bool seen = false;
                for (const auto& t : up.node().args) {
                    if (t.kind() == NodeKind::Var && t.node().name == outer && !seen) seen = true;
                    else if (t.kind() == NodeKind::Const && t.node().cval.is_integer())
                        delta += t.node().cval.to_int64();
                    else throw UnsupportedError("sum upper bound must be " + outer + " plus an integer");
                }
                if (!seen) throw UnsupportedError("sum upper bound must involve " + outer);
            } else {
                throw UnsupportedError("sum upper bound must involve " + outer);
            }
            MultiPoly body = canon_detail::expr_to_genpoly(n.args[1], n.bound_var);
            GenCanon base = gen_canon_sum(body);
            // peel Sum^{a+delta} to Sum^{a}: add body(a+i) for i = 1..delta,
            // or subtract body(a), body(a-1), ... for negative delta
            GenCanon r = base;
            for (long long i = 1; i <= delta; ++i)
                r = r + gen_canon_at(genring::sigma(body, i));
            for (long long i = 0; i > delta; --i) {
                GenCanon part = gen_canon_at(genring::sigma(body, i));
                for (auto& [m, c] : part.terms) c = -c;
                r = r + part;
            }
            if (delta < 0) r.threshold = std::max(r.threshold, -delta);
            return r;
        }
        default: {
            // at-a content: reuse the body converter with idx = outer
            MultiPoly at = canon_detail::expr_to_genpoly(e, outer);
            return gen_canon_at(at);
        }
    }
}

// ---------------------------------------------------------------------------
// GenCanon -> SumExpr
// ---------------------------------------------------------------------------

namespace canon_detail {

/// Generic-ring polynomial back to an expression; `var` names the index the
/// poly's k refers to (a for at-parts, the bound variable for bodies).
/// Terms are grouped by their atom/sign/parameter part so the k-polynomial
/// coefficients print as single factors, e.g. (1 + a)*X[a+1].
inline SumExpr genpoly_to_expr(const MultiPoly& p, const std::string& var) {
    if (p.is_zero()) return SumExpr::constant(0);
    // group: non-k monomial -> polynomial in k
    std::map<MultiPoly, MultiPoly> groups;
    for (const auto& [mono, coeff] : p.terms()) {
        MultiPoly key(1);
        MultiPoly kpart(coeff);
        for (size_t i = 0; i < p.vars().size(); ++i) {
            int e = mono[i];
            if (e == 0) continue;
            const std::string& v = p.vars()[i];
            if (v == "k") kpart *= MultiPoly::var("k", e);
            else key *= MultiPoly::var(v, e);
        }
        groups[key] += kpart;
    }
    std::vector<SumExpr> terms;
    for (const auto& [key, kpoly] : groups) {
        if (kpoly.is_zero()) continue;
        std::vector<SumExpr> fs;
        SumExpr kexpr = normalize(poly_to_expr(kpoly.rename_var("k", var)));
        bool kone = kexpr.kind() == NodeKind::Const && kexpr.node().cval.is_one();
        if (!kone || key.is_constant()) fs.push_back(kexpr);
        for (size_t i = 0; i < key.vars().size(); ++i) {
            int e = key.terms().begin()->first[i];
            if (e == 0) continue;
            const std::string& v = key.vars()[i];
            SumExpr base;
            if (v == genring::kSignVar) base = SumExpr::atom("altsign", {SumExpr::variable(var)});
            else if (auto av = genring::parse_atom_var(v)) base = SumExpr::generic(av->first, var, av->second);
            else if (auto pos = v.find('!'); pos != std::string::npos)
                base = SumExpr::generic(v.substr(0, pos), "", std::stoll(v.substr(pos + 1)));
            else
                base = SumExpr::variable(v);
            fs.push_back(e == 1 ? base : SumExpr::pow(base, e));
        }
        if (fs.empty()) continue;
        terms.push_back(SumExpr::mul(std::move(fs)));
    }
    return normalize(SumExpr::add(std::move(terms)));
}

}  // namespace canon_detail

/// Rewrites sums of sums of terms into sums of single-monomial sums, pulls
/// factors independent of the summation variable out, merges sums with equal
/// bodies, and collapses shifted-bound differences at the sequence-
/// equivalence level (the resulting threshold is recorded on the canonical
/// form). Expression-level entry point over the canonicalizer.
inline SumExpr post_simplify(const SumExpr& e, const std::string& outer = "a");

/// Deterministic expression for a canonical form; sums are emitted split by
/// monomial body with the bound variable `i`.
inline SumExpr gen_canon_to_expr(const GenCanon& g, const std::string& outer) {
    std::vector<SumExpr> terms;
    for (const auto& [mono, at] : g.terms) {
        std::vector<SumExpr> fs;
        SumExpr coeff = canon_detail::genpoly_to_expr(at, outer);
        bool coeff_is_one = coeff.kind() == NodeKind::Const && coeff.node().cval.is_one();
        if (!coeff_is_one) fs.push_back(coeff);
        for (const auto& [key, e] : mono) {
            const MultiPoly& body = g.bodies.at(key);
            SumExpr bexpr = canon_detail::genpoly_to_expr(body, "i");
            SumExpr s = SumExpr::sum("i", 0, SumExpr::variable(outer), bexpr);
            fs.push_back(e == 1 ? s : SumExpr::pow(s, e));
        }
        if (fs.empty()) fs.push_back(SumExpr::constant(1));
        terms.push_back(SumExpr::mul(std::move(fs)));
    }
    if (terms.empty()) return SumExpr::constant(0);
    return normalize(SumExpr::add(std::move(terms)));
}

inline SumExpr post_simplify(const SumExpr& e, const std::string& outer) {
    return gen_canon_to_expr(to_gen_canon(e, outer), outer);
}

}  // namespace telesum
