#pragma once

#include "telesum/reduce.hpp"

namespace telesum {

// ---------------------------------------------------------------------------
// Canonical form for concrete (specialized) identities
//
// Terms are products of sum objects Sum_{i=0}^{a} (i^e / den(i)) M(i) with M
// a generator monomial of the tower; everything a-dependent (rational in a,
// generator values at a) is folded into one at-a tower element per term.
// ---------------------------------------------------------------------------

struct ConcBody {
    std::vector<int> genmono;
    int kexp = 0;
    MultiPoly den;  // monic, may involve k and parameters

    std::string key() const {
        std::string s;
        for (int e : genmono) s += std::to_string(e) + ",";
        s += "|k^" + std::to_string(kexp) + "/(" + den.str() + ")";
        return s;
    }
};

struct ConcCanon {
    using SumMono = std::vector<std::pair<std::string, int>>;
    Tower tower;
    std::map<SumMono, TowerElem> terms;
    std::map<std::string, ConcBody> bodies;
    long long threshold = 0;

    void add_term(const SumMono& mono, const TowerElem& at) {
        TowerElem v = te_normalize(tower, at);
        if (v.is_zero()) return;
        auto it = terms.find(mono);
        if (it == terms.end()) {
            terms[mono] = v;
            return;
        }
        it->second = te_add(tower, it->second, v);
        if (it->second.is_zero()) terms.erase(it);
    }

    static ConcCanon constant(const Tower& tw, const TowerElem& at) {
        ConcCanon r;
        r.tower = tw;
        if (!te_normalize(tw, at).is_zero()) r.terms[{}] = te_normalize(tw, at);
        return r;
    }

    friend ConcCanon operator+(const ConcCanon& a, const ConcCanon& b) {
        ConcCanon r = a;
        r.threshold = std::max(a.threshold, b.threshold);
        for (const auto& [k, v] : b.bodies)
            if (!r.bodies.count(k)) r.bodies[k] = v;
        for (const auto& [m, c] : b.terms) r.add_term(m, c);
        return r;
    }

    friend ConcCanon operator*(const ConcCanon& a, const ConcCanon& b) {
        ConcCanon r;
        r.tower = a.tower;
        r.threshold = std::max(a.threshold, b.threshold);
        r.bodies = a.bodies;
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
                r.add_term(m, te_mul(r.tower, ca, cb));
            }
        return r;
    }

    ConcCanon pow(int e) const {
        ConcCanon r = constant(tower, te_coeff(tower, RatFunc(1)));
        ConcCanon b = *this;
        while (e > 0) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

    bool equal(const ConcCanon& o) const {
        if (terms.size() != o.terms.size()) return false;
        for (const auto& [m, c] : terms) {
            auto it = o.terms.find(m);
            if (it == o.terms.end()) return false;
            if (!te_equal(tower, c, it->second)) return false;
        }
        return true;
    }
};

namespace conc_detail {

/// Symbolic value of a tower element at a small concrete index.
inline RatFunc value_at_int(const TowerElem& e, const Tower& tw, long long j) {
    if (j < 0) throw std::domain_error("value_at_int: negative index");
    // generator values at j
    std::vector<RatFunc> gv(tw.exts.size(), RatFunc(1));
    for (size_t g = 0; g < tw.exts.size(); ++g) {
        const Extension& ext = tw.exts[g];
        if (ext.kind == ExtKind::R) {
            gv[g] = RatFunc(j % 2 == 0 ? 1 : -1);
            continue;
        }
        if (j < ext.anchor) {
            gv[g] = ext.kind == ExtKind::Pi ? RatFunc(1) : RatFunc(0);
            continue;
        }
        RatFunc v = ext.anchor_value;
        for (long long i = ext.anchor; i < j; ++i) {
            if (ext.kind == ExtKind::Pi) {
                MultiPoly den_i = ext.alpha.den().substitute("k", MultiPoly(BigRational(i)));
                if (den_i.is_zero()) { v = RatFunc(0); break; }
                v = v * RatFunc(ext.alpha.num().substitute("k", MultiPoly(BigRational(i))), den_i);
            } else {
                v = v + value_at_int(ext.beta, tw, i);
            }
        }
        gv[g] = v;
    }
    RatFunc total(0);
    for (const auto& [mono, c] : e.terms) {
        MultiPoly den_j = c.den().substitute("k", MultiPoly(BigRational(j)));
        if (den_j.is_zero()) continue;  // pole convention
        RatFunc t(c.num().substitute("k", MultiPoly(BigRational(j))), den_j);
        std::vector<int> m = tower_detail::pad(mono, tw.exts.size());
        bool dead = false;
        for (size_t g = 0; g < m.size() && !dead; ++g) {
            if (m[g] == 0) continue;
            if (gv[g].is_zero() && m[g] < 0) { dead = true; break; }
            if (gv[g].is_zero() && m[g] > 0) { dead = true; break; }
            t *= gv[g].pow(m[g]);
        }
        if (!dead) total += t;
    }
    return total;
}

}  // namespace conc_detail

/// The concrete sum object Sum_{i=0}^{a} body(i), split canonically; the
/// body element's k-polynomial numerators are separated by k-power and the
/// denominator kept with the object.
inline ConcCanon conc_canon_sum(const TowerElem& body, const Tower& tw) {
    ConcCanon r;
    r.tower = tw;
    for (const auto& [mono, coeff] : body.terms) {
        MultiPoly den = coeff.den();
        // split numerator by k-powers; other variables stay outside
        const MultiPoly& num = coeff.num();
        for (int e : num.exponents_of("k")) {
            MultiPoly outside = num.coefficient_of("k", e);
            ConcBody b;
            b.genmono = tower_detail::pad(mono, tw.exts.size());
            b.kexp = e;
            b.den = den;
            // cancel common k-powers between k^e and den
            while (b.kexp > 0) {
                MultiPoly q;
                bool divides = true;
                try {
                    q = divide_exact(b.den, MultiPoly::var("k"));
                } catch (const std::exception&) {
                    divides = false;
                }
                if (!divides) break;
                b.den = q;
                --b.kexp;
            }
            std::string key = b.key();
            if (!r.bodies.count(key)) r.bodies[key] = b;
            ConcCanon::SumMono sm{{key, 1}};
            r.add_term(sm, te_coeff(tw, RatFunc(outside)));
        }
    }
    return r;
}

/// Converts a generic-ring polynomial to a tower element under the given
/// substitutions for generic symbols (X#l -> sigma^l of the element).
inline TowerElem genpoly_to_tower(const MultiPoly& p, const Tower& tw,
                                  const std::map<std::string, TowerElem>& symbols,
                                  const std::map<std::string, RatFunc>& param_values,
                                  int sign_gen_idx) {
    TowerElem out;
    const auto& vars = p.vars();
    for (const auto& [mono, coeff] : p.terms()) {
        TowerElem term = te_coeff(tw, RatFunc(coeff));
        for (size_t i = 0; i < vars.size(); ++i) {
            int e = mono[i];
            if (e == 0) continue;
            const std::string& v = vars[i];
            if (v == "k") {
                term = te_scale(tw, term, RatFunc(MultiPoly::var("k", e)));
            } else if (v == genring::kSignVar) {
                if (sign_gen_idx < 0) throw UnsupportedError("sign atom without a sign generator");
                term = te_mul(tw, term, te_gen(tw, sign_gen_idx, e));
            } else if (auto av = genring::parse_atom_var(v)) {
                auto it = symbols.find(av->first);
                if (it == symbols.end()) throw UnsupportedError("no substitution for " + av->first);
                TowerElem base = it->second;
                for (long long s = 0; s < av->second; ++s) base = apply_sigma(base, tw);
                for (long long s = 0; s > av->second; --s) base = embed_detail::apply_sigma_inv(base, tw);
                term = te_mul(tw, term, te_pow(tw, base, e));
            } else if (auto pos = v.find('!'); pos != std::string::npos) {
                auto it = symbols.find(v.substr(0, pos));
                if (it == symbols.end()) throw UnsupportedError("no substitution for " + v);
                RatFunc val = conc_detail::value_at_int(it->second, tw, std::stoll(v.substr(pos + 1)));
                term = te_scale(tw, term, val.pow(e));
            } else {
                auto it = param_values.find(v);
                RatFunc val = it != param_values.end() ? it->second : RatFunc::var(v);
                term = te_scale(tw, term, val.pow(e));
            }
        }
        out = te_add(tw, out, term);
    }
    return out;
}

/// Expression for a concrete canonical form, in the outer variable.
inline SumExpr conc_canon_to_expr(const ConcCanon& c, const std::string& outer) {
    std::vector<SumExpr> terms;
    for (const auto& [mono, at] : c.terms) {
        std::vector<SumExpr> fs;
        SumExpr coeff = rename_free_var(to_expression(at, c.tower), "k", outer);
        bool one = coeff.kind() == NodeKind::Const && coeff.node().cval.is_one();
        if (!one) fs.push_back(coeff);
        for (const auto& [key, e] : mono) {
            const ConcBody& b = c.bodies.at(key);
            TowerElem piece;
            piece.terms[b.genmono] = RatFunc(MultiPoly::var("k", b.kexp), b.den);
            SumExpr bexpr = rename_free_var(to_expression(piece, c.tower), "k", "i");
            SumExpr s = SumExpr::sum("i", 0, SumExpr::variable(outer), bexpr);
            fs.push_back(e == 1 ? s : SumExpr::pow(s, e));
        }
        if (fs.empty()) fs.push_back(SumExpr::constant(1));
        terms.push_back(SumExpr::mul(std::move(fs)));
    }
    if (terms.empty()) return SumExpr::constant(0);
    return normalize(SumExpr::add(std::move(terms)));
}

/// Replaces every sum object whose body telescopes in the tower by its
/// closed form (boundary-corrected); products of irreducible sums stay.
inline ConcCanon collapse_sums(const ConcCanon& c) {
    ConcCanon out;
    out.tower = c.tower;
    out.threshold = c.threshold;
    std::map<std::string, std::optional<TowerElem>> closed;
    for (const auto& [key, b] : c.bodies) {
        TowerElem body;
        body.terms[b.genmono] = RatFunc(MultiPoly::var("k", b.kexp), b.den);
        body = te_normalize(c.tower, body);
        auto sol = solve_tower_diff(c.tower, apply_sigma(body, c.tower), {});
        if (!sol.solved) {
            closed[key] = std::nullopt;
            continue;
        }
        // Sum_{i=0}^{a} body(i) = g(a) - g(0) + body(0)
        RatFunc corr = conc_detail::value_at_int(body, c.tower, 0) -
                       conc_detail::value_at_int(sol.g, c.tower, 0);
        closed[key] = te_add(c.tower, sol.g, te_coeff(c.tower, corr));
    }
    for (const auto& [mono, at] : c.terms) {
        ConcCanon::SumMono rest;
        TowerElem coeff = at;
        for (const auto& [key, e] : mono) {
            const auto& cl = closed.at(key);
            if (!cl) {
                rest.emplace_back(key, e);
                if (!out.bodies.count(key)) out.bodies[key] = c.bodies.at(key);
                continue;
            }
            coeff = te_mul(out.tower, coeff, te_pow(out.tower, *cl, e));
        }
        std::sort(rest.begin(), rest.end());
        out.add_term(rest, coeff);
    }
    return out;
}

// ---------------------------------------------------------------------------
// specialize
// ---------------------------------------------------------------------------

struct SpecializeResult {
    bool ok = false;
    std::string failure;  // which constraint failed, when !ok
    SumExpr lhs, rhs;
    ConcCanon canon;
    std::map<std::string, RatFunc> constants;          // c -> value
    std::map<std::string, SumExpr> solved_sequences;   // Y -> closed form in k
    std::vector<std::string> provisos;
    long long threshold = 0;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["ok"] = ok;
        if (!ok) { j["failure"] = failure; return j; }
        j["lhs"] = expr_to_json(lhs);
        j["rhs"] = expr_to_json(rhs);
        for (const auto& [p, v] : constants) j["constants"][p] = v.str();
        for (const auto& [y, e] : solved_sequences) j["sequences"][y] = print(e);
        j["provisos"] = provisos;
        j["threshold"] = threshold;
        return j;
    }
};

/// Specializes a generic reduction to a concrete sequence: substitutes the
/// target for X, discharges each constraint with the parameterized
/// telescoping solvers, substitutes the solved constants and sequences, and
/// simplifies. Fails with a report naming the constraint when no solution
/// exists (the necessary-condition direction).
inline SpecializeResult specialize(const ReductionResult& r, const std::string& target_name,
                                   bool collapse = true) {
    SpecializeResult out;
    auto target = spec_target(target_name);
    if (!target) throw UnsupportedError("unknown specialization target " + target_name);
    if (r.constraints.size() > 1)
        throw UnsupportedError("specialize handles at most one unresolved constraint family");

    Embedding emb;
    TowerElem x_elem = emb.embed(target->expr);
    // a sign generator if the reduction used (-1)^k
    {
        bool needs_sign = false;
        auto scan = [&](const MultiPoly& p) {
            if (p.has_var(genring::kSignVar)) needs_sign = true;
        };
        for (const auto& [m, at] : r.canon.terms) scan(at);
        for (const auto& [k, b] : r.canon.bodies) scan(b);
        for (const auto& c : r.constraints) scan(c.rhs_poly);
        if (needs_sign) (void)emb.embed(SumExpr::atom("altsign", {SumExpr::variable("k")}));
    }

    std::map<std::string, TowerElem> symbols{{r.inner_symbol, x_elem}};
    std::map<std::string, RatFunc> param_values;

    // discharge the constraints
    for (const auto& c : r.constraints) {
        Tower& tw = emb.tower;
        TowerElem rhs_te = genpoly_to_tower(c.rhs_poly, tw, symbols, {}, tw.find("m"));
        TowerDiffResult sol;
        try {
            sol = solve_tower_diff(tw, rhs_te, c.params);
        } catch (const UnsupportedError& err) {
            out.failure = "constraint for " + c.fresh + ": " + err.what();
            return out;
        }
        if (!sol.solved) {
            out.failure = "no solution of the parameterized telescoping constraint for " + c.fresh;
            return out;
        }
        TowerElem y = sol.g;
        for (const auto& p : c.params) {
            RatFunc v = sol.constants.count(p) ? sol.constants.at(p) : RatFunc::var(p);
            if (v == RatFunc::var(p)) v = RatFunc(0);  // free constants resolve to 0
            param_values[p] = v;
        }
        for (auto& [m, cf] : y.terms)
            for (const auto& [p, v] : param_values) cf = cf.substitute(p, v);
        y = te_normalize(tw, y);
        symbols[c.fresh] = y;
        out.solved_sequences[c.fresh] = rename_free_var(to_expression(y, tw), "k", "k");
    }
    for (const auto& p : r.params)
        if (!param_values.count(p)) param_values[p] = RatFunc(0);
    out.constants = param_values;

    // substitute into the canonical closed form
    const Tower& tw = emb.tower;
    int sign_gen = tw.find("m");
    ConcCanon canon;
    canon.tower = tw;
    canon.threshold = r.canon.threshold;
    for (const auto& [mono, at] : r.canon.terms) {
        TowerElem at_te = genpoly_to_tower(at, tw, symbols, param_values, sign_gen);
        ConcCanon term = ConcCanon::constant(tw, at_te);
        for (const auto& [key, e] : mono) {
            TowerElem body = genpoly_to_tower(r.canon.bodies.at(key), tw, symbols, param_values, sign_gen);
            term = term * conc_canon_sum(body, tw).pow(e);
        }
        canon = canon + term;
    }
    if (collapse) canon = collapse_sums(canon);
    out.canon = canon;

    // provisos: inverse-binomial targets need a <= n; denominators in n need n >= 1
    if (target->needs_a_le_n) out.provisos.push_back("a<=n");
    bool n_denominator = false;
    auto scan_rf = [&](const RatFunc& f) {
        if (f.den().has_var("n")) n_denominator = true;
    };
    for (const auto& [p, v] : param_values) scan_rf(v);
    for (const auto& [m, at] : canon.terms)
        for (const auto& [g, cf] : at.terms) scan_rf(cf);
    for (const auto& [k, b] : canon.bodies)
        if (b.den.has_var("n")) n_denominator = true;
    if (n_denominator) out.provisos.push_back("n>=1");

    out.lhs = normalize(substitute_generic(r.input, r.inner_symbol, target->expr, "k"));
    out.rhs = conc_canon_to_expr(canon, r.outer);
    out.threshold = std::max<long long>(canon.threshold, tw.threshold());
    out.ok = true;

    // oracle check before surfacing
    {
        std::vector<GridVar> grid{{r.outer, std::max(0LL, out.threshold), 8}, {"n", 1, 8}};
        Binding base;
        std::set<std::string> fv;
        for (const auto& v : free_vars(out.lhs)) fv.insert(v);
        for (const auto& v : free_vars(out.rhs)) fv.insert(v);
        if (fv.count("x")) base.params["x"] = BigRational(BigInt(3), BigInt(2));
        if (!fv.count("n")) grid.pop_back();
        auto rep = check_identity(out.lhs, out.rhs, grid, base, out.provisos);
        if (!rep.passed())
            throw std::logic_error("specialize: oracle check failed for target " + target_name);
    }
    return out;
}

}  // namespace telesum
