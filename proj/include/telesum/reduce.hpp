#pragma once

#include "telesum/canon.hpp"
#include "telesum/oracle.hpp"
#include "telesum/parser.hpp"

#include <optional>
#include <string>
#include <vector>

namespace telesum {

/// Parameterized-telescoping constraint on a fresh generic sequence:
/// Y[k+1] - Y[k] = rhs(k), rhs a generic-ring polynomial that may mention
/// the introduced parameters.
struct Constraint {
    std::string fresh;
    MultiPoly rhs_poly;  // at index k
    std::vector<std::string> params;

    SumExpr rhs_expr(const std::string& var) const {
        return canon_detail::genpoly_to_expr(rhs_poly, var);
    }
    SumExpr equation_expr(const std::string& var) const {
        SumExpr lhs = SumExpr::generic(fresh, var, 1) - SumExpr::generic(fresh, var, 0);
        return normalize(lhs);
    }
};

struct ReductionResult {
    enum class Tag { InRing, WithExtension, WithConstraints, Unreduced };

    SumExpr input;
    std::string outer = "a";
    std::string inner_symbol;  // the generic sequence X
    GenCanon canon;            // canonical split-sum closed form
    SumExpr closed_simple;     // expression of `canon`
    SumExpr closed_grouped;    // one combined extension sum, paper-session style
    std::vector<Constraint> constraints;
    std::vector<SumExpr> extensions;  // the introduced trivial-solution sums
    std::vector<std::string> params;
    Tag tag = Tag::InRing;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["input"] = expr_to_json(input);
        j["outer"] = outer;
        j["symbol"] = inner_symbol;
        j["closed_form"] = expr_to_json(closed_simple);
        j["closed_form_grouped"] = expr_to_json(closed_grouped);
        j["tag"] = tag == Tag::InRing          ? "solved-in-ring"
                   : tag == Tag::WithExtension ? "solved-with-extension"
                   : tag == Tag::WithConstraints ? "solved-with-constraints"
                                                 : "unreduced";
        j["params"] = params;
        nlohmann::json cs = nlohmann::json::array();
        for (const auto& c : constraints) {
            nlohmann::json cj;
            cj["fresh"] = c.fresh;
            cj["rhs"] = expr_to_json(c.rhs_expr(outer));
            cj["params"] = c.params;
            cs.push_back(cj);
        }
        j["constraints"] = cs;
        nlohmann::json xs = nlohmann::json::array();
        for (const auto& x : extensions) xs.push_back(expr_to_json(x));
        j["extensions"] = xs;
        return j;
    }

    static ReductionResult from_json(const nlohmann::json& j);
};

// ---------------------------------------------------------------------------
// interchange: the square-grid relation
// ---------------------------------------------------------------------------

/// Rewrites Sum_{k=0}^{a} (Sum_{j=0}^{k} X_j) Y_k by summing the square grid
/// the other way:
///   (Sum Y)(Sum X) + Sum XY - Sum_{k} X_k (Sum_{j<=k} Y_j).
inline SumExpr interchange(const SumExpr& double_sum) {
    SumExpr e = normalize(double_sum);
    const ExprNode& n = e.node();
    auto fail = [] { throw UnsupportedError("interchange: expected Sum(k,0,a, Sum(j,0,k,X[j]) * Y[k])"); };
    if (n.kind != NodeKind::Sum || n.lower != 0) fail();
    std::string kv = n.bound_var;
    SumExpr upper = n.args[0];
    SumExpr body = normalize(n.args[1]);
    // body = inner_sum * Y[k] (Y possibly the constant 1)
    SumExpr inner, weight = SumExpr::constant(1);
    if (body.kind() == NodeKind::Sum) {
        inner = body;
    } else if (body.kind() == NodeKind::Mul) {
        std::vector<SumExpr> rest;
        for (const auto& f : body.node().args) {
            if (f.kind() == NodeKind::Sum && !inner.valid()) inner = f;
            else rest.push_back(f);
        }
        if (!inner.valid()) fail();
        weight = normalize(SumExpr::mul(std::move(rest)));
    } else {
        fail();
    }
    const ExprNode& in = inner.node();
    if (in.lower != 0) fail();
    SumExpr iu = normalize(in.args[0]);
    if (!(iu.kind() == NodeKind::Var && iu.node().name == kv)) fail();
    std::string jv = in.bound_var;
    SumExpr xbody = in.args[1];

    auto sum_over = [&](const std::string& var, const SumExpr& up, const SumExpr& b) {
        return SumExpr::sum(var, 0, up, b);
    };
    SumExpr y_at_j = rename_free_var(weight, kv, jv);
    SumExpr x_at_k = rename_free_var(xbody, jv, kv);
    SumExpr total = sum_over(kv, upper, weight) * sum_over(jv, upper, xbody) +
                    sum_over(kv, upper, weight * x_at_k) -
                    sum_over(kv, upper, x_at_k * sum_over(jv, SumExpr::variable(kv), y_at_j));
    return normalize(total);
}

// ---------------------------------------------------------------------------
// reduce_generic
// ---------------------------------------------------------------------------

namespace reduce_detail {

inline const std::string kSVar = "@S";

/// Converts the summand to a generic-ring polynomial with @S standing for
/// the distinguished inner sum Sum_{j=0}^{k} X_j. Returns the generic symbol.
inline MultiPoly summand_to_poly(const SumExpr& body, const std::string& kv, std::string& symbol) {
    const ExprNode& n = body.node();
    switch (n.kind) {
        case NodeKind::Sum: {
            if (n.lower != 0) throw UnsupportedError("inner sums must start at 0");
            SumExpr up = normalize(n.args[0]);
            if (!(up.kind() == NodeKind::Var && up.node().name == kv))
                throw UnsupportedError("inner sums must run to the outer index");
            SumExpr ib = normalize(n.args[1]);
            if (ib.kind() != NodeKind::Generic || ib.node().offset != 0 ||
                ib.node().index_var != n.bound_var)
                throw UnsupportedError("inner sum body must be a plain generic atom");
            if (symbol.empty()) symbol = ib.node().name;
            else if (symbol != ib.node().name)
                throw UnsupportedError("multiple distinct inner sums");
            return MultiPoly::var(kSVar);
        }
        case NodeKind::Add: {
            MultiPoly r;
            for (const auto& a : n.args) r += summand_to_poly(a, kv, symbol);
            return r;
        }
        case NodeKind::Mul: {
            MultiPoly r(1);
            for (const auto& a : n.args) r *= summand_to_poly(a, kv, symbol);
            return genring::reduce_sign(r);
        }
        case NodeKind::Pow:
            return genring::reduce_sign(summand_to_poly(n.args[0], kv, symbol).pow(n.exp));
        default:
            return canon_detail::expr_to_genpoly(body, kv);
    }
}

}  // namespace reduce_detail

/// Oracle check of a produced reduction: random tables for the generic
/// sequences, constraint-built tables for the fresh ones, exact agreement of
/// input and closed form on 0 <= a <= amax. Throws on disagreement.
inline void verify_reduction(const ReductionResult& r, unsigned long long seed, long long amax = 15) {
    std::mt19937_64 rng(seed);
    for (int round = 0; round < 3; ++round) {
        Binding b;
        b.tables[r.inner_symbol] = random_table(rng, static_cast<size_t>(amax) + 6);
        for (const auto& p : r.params) b.params[p] = random_rational(rng);
        // fresh sequences built from their recurrences
        for (const auto& c : r.constraints) {
            std::vector<BigRational> y;
            y.push_back(random_rational(rng));
            for (long long k = 0; k + 1 <= amax + 4; ++k) {
                Binding bk = b;
                SumExpr rhs = c.rhs_expr("k");
                y.push_back(y.back() + eval_sequence(rhs, bk, "k", k));
            }
            b.tables[c.fresh] = y;
        }
        for (long long a = 0; a <= amax; ++a) {
            BigRational lhs = eval_sequence(r.input, b, r.outer, a);
            BigRational rhs = eval_sequence(r.closed_simple, b, r.outer, a);
            if (lhs != rhs)
                throw std::logic_error("reduce: oracle check failed at a = " + std::to_string(a));
        }
    }
}

/// The reduction procedure: ansatz g = sum_i g_i S^i of degree deg+1,
/// coefficient comparison top-down in the generic ring. Coefficient
/// equations that solve polynomially are taken (with their free additive
/// constants kept as parameters); a failing equation at S-degree >= 1
/// introduces a fresh generic sequence bound by a parameterized-telescoping
/// constraint; the S-degree-0 equation falls back to the trivial-solution
/// sum extension. Parameters that end up in no constraint are set to 0.
inline ReductionResult reduce_generic(const SumExpr& input_in, int max_constraints = 1,
                                      unsigned long long oracle_seed = kDefaultOracleSeed) {
    SumExpr input = normalize(input_in);
    ReductionResult res;
    res.input = input;

    const ExprNode& n = input.node();
    if (n.kind != NodeKind::Sum || n.lower != 0)
        throw UnsupportedError("reduce: input must be Sum(k,0,a, summand)");
    SumExpr up = normalize(n.args[0]);
    if (up.kind() != NodeKind::Var) throw UnsupportedError("reduce: upper bound must be a variable");
    res.outer = up.node().name;
    const std::string kv = n.bound_var;

    std::string symbol;
    MultiPoly f = reduce_detail::summand_to_poly(normalize(n.args[1]), kv, symbol);
    if (symbol.empty()) {
        // no inner sum: treat the summand itself over the generic ring
        symbol = "X";
        for (const auto& v : f.vars())
            if (auto av = genring::parse_atom_var(v)) { symbol = av->first; break; }
    }
    res.inner_symbol = symbol;

    const std::string S = reduce_detail::kSVar;
    MultiPoly x1 = MultiPoly::var(genring::atom_var(symbol, 1));
    // sigma(f): base shift with @S fixed, then @S -> @S + X_{k+1}
    MultiPoly sf = genring::sigma(f).substitute(S, MultiPoly::var(S) + x1);
    sf = genring::reduce_sign(sf);
    int d = std::max(sf.degree(S), 0);
    if (d > 2) throw UnsupportedError("reduce: summand degree in the inner sum exceeds 2");

    std::vector<MultiPoly> gs(d + 2);
    std::vector<std::string> live;
    int next_param = 0, next_fresh = 0;
    auto fresh_param = [&] {
        std::string p = next_param == 0 ? "c" : "c" + std::to_string(next_param);
        ++next_param;
        return p;
    };
    auto fresh_symbol = [&] {
        std::string y = next_fresh == 0 ? "Y" : "Y" + std::to_string(next_fresh);
        ++next_fresh;
        return y;
    };
    std::optional<MultiPoly> extension_body;  // psi with Sum_{j=0}^{k} psi(j)

    auto substitute_all = [&](const std::string& p, const MultiPoly& v) {
        for (auto& g : gs) g = g.substitute(p, v);
        for (auto& c : res.constraints) c.rhs_poly = c.rhs_poly.substitute(p, v);
    };

    for (int i = d + 1; i >= 0; --i) {
        MultiPoly rhs = sf.coefficient_of(S, i);
        for (int j = i + 1; j <= d + 1; ++j) {
            if (gs[j].is_zero()) continue;
            long long binco;
            {
                long long num = 1, den = 1;
                for (int t = 1; t <= j - i; ++t) { num *= i + t; den *= t; }
                binco = num / den;
            }
            rhs -= genring::sigma(gs[j]) * x1.pow(j - i) * BigRational(binco);
        }
        rhs = genring::reduce_sign(rhs);

        auto sol = genring::solve_sigma_diff(rhs, live);
        if (sol.solved) {
            gs[i] = sol.g;
            for (const auto& [p, v] : sol.forced) {
                substitute_all(p, v);
                live.erase(std::remove(live.begin(), live.end(), p), live.end());
            }
            if (i >= 1) {
                std::string p = fresh_param();
                live.push_back(p);
                res.params.push_back(p);
                gs[i] += MultiPoly::var(p);
            }
            continue;
        }
        if (i >= 1) {
            if (static_cast<int>(res.constraints.size()) >= max_constraints) {
                // mirror the session behavior: give up, return the input
                res.tag = ReductionResult::Tag::Unreduced;
                res.closed_simple = input;
                res.closed_grouped = input;
                return res;
            }
            Constraint c;
            c.fresh = fresh_symbol();
            c.rhs_poly = rhs;
            for (const auto& p : live)
                if (rhs.has_var(p)) c.params.push_back(p);
            res.constraints.push_back(c);
            gs[i] = MultiPoly::var(genring::atom_var(c.fresh, 0));
        } else {
            extension_body = genring::sigma(rhs, -1);
        }
    }

    // parameters that feed no constraint are resolved to 0
    std::vector<std::string> used;
    for (const auto& c : res.constraints)
        for (const auto& p : c.params)
            if (std::find(used.begin(), used.end(), p) == used.end()) used.push_back(p);
    auto subst_everywhere = [&](const std::string& p, const MultiPoly& v) {
        substitute_all(p, v);
        if (extension_body) *extension_body = extension_body->substitute(p, v);
    };
    for (const auto& p : res.params) {
        if (std::find(used.begin(), used.end(), p) != used.end()) continue;
        subst_everywhere(p, MultiPoly());
    }
    // survivors are renamed to c, c1, ... in order of appearance
    for (size_t i = 0; i < used.size(); ++i)
        subst_everywhere(used[i], MultiPoly::var("@p" + std::to_string(i)));
    res.params.clear();
    for (size_t i = 0; i < used.size(); ++i) {
        std::string target = i == 0 ? "c" : "c" + std::to_string(i);
        subst_everywhere("@p" + std::to_string(i), MultiPoly::var(target));
        res.params.push_back(target);
    }
    for (auto& c : res.constraints) {
        c.params.clear();
        for (const auto& p : res.params)
            if (c.rhs_poly.has_var(p)) c.params.push_back(p);
    }

    // assemble the canonical closed form: sum_i g_i(a) S(a)^i + G0(a) - G(-1)
    GenCanon S_obj = gen_canon_sum(MultiPoly::var(genring::atom_var(symbol, 0)));
    GenCanon canon;
    for (int i = 0; i <= d + 1; ++i) {
        if (gs[i].is_zero()) continue;
        canon = canon + gen_canon_at(gs[i]) * S_obj.pow(i);
    }
    if (extension_body && !extension_body->is_zero())
        canon = canon + gen_canon_sum(*extension_body);
    MultiPoly boundary = canon_detail::at_part_at(gs[0], -1);
    if (!boundary.is_zero()) canon = canon + gen_canon_at(-boundary);
    res.canon = canon;
    res.closed_simple = gen_canon_to_expr(canon, res.outer);

    // grouped display: the extension sum stays in one piece
    {
        std::vector<SumExpr> terms;
        for (int i = 0; i <= d + 1; ++i) {
            if (gs[i].is_zero()) continue;
            SumExpr coeff = canon_detail::genpoly_to_expr(gs[i], res.outer);
            SumExpr Sx = SumExpr::sum("i", 0, SumExpr::variable(res.outer),
                                      SumExpr::generic(symbol, "i", 0));
            SumExpr t = i == 0 ? coeff : coeff * (i == 1 ? Sx : SumExpr::pow(Sx, i));
            terms.push_back(t);
        }
        if (extension_body && !extension_body->is_zero()) {
            SumExpr body = canon_detail::genpoly_to_expr(*extension_body, "i");
            SumExpr ext = SumExpr::sum("i", 0, SumExpr::variable(res.outer), body);
            terms.push_back(ext);
            res.extensions.push_back(ext);
        }
        if (!boundary.is_zero())
            terms.push_back(SumExpr::mul(
                {SumExpr::constant(-1), canon_detail::genpoly_to_expr(boundary, res.outer)}));
        res.closed_grouped = normalize(SumExpr::add(std::move(terms)));
    }

    res.tag = !res.constraints.empty() ? ReductionResult::Tag::WithConstraints
              : extension_body         ? ReductionResult::Tag::WithExtension
                                       : ReductionResult::Tag::InRing;

    verify_reduction(res, oracle_seed);
    return res;
}

inline ReductionResult ReductionResult::from_json(const nlohmann::json& j) {
    ReductionResult r;
    r.input = expr_from_json(j.at("input"));
    r.outer = j.at("outer").get<std::string>();
    r.inner_symbol = j.at("symbol").get<std::string>();
    r.closed_simple = expr_from_json(j.at("closed_form"));
    r.closed_grouped = expr_from_json(j.at("closed_form_grouped"));
    std::string tag = j.at("tag").get<std::string>();
    r.tag = tag == "solved-in-ring"            ? Tag::InRing
            : tag == "solved-with-extension"   ? Tag::WithExtension
            : tag == "solved-with-constraints" ? Tag::WithConstraints
                                               : Tag::Unreduced;
    for (const auto& p : j.value("params", nlohmann::json::array()))
        r.params.push_back(p.get<std::string>());
    for (const auto& cj : j.value("constraints", nlohmann::json::array())) {
        Constraint c;
        c.fresh = cj.at("fresh").get<std::string>();
        c.rhs_poly = canon_detail::expr_to_genpoly(normalize(expr_from_json(cj.at("rhs"))), r.outer);
        for (const auto& p : cj.value("params", nlohmann::json::array()))
            c.params.push_back(p.get<std::string>());
        r.constraints.push_back(c);
    }
    if (r.tag != Tag::Unreduced) r.canon = to_gen_canon(r.closed_simple, r.outer);
    return r;
}

// ---------------------------------------------------------------------------
// Canonical rescaling of the (Y, c) parameterization
// ---------------------------------------------------------------------------

/// Two reductions are the same modulo rescaling the fresh sequence and its
/// constant: scale each constraint so its parameter-free part is monic, and
/// rewrite the closed form accordingly. After this, structural equality
/// decides equivalence of reduction outputs.
inline void canonicalize_reduction(GenCanon& canon, std::vector<Constraint>& constraints) {
    for (auto& c : constraints) {
        MultiPoly inhom = c.rhs_poly;
        for (const auto& p : c.params) inhom = inhom.coefficient_of(p, 0);
        if (inhom.is_zero()) continue;
        BigRational lead = inhom.leading_coefficient();
        if (lead.is_one()) continue;
        BigRational s = BigRational(1) / lead;
        // rhs' = s * rhs with the parameters renamed q -> q/s
        MultiPoly rhs = c.rhs_poly;
        for (const auto& p : c.params)
            rhs = rhs.substitute(p, MultiPoly::var(p) / s);
        c.rhs_poly = rhs * s;
        // closed form: Y -> Y/s wherever it appears, parameters q -> q/s
        GenCanon out;
        out.threshold = canon.threshold;
        for (const auto& [mono, at] : canon.terms) {
            MultiPoly at2 = at;
            for (const auto& p : c.params) at2 = at2.substitute(p, MultiPoly::var(p) / s);
            // at-part occurrences of Y
            for (const auto& v : at.vars())
                if (auto av = genring::parse_atom_var(v); av && av->first == c.fresh)
                    at2 = at2.substitute(v, MultiPoly::var(v) / s);
            // body occurrences of Y scale the outer coefficient
            int ydeg = 0;
            for (const auto& [key, e] : mono) {
                const MultiPoly& body = canon.bodies.at(key);
                for (const auto& v : body.vars())
                    if (auto av = genring::parse_atom_var(v); av && av->first == c.fresh)
                        ydeg += body.degree(v) * e;
            }
            if (ydeg > 0) at2 = at2 * s.inverse().pow(ydeg);
            out.add_term(mono, at2, canon.bodies);
        }
        for (const auto& [k, v] : canon.bodies)
            if (!out.bodies.count(k)) out.bodies[k] = v;
        canon = out;
    }
}

}  // namespace telesum
