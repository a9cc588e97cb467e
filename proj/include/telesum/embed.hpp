#pragma once

#include "telesum/diffring.hpp"
#include "telesum/parser.hpp"

namespace telesum {

namespace embed_detail {

/// Inverse shift automorphism.
inline TowerElem apply_sigma_inv(const TowerElem& e, const Tower& tw) {
    TowerElem out;
    size_t n = tw.exts.size();
    for (const auto& [mono, c] : e.terms) {
        std::vector<int> m = tower_detail::pad(mono, n);
        TowerElem term = te_coeff(tw, c.shift_var("k", -1));
        for (size_t i = 0; i < n; ++i) {
            int ei = m[i];
            if (ei == 0) continue;
            const Extension& ext = tw.exts[i];
            switch (ext.kind) {
                case ExtKind::Pi:
                    term = te_scale(tw, te_mul(tw, term, te_gen(tw, static_cast<int>(i), ei)),
                                    ext.alpha.shift_var("k", -1).pow(-ei));
                    break;
                case ExtKind::R: {
                    RatFunc sign = (ei % 2 != 0) ? RatFunc(-1) : RatFunc(1);
                    term = te_scale(tw, te_mul(tw, term, te_gen(tw, static_cast<int>(i), ei)), sign);
                    break;
                }
                case ExtKind::Sigma: {
                    TowerElem base =
                        te_sub(tw, te_gen(tw, static_cast<int>(i), 1), apply_sigma_inv(ext.beta, tw));
                    term = te_mul(tw, term, te_pow(tw, base, ei));
                    break;
                }
            }
        }
        out = te_add(tw, out, term);
    }
    return out;
}

/// Symbolic value at index 0: coefficients at k = 0 (vanishing denominators
/// use the zero convention), generators at their index-0 values.
inline RatFunc value_at_zero(const TowerElem& e, const Tower& tw) {
    RatFunc total(0);
    for (const auto& [mono, c] : e.terms) {
        MultiPoly den0 = c.den().substitute("k", MultiPoly(0));
        if (den0.is_zero()) continue;  // pole convention
        RatFunc t(c.num().substitute("k", MultiPoly(0)), den0);
        std::vector<int> m = tower_detail::pad(mono, tw.exts.size());
        bool dead = false;
        for (size_t i = 0; i < m.size() && !dead; ++i) {
            if (m[i] == 0) continue;
            const Extension& ext = tw.exts[i];
            RatFunc v(1);
            if (ext.kind == ExtKind::R) v = RatFunc(1);
            else if (ext.anchor == 0) v = ext.anchor_value;
            else v = ext.kind == ExtKind::Pi ? RatFunc(1) : RatFunc(0);
            if (v.is_zero()) {
                if (m[i] < 0) throw UnsupportedError("value at 0 of an inverted vanishing generator");
                dead = true;
                break;
            }
            t *= v.pow(m[i]);
        }
        if (!dead) total += t;
    }
    return total;
}

}  // namespace embed_detail

/// Incrementally built embedding of expressions into a difference-ring
/// tower. Generators are reused when the shift rule matches syntactically.
class Embedding {
public:
    Tower tower;

    TowerElem embed(const SumExpr& e) { return run(normalize(e)); }

private:
    int fresh_sigma_ = 0;

    int find_pi(const RatFunc& alpha) {
        for (size_t i = 0; i < tower.exts.size(); ++i)
            if (tower.exts[i].kind == ExtKind::Pi && tower.exts[i].alpha == alpha)
                return static_cast<int>(i);
        return -1;
    }
    int find_r() {
        for (size_t i = 0; i < tower.exts.size(); ++i)
            if (tower.exts[i].kind == ExtKind::R) return static_cast<int>(i);
        return -1;
    }
    int find_sigma(const TowerElem& beta) {
        for (size_t i = 0; i < tower.exts.size(); ++i)
            if (tower.exts[i].kind == ExtKind::Sigma &&
                te_equal(tower, tower.exts[i].beta, beta))
                return static_cast<int>(i);
        return -1;
    }

    int ensure_pi(const std::string& name, const RatFunc& alpha, const RatFunc& anchor_value,
                  const SumExpr& source) {
        int i = find_pi(alpha);
        if (i >= 0) return i;
        tower = extend_pi(tower, name, alpha, anchor_value, source);
        return static_cast<int>(tower.exts.size()) - 1;
    }

    // offset of an affine atom argument relative to k: arg must be k + c
    static long long arg_offset(const SumExpr& arg) {
        SumExpr n = normalize(arg);
        if (n.kind() == NodeKind::Var && n.node().name == "k") return 0;
        if (n.kind() == NodeKind::Add) {
            long long off = 0;
            bool seen_k = false;
            for (const auto& t : n.node().args) {
                if (t.kind() == NodeKind::Var && t.node().name == "k" && !seen_k) seen_k = true;
                else if (t.kind() == NodeKind::Const && t.node().cval.is_integer())
                    off += t.node().cval.to_int64();
                else
                    throw UnsupportedError("atom argument must be k plus an integer: " + print(arg));
            }
            if (!seen_k) throw UnsupportedError("atom argument must involve k: " + print(arg));
            return off;
        }
        throw UnsupportedError("atom argument must be k plus an integer: " + print(arg));
    }

    TowerElem shifted_gen(int idx, long long off, int exp) {
        TowerElem e = te_gen(tower, idx, exp);
        for (long long j = 0; j < off; ++j) e = apply_sigma(e, tower);
        for (long long j = 0; j > off; --j) e = embed_detail::apply_sigma_inv(e, tower);
        return e;
    }

    TowerElem run(const SumExpr& e) {
        const ExprNode& n = e.node();
        switch (n.kind) {
            case NodeKind::Const:
                return te_coeff(tower, RatFunc(n.cval));
            case NodeKind::Var:
                return te_coeff(tower, RatFunc::var(n.name));
            case NodeKind::Rat:
                return te_coeff(tower, n.rat);
            case NodeKind::Generic:
                throw UnsupportedError("generic sequences have no tower model");
            case NodeKind::Add: {
                TowerElem acc;
                for (const auto& a : n.args) acc = te_add(tower, acc, run(a));
                return acc;
            }
            case NodeKind::Mul: {
                TowerElem acc = te_coeff(tower, RatFunc(1));
                for (const auto& a : n.args) acc = te_mul(tower, acc, run(a));
                return acc;
            }
            case NodeKind::Pow:
                return te_pow(tower, run(n.args[0]), n.exp);
            case NodeKind::AtomCall:
                return run_atom(e);
            case NodeKind::Sum:
                return run_sum(e);
        }
        throw UnsupportedError("unsupported node");
    }

    TowerElem run_atom(const SumExpr& e) {
        const ExprNode& n = e.node();
        auto rf = [](const std::string& s) { return RatFunc(MultiPoly::parse(s)); };
        auto K = [] { return SumExpr::variable("k"); };
        if (n.name == "binom" || n.name == "invbinom") {
            SumExpr top = normalize(n.args[0]);
            if (!(top.kind() == NodeKind::Var && top.node().name == "n"))
                throw UnsupportedError("tower atoms support binom(n, k+c) only");
            long long off = arg_offset(n.args[1]);
            int idx = ensure_pi("b", rf("n - k") / rf("k + 1"), RatFunc(1),
                                SumExpr::atom("binom", {SumExpr::variable("n"), K()}));
            return shifted_gen(idx, off, n.name == "binom" ? 1 : -1);
        }
        if (n.name == "pow") {
            SumExpr base = normalize(n.args[0]);
            RatFunc q;
            if (base.kind() == NodeKind::Const) q = RatFunc(base.node().cval);
            else if (base.kind() == NodeKind::Var) q = RatFunc::var(base.node().name);
            else throw UnsupportedError("pow atom base must be scalar");
            long long off = arg_offset(n.args[1]);
            int idx = ensure_pi("p_" + print(base), q, RatFunc(1),
                                SumExpr::atom("pow", {base, K()}));
            return shifted_gen(idx, off, 1);
        }
        if (n.name == "altsign") {
            long long off = arg_offset(n.args[0]);
            int idx = find_r();
            if (idx < 0) {
                tower = extend_r(tower, "m", SumExpr::atom("altsign", {K()}));
                idx = static_cast<int>(tower.exts.size()) - 1;
            }
            return shifted_gen(idx, off, 1);
        }
        if (n.name == "factorial") {
            long long off = arg_offset(n.args[0]);
            int idx = ensure_pi("f", rf("k + 1"), RatFunc(1), SumExpr::atom("factorial", {K()}));
            return shifted_gen(idx, off, 1);
        }
        if (n.name == "harmonic") {
            long long off = arg_offset(n.args[0]);
            TowerElem beta = te_coeff(tower, rf("1") / rf("k + 1"));
            int idx = find_sigma(beta);
            if (idx < 0) {
                tower = extend_sigma(tower, "h", beta, RatFunc(0),
                                     SumExpr::atom("harmonic", {K()}));
                idx = static_cast<int>(tower.exts.size()) - 1;
            }
            return shifted_gen(idx, off, 1);
        }
        throw UnsupportedError("unsupported atom " + n.name);
    }

    TowerElem run_sum(const SumExpr& e) {
        const ExprNode& n = e.node();
        if (n.lower != 0) throw UnsupportedError("tower sums must start at 0");
        SumExpr up = normalize(n.args[0]);
        if (!(up.kind() == NodeKind::Var && up.node().name == "k"))
            throw UnsupportedError("tower sums must run to k");
        SumExpr body = rename_free_var(n.args[1], n.bound_var, "k");
        TowerElem x = run(normalize(body));
        TowerElem beta = apply_sigma(x, tower);
        auto witness = check_sigma_ext(beta, tower);
        if (witness) {
            // the sum collapses: Sum_{j=0}^k x(j) = g(k) - g(0) + x(0)
            RatFunc corr = embed_detail::value_at_zero(x, tower) -
                           embed_detail::value_at_zero(*witness, tower);
            return te_add(tower, *witness, te_coeff(tower, corr));
        }
        std::string name = "s" + std::to_string(fresh_sigma_++);
        RatFunc anchor = embed_detail::value_at_zero(x, tower);
        SumExpr source = SumExpr::sum(n.bound_var, 0, SumExpr::variable("k"), n.args[1]);
        Tower grown = tower;
        {
            Extension ext;
            ext.kind = ExtKind::Sigma;
            ext.name = name;
            ext.beta = beta;  // admissibility just verified
            ext.anchor = 0;
            ext.anchor_value = anchor;
            ext.threshold = tower.threshold();
            ext.source = source;
            grown.exts.push_back(std::move(ext));
        }
        tower = std::move(grown);
        return te_gen(tower, static_cast<int>(tower.exts.size()) - 1, 1);
    }
};

/// Constructs the minimal tower housing e (an expression in "k") and the
/// element representing it.
inline std::pair<Tower, TowerElem> from_expression(const SumExpr& e) {
    Embedding emb;
    TowerElem el = emb.embed(e);
    return {std::move(emb.tower), std::move(el)};
}

/// Rewrites a tower element as an expression by replacing each generator
/// with its defining sum/product expression.
inline SumExpr to_expression(const TowerElem& e, const Tower& tw) {
    std::vector<SumExpr> terms;
    for (const auto& [mono, c] : e.terms) {
        std::vector<SumExpr> factors;
        factors.push_back(SumExpr::ratcoeff(c));
        std::vector<int> m = tower_detail::pad(mono, tw.exts.size());
        for (size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            const Extension& ext = tw.exts[i];
            if (!ext.source.valid()) throw UnsupportedError("generator without a source expression");
            SumExpr base = ext.source;
            int exp = m[i];
            if (exp < 0) {
                const ExprNode& bn = base.node();
                if (bn.kind == NodeKind::AtomCall) {
                    auto it = atom_signatures().find(bn.name);
                    if (it != atom_signatures().end() && !it->second.inverse.empty()) {
                        base = SumExpr::atom(it->second.inverse, bn.args);
                    } else if (bn.name == "pow") {
                        const ExprNode& b0 = bn.args[0].node();
                        SumExpr inv_base;
                        if (b0.kind == NodeKind::Const) inv_base = SumExpr::constant(b0.cval.inverse());
                        else if (b0.kind == NodeKind::Var)
                            inv_base = SumExpr::ratcoeff(RatFunc::var(b0.name, -1));
                        else
                            throw UnsupportedError("cannot invert generator " + ext.name);
                        base = SumExpr::atom("pow", {inv_base, bn.args[1]});
                    } else {
                        throw UnsupportedError("cannot invert generator " + ext.name);
                    }
                } else {
                    throw UnsupportedError("cannot invert generator " + ext.name);
                }
                exp = -exp;
            }
            factors.push_back(exp == 1 ? base : SumExpr::pow(base, exp));
        }
        terms.push_back(SumExpr::mul(std::move(factors)));
    }
    return normalize(SumExpr::add(std::move(terms)));
}

}  // namespace telesum
