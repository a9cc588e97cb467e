#pragma once

#include "telesum/atoms.hpp"
#include "telesum/expr.hpp"
#include "telesum/telescope.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace telesum {

/// Raised when an input falls outside the supported solver scope; the
/// policy is to fail loudly rather than risk an unsound answer.
struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExtKind { Sigma, Pi, R };

/// Element of a tower: polynomial in the Sigma/R generators, Laurent in the
/// Pi generators, with rational-function coefficients over the base field.
/// Exponent vectors are aligned with the tower's extension list.
struct TowerElem {
    std::map<std::vector<int>, RatFunc> terms;

    bool is_zero() const { return terms.empty(); }
    bool is_coeff() const {
        return terms.empty() ||
               (terms.size() == 1 &&
                std::all_of(terms.begin()->first.begin(), terms.begin()->first.end(),
                            [](int e) { return e == 0; }));
    }
    RatFunc coeff_value() const {
        if (terms.empty()) return RatFunc(0);
        if (!is_coeff()) throw std::domain_error("TowerElem: not a coefficient");
        return terms.begin()->second;
    }
};

struct Extension {
    ExtKind kind = ExtKind::Pi;
    std::string name;
    TowerElem beta;        // Sigma: sigma(s) = s + beta
    RatFunc alpha;         // Pi: sigma(t) = alpha t; R: alpha = -1
    long long anchor = 0;  // index carrying the anchor value
    RatFunc anchor_value = RatFunc(1);
    long long threshold = 0;  // ev/sigma commutation holds from here on
    SumExpr source;           // defining expression in "k" (for to_expression)
};

/// Ordered difference-ring tower over Q(params)(k).
struct Tower {
    std::vector<Extension> exts;

    int find(const std::string& name) const {
        for (size_t i = 0; i < exts.size(); ++i)
            if (exts[i].name == name) return static_cast<int>(i);
        return -1;
    }
    long long threshold() const {
        long long t = 0;
        for (const auto& e : exts) t = std::max(t, e.threshold);
        return t;
    }
};

// ---------------------------------------------------------------------------
// TowerElem arithmetic
// ---------------------------------------------------------------------------

namespace tower_detail {

inline std::vector<int> pad(const std::vector<int>& v, size_t n) {
    std::vector<int> r = v;
    r.resize(n, 0);
    return r;
}

}  // namespace tower_detail

inline TowerElem te_normalize(const Tower& tw, TowerElem e) {
    TowerElem out;
    for (auto& [mono, c] : e.terms) {
        if (c.is_zero()) continue;
        std::vector<int> m = tower_detail::pad(mono, tw.exts.size());
        for (size_t i = 0; i < tw.exts.size(); ++i) {
            if (tw.exts[i].kind == ExtKind::R) m[i] = ((m[i] % 2) + 2) % 2;
            if (tw.exts[i].kind == ExtKind::Sigma && m[i] < 0)
                throw std::domain_error("TowerElem: negative power of a sum generator");
        }
        RatFunc& slot = out.terms[m];
        slot += c;
        if (slot.is_zero()) out.terms.erase(m);
    }
    return out;
}

inline TowerElem te_coeff(const Tower& tw, const RatFunc& c) {
    TowerElem e;
    if (!c.is_zero()) e.terms[std::vector<int>(tw.exts.size(), 0)] = c;
    return e;
}

inline TowerElem te_gen(const Tower& tw, int idx, int exp = 1) {
    TowerElem e;
    std::vector<int> m(tw.exts.size(), 0);
    m[idx] = exp;
    e.terms[m] = RatFunc(1);
    return te_normalize(tw, e);
}

inline TowerElem te_add(const Tower& tw, const TowerElem& a, const TowerElem& b) {
    TowerElem r;
    for (const auto& [m, c] : a.terms) r.terms[tower_detail::pad(m, tw.exts.size())] += c;
    for (const auto& [m, c] : b.terms) r.terms[tower_detail::pad(m, tw.exts.size())] += c;
    return te_normalize(tw, r);
}

inline TowerElem te_neg(const TowerElem& a) {
    TowerElem r = a;
    for (auto& [m, c] : r.terms) c = -c;
    return r;
}

inline TowerElem te_sub(const Tower& tw, const TowerElem& a, const TowerElem& b) {
    return te_add(tw, a, te_neg(b));
}

inline TowerElem te_scale(const Tower& tw, const TowerElem& a, const RatFunc& s) {
    TowerElem r;
    if (s.is_zero()) return r;
    for (const auto& [m, c] : a.terms) r.terms[tower_detail::pad(m, tw.exts.size())] = c * s;
    return te_normalize(tw, r);
}

inline TowerElem te_mul(const Tower& tw, const TowerElem& a, const TowerElem& b) {
    TowerElem r;
    size_t n = tw.exts.size();
    for (const auto& [ma, ca] : a.terms)
        for (const auto& [mb, cb] : b.terms) {
            std::vector<int> m = tower_detail::pad(ma, n);
            std::vector<int> mb2 = tower_detail::pad(mb, n);
            for (size_t i = 0; i < n; ++i) m[i] += mb2[i];
            r.terms[m] += ca * cb;
        }
    return te_normalize(tw, r);
}

inline TowerElem te_pow(const Tower& tw, const TowerElem& a, int e) {
    if (e < 0) {
        // only pure Pi monomials are invertible here
        if (a.terms.size() != 1) throw std::domain_error("TowerElem: cannot invert");
        const auto& [m, c] = *a.terms.begin();
        TowerElem inv;
        std::vector<int> mi = tower_detail::pad(m, tw.exts.size());
        for (size_t i = 0; i < mi.size(); ++i) {
            if (mi[i] == 0) continue;
            if (tw.exts[i].kind == ExtKind::Sigma)
                throw std::domain_error("TowerElem: cannot invert a sum generator");
            if (tw.exts[i].kind != ExtKind::R) mi[i] = -mi[i];
        }
        inv.terms[mi] = c.inverse();
        return te_pow(tw, inv, -e);
    }
    TowerElem r = te_coeff(tw, RatFunc(1)), b = a;
    while (e > 0) {
        if (e & 1) r = te_mul(tw, r, b);
        b = te_mul(tw, b, b);
        e >>= 1;
    }
    return r;
}

inline bool te_equal(const Tower& tw, const TowerElem& a, const TowerElem& b) {
    return te_sub(tw, a, b).is_zero();
}

/// The shift automorphism: k -> k+1 on coefficients, sigma on generators.
inline TowerElem apply_sigma(const TowerElem& e, const Tower& tw) {
    TowerElem out;
    size_t n = tw.exts.size();
    for (const auto& [mono, c] : e.terms) {
        std::vector<int> m = tower_detail::pad(mono, n);
        TowerElem term = te_coeff(tw, c.shift_var("k", 1));
        for (size_t i = 0; i < n; ++i) {
            int ei = m[i];
            if (ei == 0) continue;
            const Extension& ext = tw.exts[i];
            switch (ext.kind) {
                case ExtKind::Pi:
                    term = te_scale(tw, te_mul(tw, term, te_gen(tw, static_cast<int>(i), ei)),
                                    ext.alpha.pow(ei));
                    break;
                case ExtKind::R: {
                    TowerElem g = te_gen(tw, static_cast<int>(i), ei);
                    RatFunc sign = (ei % 2 != 0) ? RatFunc(-1) : RatFunc(1);
                    term = te_scale(tw, te_mul(tw, term, g), sign);
                    break;
                }
                case ExtKind::Sigma: {
                    // (s + beta)^ei
                    TowerElem base = te_add(tw, te_gen(tw, static_cast<int>(i), 1), ext.beta);
                    term = te_mul(tw, term, te_pow(tw, base, ei));
                    break;
                }
            }
        }
        out = te_add(tw, out, term);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace tower_detail {

/// Generator values at indices 0..imax (index -> value per extension).
inline std::vector<std::vector<BigRational>> gen_values(const Tower& tw, long long imax,
                                                        const std::map<std::string, BigRational>& params);

inline BigRational ev_with_values(const Tower& tw, const TowerElem& e, long long i,
                                  const std::map<std::string, BigRational>& params,
                                  const std::vector<std::vector<BigRational>>& gv) {
    BigRational total(0);
    std::map<std::string, BigRational> point = params;
    point["k"] = BigRational(i);
    for (const auto& [mono, c] : e.terms) {
        BigRational t = c.eval(point);  // vanishing denominator -> 0
        std::vector<int> m = pad(mono, tw.exts.size());
        bool dead = false;
        for (size_t g = 0; g < m.size() && !dead; ++g) {
            if (m[g] == 0) continue;
            const BigRational& v = gv[g][i];
            if (v.is_zero() && m[g] < 0) { dead = true; break; }
            t *= v.pow(m[g]);
        }
        if (!dead) total += t;
    }
    return total;
}

inline std::vector<std::vector<BigRational>> gen_values(const Tower& tw, long long imax,
                                                        const std::map<std::string, BigRational>& params) {
    std::vector<std::vector<BigRational>> gv(tw.exts.size(), std::vector<BigRational>(imax + 1, BigRational(0)));
    for (size_t g = 0; g < tw.exts.size(); ++g) {
        const Extension& ext = tw.exts[g];
        std::map<std::string, BigRational> point = params;
        if (ext.kind == ExtKind::R) {
            for (long long i = 0; i <= imax; ++i) gv[g][i] = (i % 2 == 0) ? BigRational(1) : BigRational(-1);
            continue;
        }
        long long a = ext.anchor;
        BigRational av;
        {
            point.erase("k");
            av = ext.anchor_value.eval_strict(params);
        }
        if (a > imax) throw std::domain_error("ev: anchor beyond evaluation range");
        // below the anchor: products are 1, sums are 0
        for (long long i = 0; i < a; ++i) gv[g][i] = ext.kind == ExtKind::Pi ? BigRational(1) : BigRational(0);
        gv[g][a] = av;
        for (long long i = a; i < imax; ++i) {
            point["k"] = BigRational(i);
            if (ext.kind == ExtKind::Pi) {
                gv[g][i + 1] = gv[g][i] * ext.alpha.eval(point);
            } else {
                // beta lives at lower levels, whose values are already filled
                gv[g][i + 1] = gv[g][i] + ev_with_values(tw, ext.beta, i, params, gv);
            }
        }
    }
    return gv;
}

}  // namespace tower_detail

/// Exact value of e at index i (k = i), parameters bound in params.
inline BigRational ev(const TowerElem& e, const Tower& tw, long long i,
                      const std::map<std::string, BigRational>& params = {}) {
    if (i < 0) throw std::domain_error("ev: negative index");
    auto gv = tower_detail::gen_values(tw, i, params);
    return tower_detail::ev_with_values(tw, e, i, params, gv);
}

/// Values of e at 0..imax in one pass.
inline std::vector<BigRational> ev_range(const TowerElem& e, const Tower& tw, long long imax,
                                         const std::map<std::string, BigRational>& params = {}) {
    auto gv = tower_detail::gen_values(tw, imax, params);
    std::vector<BigRational> out(imax + 1);
    for (long long i = 0; i <= imax; ++i) out[i] = tower_detail::ev_with_values(tw, e, i, params, gv);
    return out;
}

// ---------------------------------------------------------------------------
// Telescoping inside a tower
// ---------------------------------------------------------------------------

struct TowerDiffResult {
    bool solved = false;
    TowerElem g;
    std::map<std::string, RatFunc> constants;  // includes parameters left symbolic
};

namespace tower_detail {

/// Splits rhs by its degree in generator `idx` (must be a Sigma generator).
inline std::map<int, TowerElem> by_sigma_degree(const Tower& tw, const TowerElem& e, size_t idx) {
    std::map<int, TowerElem> out;
    for (const auto& [mono, c] : e.terms) {
        std::vector<int> m = pad(mono, tw.exts.size());
        int d = m[idx];
        m[idx] = 0;
        out[d].terms[m] += c;
    }
    for (auto it = out.begin(); it != out.end();) {
        it->second = te_normalize(tw, it->second);
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    }
    return out;
}

/// Index of the topmost Sigma generator appearing with positive degree in
/// either the element or nothing (-1).
inline int top_sigma(const Tower& tw) {
    for (int i = static_cast<int>(tw.exts.size()) - 1; i >= 0; --i)
        if (tw.exts[i].kind == ExtKind::Sigma) return i;
    return -1;
}

inline RatFunc split_param_linear(const RatFunc& f, const std::string& p, RatFunc& coeff) {
    // f = rest + p * coeff, requiring linearity
    if (!f.has_var(p)) { coeff = RatFunc(0); return f; }
    const MultiPoly& den = f.den();
    if (den.has_var(p)) throw UnsupportedError("parameter in a denominator: " + p);
    if (f.num().degree(p) > 1) throw UnsupportedError("nonlinear parameter: " + p);
    coeff = RatFunc(f.num().coefficient_of(p, 1), den);
    return RatFunc(f.num().coefficient_of(p, 0), den);
}

}  // namespace tower_detail

/// Solves sigma(g) - g = rhs inside the tower. Coefficient comparison over
/// the topmost sum generator, recursing through the Sigma layers; the base
/// layer splits by product/sign content and dispatches each component to the
/// Gosper machinery. Parameters must occur linearly and are solved along the
/// way; parameters that stay free are reported as themselves. Throws
/// UnsupportedError where the scope ends (never silently).
inline TowerDiffResult solve_tower_diff(const Tower& tw, const TowerElem& rhs_in,
                                        const std::vector<std::string>& params,
                                        int level = -2) {
    if (level == -2) level = static_cast<int>(tw.exts.size()) - 1;
    TowerElem rhs = te_normalize(tw, rhs_in);
    TowerDiffResult out;
    for (const auto& p : params) out.constants[p] = RatFunc::var(p);

    // find the topmost Sigma generator at or below `level`
    int sidx = -1;
    for (int i = level; i >= 0; --i)
        if (tw.exts[i].kind == ExtKind::Sigma) { sidx = i; break; }

    if (sidx < 0) {
        // base layer: split by product/sign content
        if (rhs.is_zero()) {
            out.solved = true;
            return out;
        }
        struct Group {
            std::vector<int> mono;
            RatFunc w;     // sigma-factor of the content
            RatFunc rho;   // coefficient
        };
        std::vector<Group> groups;
        for (const auto& [mono, c] : rhs.terms) {
            std::vector<int> m = tower_detail::pad(mono, tw.exts.size());
            RatFunc w(1);
            for (size_t i = 0; i < m.size(); ++i) {
                if (m[i] == 0) continue;
                if (tw.exts[i].kind == ExtKind::Sigma)
                    throw std::logic_error("sigma generator above the solve level");
                if (tw.exts[i].kind == ExtKind::Pi) w *= tw.exts[i].alpha.pow(m[i]);
                else if (m[i] % 2 != 0) w *= RatFunc(-1);
            }
            groups.push_back({m, w, c});
        }
        // a parameter must not straddle two contents (joint solving across
        // contents is outside the supported scope)
        for (const auto& p : params) {
            int uses = 0;
            for (const auto& g : groups)
                if (g.rho.has_var(p)) ++uses;
            if (uses > 1) throw UnsupportedError("parameter " + p + " couples distinct contents");
        }
        out.solved = true;
        // internal additive constants (prefix @t) absorb freedom before the
        // caller's parameters, so a caller parameter stays symbolic when the
        // whole family is solvable
        std::vector<std::string> ordered;
        for (const auto& p : params)
            if (p.rfind("@t", 0) == 0) ordered.push_back(p);
        for (const auto& p : params)
            if (p.rfind("@t", 0) != 0) ordered.push_back(p);
        for (const auto& grp : groups) {
            RatFunc rho = grp.rho;
            std::vector<std::pair<std::string, RatFunc>> pieces;
            for (const auto& p : ordered) {
                RatFunc coeff;
                rho = tower_detail::split_param_linear(rho, p, coeff);
                if (!coeff.is_zero()) pieces.emplace_back(p, coeff);
            }
            auto sol = gosper_solve(grp.w, rho, pieces);
            if (!sol) {
                out.solved = false;
                return out;
            }
            TowerElem part;
            part.terms[grp.mono] = sol->certificate;
            out.g = te_add(tw, out.g, te_normalize(tw, part));
            for (const auto& [p, v] : sol->constants) out.constants[p] = v;
        }
        // apply pinned constants throughout g
        for (auto& [mono, c] : out.g.terms)
            for (const auto& [p, v] : out.constants)
                if (!(v == RatFunc::var(p))) c = c.substitute(p, v);
        out.g = te_normalize(tw, out.g);
        return out;
    }

    // Sigma layer: ansatz of degree d+1 in s, coefficients solved top-down
    const Extension& sext = tw.exts[sidx];
    auto fparts = tower_detail::by_sigma_degree(tw, rhs, sidx);
    int d = fparts.empty() ? 0 : fparts.rbegin()->first;
    if (d > 2) throw UnsupportedError("sum-generator degree above 2");

    std::vector<std::string> live = params;
    std::vector<TowerElem> gs(d + 2);        // g_i, coefficient of s^i
    std::map<std::string, RatFunc> pinned;   // accumulated constant pinnings
    std::vector<std::string> internal;       // per-level additive constants

    auto substitute_everywhere = [&](const std::string& p, const RatFunc& v) {
        for (auto& gi : gs)
            for (auto& [mono, c] : gi.terms) c = c.substitute(p, v);
        for (auto& [q, pv] : pinned) pv = pv.substitute(p, v);
        pinned[p] = pinned.count(p) ? pinned[p] : v;
    };

    for (int i = d + 1; i >= 0; --i) {
        // rhs_i = f_i - sum_{j>i} C(j,i) sigma(g_j) beta^{j-i}
        TowerElem rhs_i = fparts.count(i) ? fparts[i] : TowerElem{};
        for (int j = i + 1; j <= d + 1; ++j) {
            if (gs[j].is_zero()) continue;
            long long binco = 1;  // C(j, i) = (i+1)...(j) / (j-i)!
            {
                long long num = 1, den = 1;
                for (int t = 1; t <= j - i; ++t) {
                    num *= i + t;
                    den *= t;
                }
                binco = num / den;
            }
            TowerElem contrib = apply_sigma(gs[j], tw);
            contrib = te_mul(tw, contrib, te_pow(tw, sext.beta, j - i));
            contrib = te_scale(tw, contrib, RatFunc(BigRational(binco)));
            rhs_i = te_sub(tw, rhs_i, contrib);
        }
        for (const auto& [p, v] : pinned)
            for (auto& [mono, c] : rhs_i.terms) c = c.substitute(p, v);
        rhs_i = te_normalize(tw, rhs_i);

        auto sub = solve_tower_diff(tw, rhs_i, live, sidx - 1);
        if (!sub.solved) {
            out.solved = false;
            return out;
        }
        gs[i] = sub.g;
        for (const auto& [p, v] : sub.constants) {
            if (v == RatFunc::var(p)) continue;
            substitute_everywhere(p, v);
            auto it = std::find(live.begin(), live.end(), p);
            if (it != live.end()) live.erase(it);
        }
        if (i > 0) {
            // additive freedom of this level propagates downward
            std::string fresh = "@t" + std::to_string(sidx) + "_" + std::to_string(i);
            gs[i] = te_add(tw, gs[i], te_coeff(tw, RatFunc::var(fresh)));
            live.push_back(fresh);
            internal.push_back(fresh);
        }
    }

    // resolve surviving internal constants to 0
    for (const auto& p : internal) {
        if (pinned.count(p)) continue;
        substitute_everywhere(p, RatFunc(0));
    }
    out.solved = true;
    for (int i = 0; i <= d + 1; ++i)
        out.g = te_add(tw, out.g, te_mul(tw, gs[i], te_gen(tw, sidx, i)));
    // report parameter outcomes
    for (const auto& p : params) {
        RatFunc v = RatFunc::var(p);
        auto it = pinned.find(p);
        if (it != pinned.end()) v = it->second;
        // chase substitutions of other pinned params inside v
        for (const auto& [q, qv] : pinned)
            if (q != p) v = v.substitute(q, qv);
        out.constants[p] = v;
    }
    // soundness: sigma(g) - g must equal rhs with pinned constants applied
    TowerElem check = te_sub(tw, apply_sigma(out.g, tw), out.g);
    TowerElem expect = rhs;
    for (auto& [mono, c] : expect.terms)
        for (const auto& [p, v] : pinned) c = c.substitute(p, v);
    expect = te_normalize(tw, expect);
    if (!te_equal(tw, check, expect))
        throw std::logic_error("solve_tower_diff: certificate verification failed");
    return out;
}

/// Telescoper for f polynomial in the topmost sum generator (degree <= 2):
/// returns g with sigma(g) - g = f, or nullopt.
inline std::optional<TowerElem> sigma_layer_telescope(const TowerElem& f, const Tower& tw) {
    auto r = solve_tower_diff(tw, f, {});
    if (!r.solved) return std::nullopt;
    return r.g;
}

/// Admissibility of adjoining a new sum generator with sigma(s) = s + beta:
/// admissible iff no g in the tower telescopes beta. Returns the witness g
/// when inadmissible.
inline std::optional<TowerElem> check_sigma_ext(const TowerElem& beta, const Tower& tw) {
    auto r = solve_tower_diff(tw, beta, {});
    if (!r.solved) return std::nullopt;
    return r.g;
}

// ---------------------------------------------------------------------------
// Extending towers
// ---------------------------------------------------------------------------

inline long long quotient_threshold(const RatFunc& alpha) {
    long long thr = 0;
    for (const MultiPoly* p : {&alpha.num(), &alpha.den()}) {
        if (!p->has_var("k")) continue;
        for (long long r : integer_roots_nonneg(to_upoly(*p, "k"))) thr = std::max(thr, r + 1);
    }
    return thr;
}

/// Appends a Pi extension (unit alpha over the base field).
inline Tower extend_pi(const Tower& tw, const std::string& name, const RatFunc& alpha,
                       const RatFunc& anchor_value, SumExpr source, long long anchor = 0) {
    if (alpha.is_zero()) throw std::domain_error("extend: zero Pi quotient");
    Tower out = tw;
    Extension e;
    e.kind = ExtKind::Pi;
    e.name = name;
    e.alpha = alpha;
    e.anchor = anchor;
    e.anchor_value = anchor_value;
    e.threshold = std::max(anchor, quotient_threshold(alpha));
    e.source = std::move(source);
    out.exts.push_back(std::move(e));
    return out;
}

/// Appends the order-2 sign extension (sigma(m) = -m, m^2 = 1).
inline Tower extend_r(const Tower& tw, const std::string& name, SumExpr source) {
    Tower out = tw;
    Extension e;
    e.kind = ExtKind::R;
    e.name = name;
    e.alpha = RatFunc(-1);
    e.anchor_value = RatFunc(1);
    e.source = std::move(source);
    out.exts.push_back(std::move(e));
    return out;
}

/// Appends a Sigma extension after the admissibility check; throws if a
/// telescoper for beta already exists in the tower.
inline Tower extend_sigma(const Tower& tw, const std::string& name, const TowerElem& beta,
                          const RatFunc& anchor_value, SumExpr source, long long anchor = 0,
                          long long extra_threshold = 0) {
    if (auto witness = check_sigma_ext(beta, tw))
        throw std::domain_error("extend: inadmissible sum extension (telescoper exists)");
    Tower out = tw;
    Extension e;
    e.kind = ExtKind::Sigma;
    e.name = name;
    e.beta = beta;
    e.anchor = anchor;
    e.anchor_value = anchor_value;
    e.threshold = std::max({anchor, tw.threshold(), extra_threshold});
    e.source = std::move(source);
    out.exts.push_back(std::move(e));
    return out;
}

}  // namespace telesum
