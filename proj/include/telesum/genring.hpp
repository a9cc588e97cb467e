#pragma once

#include "telesum/expr.hpp"
#include "telesum/linalg.hpp"
#include "telesum/multipoly.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace telesum {

/// The generic coefficient ring K_X[k, {X_k}] realized inside MultiPoly.
///
/// Conventions: the running variable is "k"; the shifted generic atom
/// X_{k+l} is the variable "X#l"; the sign sequence (-1)^k is the variable
/// "@m" (exponents are reduced mod 2); every other variable is a constant
/// parameter. The shift automorphism acts by k -> k+1, X#l -> X#(l+1),
/// @m -> -@m and fixes parameters.
namespace genring {

inline const std::string kSignVar = "@m";

inline std::string atom_var(const std::string& sym, long long off) {
    return sym + "#" + std::to_string(off);
}

inline std::optional<std::pair<std::string, long long>> parse_atom_var(const std::string& v) {
    auto h = v.find('#');
    if (h == std::string::npos) return std::nullopt;
    return std::make_pair(v.substr(0, h), std::stoll(v.substr(h + 1)));
}

/// Exponents of @m reduced modulo 2.
inline MultiPoly reduce_sign(const MultiPoly& p) {
    if (!p.has_var(kSignVar)) return p;
    MultiPoly r;
    for (int e : p.exponents_of(kSignVar)) {
        MultiPoly part = p.coefficient_of(kSignVar, e);
        r += (e % 2 == 0) ? part : part * MultiPoly::var(kSignVar);
    }
    return r;
}

/// j-fold shift automorphism (j may be negative).
inline MultiPoly sigma(const MultiPoly& p, long long j = 1) {
    if (j == 0 || p.is_zero()) return p;
    MultiPoly result;
    const auto& vars = p.vars();
    for (const auto& [mono, coeff] : p.terms()) {
        MultiPoly term(coeff);
        for (size_t i = 0; i < vars.size(); ++i) {
            int e = mono[i];
            if (e == 0) continue;
            const std::string& v = vars[i];
            if (v == "k") {
                term *= (MultiPoly::var("k") + MultiPoly(BigRational(j))).pow(e);
            } else if (v == kSignVar) {
                if ((static_cast<long long>(e) * j) % 2 != 0) term = -term;
                term *= MultiPoly::var(kSignVar, e);
            } else if (auto av = parse_atom_var(v)) {
                term *= MultiPoly::var(atom_var(av->first, av->second + j), e);
            } else {
                term *= MultiPoly::var(v, e);  // parameter
            }
        }
        result += term;
    }
    return reduce_sign(result);
}

/// Generic-atom symbols occurring in p.
inline std::set<std::string> atom_symbols(const MultiPoly& p) {
    std::set<std::string> out;
    for (const auto& v : p.vars())
        if (auto av = parse_atom_var(v)) out.insert(av->first);
    return out;
}

// ---------------------------------------------------------------------------
// The difference equation sigma(g) - g = rhs over the generic ring
// ---------------------------------------------------------------------------

/// Result of solving sigma(g) - g = rhs. `forced` records parameter values
/// the solution requires (affine in the remaining parameters); `g` may still
/// mention unforced parameters. Solutions are unique up to an additive
/// constant, which is NOT included (callers add one when they need it).
struct GenDiffResult {
    bool solved = false;
    MultiPoly g;
    std::map<std::string, MultiPoly> forced;
};

namespace detail {

// content of a monomial: the atom/sign part, canonically encoded
struct Content {
    std::vector<std::pair<std::string, int>> atoms;  // (atom var, exponent), sorted
    int sign_exp = 0;                                // 0 or 1

    bool operator<(const Content& o) const {
        if (sign_exp != o.sign_exp) return sign_exp < o.sign_exp;
        return atoms < o.atoms;
    }
    bool operator==(const Content& o) const { return sign_exp == o.sign_exp && atoms == o.atoms; }

    bool empty() const { return atoms.empty() && sign_exp == 0; }
    bool pure_sign() const { return atoms.empty() && sign_exp == 1; }

    MultiPoly to_poly() const {
        MultiPoly r(1);
        for (const auto& [v, e] : atoms) r *= MultiPoly::var(v, e);
        if (sign_exp) r *= MultiPoly::var(kSignVar);
        return r;
    }

    Content shifted(long long j) const {
        Content c;
        c.sign_exp = sign_exp;
        for (const auto& [v, e] : atoms) {
            auto av = parse_atom_var(v);
            c.atoms.emplace_back(atom_var(av->first, av->second + j), e);
        }
        std::sort(c.atoms.begin(), c.atoms.end());
        return c;
    }

    // shape = content shifted so its minimal offset is 0; position = that offset
    std::pair<Content, long long> shape() const {
        if (atoms.empty()) return {*this, 0};
        long long mn = std::numeric_limits<long long>::max();
        for (const auto& [v, e] : atoms) mn = std::min(mn, parse_atom_var(v)->second);
        return {shifted(-mn), mn};
    }
};

// decomposes p into content -> coefficient polynomial in k (params allowed)
inline std::map<Content, MultiPoly> by_content(const MultiPoly& p) {
    std::map<Content, MultiPoly> groups;
    const auto& vars = p.vars();
    for (const auto& [mono, coeff] : p.terms()) {
        Content c;
        MultiPoly rest(coeff);
        for (size_t i = 0; i < vars.size(); ++i) {
            int e = mono[i];
            if (e == 0) continue;
            const std::string& v = vars[i];
            if (v == kSignVar) c.sign_exp = e % 2;  // exponents pre-reduced
            else if (parse_atom_var(v)) c.atoms.emplace_back(v, e);
            else rest *= MultiPoly::var(v, e);
        }
        std::sort(c.atoms.begin(), c.atoms.end());
        groups[c] += rest;
    }
    for (auto it = groups.begin(); it != groups.end();)
        it = it->second.is_zero() ? groups.erase(it) : std::next(it);
    return groups;
}

}  // namespace detail

/// Complete solver for sigma(g) - g = rhs with g in the generic ring.
///
/// Coefficient comparison per sigma-orbit of atom contents: within one orbit
/// the support of any solution is pinched between the lowest rhs content and
/// the predecessor of the highest, which yields a finite candidate basis; the
/// resulting system is linear in the candidate coefficients and in the listed
/// parameters (which must occur linearly in rhs). A parameter is "forced"
/// when consistency pins it.
inline GenDiffResult solve_sigma_diff(const MultiPoly& rhs_in, const std::vector<std::string>& params) {
    GenDiffResult out;
    MultiPoly rhs = reduce_sign(rhs_in);
    if (rhs.is_zero()) {
        out.solved = true;
        return out;
    }

    // split rhs = rhs0 + sum_p p * rhs_p  (linear in params)
    MultiPoly rhs0 = rhs;
    std::vector<std::pair<std::string, MultiPoly>> plin;
    for (const auto& p : params) {
        if (rhs0.degree(p) > 1) throw std::domain_error("solve_sigma_diff: rhs nonlinear in " + p);
        MultiPoly cp = rhs0.coefficient_of(p, 1);
        for (const auto& q : params)
            if (cp.has_var(q)) throw std::domain_error("solve_sigma_diff: parameter product in rhs");
        if (!cp.is_zero()) {
            plin.emplace_back(p, cp);
            rhs0 = rhs0.coefficient_of(p, 0);
        }
    }

    // candidate monomials per orbit
    auto groups0 = detail::by_content(rhs);  // params included; only shapes/degrees matter here
    std::map<detail::Content, std::pair<long long, long long>> orbit_range;  // shape -> [min j, max j]
    std::map<detail::Content, int> orbit_deg;
    int pure_k_deg = -1;
    for (const auto& [c, coeff] : groups0) {
        int dk = std::max(coeff.degree("k"), 0);
        if (c.empty()) {
            pure_k_deg = std::max(pure_k_deg, dk);
            continue;
        }
        auto [shape, j] = c.shape();
        auto it = orbit_range.find(shape);
        if (it == orbit_range.end()) orbit_range[shape] = {j, j};
        else {
            it->second.first = std::min(it->second.first, j);
            it->second.second = std::max(it->second.second, j);
        }
        orbit_deg[shape] = std::max(orbit_deg[shape], dk);
    }

    std::vector<MultiPoly> candidates;
    for (const auto& [shape, range] : orbit_range) {
        int dk = orbit_deg[shape] + 1;
        if (shape.pure_sign() && shape.atoms.empty()) {
            // the sign orbit is a fixed point: q(k)*m with deg q = rhs degree
            for (int e = 0; e <= dk; ++e)
                candidates.push_back(MultiPoly::var(kSignVar) * MultiPoly::var("k", e));
            continue;
        }
        // support pinched between lowest content and predecessor of highest
        for (long long j = range.first; j <= range.second - 1; ++j) {
            MultiPoly base = shape.shifted(j).to_poly();
            for (int e = 0; e <= dk; ++e) candidates.push_back(base * MultiPoly::var("k", e));
        }
    }
    if (pure_k_deg >= 0)
        for (int e = 1; e <= pure_k_deg + 1; ++e) candidates.push_back(MultiPoly::var("k", e));

    // joint term basis over (content, k-power); params handled as columns
    std::map<std::pair<detail::Content, int>, size_t> row_of;
    auto row_index = [&](const detail::Content& c, int kp) {
        auto key = std::make_pair(c, kp);
        auto it = row_of.find(key);
        if (it != row_of.end()) return it->second;
        size_t idx = row_of.size();
        row_of[key] = idx;
        return idx;
    };
    struct Col {
        std::map<size_t, BigRational> entries;
    };
    auto poly_rows = [&](const MultiPoly& p, Col& col, const BigRational& scale) {
        for (auto& [c, coeff] : detail::by_content(p)) {
            for (int e : coeff.exponents_of("k")) {
                MultiPoly cc = coeff.coefficient_of("k", e);
                if (!cc.is_constant())
                    throw std::domain_error("solve_sigma_diff: non-constant coefficient " + cc.str());
                if (cc.is_zero()) continue;
                col.entries[row_index(c, e)] += cc.constant_value() * scale;
            }
        }
    };

    std::vector<Col> cols(candidates.size() + plin.size());
    for (size_t i = 0; i < candidates.size(); ++i)
        poly_rows(reduce_sign(sigma(candidates[i]) - candidates[i]), cols[i], BigRational(1));
    for (size_t i = 0; i < plin.size(); ++i)
        poly_rows(plin[i].second, cols[candidates.size() + i], BigRational(-1));
    Col rhs_col;
    poly_rows(rhs0, rhs_col, BigRational(1));

    size_t nrows = row_of.size();
    std::vector<std::vector<BigRational>> M(nrows, std::vector<BigRational>(cols.size(), BigRational(0)));
    std::vector<BigRational> b(nrows, BigRational(0));
    for (size_t j = 0; j < cols.size(); ++j)
        for (const auto& [r, v] : cols[j].entries) M[r][j] = v;
    for (const auto& [r, v] : rhs_col.entries) b[r] = v;

    auto sol = solve_linear_system<BigRational>(M, b);
    if (!sol) return out;  // no solution in the ring

    // free param columns stay symbolic; free candidate columns are set to 0
    auto col_param = [&](size_t col) -> const std::string* {
        if (col < candidates.size()) return nullptr;
        return &plin[col - candidates.size()].first;
    };
    std::vector<MultiPoly> value(cols.size());
    for (size_t j = 0; j < cols.size(); ++j) value[j] = MultiPoly(sol->particular[j]);
    for (const auto& [fc, vec] : sol->nullspace) {
        const std::string* p = col_param(fc);
        if (!p) continue;  // additive/candidate freedom: take 0
        for (size_t j = 0; j < cols.size(); ++j)
            if (!vec[j].is_zero()) value[j] += MultiPoly::var(*p) * vec[j];
    }
    out.solved = true;
    for (size_t i = 0; i < candidates.size(); ++i) out.g += candidates[i] * value[i];
    for (size_t i = 0; i < plin.size(); ++i) {
        const std::string& p = plin[i].first;
        const MultiPoly& v = value[candidates.size() + i];
        if (v == MultiPoly::var(p)) continue;  // unconstrained
        out.forced[p] = v;
    }
    // apply forcings inside g
    for (const auto& [p, v] : out.forced) out.g = out.g.substitute(p, v);
    out.g = reduce_sign(out.g);
    return out;
}

}  // namespace genring
}  // namespace telesum
