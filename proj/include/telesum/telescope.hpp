#pragma once

#include "telesum/linalg.hpp"
#include "telesum/unipoly.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace telesum {

/// Solution of a (parameterized) telescoping problem over a hypergeometric
/// kernel t with t(k+1)/t(k) = r(k): g = certificate * t satisfies
/// g(k+1) - g(k) = (p_0(k) + sum_i c_i p_i(k)) * t(k). Constants that the
/// system leaves free are reported symbolically (value = the parameter
/// itself).
struct TeleSolution {
    RatFunc certificate;
    std::map<std::string, RatFunc> constants;
};

namespace detail {

struct GpForm {
    UPoly a, b, c;  // r = (a/b) * (sigma c / c), gcd(a(k), b(k+h)) = 1 for all h >= 0
};

inline UPoly shift_sym(const UPoly& p, const std::string& var) {
    // substitute k -> k + var
    if (p.is_zero()) return p;
    UPoly xplus(std::vector<RatFunc>{RatFunc::var(var), RatFunc(1)});
    UPoly r = UPoly::constant(p.c.back());
    for (int i = p.deg() - 1; i >= 0; --i) r = r * xplus + UPoly::constant(p.c[i]);
    return r;
}

/// Nonnegative integer shifts h with gcd(a(k), b(k+h)) nontrivial.
///
/// Candidates come from integer roots of the resultant Res_k(a(k), b(k+j))
/// after specializing the parameters at two sample points (a true root
/// survives every degree-preserving specialization); each candidate is then
/// verified by a symbolic gcd, so the result is exact.
inline std::vector<long long> dispersion_set(const UPoly& a, const UPoly& b) {
    if (a.deg() <= 0 || b.deg() <= 0) return {};
    std::set<std::string> params;
    for (const UPoly* p : {&a, &b})
        for (const auto& cf : p->c)
            for (const MultiPoly* side : {&cf.num(), &cf.den()})
                for (const auto& v : side->vars()) params.insert(v);

    auto specialize = [](const UPoly& p, const std::map<std::string, BigRational>& pt)
        -> std::optional<std::vector<BigRational>> {
        std::vector<BigRational> out(p.deg() + 1);
        for (int i = 0; i <= p.deg(); ++i) {
            const RatFunc& cf = p.c[i];
            BigRational den = cf.den().eval(pt);
            if (den.is_zero()) return std::nullopt;
            out[i] = cf.num().eval(pt) / den;
        }
        if (out.back().is_zero()) return std::nullopt;  // degree must be preserved
        return out;
    };
    auto resultant_q = [](std::vector<BigRational> A, std::vector<BigRational> B) {
        auto cs = [](std::vector<BigRational> v) {
            std::vector<RatFunc> r(v.size());
            for (size_t i = 0; i < v.size(); ++i) r[i] = RatFunc(v[i]);
            return UPoly(std::move(r));
        };
        RatFunc r = upoly_resultant(cs(std::move(A)), cs(std::move(B)));
        return r.is_zero() ? BigRational(0) : r.constant_value();
    };

    const int dj = a.deg() * b.deg();
    std::vector<long long> candidates;
    bool have_candidates = false;
    for (int attempt = 0; attempt < 6 && !have_candidates; ++attempt) {
        std::map<std::string, BigRational> pt;
        long long seed = 1009 + 997 * attempt;
        for (const auto& v : params) {
            pt[v] = BigRational(seed);
            seed = seed * 3 + 7;
        }
        auto aq = specialize(a, pt);
        auto bq = specialize(b, pt);
        if (!aq || !bq) continue;
        // interpolate R(j) = Res_k(a(k), b(k+j)) from integer samples
        std::vector<BigRational> xs, ys;
        for (int j0 = 0; j0 <= dj; ++j0) {
            std::vector<BigRational> bs = *bq;
            UPoly bshift = UPoly([&] {
                std::vector<RatFunc> r(bs.size());
                for (size_t i = 0; i < bs.size(); ++i) r[i] = RatFunc(bs[i]);
                return r;
            }()).shift(BigRational(j0));
            std::vector<BigRational> bsq(bshift.deg() + 1);
            for (int i = 0; i <= bshift.deg(); ++i) bsq[i] = bshift.c[i].constant_value();
            xs.emplace_back(j0);
            ys.push_back(resultant_q(*aq, bsq));
        }
        // Lagrange interpolation, then integer roots
        std::vector<BigRational> coeffs(dj + 1, BigRational(0));
        bool all_zero = true;
        for (int i = 0; i <= dj; ++i) {
            if (ys[i].is_zero()) continue;
            all_zero = false;
            std::vector<BigRational> basis = {BigRational(1)};
            BigRational denom(1);
            for (int j = 0; j <= dj; ++j) {
                if (j == i) continue;
                // basis *= (x - xs[j])
                std::vector<BigRational> nb(basis.size() + 1, BigRational(0));
                for (size_t t = 0; t < basis.size(); ++t) {
                    nb[t + 1] += basis[t];
                    nb[t] -= basis[t] * xs[j];
                }
                basis = std::move(nb);
                denom *= xs[i] - xs[j];
            }
            BigRational scale = ys[i] / denom;
            for (size_t t = 0; t < basis.size(); ++t) coeffs[t] += basis[t] * scale;
        }
        if (all_zero) continue;  // degenerate specialization, resample
        candidates = integer_roots_nonneg_q_public(coeffs);
        have_candidates = true;
    }
    if (!have_candidates)
        throw std::domain_error("dispersion: no usable parameter specialization found");

    std::vector<long long> result;
    for (long long h : candidates) {
        UPoly g = upoly_gcd_monic(a, b.shift(BigRational(h)));
        if (g.deg() > 0) result.push_back(h);
    }
    return result;
}

inline GpForm gp_form(const RatFunc& r) {
    GpForm gp;
    gp.a = to_upoly(r.num(), "k");
    gp.b = to_upoly(r.den(), "k");
    gp.c = UPoly::constant(RatFunc(1));
    for (;;) {
        bool changed = false;
        for (long long h : dispersion_set(gp.a, gp.b)) {
            UPoly bh = gp.b.shift(BigRational(h));
            UPoly g = upoly_gcd_monic(gp.a, bh);
            if (g.deg() <= 0) continue;
            gp.a = upoly_divmod(gp.a, g).first;
            gp.b = upoly_divmod(gp.b, g.shift(BigRational(-h))).first;
            for (long long i = 1; i <= h; ++i) gp.c = gp.c * g.shift(BigRational(-i));
            changed = true;
            break;  // dispersion set changed; recompute
        }
        if (!changed) break;
    }
    return gp;
}

/// Degree bound for x in a(k) x(k+1) - b(k-1) x(k) = C(k); -1 means only
/// x = 0 fits.
inline int gosper_degree_bound(const UPoly& a, const UPoly& bm, int deg_c) {
    UPoly u = a - bm;
    UPoly v = a + bm;
    if (deg_c < 0) return -1;
    int du = u.deg(), dv = v.deg();
    if (du >= dv) return deg_c - du;
    if (du < dv - 1) return deg_c - dv + 1;
    // du == dv - 1: the leading terms may cancel at degree d = -2 lc(u)/lc(v)
    int d1 = deg_c - dv + 1;
    RatFunc cand = RatFunc(-2) * u.lc() / v.lc();
    int d2 = -1;
    if (cand.is_constant()) {
        BigRational q = cand.constant_value();
        if (q.is_integer() && q.sign() >= 0) d2 = static_cast<int>(q.to_int64());
    }
    return std::max(d1, d2);
}

}  // namespace detail

/// Parameterized Gosper: solves
///   g(k+1) - g(k) = (p0(k) + sum_i c_i p_i(k)) * t(k)
/// for a rational certificate R (g = R t) and the constants c_i, where
/// t(k+1)/t(k) = quotient. The p's may be rational functions of k.
/// Free dimensions of the solution space are resolved to 0; a constant that
/// stays free is returned as itself.
inline std::optional<TeleSolution> gosper_solve(
    const RatFunc& quotient, const RatFunc& p0,
    const std::vector<std::pair<std::string, RatFunc>>& param_pieces = {}) {
    if (quotient.is_zero()) throw std::domain_error("gosper: degenerate zero quotient");

    // absorb the premultiplier denominators into the kernel: t' = t / D
    MultiPoly D(1);
    auto lift_den = [&](const RatFunc& p) {
        MultiPoly g = poly_gcd(D, p.den());
        D = divide_exact(D * p.den(), g);
    };
    lift_den(p0);
    for (const auto& [name, p] : param_pieces) lift_den(p);
    RatFunc Df(D);
    RatFunc r = quotient * Df / Df.shift_var("k", 1);

    auto as_poly = [&](const RatFunc& p) {
        RatFunc q = p * Df;
        if (!q.is_polynomial()) throw std::domain_error("gosper: premultiplier did not clear");
        return to_upoly(q.poly_value(), "k");
    };
    UPoly P0 = as_poly(p0);
    std::vector<UPoly> Pi;
    Pi.reserve(param_pieces.size());
    for (const auto& [name, p] : param_pieces) Pi.push_back(as_poly(p));

    detail::GpForm gp = detail::gp_form(r);
    UPoly bm = gp.b.shift(BigRational(-1));

    int deg_rhs = (P0 * gp.c).deg();
    for (const auto& p : Pi) deg_rhs = std::max(deg_rhs, (p * gp.c).deg());
    int d = detail::gosper_degree_bound(gp.a, bm, deg_rhs);
    if (d < 0 && param_pieces.empty()) return std::nullopt;
    int nx = std::max(d + 1, 0);

    // rows are powers of k; columns are x_0..x_d then the constants
    int max_row = 0;
    std::vector<UPoly> xcols(nx);
    for (int j = 0; j < nx; ++j) {
        UPoly kj = UPoly::monomial(RatFunc(1), j);
        xcols[j] = gp.a * kj.shift(BigRational(1)) - bm * kj;
        max_row = std::max(max_row, xcols[j].deg());
    }
    UPoly rhs0 = P0 * gp.c;
    max_row = std::max(max_row, rhs0.deg());
    std::vector<UPoly> ccols;
    for (const auto& p : Pi) {
        ccols.push_back(-(p * gp.c));
        max_row = std::max(max_row, ccols.back().deg());
    }

    size_t ncols = nx + ccols.size();
    std::vector<std::vector<RatFunc>> M(max_row + 1, std::vector<RatFunc>(ncols, RatFunc(0)));
    std::vector<RatFunc> rhs(max_row + 1, RatFunc(0));
    for (int row = 0; row <= max_row; ++row) {
        for (int j = 0; j < nx; ++j) M[row][j] = xcols[j].coeff(row);
        for (size_t i = 0; i < ccols.size(); ++i) M[row][nx + i] = ccols[i].coeff(row);
        rhs[row] = rhs0.coeff(row);
    }
    auto sol = solve_linear_system<RatFunc>(M, rhs);
    if (!sol) return std::nullopt;

    // free columns: x-coefficients resolve to 0, constants stay symbolic
    std::vector<RatFunc> val(ncols, RatFunc(0));
    for (size_t j = 0; j < ncols; ++j) val[j] = sol->particular[j];
    for (const auto& [fc, vec] : sol->nullspace) {
        if (fc < static_cast<size_t>(nx)) continue;
        RatFunc pv = RatFunc::var(param_pieces[fc - nx].first);
        for (size_t j = 0; j < ncols; ++j)
            if (!vec[j].is_zero()) val[j] += pv * vec[j];
    }

    TeleSolution ts;
    UPoly x;
    {
        std::vector<RatFunc> xc(val.begin(), val.begin() + nx);
        x = UPoly(std::move(xc));
    }
    RatFunc xk = x.to_ratfunc("k");
    RatFunc ck = gp.c.to_ratfunc("k");
    RatFunc Rprime = bm.to_ratfunc("k") * xk / ck;
    ts.certificate = Rprime / Df;
    for (size_t i = 0; i < param_pieces.size(); ++i)
        ts.constants[param_pieces[i].first] = val[nx + i];

    // certificate soundness, asserted on every exit:
    // R(k+1) r(k) - R(k) = p0 + sum c_i p_i
    RatFunc lhs = ts.certificate.shift_var("k", 1) * quotient - ts.certificate;
    RatFunc expect = p0;
    for (size_t i = 0; i < param_pieces.size(); ++i)
        expect += ts.constants[param_pieces[i].first] * param_pieces[i].second;
    if (!(lhs - expect).is_zero())
        throw std::logic_error("gosper: certificate verification failed");
    return ts;
}

/// Plain Gosper: certificate for g(k+1) - g(k) = t(k), or nullopt as a proof
/// of nonexistence of a rational certificate.
inline std::optional<TeleSolution> gosper(const RatFunc& quotient) {
    return gosper_solve(quotient, RatFunc(1));
}

/// Gosper with an undetermined polynomial premultiplier of degree <= m:
/// finds nonzero p with g(k+1) - g(k) = p(k) t(k). The returned p is monic
/// in its leading k-power.
inline std::optional<std::pair<UPoly, TeleSolution>> extended_gosper(const RatFunc& quotient, int m) {
    std::vector<std::pair<std::string, RatFunc>> pieces;
    for (int i = 0; i <= m; ++i)
        pieces.emplace_back("@e" + std::to_string(i), RatFunc(MultiPoly::var("k", i)));
    auto sol = gosper_solve(quotient, RatFunc(0), pieces);
    if (!sol) return std::nullopt;
    // the solution space is linear in the @e_i; try unit assignments of the
    // free parameters from the top degree down until p is nonzero
    auto instantiate = [&](int hi) {
        std::vector<RatFunc> pc(m + 1, RatFunc(0));
        RatFunc cert = sol->certificate;
        for (int i = 0; i <= m; ++i) {
            RatFunc v = sol->constants.at("@e" + std::to_string(i));
            for (int j = 0; j <= m; ++j) v = v.substitute("@e" + std::to_string(j), RatFunc(j == hi ? 1 : 0));
            pc[i] = v;
        }
        for (int j = 0; j <= m; ++j) cert = cert.substitute("@e" + std::to_string(j), RatFunc(j == hi ? 1 : 0));
        return std::make_pair(UPoly(std::move(pc)), cert);
    };
    for (int hi = m; hi >= 0; --hi) {
        auto [p, cert] = instantiate(hi);
        if (p.is_zero()) continue;
        RatFunc lead = p.lc();
        p = p * lead.inverse();
        cert = cert / lead;
        return std::make_pair(p, TeleSolution{cert, {}});
    }
    return std::nullopt;
}

}  // namespace telesum
