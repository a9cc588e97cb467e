#pragma once

#include "telesum/atoms.hpp"
#include "telesum/expr.hpp"
#include "telesum/linalg.hpp"
#include "telesum/unipoly.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace telesum {

/// Values for the free symbols of an expression: outer parameters (n, x, c,
/// ...) and tables for generic sequences, indexed from 0.
struct Binding {
    std::map<std::string, BigRational> params;
    std::map<std::string, std::vector<BigRational>> tables;
};

struct Witness {
    std::map<std::string, BigRational> point;
    std::string lhs, rhs;
};

struct CheckReport {
    enum class Status { Pass, Fail, Skipped } status = Status::Pass;
    long long points_checked = 0;
    std::optional<Witness> witness;
    unsigned long long seed = 0;
    std::string note;

    bool passed() const { return status == Status::Pass; }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["status"] = status == Status::Pass ? "pass" : (status == Status::Fail ? "fail" : "skipped");
        j["points"] = points_checked;
        j["seed"] = seed;
        if (!note.empty()) j["note"] = note;
        if (witness) {
            nlohmann::json w;
            for (const auto& [k, v] : witness->point) w["point"][k] = v.str();
            w["lhs"] = witness->lhs;
            w["rhs"] = witness->rhs;
            j["witness"] = w;
        }
        return j;
    }
};

// ---------------------------------------------------------------------------
// Exact bottom-up evaluation
// ---------------------------------------------------------------------------

namespace detail {

inline BigRational eval_rec(const SumExpr& e, const Binding& b,
                            std::map<std::string, BigRational>& env) {
    const ExprNode& n = e.node();
    switch (n.kind) {
        case NodeKind::Const:
            return n.cval;
        case NodeKind::Var: {
            auto it = env.find(n.name);
            if (it != env.end()) return it->second;
            auto ip = b.params.find(n.name);
            if (ip != b.params.end()) return ip->second;
            throw std::domain_error("eval: unbound variable " + n.name);
        }
        case NodeKind::Generic: {
            BigRational base(0);
            if (!n.index_var.empty()) {
                auto it = env.find(n.index_var);
                if (it != env.end()) base = it->second;
                else {
                    auto ip = b.params.find(n.index_var);
                    if (ip == b.params.end())
                        throw std::domain_error("eval: unbound index " + n.index_var);
                    base = ip->second;
                }
            }
            long long idx = (base + BigRational(n.offset)).to_int64();
            if (idx < 0) return BigRational(0);  // one-sided sequences vanish below 0
            auto tb = b.tables.find(n.name);
            if (tb == b.tables.end()) throw std::domain_error("eval: no table for " + n.name);
            if (idx >= static_cast<long long>(tb->second.size()))
                throw std::domain_error("eval: table for " + n.name + " too short (need index " +
                                        std::to_string(idx) + ")");
            return tb->second[idx];
        }
        case NodeKind::AtomCall: {
            std::vector<BigRational> args;
            args.reserve(n.args.size());
            for (const auto& a : n.args) args.push_back(eval_rec(a, b, env));
            return eval_atom(n.name, args);
        }
        case NodeKind::Rat: {
            std::map<std::string, BigRational> point;
            for (const auto* side : {&n.rat.num(), &n.rat.den()})
                for (const auto& v : side->vars()) {
                    auto it = env.find(v);
                    if (it != env.end()) point[v] = it->second;
                    else {
                        auto ip = b.params.find(v);
                        if (ip == b.params.end()) throw std::domain_error("eval: unbound variable " + v);
                        point[v] = ip->second;
                    }
                }
            return n.rat.eval(point);  // vanishing denominator -> 0
        }
        case NodeKind::Sum: {
            BigRational up = eval_rec(n.args[0], b, env);
            if (!up.is_integer()) throw std::domain_error("eval: non-integer sum bound");
            long long hi;
            if (up < BigRational(n.lower)) return BigRational(0);
            hi = up.to_int64();
            BigRational acc(0);
            auto saved = env.find(n.bound_var) != env.end()
                             ? std::optional<BigRational>(env[n.bound_var])
                             : std::nullopt;
            for (long long l = n.lower; l <= hi; ++l) {
                env[n.bound_var] = BigRational(l);
                acc += eval_rec(n.args[1], b, env);
            }
            if (saved) env[n.bound_var] = *saved;
            else env.erase(n.bound_var);
            return acc;
        }
        case NodeKind::Add: {
            BigRational acc(0);
            for (const auto& a : n.args) acc += eval_rec(a, b, env);
            return acc;
        }
        case NodeKind::Mul: {
            BigRational acc(1);
            for (const auto& a : n.args) {
                acc *= eval_rec(a, b, env);
                if (acc.is_zero()) {
                    // keep evaluating: side terms cannot change 0 in exact arithmetic
                }
            }
            return acc;
        }
        case NodeKind::Pow:
            return eval_rec(n.args[0], b, env).pow(n.exp);
    }
    throw std::domain_error("eval: bad node");
}

}  // namespace detail

/// Exact value of e with all free variables bound in b.
inline BigRational eval_sequence(const SumExpr& e, const Binding& b) {
    std::map<std::string, BigRational> env;
    return detail::eval_rec(e, b, env);
}

/// Exact value of e with the running variable `var` bound to i.
inline BigRational eval_sequence(const SumExpr& e, const Binding& b, const std::string& var, long long i) {
    std::map<std::string, BigRational> env;
    env[var] = BigRational(i);
    return detail::eval_rec(e, b, env);
}

// ---------------------------------------------------------------------------
// Random bindings
// ---------------------------------------------------------------------------

inline constexpr unsigned long long kDefaultOracleSeed = 0x5eed5eedULL;

/// Small random rationals (|num| <= 9, 1 <= den <= 9), the table entropy for
/// generic-sequence checks.
inline BigRational random_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 9);
    return BigRational(BigInt(num(rng)), BigInt(den(rng)));
}

inline std::vector<BigRational> random_table(std::mt19937_64& rng, size_t len) {
    std::vector<BigRational> t(len);
    for (auto& v : t) v = random_rational(rng);
    return t;
}

// ---------------------------------------------------------------------------
// Identity checking over integer grids
// ---------------------------------------------------------------------------

struct GridVar {
    std::string name;
    long long lo = 0, hi = 0;
};

/// Point filters, e.g. {"a<=n", "n>=1"}. Each proviso is `name<=name`,
/// `name>=INT` or `name!=INT`.
inline bool proviso_holds(const std::string& proviso, const std::map<std::string, BigRational>& point) {
    auto get = [&](const std::string& s) -> BigRational {
        auto it = point.find(s);
        if (it != point.end()) return it->second;
        return BigRational(BigInt(s));
    };
    auto pos_le = proviso.find("<=");
    if (pos_le != std::string::npos)
        return get(proviso.substr(0, pos_le)) <= get(proviso.substr(pos_le + 2));
    auto pos_ge = proviso.find(">=");
    if (pos_ge != std::string::npos)
        return get(proviso.substr(0, pos_ge)) >= get(proviso.substr(pos_ge + 2));
    auto pos_ne = proviso.find("!=");
    if (pos_ne != std::string::npos)
        return get(proviso.substr(0, pos_ne)) != get(proviso.substr(pos_ne + 2));
    throw std::domain_error("bad proviso: " + proviso);
}

/// Exact comparison of lhs and rhs at every grid point admitted by the
/// provisos. Zero tolerance; the first mismatch is reported as a witness.
inline CheckReport check_identity(const SumExpr& lhs, const SumExpr& rhs, const std::vector<GridVar>& grid,
                                  const Binding& base, const std::vector<std::string>& provisos = {}) {
    CheckReport rep;
    std::vector<long long> idx(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        if (grid[i].lo > grid[i].hi) {
            rep.status = CheckReport::Status::Skipped;
            rep.note = "empty grid";
            return rep;
        }
        idx[i] = grid[i].lo;
    }
    for (;;) {
        Binding b = base;
        std::map<std::string, BigRational> point;
        for (size_t i = 0; i < grid.size(); ++i) {
            b.params[grid[i].name] = BigRational(idx[i]);
            point[grid[i].name] = BigRational(idx[i]);
        }
        bool admitted = true;
        for (const auto& p : provisos)
            if (!proviso_holds(p, point)) { admitted = false; break; }
        if (admitted) {
            BigRational l = eval_sequence(lhs, b);
            BigRational r = eval_sequence(rhs, b);
            ++rep.points_checked;
            if (l != r) {
                rep.status = CheckReport::Status::Fail;
                rep.witness = Witness{point, l.str(), r.str()};
                return rep;
            }
        }
        // advance the grid odometer
        size_t i = 0;
        for (; i < grid.size(); ++i) {
            if (++idx[i] <= grid[i].hi) break;
            idx[i] = grid[i].lo;
        }
        if (i == grid.size()) break;
    }
    if (rep.points_checked == 0) {
        rep.status = CheckReport::Status::Skipped;
        rep.note = "no grid point satisfies the provisos";
    }
    return rep;
}

/// Verifies the first-order recurrence Y[k+1] - Y[k] = rhs(k) pointwise,
/// where rhs is an expression in `var` (and the bound tables/parameters).
inline CheckReport check_recurrence(const std::vector<BigRational>& y, const SumExpr& rhs,
                                    const std::string& var, const Binding& b, long long k_max) {
    CheckReport rep;
    for (long long k = 0; k + 1 <= k_max && k + 1 < static_cast<long long>(y.size()); ++k) {
        BigRational expect = eval_sequence(rhs, b, var, k);
        ++rep.points_checked;
        if (y[k + 1] - y[k] != expect) {
            rep.status = CheckReport::Status::Fail;
            rep.witness = Witness{{{var, BigRational(k)}}, (y[k + 1] - y[k]).str(), expect.str()};
            return rep;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Finite falsification of nonexistence verdicts
// ---------------------------------------------------------------------------

/// Sweeps certificates of the shape g = (u/v)(k) * t(k) with deg u, deg v up
/// to `cap`, asking whether g(k+1) - g(k) = f(k+1) can hold. Works from
/// sampled exact values of f and t: any such certificate forces
/// u(k) t(k) = (G(k) + e) v(k) with G the partial-sum sequence of f, which is
/// linear in (u, v, e*v). Returns a refuting rational certificate if one
/// exists at these degrees, nullopt otherwise.
///
/// f_vals[i] = f(i), t_vals[i] = t(i) for i = 0..N-1; t must be nonzero on
/// the window.
inline std::optional<std::pair<UPoly, UPoly>> falsify_nonexistence(const std::vector<BigRational>& f_vals,
                                                                   const std::vector<BigRational>& t_vals,
                                                                   int cap) {
    const long long n_samples = 3 * (cap + 1) + 10;
    if (static_cast<long long>(f_vals.size()) < n_samples ||
        static_cast<long long>(t_vals.size()) < n_samples)
        throw std::invalid_argument("falsify_nonexistence: not enough samples");
    std::vector<BigRational> G(f_vals.size());
    BigRational acc(0);
    for (size_t i = 0; i < f_vals.size(); ++i) {
        acc += f_vals[i];
        G[i] = acc;
    }
    const int m = cap + 1;  // coefficients per polynomial
    // unknowns: u_0..u_cap, v_0..v_cap, z_0..z_cap  with z = e*v
    std::vector<std::vector<BigRational>> M;
    std::vector<BigRational> rhs;
    for (long long k = 0; k < n_samples; ++k) {
        std::vector<BigRational> row(3 * m, BigRational(0));
        BigRational kp(1);
        for (int i = 0; i < m; ++i) {
            row[i] = kp * t_vals[k];
            row[m + i] = -kp * G[k];
            row[2 * m + i] = -kp;
            kp *= BigRational(k);
        }
        M.push_back(std::move(row));
        rhs.push_back(BigRational(0));
    }
    auto sol = solve_linear_system<BigRational>(M, rhs);
    if (!sol) return std::nullopt;  // homogeneous system is always consistent; defensive
    auto extract = [&](const std::vector<BigRational>& vec)
        -> std::optional<std::pair<UPoly, UPoly>> {
        std::vector<RatFunc> uc(m), vc(m), zc(m);
        for (int i = 0; i < m; ++i) {
            uc[i] = RatFunc(vec[i]);
            vc[i] = RatFunc(vec[m + i]);
            zc[i] = RatFunc(vec[2 * m + i]);
        }
        UPoly u(std::move(uc)), v(std::move(vc)), z(std::move(zc));
        if (v.is_zero()) return std::nullopt;
        // z must be a constant multiple of v
        UPoly diff = z * v.lc() - v * z.lc();
        if (!diff.is_zero()) return std::nullopt;
        // verify the telescoping relation beyond the sample window
        // g(k) = u/v * t = G(k) + e with e = z.lc()/v.lc(); recheck all samples
        RatFunc e = z.lc() / v.lc();
        for (long long k = 0; k < n_samples; ++k) {
            RatFunc vk = v.eval(RatFunc(BigRational(k)));
            if (vk.is_zero()) return std::nullopt;
            RatFunc gk = u.eval(RatFunc(BigRational(k))) / vk * RatFunc(t_vals[k]);
            if (!(gk - RatFunc(G[k]) - e).is_zero()) return std::nullopt;
        }
        return std::make_pair(u, v);
    };
    for (const auto& [col, vec] : sol->nullspace)
        if (auto r = extract(vec)) return r;
    // a refutation may need a combination of basis vectors
    if (sol->nullspace.size() >= 2) {
        std::mt19937_64 rng(12345);
        std::uniform_int_distribution<int> coef(-3, 3);
        for (int trial = 0; trial < 16; ++trial) {
            std::vector<BigRational> vec(3 * m, BigRational(0));
            for (const auto& [col, basis] : sol->nullspace) {
                int c = coef(rng);
                for (size_t i = 0; i < vec.size(); ++i) vec[i] += BigRational(c) * basis[i];
            }
            if (auto r = extract(vec)) return r;
        }
    }
    return std::nullopt;
}

}  // namespace telesum
