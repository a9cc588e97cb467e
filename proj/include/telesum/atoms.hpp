#pragma once

#include "telesum/expr.hpp"
#include "telesum/unipoly.hpp"

#include <map>
#include <optional>
#include <string>

namespace telesum {

enum class AtomType { Product, SumLike, Sign };

/// Hypergeometric atom defined by its shift quotient: t(k+1)/t(k) = quotient,
/// with t(start) = start_value. The validity threshold is the first index
/// from which the quotient's numerator and denominator have no further
/// integer zeros, so consecutive values stay nonzero.
struct HyperAtom {
    std::string name;
    RatFunc quotient;  // in the variable "k" over the parameter field
    long long start = 0;
    RatFunc start_value = RatFunc(1);
    long long threshold = 0;

    static HyperAtom make(std::string name, RatFunc quotient, long long start = 0,
                          RatFunc start_value = RatFunc(1)) {
        HyperAtom a;
        a.name = std::move(name);
        a.quotient = std::move(quotient);
        a.start = start;
        a.start_value = std::move(start_value);
        if (a.quotient.is_zero()) throw std::domain_error("HyperAtom: zero quotient");
        if (a.start_value.is_zero()) throw std::domain_error("HyperAtom: zero initial value");
        long long thr = start;
        for (const MultiPoly* p : {&a.quotient.num(), &a.quotient.den()}) {
            if (!p->has_var("k")) continue;
            for (long long r : integer_roots_nonneg(to_upoly(*p, "k")))
                thr = std::max(thr, r + 1);
        }
        a.threshold = thr;
        return a;
    }
};

// ---------------------------------------------------------------------------
// Parse-level atoms (what may appear as NAME(...) in expressions)
// ---------------------------------------------------------------------------

struct AtomSignature {
    int arity;
    std::string inverse;  // empty when 1/atom is not itself an atom
};

inline const std::map<std::string, AtomSignature>& atom_signatures() {
    static const std::map<std::string, AtomSignature> table = {
        {"binom", {2, "invbinom"}},   {"invbinom", {2, "binom"}}, {"harmonic", {1, ""}},
        {"pow", {2, ""}},             {"altsign", {1, "altsign"}}, {"factorial", {1, ""}},
    };
    return table;
}

/// Exact value of an atom call given evaluated arguments. This is the
/// oracle-side reading of the atoms; it never consults shift quotients.
inline BigRational eval_atom(const std::string& name, const std::vector<BigRational>& args) {
    auto as_int = [](const BigRational& q) { return q.to_int64(); };
    if (name == "binom") {
        long long b = as_int(args[1]);
        return binomial(args[0], b);
    }
    if (name == "invbinom") {
        long long b = as_int(args[1]);
        BigRational v = binomial(args[0], b);
        if (v.is_zero()) return BigRational(0);  // vanishing-denominator convention
        return v.inverse();
    }
    if (name == "harmonic") return harmonic_number(as_int(args[0]));
    if (name == "pow") {
        if (args[0].is_zero()) {
            long long e = as_int(args[1]);
            return e == 0 ? BigRational(1) : BigRational(0);
        }
        return args[0].pow(as_int(args[1]));
    }
    if (name == "altsign") {
        BigInt e = args[0].to_integer();
        return (e % 2 == 0) ? BigRational(1) : BigRational(-1);
    }
    if (name == "factorial") {
        long long m = as_int(args[0]);
        if (m < 0) return BigRational(0);
        BigRational r(1);
        for (long long i = 2; i <= m; ++i) r *= BigRational(i);
        return r;
    }
    throw std::domain_error("unknown atom: " + name);
}

// ---------------------------------------------------------------------------
// Specialization targets: concrete sequences a generic X may be set to
// ---------------------------------------------------------------------------

enum class TargetKind { Hypergeometric, HarmonicSum };

/// A concrete sequence usable for X in specialize(): its expression template
/// (anchored at index variable "k") plus solver-side data.
struct SpecTarget {
    std::string name;
    TargetKind kind = TargetKind::Hypergeometric;
    SumExpr expr;         // template in "k"
    HyperAtom kernel;     // quotient data (Hypergeometric only)
    bool needs_a_le_n = false;  // inverse-binomial family: identities hold for a <= n
};

inline std::optional<SpecTarget> spec_target(const std::string& name) {
    auto K = [] { return SumExpr::variable("k"); };
    auto N = [] { return SumExpr::variable("n"); };
    auto rf = [](const std::string& s) {
        auto p = MultiPoly::parse(s);
        return RatFunc(p);
    };
    SpecTarget t;
    t.name = name;
    if (name == "binom") {
        t.expr = SumExpr::atom("binom", {N(), K()});
        t.kernel = HyperAtom::make("binom", rf("n - k") / rf("k + 1"));
        return t;
    }
    if (name == "binom2") {
        t.expr = SumExpr::pow(SumExpr::atom("binom", {N(), K()}), 2);
        t.kernel = HyperAtom::make("binom2", (rf("n - k") / rf("k + 1")).pow(2));
        return t;
    }
    if (name == "invbinom") {
        t.expr = SumExpr::atom("invbinom", {N(), K()});
        t.kernel = HyperAtom::make("invbinom", rf("k + 1") / rf("n - k"));
        t.needs_a_le_n = true;
        return t;
    }
    if (name == "invbinom2") {
        t.expr = SumExpr::pow(SumExpr::atom("invbinom", {N(), K()}), 2);
        t.kernel = HyperAtom::make("invbinom2", (rf("k + 1") / rf("n - k")).pow(2));
        t.needs_a_le_n = true;
        return t;
    }
    if (name == "altbinom") {
        t.expr = SumExpr::mul({SumExpr::atom("altsign", {K()}), SumExpr::atom("binom", {N(), K()})});
        t.kernel = HyperAtom::make("altbinom", rf("0 - 1") * rf("n - k") / rf("k + 1"));
        return t;
    }
    if (name == "xbinom") {
        t.expr = SumExpr::mul(
            {SumExpr::atom("pow", {SumExpr::variable("x"), K()}), SumExpr::atom("binom", {N(), K()})});
        t.kernel = HyperAtom::make("xbinom", rf("x") * rf("n - k") / rf("k + 1"));
        return t;
    }
    if (name == "xinvbinom") {
        t.expr = SumExpr::mul(
            {SumExpr::atom("pow", {SumExpr::variable("x"), K()}), SumExpr::atom("invbinom", {N(), K()})});
        t.kernel = HyperAtom::make("xinvbinom", rf("x") * rf("k + 1") / rf("n - k"));
        t.needs_a_le_n = true;
        return t;
    }
    if (name == "altsign") {
        t.expr = SumExpr::atom("altsign", {K()});
        t.kernel = HyperAtom::make("altsign", rf("0 - 1"));
        return t;
    }
    if (name == "pow2") {
        t.expr = SumExpr::atom("pow", {SumExpr::constant(2), K()});
        t.kernel = HyperAtom::make("pow2", rf("2"));
        return t;
    }
    if (name == "factorial") {
        // k! as a quotient-defined product; no closed atom form, used in tests
        t.expr = SumExpr::atom("factorial", {K()});
        t.kernel = HyperAtom::make("factorial", rf("k + 1"));
        return t;
    }
    if (name == "harmonic") {
        t.expr = SumExpr::atom("harmonic", {K()});
        t.kind = TargetKind::HarmonicSum;
        return t;
    }
    if (name == "invquad") {
        // the rational sequence 1/((k+1)(k+2))
        t.expr = SumExpr::ratcoeff(RatFunc(MultiPoly(1), MultiPoly::parse("(k + 1)*(k + 2)")));
        t.kernel = HyperAtom::make("invquad", rf("k + 1") / rf("k + 3"));
        return t;
    }
    return std::nullopt;
}

}  // namespace telesum
