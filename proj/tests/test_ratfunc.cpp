#include "telesum/ratfunc.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace telesum;

namespace {
MultiPoly P(const std::string& s) { return MultiPoly::parse(s); }
RatFunc R(const std::string& n, const std::string& d) { return RatFunc(P(n), P(d)); }
}  // namespace

TEST_CASE("normalize_ratfunc") {
    // common factor cancellation
    CHECK(normalize_ratfunc(P("k^2 - 1"), P("k - 1")) == RatFunc(P("k + 1")));
    // zero numerator
    RatFunc z = normalize_ratfunc(P("0"), P("k"));
    CHECK(z.is_zero());
    CHECK(z.den() == P("1"));
    // rational content moves into the numerator; denominator becomes monic
    RatFunc f = normalize_ratfunc(P("2*k + 2"), P("4"));
    CHECK(f.is_polynomial());
    CHECK(f.poly_value() == P("1/2*k + 1/2"));
    CHECK_THROWS(normalize_ratfunc(P("1"), P("0")));
    // monic denominator
    RatFunc g = R("1", "2*k + 4");
    CHECK(g.den() == P("k + 2"));
    CHECK(g.num() == P("1/2"));
}

TEST_CASE("eval_rat with the vanishing-denominator convention") {
    CHECK(eval_rat(R("1", "k - 2"), {{"k", BigRational(2)}}) == BigRational(0));
    CHECK(eval_rat(R("k + 1", "1"), {{"k", BigRational(4)}}) == BigRational(5));
    CHECK(eval_rat(R("n - k", "n + 1"), {{"n", BigRational(3)}, {"k", BigRational(1)}}) ==
          BigRational(BigInt(1), BigInt(2)));
    CHECK_THROWS(R("n", "1").eval({{"k", BigRational(1)}}));
}

TEST_CASE("field laws on random rational functions") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> c(-4, 4);
    auto rnd_poly = [&] {
        MultiPoly p(BigRational(c(rng)));
        p += MultiPoly::var("k") * BigRational(c(rng));
        p += MultiPoly::var("n") * BigRational(c(rng));
        return p;
    };
    for (int iter = 0; iter < 60; ++iter) {
        MultiPoly a = rnd_poly(), b = rnd_poly(), cc = rnd_poly(), d = rnd_poly();
        if (b.is_zero() || d.is_zero() || cc.is_zero()) continue;
        RatFunc f(a, b), g(cc, d);
        // normalize(f*g/g) == normalize(f)
        CHECK(f * g / g == f);
        // eval commutes with ops away from poles
        std::map<std::string, BigRational> pt{{"k", BigRational(17)}, {"n", BigRational(23)}};
        if (!b.eval(pt).is_zero() && !d.eval(pt).is_zero() && !(f + g).den().eval(pt).is_zero() &&
            !(f * g).den().eval(pt).is_zero()) {
            CHECK((f + g).eval(pt) == f.eval(pt) + g.eval(pt));
            CHECK((f * g).eval(pt) == f.eval(pt) * g.eval(pt));
        }
    }
}

TEST_CASE("substitution and shift") {
    RatFunc f = R("1", "k + 1");
    CHECK(f.shift_var("k", 1) == R("1", "k + 2"));
    CHECK(f.substitute("k", RatFunc(P("k + 1"))) == R("1", "k + 2"));
    RatFunc g = R("n - k", "k + 1");
    CHECK(g.substitute("k", RatFunc(P("k")) + RatFunc(P("1"))) == R("n - k - 1", "k + 2"));
}
