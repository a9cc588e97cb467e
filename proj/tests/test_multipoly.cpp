#include "telesum/multipoly.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace telesum;

namespace {
MultiPoly P(const std::string& s) { return MultiPoly::parse(s); }

MultiPoly random_poly(std::mt19937_64& rng, const std::vector<std::string>& vars, int max_deg,
                      int max_terms) {
    std::uniform_int_distribution<int> deg(0, max_deg), coef(-5, 5), nterms(1, max_terms);
    MultiPoly p;
    int t = nterms(rng);
    for (int i = 0; i < t; ++i) {
        MultiPoly term(BigRational(coef(rng)));
        for (const auto& v : vars) term *= MultiPoly::var(v, deg(rng));
        p += term;
    }
    return p;
}
}  // namespace

TEST_CASE("MultiPoly basic arithmetic and printing") {
    MultiPoly p = P("(k + 1)*(k - 1)");
    CHECK(p == P("k^2 - 1"));
    CHECK(p.str() == "k^2 - 1");
    CHECK(P("k + n") * P("k - n") == P("k^2 - n^2"));
    CHECK(P("2*k + 2") / BigRational(2) == P("k + 1"));
    CHECK(P("k - k").is_zero());
    CHECK(P("(n + k)^2").degree("k") == 2);
    CHECK(P("3").is_constant());
}

TEST_CASE("MultiPoly substitution and shift") {
    MultiPoly p = P("k^2 + n*k");
    CHECK(p.shift_var("k", 1) == P("k^2 + 2*k + 1 + n*k + n"));
    CHECK(p.substitute("k", P("0")).is_zero());
    CHECK(p.eval({{"k", BigRational(2)}, {"n", BigRational(3)}}) == BigRational(10));
}

TEST_CASE("divide_exact") {
    CHECK(divide_exact(P("k^2 - 1"), P("k - 1")) == P("k + 1"));
    CHECK(divide_exact(P("(k + n)*(k + 1)*(n - 2)"), P("k + n")) == P("(k + 1)*(n - 2)"));
    CHECK_THROWS(divide_exact(P("k^2 + 1"), P("k + 1")));
}

TEST_CASE("poly_gcd examples") {
    CHECK(poly_gcd(P("k^2 - 1"), P("k + 1")) == P("k + 1"));
    CHECK(poly_gcd(P("k"), P("n")) == P("1"));
    CHECK(poly_gcd(P("(k + n)*(k + 1)"), P("(k + n)*k")) == P("k + n"));
    CHECK(poly_gcd(P("k^2 + 2*k + 1"), P("0")) == P("k^2 + 2*k + 1"));
    CHECK(poly_gcd(P("2*k + 2"), P("0")) == P("k + 1"));  // monic normalization
}

TEST_CASE("poly_gcd divides both inputs; cofactors coprime") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 40; ++iter) {
        MultiPoly a = random_poly(rng, {"k", "n"}, 2, 3);
        MultiPoly b = random_poly(rng, {"k", "n"}, 2, 3);
        MultiPoly c = random_poly(rng, {"k", "n"}, 1, 2);
        if (a.is_zero() || b.is_zero() || c.is_zero()) continue;
        MultiPoly g = poly_gcd(a * c, b * c);
        MultiPoly qa = divide_exact(a * c, g);
        MultiPoly qb = divide_exact(b * c, g);  // throws if g does not divide
        CHECK(poly_gcd(qa, qb).is_constant());
    }
}
