#include "telesum/genring.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace telesum;
using namespace telesum::genring;

namespace {
MultiPoly P(const std::string& s) { return MultiPoly::parse(s); }
}

TEST_CASE("generic-ring shift automorphism") {
    // sigma(k * X_k * (-1)^k) = -(k+1) * X_{k+1} * (-1)^k
    MultiPoly p = P("k") * MultiPoly::var(atom_var("X", 0)) * MultiPoly::var(kSignVar);
    MultiPoly expect = -(P("k + 1") * MultiPoly::var(atom_var("X", 1)) * MultiPoly::var(kSignVar));
    CHECK(sigma(p) == expect);
    // inverse shift undoes it
    CHECK(sigma(sigma(p), -1) == p);
    // ring automorphism on products
    MultiPoly q = P("k^2") + MultiPoly::var(atom_var("X", -1));
    CHECK(sigma(p * q) == sigma(p) * sigma(q));
    // sign relation
    CHECK(reduce_sign(MultiPoly::var(kSignVar, 2)) == P("1"));
    CHECK(reduce_sign(MultiPoly::var(kSignVar, 3)) == MultiPoly::var(kSignVar));
}

TEST_CASE("solve_sigma_diff: pure polynomial parts") {
    auto r = solve_sigma_diff(P("1"), {});
    REQUIRE(r.solved);
    CHECK(r.g == P("k"));
    // sigma(g) - g = k  ->  g = k(k-1)/2
    auto r2 = solve_sigma_diff(P("k"), {});
    REQUIRE(r2.solved);
    CHECK(sigma(r2.g) - r2.g == P("k"));
}

TEST_CASE("solve_sigma_diff: forced parameters") {
    // rhs = 1 - 3 c3 X_{k+1}: solvable only with c3 = 0, giving g = k
    MultiPoly rhs = P("1") - P("3") * MultiPoly::var("c3") * MultiPoly::var(atom_var("X", 1));
    auto r = solve_sigma_diff(rhs, {"c3"});
    REQUIRE(r.solved);
    REQUIRE(r.forced.count("c3"));
    CHECK(r.forced.at("c3").is_zero());
    CHECK(r.g == P("k"));
}

TEST_CASE("solve_sigma_diff: genuine nonexistence") {
    // (1+k) X_{k+1} - 2c X_{k+1} has no solution for any c
    MultiPoly x1 = MultiPoly::var(atom_var("X", 1));
    MultiPoly rhs = (P("1 + k") - P("2") * MultiPoly::var("c")) * x1;
    CHECK(!solve_sigma_diff(rhs, {"c"}).solved);
    // -2k X_{k+1} - 2c X_{k+1} likewise
    MultiPoly rhs2 = (P("0 - 2*k") - P("2") * MultiPoly::var("c")) * x1;
    CHECK(!solve_sigma_diff(rhs2, {"c"}).solved);
    // a bare X_{k+1} cannot telescope in the ring
    CHECK(!solve_sigma_diff(x1, {}).solved);
}

TEST_CASE("solve_sigma_diff: atom chains") {
    MultiPoly x0 = MultiPoly::var(atom_var("X", 0)), x1 = MultiPoly::var(atom_var("X", 1));
    auto r = solve_sigma_diff(x1 - x0, {});
    REQUIRE(r.solved);
    CHECK(r.g == x0);
    MultiPoly rhs = P("k") * MultiPoly::var(atom_var("X", 2)) - P("k - 1") * x0;
    auto r2 = solve_sigma_diff(rhs, {});
    if (r2.solved) CHECK(sigma(r2.g) - r2.g == rhs);
}

TEST_CASE("solve_sigma_diff: sign contents") {
    MultiPoly m = MultiPoly::var(kSignVar);
    auto r = solve_sigma_diff(-m, {});
    REQUIRE(r.solved);
    CHECK(r.g == m * BigRational(BigInt(1), BigInt(2)));
    // sign times polynomial
    auto r2 = solve_sigma_diff(m * P("k^2 - 3"), {});
    REQUIRE(r2.solved);
    CHECK(reduce_sign(sigma(r2.g) - r2.g) == reduce_sign(m * P("k^2 - 3")));
    // sign times atom: -(m X_{k+1}) alone has no solution
    CHECK(!solve_sigma_diff(m * MultiPoly::var(atom_var("X", 1)), {}).solved);
}

TEST_CASE("solve_sigma_diff: planted round trips") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> coef(-3, 3), kdeg(0, 2), off(-1, 2), pick(0, 3);
    for (int iter = 0; iter < 60; ++iter) {
        MultiPoly g0;
        int terms = 1 + (iter % 3);
        for (int t = 0; t < terms; ++t) {
            MultiPoly term(BigRational(coef(rng)));
            term *= MultiPoly::var("k", kdeg(rng));
            int shape = pick(rng);
            if (shape == 1) term *= MultiPoly::var(atom_var("X", off(rng)));
            if (shape == 2) term *= MultiPoly::var(kSignVar);
            if (shape == 3)
                term *= MultiPoly::var(atom_var("X", off(rng))) * MultiPoly::var(atom_var("Y", off(rng)));
            g0 += term;
        }
        MultiPoly rhs = reduce_sign(sigma(g0) - g0);
        auto r = solve_sigma_diff(rhs, {});
        INFO("g0 = " << g0.str());
        REQUIRE(r.solved);
        CHECK(reduce_sign(sigma(r.g) - r.g) == rhs);
    }
}
