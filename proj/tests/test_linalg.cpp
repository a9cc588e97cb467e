#include "telesum/linalg.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace telesum;

TEST_CASE("identity system") {
    std::vector<std::vector<RatFunc>> m = {{RatFunc(1), RatFunc(0)}, {RatFunc(0), RatFunc(1)}};
    std::vector<RatFunc> rhs = {RatFunc(1), RatFunc(MultiPoly::var("n"))};
    auto sol = solve_linear_system(m, rhs);
    REQUIRE(sol);
    CHECK(sol->particular[0] == RatFunc(1));
    CHECK(sol->particular[1] == RatFunc(MultiPoly::var("n")));
    CHECK(sol->nullspace.empty());
}

TEST_CASE("underdetermined: x + y = 1") {
    std::vector<std::vector<RatFunc>> m = {{RatFunc(1), RatFunc(1)}};
    std::vector<RatFunc> rhs = {RatFunc(1)};
    auto sol = solve_linear_system(m, rhs);
    REQUIRE(sol);
    CHECK(sol->particular == std::vector<RatFunc>{RatFunc(1), RatFunc(0)});
    REQUIRE(sol->nullspace.size() == 1);
    CHECK(sol->nullspace[0].first == 1);  // y is the free column
    CHECK(sol->nullspace[0].second == std::vector<RatFunc>{RatFunc(-1), RatFunc(1)});
}

TEST_CASE("inconsistent system") {
    std::vector<std::vector<RatFunc>> m = {{RatFunc(1)}, {RatFunc(1)}};
    std::vector<RatFunc> rhs = {RatFunc(1), RatFunc(2)};
    CHECK(!solve_linear_system(m, rhs));
}

TEST_CASE("random systems: solutions reproduce the rhs exactly") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> dim(1, 6), coef(-5, 5);
    int solved = 0;
    for (int iter = 0; iter < 200; ++iter) {
        size_t r = dim(rng), c = dim(rng);
        std::vector<std::vector<RatFunc>> m(r, std::vector<RatFunc>(c));
        std::vector<RatFunc> rhs(r);
        for (auto& row : m)
            for (auto& x : row) x = RatFunc(coef(rng));
        for (auto& x : rhs) x = RatFunc(coef(rng));
        auto sol = solve_linear_system(m, rhs);
        if (!sol) continue;
        ++solved;
        // particular plus a random nullspace combination must satisfy the system
        std::vector<RatFunc> x = sol->particular;
        for (const auto& [col, v] : sol->nullspace) {
            RatFunc t(coef(rng));
            for (size_t i = 0; i < x.size(); ++i) x[i] += t * v[i];
        }
        for (size_t i = 0; i < r; ++i) {
            RatFunc acc(0);
            for (size_t j = 0; j < c; ++j) acc += m[i][j] * x[j];
            CHECK(acc == rhs[i]);
        }
    }
    CHECK(solved > 50);
}

TEST_CASE("rational-function entries over the parameter field") {
    RatFunc n = RatFunc(MultiPoly::var("n"));
    // [n 1; 0 n] x = (1, n)  ->  x = (1/n - 1/n^2 ... ) exact check by substitution
    std::vector<std::vector<RatFunc>> m = {{n, RatFunc(1)}, {RatFunc(0), n}};
    std::vector<RatFunc> rhs = {RatFunc(1), n};
    auto sol = solve_linear_system(m, rhs);
    REQUIRE(sol);
    CHECK(m[0][0] * sol->particular[0] + m[0][1] * sol->particular[1] == rhs[0]);
    CHECK(m[1][1] * sol->particular[1] == rhs[1]);
}
