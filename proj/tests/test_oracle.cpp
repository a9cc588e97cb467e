#include "telesum/oracle.hpp"
#include "telesum/parser.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace telesum;

TEST_CASE("eval_sequence basics") {
    Binding b;
    b.params["n"] = BigRational(2);
    CHECK(eval_sequence(parse_expr("Sum(j,0,k,binom(n,j))"), b, "k", 2) == BigRational(4));

    Binding empty;
    empty.tables["X"] = {BigRational(1)};
    CHECK(eval_sequence(parse_expr("Sum(j,0,-1,X[j])"), empty) == BigRational(0));

    // generic atoms vanish below index 0
    CHECK(eval_sequence(parse_expr("X[k-2]"), empty, "k", 1) == BigRational(0));
    CHECK_THROWS(eval_sequence(parse_expr("X[k+1]"), empty, "k", 1));  // table too short

    // rational coefficients use the pole-to-zero convention at the innermost level
    Binding none;
    CHECK(eval_sequence(parse_expr("Sum(k,0,3, harmonic(k)/k)"), none) ==
          BigRational(1) + harmonic_number(2) / BigRational(2) + harmonic_number(3) / BigRational(3));
}

TEST_CASE("C1 and C2 instances") {
    Binding b;
    b.params["n"] = BigRational(3);
    // C1(3) = 2^{n-1}(n+2) = 20
    CHECK(eval_sequence(parse_expr("Sum(k,0,n,Sum(j,0,k,binom(n,j)))"), b) == BigRational(20));
    b.params["n"] = BigRational(2);
    // C2(2) = 26 = (n+2)*2^(2n-1) - n*binom(2n-1,n)
    CHECK(eval_sequence(parse_expr("Sum(k,0,n,Sum(j,0,k,binom(n,j))^2)"), b) == BigRational(26));
    CHECK(eval_sequence(parse_expr("(n+2)*2^(2*n-1) - n*binom(2*n-1,n)"), b) == BigRational(26));
    b.params["n"] = BigRational(1);
    // alternating square over 0..2n equals 2^{4n-1}
    CHECK(eval_sequence(parse_expr("Sum(k,0,2*n,(-1)^k*Sum(j,0,k,binom(2*n,j))^2)"), b) ==
          BigRational(8));
}

TEST_CASE("check_identity on the plain double-sum identity") {
    auto [lhs, rhs] = parse_identity(
        "Sum(k,0,a,Sum(j,0,k,X[j])) = (a+1)*Sum(j,0,a,X[j]) - Sum(j,0,a,j*X[j])");
    Binding b;
    b.tables["X"] = {BigRational(0), BigRational(1), BigRational(2), BigRational(3)};
    auto rep = check_identity(lhs, rhs, {{"a", 3, 3}}, b);
    CHECK(rep.passed());
    // both sides are 10 at a=3 for the table 0,1,2,3
    b.params["a"] = BigRational(3);
    CHECK(eval_sequence(lhs, b) == BigRational(10));

    // random tables across a range of a
    std::mt19937_64 rng(kDefaultOracleSeed);
    for (int t = 0; t < 10; ++t) {
        Binding rb;
        rb.tables["X"] = random_table(rng, 22);
        CHECK(check_identity(lhs, rhs, {{"a", 0, 20}}, rb).passed());
    }

    // a perturbed rhs must fail with a witness
    auto [l2, r2] = parse_identity(
        "Sum(k,0,a,Sum(j,0,k,X[j])) = (a+1)*Sum(j,0,a,X[j]) - Sum(j,0,a,j*X[j]) + 1");
    auto bad = check_identity(l2, r2, {{"a", 0, 5}}, b);
    CHECK(!bad.passed());
    REQUIRE(bad.witness);
}

TEST_CASE("interchange instance: X=[1,2,3], Y=[1,1,1]") {
    auto [lhs, rhs] = parse_identity(
        "Sum(k,0,a,Sum(j,0,k,X[j])*Y[k]) = "
        "Sum(k,0,a,Y[k])*Sum(j,0,a,X[j]) + Sum(k,0,a,Y[k]*X[k]) - Sum(k,0,a,X[k]*Sum(j,0,k,Y[j]))");
    Binding b;
    b.tables["X"] = {BigRational(1), BigRational(2), BigRational(3)};
    b.tables["Y"] = {BigRational(1), BigRational(1), BigRational(1)};
    b.params["a"] = BigRational(2);
    CHECK(eval_sequence(lhs, b) == BigRational(10));
    CHECK(eval_sequence(rhs, b) == BigRational(10));
}

TEST_CASE("provisos filter grid points") {
    auto [lhs, rhs] = parse_identity("invbinom(n,a) = invbinom(n,a)");
    Binding b;
    auto rep = check_identity(lhs, rhs, {{"a", 0, 4}, {"n", 0, 4}}, b, {"a<=n"});
    CHECK(rep.passed());
    CHECK(rep.points_checked == 15);
}

TEST_CASE("check_recurrence") {
    Binding b;
    b.params["n"] = BigRational(4);
    // Y_k = -(1/2)(k+1) binom(n,k+1) satisfies Y[k+1]-Y[k] = (k+1-2c) binom(n,k+1), c=n/4
    std::vector<BigRational> y;
    for (long long k = 0; k <= 11; ++k)
        y.push_back(BigRational(BigInt(-1), BigInt(2)) * BigRational(k + 1) *
                    binomial(BigRational(4), k + 1));
    SumExpr rhs = parse_expr("(a+1-2*(n/4))*binom(n,a+1)");
    CHECK(check_recurrence(y, rhs, "a", b, 10).passed());

    std::vector<BigRational> zero(12, BigRational(0));
    auto rep = check_recurrence(zero, rhs, "a", b, 10);
    CHECK(!rep.passed());
    REQUIRE(rep.witness);
    CHECK(rep.witness->point.at("a") == BigRational(0));
}

TEST_CASE("falsify_nonexistence") {
    const int cap = 8;
    const long long nsamp = 3 * (cap + 1) + 10;

    SECTION("k*k! telescopes with certificate k! (refutation found)") {
        std::vector<BigRational> f, t;
        Binding b;
        for (long long k = 0; k < nsamp; ++k) {
            f.push_back(eval_sequence(parse_expr("k*factorial(k)"), b, "k", k));
            t.push_back(eval_sequence(parse_expr("factorial(k)"), b, "k", k));
        }
        auto ref = falsify_nonexistence(f, t, cap);
        REQUIRE(ref);
        // certificate u/v with g = (u/v) t: g(k) - g(0) = sum_{j<=k} f(j) - f(0)
        const auto& [u, v] = *ref;
        auto R = [&](long long k) {
            return u.eval(RatFunc(BigRational(k))) / v.eval(RatFunc(BigRational(k)));
        };
        for (long long k = 0; k + 1 < nsamp; ++k) {
            RatFunc g1 = R(k + 1) * RatFunc(t[k + 1]);
            RatFunc g0 = R(k) * RatFunc(t[k]);
            CHECK((g1 - g0) == RatFunc(f[k + 1]));
        }
    }

    SECTION("1/(k+1) admits no rational certificate at cap 8") {
        std::vector<BigRational> f, t;
        Binding b;
        for (long long k = 0; k < nsamp; ++k) {
            f.push_back(BigRational(1) / BigRational(k + 1));
            t.push_back(BigRational(1));
        }
        CHECK(!falsify_nonexistence(f, t, cap));
    }

    SECTION("binom(n,k) admits no certificate R(k)binom(n,k) at cap 8, n=37") {
        std::vector<BigRational> f, t;
        Binding b;
        b.params["n"] = BigRational(37);
        for (long long k = 0; k < nsamp; ++k) {
            BigRational v = eval_sequence(parse_expr("binom(n,k)"), b, "k", k);
            f.push_back(v);
            t.push_back(v);
        }
        CHECK(!falsify_nonexistence(f, t, cap));
    }
}
