#include "telesum/rational.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace telesum;

TEST_CASE("BigRational canonical form") {
    BigRational a(BigInt(6), BigInt(-4));
    CHECK(a.numerator() == -3);
    CHECK(a.denominator() == 2);
    CHECK(BigRational(0).denominator() == 1);
    CHECK_THROWS(BigRational(BigInt(1), BigInt(0)));
}

TEST_CASE("BigRational arithmetic") {
    BigRational a(1), b(3);
    CHECK((a / b + a / b + a / b).is_one());
    CHECK((BigRational(2).pow(10)) == BigRational(1024));
    CHECK((BigRational(2).pow(-2)) == BigRational(BigInt(1), BigInt(4)));
    CHECK(BigRational::from_string("-10/4") == BigRational(BigInt(-5), BigInt(2)));
    CHECK(BigRational(BigInt(7), BigInt(2)).str() == "7/2");
}

TEST_CASE("binomial over integers") {
    CHECK(binomial(BigRational(5), 2) == BigRational(10));
    CHECK(binomial(BigRational(4), 0) == BigRational(1));
    CHECK(binomial(BigRational(4), 7) == BigRational(0));
    CHECK(binomial(BigRational(4), -1) == BigRational(0));
    CHECK(binomial(BigRational(-1), 0) == BigRational(1));
    CHECK(binomial(BigRational(-1), 2) == BigRational(1));
}

TEST_CASE("harmonic numbers") {
    CHECK(harmonic_number(0) == BigRational(0));
    CHECK(harmonic_number(3) == BigRational(BigInt(11), BigInt(6)));
}
