#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace telesum {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number. Always reduced: gcd(|num|, den) = 1, den > 0,
/// zero is 0/1. Backed by boost::multiprecision (which maintains exactly
/// this canonical form).
class BigRational {
public:
    BigRational() : value_(0) {}
    BigRational(long long n) : value_(n) {}            // NOLINT(google-explicit-constructor)
    BigRational(const BigInt& n) : value_(n) {}        // NOLINT(google-explicit-constructor)
    BigRational(const BigInt& num, const BigInt& den) {
        if (den == 0) throw std::domain_error("BigRational: zero denominator");
        value_ = Rep(num) / Rep(den);
    }

    static BigRational from_string(const std::string& s) {
        auto slash = s.find('/');
        if (slash == std::string::npos) return BigRational(BigInt(s));
        return BigRational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
    }

    BigInt numerator() const { return boost::multiprecision::numerator(value_); }
    BigInt denominator() const { return boost::multiprecision::denominator(value_); }

    bool is_zero() const { return value_ == 0; }
    bool is_one() const { return value_ == 1; }
    bool is_integer() const { return denominator() == 1; }
    int sign() const { return value_.sign(); }

    /// Integer value; throws unless denominator is 1.
    BigInt to_integer() const {
        if (!is_integer()) throw std::domain_error("BigRational: not an integer");
        return numerator();
    }
    /// Like to_integer but also requires the value to fit in long long.
    long long to_int64() const {
        BigInt n = to_integer();
        if (n > std::numeric_limits<long long>::max() || n < std::numeric_limits<long long>::min())
            throw std::domain_error("BigRational: integer out of range");
        return static_cast<long long>(n);
    }

    BigRational operator-() const { return BigRational(Rep(-value_)); }
    BigRational& operator+=(const BigRational& o) { value_ += o.value_; return *this; }
    BigRational& operator-=(const BigRational& o) { value_ -= o.value_; return *this; }
    BigRational& operator*=(const BigRational& o) { value_ *= o.value_; return *this; }
    BigRational& operator/=(const BigRational& o) {
        if (o.is_zero()) throw std::domain_error("BigRational: division by zero");
        value_ /= o.value_;
        return *this;
    }

    friend BigRational operator+(BigRational a, const BigRational& b) { return a += b; }
    friend BigRational operator-(BigRational a, const BigRational& b) { return a -= b; }
    friend BigRational operator*(BigRational a, const BigRational& b) { return a *= b; }
    friend BigRational operator/(BigRational a, const BigRational& b) { return a /= b; }

    friend bool operator==(const BigRational& a, const BigRational& b) { return a.value_ == b.value_; }
    friend bool operator!=(const BigRational& a, const BigRational& b) { return a.value_ != b.value_; }
    friend bool operator<(const BigRational& a, const BigRational& b) { return a.value_ < b.value_; }
    friend bool operator<=(const BigRational& a, const BigRational& b) { return a.value_ <= b.value_; }
    friend bool operator>(const BigRational& a, const BigRational& b) { return a.value_ > b.value_; }
    friend bool operator>=(const BigRational& a, const BigRational& b) { return a.value_ >= b.value_; }

    BigRational inverse() const {
        if (is_zero()) throw std::domain_error("BigRational: inverse of zero");
        return BigRational(denominator(), numerator());
    }

    /// value^e for any integer e (e < 0 inverts, base must be nonzero).
    BigRational pow(long long e) const {
        if (e < 0) return inverse().pow(-e);
        BigRational r(1), b(*this);
        while (e > 0) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }

    BigRational abs() const { return sign() < 0 ? -*this : *this; }

    std::string str() const {
        if (is_integer()) return numerator().str();
        return numerator().str() + "/" + denominator().str();
    }

    friend std::ostream& operator<<(std::ostream& os, const BigRational& r) { return os << r.str(); }

private:
    using Rep = boost::multiprecision::cpp_rational;
    explicit BigRational(Rep v) : value_(std::move(v)) {}
    Rep value_;
};

/// C(top, k) for integer top (possibly negative) and integer k;
/// zero when k < 0, the usual falling-factorial product otherwise.
inline BigRational binomial(const BigRational& top, long long k) {
    if (k < 0) return BigRational(0);
    BigRational r(1);
    for (long long i = 1; i <= k; ++i)
        r *= (top - BigRational(i - 1)) / BigRational(i);
    return r;
}

/// H_m = sum_{i=1}^m 1/i, zero for m <= 0.
inline BigRational harmonic_number(long long m) {
    BigRational h(0);
    for (long long i = 1; i <= m; ++i) h += BigRational(1) / BigRational(i);
    return h;
}

}  // namespace telesum
