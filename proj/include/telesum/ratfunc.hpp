#pragma once

#include "telesum/multipoly.hpp"

namespace telesum {

/// Rational function: pair of MultiPoly with gcd(num, den) = 1 and the
/// denominator monic under graded-lex. Arithmetic re-normalizes eagerly so
/// equality of normal forms decides equality of rational functions.
class RatFunc {
public:
    RatFunc() : num_(), den_(1) {}
    RatFunc(const BigRational& c) : num_(c), den_(1) {}    // NOLINT(google-explicit-constructor)
    RatFunc(long long c) : num_(c), den_(1) {}             // NOLINT(google-explicit-constructor)
    RatFunc(const MultiPoly& p) : num_(p), den_(1) {}      // NOLINT(google-explicit-constructor)
    RatFunc(MultiPoly num, MultiPoly den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

    static RatFunc var(const std::string& name, int exp = 1) {
        if (exp >= 0) return RatFunc(MultiPoly::var(name, exp));
        return RatFunc(MultiPoly(1), MultiPoly::var(name, -exp));
    }

    const MultiPoly& num() const { return num_; }
    const MultiPoly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    bool is_polynomial() const { return den_.is_constant(); }
    BigRational constant_value() const { return num_.constant_value() / den_.constant_value(); }
    MultiPoly poly_value() const {
        if (!is_polynomial()) throw std::domain_error("RatFunc: not a polynomial");
        return num_ / den_.constant_value();
    }

    RatFunc operator-() const { RatFunc r(*this); r.num_ = -r.num_; return r; }
    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
        if (b.is_zero()) throw std::domain_error("RatFunc: division by zero");
        return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
    }
    RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
    RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
    RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
    RatFunc& operator/=(const RatFunc& o) { return *this = *this / o; }

    friend bool operator==(const RatFunc& a, const RatFunc& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }
    friend bool operator<(const RatFunc& a, const RatFunc& b) {
        if (a.num_ != b.num_) return a.num_ < b.num_;
        return a.den_ < b.den_;
    }

    RatFunc inverse() const {
        if (is_zero()) throw std::domain_error("RatFunc: inverse of zero");
        return RatFunc(den_, num_);
    }

    RatFunc pow(int e) const {
        if (e < 0) return inverse().pow(-e);
        RatFunc r(BigRational(1)), b(*this);
        while (e > 0) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }

    RatFunc substitute(const std::string& v, const RatFunc& repl) const {
        // exponent-wise: num and den are polynomials in v
        auto subst_poly = [&](const MultiPoly& p) {
            RatFunc acc(BigRational(0));
            for (int e : p.exponents_of(v))
                acc += RatFunc(p.coefficient_of(v, e)) * repl.pow(e);
            return acc;
        };
        RatFunc n = subst_poly(num_), d = subst_poly(den_);
        return n / d;
    }

    RatFunc shift_var(const std::string& v, long long delta) const {
        if (delta == 0) return *this;
        return RatFunc(num_.shift_var(v, delta), den_.shift_var(v, delta));
    }

    bool has_var(const std::string& v) const { return num_.has_var(v) || den_.has_var(v); }

    /// Evaluation with the vanishing-denominator convention: value is 0
    /// whenever the denominator evaluates to 0.
    BigRational eval(const std::map<std::string, BigRational>& point) const {
        BigRational d = den_.eval(point);
        if (d.is_zero()) return BigRational(0);
        return num_.eval(point) / d;
    }

    /// Plain evaluation; throws on a vanishing denominator.
    BigRational eval_strict(const std::map<std::string, BigRational>& point) const {
        BigRational d = den_.eval(point);
        if (d.is_zero()) throw std::domain_error("RatFunc: pole at evaluation point");
        return num_.eval(point) / d;
    }

    std::string str() const {
        if (is_polynomial()) return poly_value().str();
        std::string n = num_.terms().size() > 1 ? "(" + num_.str() + ")" : num_.str();
        std::string d = den_.terms().size() > 1 ? "(" + den_.str() + ")" : den_.str();
        return n + "/" + d;
    }
    friend std::ostream& operator<<(std::ostream& os, const RatFunc& f) { return os << f.str(); }

private:
    MultiPoly num_, den_;

    void normalize() {
        if (den_.is_zero()) throw std::domain_error("division by zero polynomial");
        if (num_.is_zero()) { den_ = MultiPoly(1); return; }
        MultiPoly g = poly_gcd(num_, den_);
        if (!g.is_constant()) {
            num_ = divide_exact(num_, g);
            den_ = divide_exact(den_, g);
        }
        BigRational lc = den_.leading_coefficient();
        num_ = num_ / lc;
        den_ = den_ / lc;
    }
};

/// Reduced, monic-denominator form of num/den.
inline RatFunc normalize_ratfunc(const MultiPoly& num, const MultiPoly& den) {
    return RatFunc(num, den);
}

/// Evaluation under the convention of the base difference field: p/q maps to
/// 0 at points where q vanishes.
inline BigRational eval_rat(const RatFunc& f, const std::map<std::string, BigRational>& point) {
    return f.eval(point);
}

}  // namespace telesum
