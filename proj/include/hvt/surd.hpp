#pragma once

#include "hvt/rational.hpp"

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hvt {

struct Interval {
    Rational lo;
    Rational hi;

    Rational width() const { return hi - lo; }
    bool contains(const Rational& x) const { return lo <= x && x <= hi; }
};

/// Exact element a + b*sqrt(d) of a real quadratic field.
///
/// `d` is a positive integer that is not a perfect square, reduced by small
/// square factors. A number with b == 0 is rational and carries d == 0.
/// Arithmetic between numbers in different fields is rejected with a
/// DomainError unless one side is rational.
class Surd {
public:
    Surd() = default;
    Surd(const Rational& q) : rational_(q) {}  // NOLINT: implicit by design of the field embedding
    Surd(int q) : rational_(q) {}              // NOLINT
    template <class Tag, class A1, class A2, class A3, class A4>
    Surd(const boost::multiprecision::detail::expression<Tag, A1, A2, A3, A4>& e) : rational_(e) {}  // NOLINT

    /// a + b*sqrt(radicand); radicand must be a positive integer.
    Surd(Rational a, Rational b, const Integer& radicand) : rational_(std::move(a)), coefficient_(std::move(b)) {
        if (radicand <= 0) throw DomainError("radicand must be positive");
        auto [outside, inside] = extract_square(radicand);
        coefficient_ *= Rational(outside);
        radicand_ = inside;
        normalize();
    }

    /// Exact square root of a nonnegative rational.
    static Surd sqrt(const Rational& q) {
        if (q < 0) throw DomainError("square root of negative rational " + to_string(q));
        if (q == 0) return Surd(Rational(0));
        // sqrt(p/r) = sqrt(p*r)/r
        Integer p = numerator(q), r = denominator(q);
        return Surd(Rational(0), Rational(1, r), p * r);
    }

    const Rational& rational_part() const { return rational_; }
    const Rational& irrational_coefficient() const { return coefficient_; }
    const Integer& radicand() const { return radicand_; }
    bool is_rational() const { return coefficient_ == 0; }

    Rational as_rational() const {
        if (!is_rational()) throw DomainError("value " + str() + " is irrational");
        return rational_;
    }

    int sign() const {
        int sa = rational_.sign(), sb = coefficient_.sign();
        if (sb == 0) return sa;
        if (sa == 0 || sa == sb) return sb;
        // opposite signs: compare a^2 with b^2 d; equality is impossible for non-square d
        Rational a2 = rational_ * rational_;
        Rational b2d = coefficient_ * coefficient_ * Rational(radicand_);
        return a2 > b2d ? sa : sb;
    }

    Surd operator-() const {
        Surd r = *this;
        r.rational_ = -r.rational_;
        r.coefficient_ = -r.coefficient_;
        return r;
    }

    friend Surd operator+(const Surd& x, const Surd& y) {
        Surd r;
        r.radicand_ = common_radicand(x, y);
        r.rational_ = x.rational_ + y.rational_;
        r.coefficient_ = x.coefficient_ + y.coefficient_;
        r.normalize();
        return r;
    }
    friend Surd operator-(const Surd& x, const Surd& y) { return x + (-y); }
    friend Surd operator*(const Surd& x, const Surd& y) {
        Surd r;
        r.radicand_ = common_radicand(x, y);
        Rational d(r.radicand_);
        r.rational_ = x.rational_ * y.rational_ + x.coefficient_ * y.coefficient_ * d;
        r.coefficient_ = x.rational_ * y.coefficient_ + x.coefficient_ * y.rational_;
        r.normalize();
        return r;
    }
    Surd& operator+=(const Surd& y) { return *this = *this + y; }
    Surd& operator-=(const Surd& y) { return *this = *this - y; }
    Surd& operator*=(const Surd& y) { return *this = *this * y; }

    /// Division by a nonzero rational.
    friend Surd operator/(const Surd& x, const Rational& q) {
        if (q == 0) throw DomainError("division by zero");
        Surd r = x;
        r.rational_ /= q;
        r.coefficient_ /= q;
        return r;
    }

    friend bool operator==(const Surd& x, const Surd& y) { return (x - y).sign() == 0; }
    friend std::strong_ordering operator<=>(const Surd& x, const Surd& y) {
        int s = (x - y).sign();
        return s < 0 ? std::strong_ordering::less : s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
    }

    friend Surd abs(const Surd& x) { return x.sign() < 0 ? -x : x; }
    friend Surd min(const Surd& x, const Surd& y) { return y < x ? y : x; }
    friend Surd max(const Surd& x, const Surd& y) { return x < y ? y : x; }

    /// Rational enclosure [lo, hi] of the value with hi - lo <= width.
    Interval enclosure(const Rational& width = Rational(1, 1000000000000LL)) const {
        if (is_rational()) return {rational_, rational_};
        if (width <= 0) throw DomainError("enclosure width must be positive");
        // sqrt(d) in [s/2^k, (s+1)/2^k] with s = isqrt(d * 4^k); need |b| / 2^k <= width
        Integer scale = 1;
        while (hvt::abs(coefficient_) / Rational(scale) > width) scale *= 2;
        Integer s = boost::multiprecision::sqrt(Integer(radicand_ * scale * scale));
        Rational root_lo(s, scale), root_hi(s + 1, scale);
        Rational e1 = rational_ + coefficient_ * root_lo;
        Rational e2 = rational_ + coefficient_ * root_hi;
        return e1 <= e2 ? Interval{e1, e2} : Interval{e2, e1};
    }

    /// Monic minimal polynomial coefficients, constant term first.
    std::vector<Rational> minimal_polynomial() const {
        if (is_rational()) return {-rational_, Rational(1)};
        Rational c0 = rational_ * rational_ - coefficient_ * coefficient_ * Rational(radicand_);
        return {c0, Rational(-2) * rational_, Rational(1)};
    }

    double to_double() const {
        return hvt::to_double(rational_) +
               hvt::to_double(coefficient_) * std::sqrt(radicand_.convert_to<double>());
    }

    /// `p/q`, or `a + b*sqrt(d)` with exact rationals.
    std::string str() const {
        if (is_rational()) return to_string(rational_);
        std::string root = "sqrt(" + radicand_.str() + ")";
        std::string irr = coefficient_ == 1 ? root
                          : coefficient_ == -1 ? "-" + root
                                               : to_string(coefficient_) + "*" + root;
        if (rational_ == 0) return irr;
        if (coefficient_ > 0) return to_string(rational_) + " + " + irr;
        return to_string(rational_) + " - " + (coefficient_ == -1 ? root : to_string(-coefficient_) + "*" + root);
    }

private:
    static std::pair<Integer, Integer> extract_square(Integer n) {
        Integer outside = 1;
        for (std::uint32_t p = 2; p < 10000; ++p) {
            Integer pp = Integer(p) * p;
            if (pp > n) break;
            while (n % pp == 0) {
                n /= pp;
                outside *= p;
            }
        }
        Integer root = boost::multiprecision::sqrt(n);
        if (root * root == n) return {outside * root, Integer(1)};
        return {outside, n};
    }

    static Integer common_radicand(const Surd& x, const Surd& y) {
        if (x.is_rational()) return y.radicand_;
        if (y.is_rational()) return x.radicand_;
        if (x.radicand_ != y.radicand_)
            throw DomainError("mixed quadratic fields sqrt(" + x.radicand_.str() + ") and sqrt(" + y.radicand_.str() + ")");
        return x.radicand_;
    }

    void normalize() {
        if (radicand_ == 1) {
            rational_ += coefficient_;
            coefficient_ = 0;
        }
        if (coefficient_ == 0) radicand_ = 0;
    }

    Rational rational_ = 0;
    Rational coefficient_ = 0;
    Integer radicand_ = 0;
};

/// -cos(theta) for theta an integer number of degrees that is a multiple of 30 or 45.
inline Surd neg_cos_degrees(long degrees) {
    long t = ((degrees % 360) + 360) % 360;
    // cosine by reference angle in the first quadrant
    auto first_quadrant = [](long r) -> Surd {
        switch (r) {
            case 0: return Surd(Rational(1));
            case 30: return Surd(Rational(0), Rational(1, 2), 3);
            case 45: return Surd(Rational(0), Rational(1, 2), 2);
            case 60: return Surd(Rational(1, 2));
            case 90: return Surd(Rational(0));
            default: throw DomainError("cosine of " + std::to_string(r) + " degrees is not a quadratic surd");
        }
    };
    Surd cosine;
    if (t <= 90) cosine = first_quadrant(t);
    else if (t <= 180) cosine = -first_quadrant(180 - t);
    else if (t <= 270) cosine = -first_quadrant(t - 180);
    else cosine = first_quadrant(360 - t);
    return -cosine;
}

} // namespace hvt
