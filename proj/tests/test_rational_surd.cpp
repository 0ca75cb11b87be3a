#include "hvt/surd.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hvt;

TEST(Rational, ParsesFractionsDecimalsAndIntegers) {
    EXPECT_EQ(parse_rational("3/6"), Rational(1, 2));
    EXPECT_EQ(parse_rational("-1/3"), Rational(-1, 3));
    EXPECT_EQ(parse_rational("0.125"), Rational(1, 8));
    EXPECT_EQ(parse_rational("-0.5"), Rational(-1, 2));
    EXPECT_EQ(parse_rational("-.25"), Rational(-1, 4));
    EXPECT_EQ(parse_rational("42"), Rational(42));
    EXPECT_EQ(parse_rational("+7"), Rational(7));
}

TEST(Rational, RejectsMalformedText) {
    for (const char* bad : {"", "1/0", "abc", "1/", "/2", "1.2.3", "1e3", "1/-2", "0x10", "1."})
        EXPECT_THROW(parse_rational(bad), ValidationError) << bad;
}

TEST(Rational, CanonicalStrings) {
    EXPECT_EQ(to_string(Rational(2, 4)), "1/2");
    EXPECT_EQ(to_string(Rational(-6, 3)), "-2");
    EXPECT_EQ(to_string(Rational(0)), "0");
}

TEST(Rational, PowAndSign) {
    EXPECT_EQ(pow(Rational(-1, 2), 3), Rational(-1, 8));
    EXPECT_EQ(pow(Rational(5), 0), Rational(1));
    EXPECT_EQ(sign(Rational(-3)), -1);
    EXPECT_EQ(sign(Rational(0)), 0);
    EXPECT_EQ(abs(Rational(-3, 7)), Rational(3, 7));
}

TEST(Surd, SqrtReducesSquareFactors) {
    Surd s = Surd::sqrt(12);
    EXPECT_EQ(s.radicand(), 3);
    EXPECT_EQ(s.irrational_coefficient(), Rational(2));
    EXPECT_TRUE(Surd::sqrt(Rational(9, 4)).is_rational());
    EXPECT_EQ(Surd::sqrt(Rational(9, 4)).as_rational(), Rational(3, 2));
    EXPECT_THROW(Surd::sqrt(-1), DomainError);
}

TEST(Surd, ArithmeticIsExact) {
    Surd r3 = Surd::sqrt(3);
    EXPECT_EQ((r3 * r3).as_rational(), Rational(3));
    Surd x = Surd(Rational(1)) + r3;
    Surd y = Surd(Rational(1)) - r3;
    EXPECT_EQ((x * y).as_rational(), Rational(-2));
    EXPECT_TRUE((x - x).is_rational());
    EXPECT_THROW(Surd::sqrt(2) + Surd::sqrt(3), DomainError);
}

TEST(Surd, SignAndOrdering) {
    // 7/4 - sqrt(3) is about 0.018
    Surd close = Surd(Rational(7, 4)) - Surd::sqrt(3);
    EXPECT_EQ(close.sign(), 1);
    EXPECT_EQ((Surd(Rational(17, 10)) - Surd::sqrt(3)).sign(), -1);
    EXPECT_LT(Surd::sqrt(2), Surd(Rational(3, 2)));
    EXPECT_GT(Surd::sqrt(2), Surd(Rational(7, 5)));
    EXPECT_EQ(abs(-Surd::sqrt(5)), Surd::sqrt(5));
    EXPECT_EQ(min(Surd::sqrt(5), Surd(2)), Surd(2));
}

TEST(Surd, EnclosureBracketsTheValueExactly) {
    const Rational width(1, 1000000000000LL);
    for (int d : {2, 3, 5, 6, 7, 10, 1001}) {
        for (Rational b : {Rational(1), Rational(-3, 2), Rational(7, 11)}) {
            Surd s(Rational(1, 3), b, d);
            Interval iv = s.enclosure();
            EXPECT_LE(iv.width(), width);
            // lo <= a + b sqrt(d) <= hi  <=>  signs of (lo - a)/b and (hi - a)/b against sqrt(d)
            Rational u = (iv.lo - Rational(1, 3)) / b, v = (iv.hi - Rational(1, 3)) / b;
            Rational lo = std::min(u, v), hi = std::max(u, v);
            EXPECT_TRUE(lo <= 0 || lo * lo <= d) << d;
            EXPECT_TRUE(hi >= 0 && hi * hi >= d) << d;
        }
    }
}

TEST(Surd, MinimalPolynomialVanishes) {
    for (int d : {2, 3, 5, 13}) {
        Surd s(Rational(-2, 5), Rational(3, 4), d);
        auto p = s.minimal_polynomial();
        ASSERT_EQ(p.size(), 3u);
        Surd value = Surd(p[0]) + Surd(p[1]) * s + s * s;
        EXPECT_EQ(value.sign(), 0);
    }
    auto q = Surd(Rational(5, 3)).minimal_polynomial();
    EXPECT_EQ(q, (std::vector<Rational>{Rational(-5, 3), Rational(1)}));
}

TEST(Surd, NegCosineMatchesFloatingPoint) {
    for (long deg = -360; deg <= 720; deg += 15) {
        if (deg % 30 != 0 && deg % 45 != 0) continue;
        Surd s = neg_cos_degrees(deg);
        EXPECT_NEAR(s.to_double(), -std::cos(static_cast<double>(deg) * M_PI / 180.0), 1e-12) << deg;
    }
    EXPECT_EQ(neg_cos_degrees(60), Surd(Rational(-1, 2)));
    EXPECT_EQ(neg_cos_degrees(30), Surd(Rational(0), Rational(-1, 2), 3));
    EXPECT_THROW(neg_cos_degrees(20), DomainError);
}

TEST(Surd, Strings) {
    EXPECT_EQ(Surd(Rational(0), Rational(-1, 2), 3).str(), "-1/2*sqrt(3)");
    EXPECT_EQ(Surd(Rational(1), Rational(1), 2).str(), "1 + sqrt(2)");
    EXPECT_EQ(Surd(Rational(1), Rational(-1), 2).str(), "1 - sqrt(2)");
}
