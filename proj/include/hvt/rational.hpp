#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hvt {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad syntax, broken invariants, unknown names.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Input is well formed but outside the domain an operation accepts.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Problem exceeds a configured size cap.
class SizeError : public Error {
public:
    using Error::Error;
};

inline Integer numerator(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer denominator(const Rational& q) { return boost::multiprecision::denominator(q); }

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline int sign(const Rational& q) { return q.sign(); }

inline Rational pow(const Rational& base, unsigned exponent) {
    Rational result = 1;
    for (unsigned i = 0; i < exponent; ++i) result *= base;
    return result;
}

/// Renders `p/q`, or just `p` when the denominator is one.
inline std::string to_string(const Rational& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

/// Parses `p`, `p/q` or a plain decimal such as `-0.75`.
inline Rational parse_rational(std::string_view text) {
    auto fail = [&] { throw ValidationError("not an exact rational: '" + std::string(text) + "'"); };
    if (text.empty()) fail();

    auto parse_integer = [&](std::string_view s) -> Integer {
        std::size_t i = 0;
        bool negative = false;
        if (i < s.size() && (s[i] == '-' || s[i] == '+')) negative = s[i++] == '-';
        if (i == s.size()) fail();
        Integer value = 0;
        for (; i < s.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) fail();
            value = value * 10 + (s[i] - '0');
        }
        return negative ? Integer(-value) : value;
    };

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Integer num = parse_integer(text.substr(0, slash));
        std::string_view den_text = text.substr(slash + 1);
        if (!den_text.empty() && (den_text[0] == '-' || den_text[0] == '+')) fail();
        Integer den = parse_integer(den_text);
        if (den == 0) throw ValidationError("zero denominator in '" + std::string(text) + "'");
        return Rational(num, den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        bool negative = !whole.empty() && whole[0] == '-';
        std::string digits(whole);
        if (digits.empty() || digits == "-" || digits == "+") digits += "0";
        if (frac.empty()) fail();
        for (char c : frac)
            if (!std::isdigit(static_cast<unsigned char>(c))) fail();
        Integer scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        Integer int_part = parse_integer(digits);
        Integer frac_part = parse_integer(frac);
        Integer num = (int_part < 0 ? Integer(-int_part) : int_part) * scale + frac_part;
        if (negative) num = -num;
        return Rational(num, scale);
    }
    return Rational(parse_integer(text));
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

} // namespace hvt
