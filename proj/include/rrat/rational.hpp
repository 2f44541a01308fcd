#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>

#include "rrat/error.hpp"

namespace rrat {

using Int = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

inline Int numerator(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Int denominator(const Rational& q) { return boost::multiprecision::denominator(q); }

inline Rational rat_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline Int int_pow(Int base, unsigned long e) {
    Int r{1};
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

inline Rational rat_pow(const Rational& base, long e) {
    if (e >= 0)
        return Rational(int_pow(numerator(base), static_cast<unsigned long>(e)),
                        int_pow(denominator(base), static_cast<unsigned long>(e)));
    if (base == 0) throw InputError("rat_pow: zero base with negative exponent");
    return Rational(int_pow(denominator(base), static_cast<unsigned long>(-e)),
                    int_pow(numerator(base), static_cast<unsigned long>(-e)));
}

inline Int binomial(unsigned long n, unsigned long k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    Int r{1};
    for (unsigned long i = 0; i < k; ++i) {
        r *= Int(n - i);
        r /= Int(i + 1);
    }
    return r;
}

/// Parses "p", "-p" or "p/q" into an exact rational.
inline Rational parse_rational(const std::string& s) {
    if (s.empty()) throw InputError("empty rational literal");
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(Int(s));
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den <= 0) throw InputError("rational literal with non-positive denominator: " + s);
        return Rational(num, den);
    } catch (const std::exception&) {
        throw InputError("malformed rational literal: " + s);
    }
}

inline std::string format_rational(const Rational& q) {
    Int num = numerator(q), den = denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// floor(log_B(n)) for n >= 1.
inline long floor_log(const Int& n, unsigned base) {
    if (n < 1) throw InputError("floor_log: argument must be >= 1");
    long k = 0;
    Int p{base};
    while (p <= n) {
        p *= base;
        ++k;
    }
    return k;
}

}  // namespace rrat
