#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <sstream>
#include <string>

#include "rrat/rational.hpp"

namespace rrat {

template <unsigned D>
using BigFloat = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<D>>;

template <class T>
T to_float(const Rational& q) {
    return T(numerator(q)) / T(denominator(q));
}

template <class T>
T pi_const() {
    return boost::math::constants::pi<T>();
}

/// Minimal complex type over an arbitrary real scalar (multiprecision or
/// double); only the operations the series evaluations need.
template <class T>
struct Cplx {
    T re{0}, im{0};

    Cplx() = default;
    Cplx(T r) : re(std::move(r)) {}
    Cplx(T r, T i) : re(std::move(r)), im(std::move(i)) {}

    Cplx& operator+=(const Cplx& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Cplx& operator-=(const Cplx& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    friend Cplx operator+(Cplx a, const Cplx& b) { return a += b; }
    friend Cplx operator-(Cplx a, const Cplx& b) { return a -= b; }
    friend Cplx operator-(const Cplx& a) { return {-a.re, -a.im}; }
    friend Cplx operator*(const Cplx& a, const Cplx& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend Cplx operator*(const T& c, const Cplx& a) { return {c * a.re, c * a.im}; }
    friend Cplx operator*(const Cplx& a, const T& c) { return {a.re * c, a.im * c}; }
    friend Cplx operator/(const Cplx& a, const T& c) { return {a.re / c, a.im / c}; }
    friend Cplx operator/(const Cplx& a, const Cplx& b) {
        T d = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
    }
    Cplx conj() const { return {re, -im}; }
};

template <class T>
T cabs(const Cplx<T>& z) {
    using std::sqrt;
    return sqrt(z.re * z.re + z.im * z.im);
}

template <class T>
Cplx<T> cexp(const Cplx<T>& z) {
    using std::cos;
    using std::exp;
    using std::sin;
    T e = exp(z.re);
    return {e * cos(z.im), e * sin(z.im)};
}

/// x^c for a positive rational base and complex exponent.
template <class T>
Cplx<T> rational_pow(const Rational& x, const Cplx<T>& c) {
    using std::log;
    if (x <= 0) throw InputError("rational_pow: base must be positive");
    T lx = log(to_float<T>(x));
    return cexp(Cplx<T>{c.re * lx, c.im * lx});
}

inline double log10_of(double x) { return x > 0 ? std::log10(x) : -INFINITY; }

/// Decimal rendering with the requested significant digits (used for
/// arbitrary-precision results that outlive any fixed machine type).
template <class T>
std::string to_decimal_string(const T& x, unsigned digits)
{
    std::ostringstream os;
    os.precision(digits);
    os << std::scientific << x;
    return os.str();
}

/// Fixed-point rendering with the requested decimal places, matching the
/// way coefficient tables are usually printed.
template <class T>
std::string to_fixed_string(const T& x, unsigned decimals)
{
    std::ostringstream os;
    os.precision(decimals);
    os << std::fixed << x;
    return os.str();
}

}  // namespace rrat
