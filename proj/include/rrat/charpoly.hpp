#pragma once

#include <map>
#include <vector>

#include "rrat/matrix.hpp"
#include "rrat/rational.hpp"

namespace rrat {

/// Monic characteristic polynomial, coefficients in increasing degree order
/// (p[d] = 1), by the Faddeev-LeVerrier recursion. Exact over Rational.
template <class T>
std::vector<T> char_poly(const Matrix<T>& q) {
    if (q.rows() != q.cols()) throw InputError("char_poly: matrix must be square");
    std::size_t d = q.rows();
    std::vector<T> p(d + 1, T(0));
    p[d] = 1;
    Matrix<T> n = Matrix<T>::identity(d);
    for (std::size_t k = 1; k <= d; ++k) {
        Matrix<T> m = q * n;
        T tr(0);
        for (std::size_t i = 0; i < d; ++i) tr += m(i, i);
        p[d - k] = -tr / T(static_cast<long>(k));
        n = m;
        for (std::size_t i = 0; i < d; ++i) n(i, i) += p[d - k];
    }
    return p;
}

inline Rational poly_eval(const std::vector<Rational>& p, const Rational& x) {
    Rational r(0);
    for (std::size_t i = p.size(); i-- > 0;) r = r * x + p[i];
    return r;
}

/// Exact synthetic division by (x - r); requires r to be a root.
inline std::vector<Rational> poly_deflate(const std::vector<Rational>& p, const Rational& r) {
    std::vector<Rational> q(p.size() - 1);
    Rational carry = p.back();
    for (std::size_t i = p.size() - 1; i-- > 0;) {
        q[i] = carry;
        carry = p[i] + carry * r;
    }
    if (carry != 0) throw InputError("poly_deflate: not a root");
    return q;
}

namespace detail {

// Divisors of |n| by trial division. Gives up (empty result) when a
// composite cofactor above the trial bound remains.
inline std::vector<Int> divisors(Int n, const Int& trial_bound = Int(1) << 22) {
    if (n < 0) n = -n;
    if (n == 0) return {};
    std::map<Int, unsigned> fac;
    for (Int p = 2; p * p <= n && p <= trial_bound; p += (p == 2 ? 1 : 2)) {
        while (n % p == 0) {
            ++fac[p];
            n /= p;
        }
    }
    if (n > 1) {
        if (n > trial_bound * trial_bound) return {};
        ++fac[n];  // prime cofactor
    }
    std::vector<Int> divs{1};
    for (auto& [p, e] : fac) {
        std::size_t sz = divs.size();
        Int pk = 1;
        for (unsigned i = 1; i <= e; ++i) {
            pk *= p;
            for (std::size_t j = 0; j < sz; ++j) divs.push_back(divs[j] * pk);
        }
    }
    return divs;
}

}  // namespace detail

/// Rational roots of a rational polynomial with multiplicities, via the
/// rational-root theorem on the primitive integer polynomial, with exact
/// deflation. `remainder` receives the (monic) root-free factor.
inline std::map<Rational, unsigned> rational_roots(std::vector<Rational> p,
                                                   std::vector<Rational>* remainder = nullptr) {
    std::map<Rational, unsigned> roots;
    while (p.size() > 1 && p.front() == 0) {  // root at zero
        ++roots[Rational(0)];
        p.erase(p.begin());
    }
    while (p.size() > 1) {
        // integer version: multiply by lcm of denominators
        Int lcm_den = 1;
        for (const auto& c : p) lcm_den = boost::multiprecision::lcm(lcm_den, denominator(c));
        Int a0 = numerator(p.front() * Rational(lcm_den));
        Int an = numerator(p.back() * Rational(lcm_den));
        std::vector<Int> ps = detail::divisors(a0);
        std::vector<Int> qs = detail::divisors(an);
        if (ps.empty() || qs.empty()) break;  // could not factor; treat rest as irrational
        bool found = false;
        for (const Int& den : qs) {
            for (const Int& num : ps) {
                for (int sign : {1, -1}) {
                    Rational cand(sign * num, den);
                    if (poly_eval(p, cand) == 0) {
                        unsigned mult = 0;
                        while (p.size() > 1 && poly_eval(p, cand) == 0) {
                            p = poly_deflate(p, cand);
                            ++mult;
                        }
                        roots[cand] += mult;
                        found = true;
                        break;
                    }
                }
                if (found) break;
            }
            if (found) break;
        }
        if (!found) break;
    }
    if (remainder) {
        if (p.size() > 1 && p.back() != 1) {
            Rational lead = p.back();
            for (auto& c : p) c /= lead;
        }
        *remainder = std::move(p);
    }
    return roots;
}

}  // namespace rrat
