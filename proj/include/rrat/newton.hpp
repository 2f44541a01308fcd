#pragma once

#include <vector>

#include "rrat/moments.hpp"

namespace rrat {

/// Exact forward differences Delta^n F*(1) of the Mellin values
/// F*(l) = sum_{r>=1} row . M_{l,r}^{(q)} of one scalar primitive
/// row . F^{(q)}. The differences suffer massive cancellation in floating
/// point (F*(l) ~ 1/l against Delta^n ~ (1-1/B)^n/n), so everything here
/// stays rational.
struct NewtonCoefficients {
    std::vector<Rational> fstar;  // F*(1), ..., F*(n_max + 1)
    std::vector<Rational> delta;  // Delta^n F*(1), n = 0..n_max
};

inline NewtonCoefficients newton_differences(const MomentTable& mt, const Vec<Rational>& row,
                                             unsigned q, unsigned n_max) {
    if (q >= mt.nu) throw InputError("newton_differences: chain column out of range");
    if (mt.L_max < n_max + 1)
        throw InputError("newton_differences: moment table too short (need L_max >= n_max + 1)");

    NewtonCoefficients nc;
    nc.fstar.reserve(n_max + 1);
    for (unsigned l = 1; l <= n_max + 1; ++l) {
        Rational v(0);
        for (unsigned r = 1; r < mt.radix; ++r) {
            const Matrix<Rational>& m = mt.partial[l - 1][r];
            for (std::size_t i = 0; i < row.size(); ++i)
                if (row[i] != 0) v += row[i] * m(i, q);
        }
        nc.fstar.push_back(std::move(v));
    }

    // alternating binomial sums over a common denominator: one big-integer
    // pass, one normalization per coefficient
    Int common(1);
    for (const Rational& v : nc.fstar)
        common = boost::multiprecision::lcm(common, denominator(v));
    std::vector<Int> nums(nc.fstar.size());
    for (std::size_t i = 0; i < nc.fstar.size(); ++i)
        nums[i] = numerator(nc.fstar[i]) * (common / denominator(nc.fstar[i]));

    nc.delta.reserve(n_max + 1);
    for (unsigned n = 0; n <= n_max; ++n) {
        Int acc(0);
        Int binom(1);  // binom(n, k) updated incrementally
        for (unsigned k = 0; k <= n; ++k) {
            Int term = binom * nums[k];
            if ((n - k) % 2 == 0)
                acc += term;
            else
                acc -= term;
            binom = binom * Int(n - k) / Int(k + 1);
        }
        nc.delta.emplace_back(acc, common);
    }
    return nc;
}

/// F*(l) at a positive integer l <= n_max + 1 from the Newton series: the
/// binomial factor truncates the series, so the identity is exact.
inline Rational newton_series_at_integer(const NewtonCoefficients& nc, unsigned l) {
    if (l == 0 || l > nc.delta.size())
        throw InputError("newton_series_at_integer: l out of range");
    Rational acc(0);
    for (unsigned n = 0; n < l; ++n)
        acc += Rational(binomial(l - 1, n)) * nc.delta[n];
    return acc;
}

}  // namespace rrat
