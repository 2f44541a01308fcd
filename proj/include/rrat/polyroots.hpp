#pragma once

#include <complex>
#include <vector>

#include "rrat/error.hpp"

namespace rrat {

/// All complex roots of a polynomial (coefficients in increasing degree,
/// double precision) by the Durand-Kerner iteration. Deterministic:
/// fixed starting configuration and iteration count. Adequate for the
/// small characteristic polynomials used here.
inline std::vector<std::complex<double>> poly_roots(std::vector<std::complex<double>> c) {
    while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
    std::size_t n = c.size() - 1;
    if (n == 0) return {};
    for (auto& x : c) x /= c.back();
    // radius bound: 1 + max |c_i|
    double radius = 0;
    for (std::size_t i = 0; i < n; ++i) radius = std::max(radius, std::abs(c[i]));
    radius = 1 + radius;
    std::vector<std::complex<double>> z(n);
    const std::complex<double> seed(0.4, 0.9);  // conventional non-real starting ratio
    std::complex<double> p = 1;
    for (std::size_t i = 0; i < n; ++i) {
        p *= seed;
        z[i] = p * radius / std::abs(p);
    }
    auto eval = [&](std::complex<double> x) {
        std::complex<double> r = 0;
        for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
        return r;
    };
    for (int iter = 0; iter < 200; ++iter) {
        double moved = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> num = eval(z[i]);
            std::complex<double> den = 1;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) den *= z[i] - z[j];
            if (std::abs(den) == 0.0) continue;
            std::complex<double> step = num / den;
            z[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-14 * (1 + radius)) break;
    }
    return z;
}

}  // namespace rrat
