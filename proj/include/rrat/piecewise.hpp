#pragma once

#include <vector>

#include "rrat/dilation.hpp"
#include "rrat/rational.hpp"

namespace rrat {

/// A piecewise polynomial on [0,1] with rational breakpoints, used for
/// user-supplied closed forms of dilation-solution components. Adjacent
/// pieces must agree at the shared breakpoints (checked).
struct PiecewisePoly {
    std::vector<Rational> breakpoints;            // 0 = b_0 < ... < b_m = 1
    std::vector<std::vector<Rational>> pieces;    // coefficients, increasing degree

    void check() const {
        if (breakpoints.size() != pieces.size() + 1 || pieces.empty())
            throw InputError("piecewise polynomial: breakpoint/piece count mismatch");
        if (breakpoints.front() != 0 || breakpoints.back() != 1)
            throw InputError("piecewise polynomial: must cover [0,1]");
        for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
            if (!(breakpoints[i] < breakpoints[i + 1]))
                throw InputError("piecewise polynomial: breakpoints not increasing");
        for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
            if (eval_piece(i, breakpoints[i + 1]) != eval_piece(i + 1, breakpoints[i + 1]))
                throw InputError("piecewise polynomial: discontinuous at a breakpoint");
        }
    }

    Rational eval_piece(std::size_t i, const Rational& x) const {
        Rational r(0);
        const auto& c = pieces[i];
        for (std::size_t k = c.size(); k-- > 0;) r = r * x + c[k];
        return r;
    }

    Rational operator()(const Rational& x) const {
        if (x <= 0) return eval_piece(0, breakpoints.front());
        for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
            if (x <= breakpoints[i + 1]) return eval_piece(i, x);
        return eval_piece(pieces.size() - 1, breakpoints.back());
    }

    static PiecewisePoly single(std::vector<Rational> coeffs) {
        PiecewisePoly p;
        p.breakpoints = {0, 1};
        p.pieces = {std::move(coeffs)};
        return p;
    }
};

/// Substitution check for a candidate closed form of the scalar primitive
/// row * F^{(q)}: exact equality against the cascade grid at every stored
/// point. The grid is closed under the dilation recursion, so agreement on
/// it is the practical form of "verify by a mere substitution".
inline bool verify_closed_form(const Vec<Rational>& row, const DilationSolution& sol, unsigned q,
                               const PiecewisePoly& candidate) {
    candidate.check();
    for (const auto& [x, f] : sol.values) {
        Rational v(0);
        for (std::size_t i = 0; i < row.size(); ++i) v += row[i] * f(i, q);
        if (v != candidate(x)) return false;
    }
    return true;
}

}  // namespace rrat
