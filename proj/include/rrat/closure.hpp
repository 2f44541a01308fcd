#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <utility>

#include "rrat/linrep.hpp"

namespace rrat {

/// Builds a linear representation of a B-rational sequence from a value
/// oracle, closing the sequence under the multisection operators
/// n -> Bn+r breadth-first. Dependence between multisections is decided by
/// exact elimination on the first `window` terms; the finished
/// representation is re-verified against the oracle on a 4x longer window,
/// so a spurious finite-window dependence is reported rather than returned.
/// The result is zero-insensitive by construction ((T_0 v)_0 = v_0).
inline LinearRepQ close_under_multisection(const SequenceOracle& oracle, unsigned radix,
                                           std::size_t window, std::size_t dim_cap) {
    if (radix < 2) throw InputError("close_under_multisection: radix must be >= 2");
    if (window < dim_cap)
        throw InputError("close_under_multisection: window must be at least dim_cap");

    // A candidate sequence is n -> oracle(scale*n + offset) with scale = B^k.
    struct Candidate {
        std::uint64_t scale, offset;
        std::size_t parent;  // basis index whose child this is
        unsigned digit;      // which multisection produced it
    };
    auto sample = [&](const Candidate& c) {
        Vec<Rational> v(window);
        for (std::size_t n = 0; n < window; ++n) v[n] = oracle(c.scale * n + c.offset);
        return v;
    };

    LinearRepQ rep;
    rep.radix = radix;

    auto verify = [&](const LinearRepQ& r) {
        // A dependence decided on the finite window may be spurious; catch
        // it on a 4x window instead of propagating.
        for (std::uint64_t n = 0; n < 4 * window; ++n) {
            if (eval_seq(r, n) != oracle(n))
                throw ValidationError(
                    "close_under_multisection: verification failed at index n=" +
                    std::to_string(n) +
                    " (finite-window dependence was spurious; increase window)");
        }
    };

    Candidate root{1, 0, 0, 0};
    Vec<Rational> root_window = sample(root);
    if (is_zero_vec(root_window)) {
        rep.dim = 0;
        rep.A.assign(radix, Matrix<Rational>(0, 0));
        verify(rep);  // the null sequence has dimension 0
        return rep;
    }

    // Row-reduced window matrix of the basis found so far. transform[r]
    // expresses reduced row r over the raw basis sequences.
    std::vector<Vec<Rational>> reduced;
    std::vector<Vec<Rational>> transform;
    std::vector<std::size_t> pivot_of_row;
    std::size_t basis_count = 0;

    struct Reduction {
        bool dependent;
        Vec<Rational> coords;    // combination of basis sequences subtracted
        Vec<Rational> residual;  // what is left of the window
    };
    auto reduce = [&](Vec<Rational> v) {
        Vec<Rational> coords(basis_count, Rational(0));
        for (std::size_t r = 0; r < reduced.size(); ++r) {
            Rational f = v[pivot_of_row[r]];
            if (f == 0) continue;  // reduced rows have pivot value 1
            for (std::size_t n = 0; n < window; ++n)
                if (reduced[r][n] != 0) v[n] -= f * reduced[r][n];
            for (std::size_t b = 0; b < basis_count; ++b)
                if (transform[r][b] != 0) coords[b] += f * transform[r][b];
        }
        return Reduction{is_zero_vec(v), std::move(coords), std::move(v)};
    };

    std::deque<Candidate> queue;
    std::vector<std::pair<std::size_t, unsigned>> processed;  // (parent, digit)
    std::vector<Vec<Rational>> child_coords;
    Vec<Rational> values_at_zero;

    // new basis sequence = coords * basis + residual
    auto add_basis = [&](const Candidate& c, Vec<Rational> residual, const Vec<Rational>& coords,
                         Rational value_at_zero) {
        std::size_t idx = basis_count++;
        values_at_zero.push_back(std::move(value_at_zero));
        std::size_t piv = 0;
        while (residual[piv] == 0) ++piv;
        Rational lead = residual[piv];
        for (auto& x : residual) x /= lead;
        Vec<Rational> tr(basis_count, Rational(0));
        tr[idx] = Rational(1) / lead;
        for (std::size_t b = 0; b < coords.size(); ++b) tr[b] = -coords[b] / lead;
        reduced.push_back(std::move(residual));
        for (auto& t : transform) t.resize(basis_count, Rational(0));
        transform.push_back(std::move(tr));
        pivot_of_row.push_back(piv);
        for (unsigned b = 0; b < radix; ++b)
            queue.push_back({c.scale * radix, c.offset + std::uint64_t(b) * c.scale, idx, b});
        return idx;
    };

    add_basis(root, root_window, {}, root_window[0]);

    while (!queue.empty()) {
        Candidate c = queue.front();
        queue.pop_front();
        Vec<Rational> w = sample(c);
        Rational w0 = w[0];
        Reduction red = reduce(std::move(w));
        processed.emplace_back(c.parent, c.digit);
        if (red.dependent) {
            child_coords.push_back(std::move(red.coords));
        } else {
            if (basis_count >= dim_cap)
                throw InputError(
                    "close_under_multisection: dimension cap exceeded (sequence is not "
                    "B-rational at this cap, or the window is too small)");
            std::size_t idx = add_basis(c, std::move(red.residual), red.coords, w0);
            Vec<Rational> e(basis_count, Rational(0));
            e[idx] = 1;
            child_coords.push_back(std::move(e));
        }
    }

    std::size_t d = basis_count;
    rep.dim = d;
    rep.A.assign(radix, Matrix<Rational>(d, d));
    for (std::size_t i = 0; i < processed.size(); ++i) {
        auto [parent, digit] = processed[i];
        Vec<Rational> coords = std::move(child_coords[i]);
        coords.resize(d, Rational(0));
        rep.A[digit].set_column(parent, coords);
    }
    rep.L = values_at_zero;
    rep.C.assign(d, Rational(0));
    rep.C[0] = 1;

    verify(rep);
    return rep;
}

}  // namespace rrat
