#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "rrat/jordan.hpp"
#include "rrat/linrep.hpp"

namespace rrat {

/// The nu x nu Jordan cell for a rational eigenvalue.
inline Matrix<Rational> jordan_cell(const Rational& lambda, std::size_t nu) {
    Matrix<Rational> j(nu, nu);
    for (std::size_t i = 0; i < nu; ++i) {
        j(i, i) = lambda;
        if (i + 1 < nu) j(i, i + 1) = 1;
    }
    return j;
}

/// Exact inverse of the Jordan cell: upper triangular with
/// (J^{-1})_{ij} = (-1)^{j-i} lambda^{-(j-i+1)}.
inline Matrix<Rational> jordan_cell_inverse(const Rational& lambda, std::size_t nu) {
    if (lambda == 0) throw InputError("jordan_cell_inverse: eigenvalue must be nonzero");
    Matrix<Rational> inv(nu, nu);
    for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t j = i; j < nu; ++j) {
            Rational v = rat_pow(lambda, -long(j - i + 1));
            if ((j - i) % 2 == 1) v = -v;
            inv(i, j) = v;
        }
    return inv;
}

/// Values of the matrix dilation solution F on a depth-K B-adic grid for
/// one Jordan chain: F(x) J = sum_b A_b F(Bx - b) with the boundary
/// extension F = 0 left of 0 and F = V right of 1, so F(0) = 0, F(1) = V.
/// Exact rationals for rational eigenvalues.
struct DilationSolution {
    unsigned radix = 2;
    Rational lambda = 0;  // rho * omega, rational (omega = +-1)
    std::size_t nu = 1;
    Matrix<Rational> V;  // d x nu chain vectors
    unsigned depth = 0;
    std::map<Rational, Matrix<Rational>> values;  // x -> F(x), d x nu
    bool exact = true;

    const Matrix<Rational>& at(const Rational& x) const {
        auto it = values.find(x);
        if (it == values.end()) throw InputError("dilation grid: point not stored");
        return it->second;
    }
};

namespace detail {

// sum_{b' < b} A_{b'} for b = 0..B-1
inline std::vector<Matrix<Rational>> digit_prefix_sums(const LinearRepQ& rep) {
    std::vector<Matrix<Rational>> ps(rep.radix, Matrix<Rational>(rep.dim, rep.dim));
    for (unsigned b = 1; b < rep.radix; ++b) ps[b] = ps[b - 1] + rep.A[b - 1];
    return ps;
}

}  // namespace detail

/// Runs the cascade: having all values at depth k, each new point
/// x = i/B^{k+1} gets F(x) = [sum_{b<x_1} A_b V + A_{x_1} F(Bx - x_1)] J^{-1},
/// where x_1 is the first mantissa digit and Bx - x_1 lies on the depth-k
/// grid. Refining a grid extends it; existing values never change.
inline DilationSolution cascade_solve(const LinearRepQ& rep, const Eigenvalue& lambda,
                                      std::size_t nu, const Matrix<Rational>& chain_vectors,
                                      unsigned depth) {
    if (!lambda.exact)
        throw UnsupportedError("cascade_solve: exact mode requires a rational eigenvalue");
    if (lambda.value == 0) throw InputError("cascade_solve: rho = 0 cell is not invertible");
    if (chain_vectors.rows() != rep.dim || chain_vectors.cols() != nu)
        throw InputError("cascade_solve: chain vector shape mismatch");

    DilationSolution sol;
    sol.radix = rep.radix;
    sol.lambda = lambda.value;
    sol.nu = nu;
    sol.V = chain_vectors;
    sol.depth = depth;
    sol.values[Rational(0)] = Matrix<Rational>(rep.dim, nu);
    sol.values[Rational(1)] = chain_vectors;

    Matrix<Rational> jinv = jordan_cell_inverse(lambda.value, nu);
    auto prefix = detail::digit_prefix_sums(rep);
    std::vector<Matrix<Rational>> head(rep.radix);  // (sum_{b<x1} A_b) V, per first digit
    for (unsigned b = 0; b < rep.radix; ++b) head[b] = prefix[b] * chain_vectors;

    const unsigned B = rep.radix;
    Int denom = B;
    for (unsigned k = 0; k < depth; ++k, denom *= B) {
        Int step_den = denom;  // B^{k+1}
        for (Int i = 1; i < step_den; ++i) {
            if (i % B == 0) continue;  // already on a coarser grid
            Rational x(i, step_den);
            Rational bx = x * B;
            Int x1 = numerator(bx) / denominator(bx);  // floor, x in (0,1)
            Rational y = bx - Rational(x1);
            unsigned d1 = static_cast<unsigned>(x1);
            Matrix<Rational> f = head[d1] + rep.A[d1] * sol.at(y);
            sol.values.emplace(std::move(x), f * jinv);
        }
    }
    return sol;
}

struct EvalF {
    Matrix<Rational> value;
    bool exact = true;
    double error_bound = 0;  // 0 when exact
};

struct HolderReport {
    double alpha = 0;
    double constant = 0;  // max ||F(y)-F(x)|| / |y-x|^alpha over tested pairs
    double cap = std::numeric_limits<double>::infinity();
    bool pass = true;
};

/// Evaluates F at a point of [0,1]. B-adic points are computed exactly,
/// refining locally through the recursion when x is finer than the stored
/// grid (grid values are never touched). Other points snap to the nearest
/// grid point; the result is flagged with the Holder resolution bound
/// c * (B^{-K})^alpha when a report is supplied.
inline EvalF evaluate_F(const LinearRepQ& rep, const DilationSolution& sol, const Rational& x,
                        unsigned refine_cap = 64, const HolderReport* holder = nullptr) {
    if (x <= 0) return {Matrix<Rational>(rep.dim, sol.nu), true, 0};
    if (x >= 1) return {sol.V, true, 0};
    if (auto it = sol.values.find(x); it != sol.values.end()) return {it->second, true, 0};

    // B-adic iff the denominator is a power of B (in lowest terms)
    Int den = denominator(x);
    unsigned levels = 0;
    while (den % sol.radix == 0) {
        den /= sol.radix;
        ++levels;
    }
    if (den == 1) {
        if (levels > refine_cap) throw InputError("evaluate_F: refinement depth cap exceeded");
        Matrix<Rational> jinv = jordan_cell_inverse(sol.lambda, sol.nu);
        auto prefix = detail::digit_prefix_sums(rep);
        std::function<Matrix<Rational>(const Rational&, unsigned)> go =
            [&](const Rational& xx, unsigned budget) -> Matrix<Rational> {
            if (xx <= 0) return Matrix<Rational>(rep.dim, sol.nu);
            if (xx >= 1) return sol.V;
            if (auto it = sol.values.find(xx); it != sol.values.end()) return it->second;
            if (budget == 0) throw InputError("evaluate_F: refinement depth cap exceeded");
            Rational bx = xx * sol.radix;
            Int x1 = numerator(bx) / denominator(bx);
            unsigned d1 = static_cast<unsigned>(x1);
            return (prefix[d1] * sol.V + rep.A[d1] * go(bx - Rational(x1), budget - 1)) * jinv;
        };
        return {go(x, refine_cap), true, 0};
    }

    // not B-adic: nearest grid point at the stored depth
    Int scale = int_pow(Int(sol.radix), sol.depth);
    Rational scaled = x * Rational(scale);
    Int j = numerator(scaled) / denominator(scaled);
    Rational lo(j, scale), hi(j + 1, scale);
    Rational snap = (x - lo <= hi - x) ? lo : hi;
    double bound = std::numeric_limits<double>::infinity();
    if (holder)
        bound = holder->constant * std::pow(std::pow(double(sol.radix), -double(sol.depth)),
                                            holder->alpha);
    return {sol.at(snap), false, bound};
}

/// Max-entry norm of F(x) J - sum_b A_b F(Bx - b) over all grid points;
/// identically zero in exact mode, so any nonzero entry localizes a defect.
inline Rational fixed_point_residual(const LinearRepQ& rep, const DilationSolution& sol) {
    Matrix<Rational> j = jordan_cell(sol.lambda, sol.nu);
    Rational worst(0);
    for (const auto& [x, f] : sol.values) {
        Matrix<Rational> lhs = f * j;
        for (unsigned b = 0; b < rep.radix; ++b) {
            Rational arg = x * rep.radix - b;
            Matrix<Rational> fb(rep.dim, sol.nu);
            if (arg >= 1)
                fb = sol.V;
            else if (arg > 0)
                fb = sol.at(arg);
            lhs -= rep.A[b] * fb;
        }
        Rational m = max_abs(lhs);
        if (m > worst) worst = m;
    }
    return worst;
}

/// Largest increment of F at each dyadic scale B^{-k}, k = 1..depth
/// (max over adjacent pairs of the coarser grids), as doubles.
inline std::vector<double> scale_increments(const DilationSolution& sol) {
    std::vector<double> out;
    for (unsigned k = 1; k <= sol.depth; ++k) {
        Int den = int_pow(Int(sol.radix), k);
        double worst = 0;
        Matrix<Rational> prev = sol.at(Rational(0));
        for (Int i = 1; i <= den; ++i) {
            const Matrix<Rational>& cur = sol.at(Rational(i, den));
            worst = std::max(worst, to_double(max_abs(cur - prev)));
            prev = cur;
        }
        out.push_back(worst);
    }
    return out;
}

/// Empirical Holder constant at exponent alpha over adjacent grid pairs and
/// all dyadic-scale pairs (x, x + B^{-k}).
inline HolderReport holder_estimate(const DilationSolution& sol, double alpha,
                                    double cap = std::numeric_limits<double>::infinity()) {
    if (!(alpha > 0) || alpha > 1) throw InputError("holder_estimate: need 0 < alpha <= 1");
    HolderReport rep;
    rep.alpha = alpha;
    rep.cap = cap;
    auto incs = scale_increments(sol);
    for (unsigned k = 1; k <= sol.depth; ++k) {
        double h = std::pow(double(sol.radix), -double(k));
        rep.constant = std::max(rep.constant, incs[k - 1] / std::pow(h, alpha));
    }
    rep.pass = rep.constant <= cap;
    return rep;
}

/// Least-squares slope of log(max increment) against the scale index,
/// i.e. the grid estimate of the Holder exponent.
inline double holder_exponent_estimate(const DilationSolution& sol) {
    auto incs = scale_increments(sol);
    double logB = std::log(double(sol.radix));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (unsigned k = 1; k <= sol.depth; ++k) {
        if (incs[k - 1] <= 0) continue;
        double xk = double(k), yk = std::log(incs[k - 1]);
        sx += xk;
        sy += yk;
        sxx += xk * xk;
        sxy += xk * yk;
        ++n;
    }
    if (n < 2) return 0;
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -slope / logB;
}

}  // namespace rrat
