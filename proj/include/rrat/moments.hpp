#pragma once

#include <vector>

#include "rrat/charpoly.hpp"
#include "rrat/linrep.hpp"

namespace rrat {

/// Exact moments M_l = int_0^1 F(z) z^{l-1} dz and partial moments
/// M_{l,r} = int_{r/B}^{(r+1)/B} F(z) z^{l-1} dz of the dilation solution
/// of one Jordan chain, computed from the moment recursions without any
/// grid values. Valid while no B^l lambda is an eigenvalue of Q.
/// Tables extend in place; computed entries never change.
struct MomentTable {
    unsigned radix = 2;
    Rational lambda = 0;
    std::size_t nu = 1;
    unsigned L_max = 0;
    Matrix<Rational> V;                                  // chain vectors, d x nu
    std::vector<Matrix<Rational>> full;                  // index l-1, each d x nu
    std::vector<std::vector<Matrix<Rational>>> partial;  // [l-1][r], each d x nu
};

/// Columns solve, in order j = 0..nu-1 within increasing l,
///   (B^l lambda I - Q) M_l^j = -B^l M_l^{j-1}
///       + (1/l) sum_{b<B-1} (B^l - (b+1)^l) W_b^j
///       + sum_{k<l} binom(l-1,k-1) (sum_r r^{l-k} A_r) M_k^j,
/// and the partial moments from
///   M_{l,r} J = sum_{b<r} ((r+1)^l - r^l)/(l B^l) W_b
///       + B^{-l} A_r sum_{k<=l} binom(l-1,k-1) r^{l-k} M_k,
/// whose inner sum is the full recursion's plus the k = l term.
inline void extend_moments(const LinearRepQ& rep, MomentTable& mt, unsigned L_new) {
    if (L_new <= mt.L_max) return;
    const std::size_t d = rep.dim;
    const std::size_t nu = mt.nu;
    const unsigned B = rep.radix;
    const Rational& lambda = mt.lambda;

    Matrix<Rational> q = q_matrix(rep);
    std::vector<Rational> cp = char_poly(q);
    {
        Rational point = lambda * int_pow(Int(B), mt.L_max);
        for (unsigned l = mt.L_max + 1; l <= L_new; ++l) {
            point *= B;
            if (poly_eval(cp, point) == 0)
                throw UnsupportedError("moments: resonance, B^l * lambda is an eigenvalue of Q "
                                       "at l = " + std::to_string(l));
        }
    }

    std::vector<Matrix<Rational>> W(B);  // W_b = A_b V
    for (unsigned b = 0; b < B; ++b) W[b] = rep.A[b] * mt.V;

    mt.full.reserve(L_new);
    mt.partial.reserve(L_new);
    Int Bl = int_pow(Int(B), mt.L_max);
    for (unsigned l = mt.L_max + 1; l <= L_new; ++l) {
        Bl *= B;
        // inner_r = sum_{k<l} binom(l-1,k-1) r^{l-k} M_k, shared between the
        // full recursion and (with the k = l term added) the partial one
        std::vector<Matrix<Rational>> inner(B, Matrix<Rational>(d, nu));
        for (unsigned r = 1; r < B; ++r) {
            Rational weight;
            Int rpow(1);
            for (unsigned k = l - 1; k >= 1; --k) {
                rpow *= r;  // r^{l-k}
                weight = Rational(binomial(l - 1, k - 1) * rpow);
                inner[r] += mt.full[k - 1] * weight;
                if (k == 1) break;
            }
        }

        // full moments, columns feeding -B^l M_l^{j-1}
        Matrix<Rational> x = q;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t jj = 0; jj < d; ++jj) x(i, jj) = -x(i, jj);
        for (std::size_t i = 0; i < d; ++i) x(i, i) += Rational(Bl) * lambda;
        Matrix<Rational> rhs(d, nu);
        for (unsigned b = 0; b + 1 < B; ++b)
            rhs += W[b] * Rational(Bl - int_pow(Int(b + 1), l), Int(l));
        for (unsigned r = 1; r < B; ++r)
            if (!inner[r].is_zero()) rhs += rep.A[r] * inner[r];
        Matrix<Rational> ml(d, nu);
        for (std::size_t j = 0; j < nu; ++j) {
            Vec<Rational> col(d);
            for (std::size_t i = 0; i < d; ++i) {
                col[i] = rhs(i, j);
                if (j > 0) col[i] -= Rational(Bl) * ml(i, j - 1);
            }
            ml.set_column(j, solve_linear(x, col));
        }
        mt.full.push_back(std::move(ml));
        const Matrix<Rational>& mfull = mt.full.back();

        // partial moments: lambda M^j_{l,r} + M^{j-1}_{l,r} = rhs_j
        std::vector<Matrix<Rational>> row(B, Matrix<Rational>(d, nu));
        for (unsigned r = 0; r < B; ++r) {
            Matrix<Rational> prhs(d, nu);
            for (unsigned b = 0; b < r; ++b)
                prhs += W[b] * Rational(int_pow(Int(r + 1), l) - int_pow(Int(r), l), Int(l) * Bl);
            Matrix<Rational> full_inner = inner[r] + mfull;  // adds the k = l term (r^0 = 1)
            prhs += (rep.A[r] * full_inner) * Rational(1, Bl);
            Matrix<Rational>& mlr = row[r];
            for (std::size_t j = 0; j < nu; ++j)
                for (std::size_t i = 0; i < d; ++i) {
                    Rational v = prhs(i, j);
                    if (j > 0) v -= mlr(i, j - 1);
                    mlr(i, j) = v / lambda;
                }
        }
        mt.partial.push_back(std::move(row));
        mt.L_max = l;
    }
}

inline MomentTable moments(const LinearRepQ& rep, const Rational& lambda,
                           const Matrix<Rational>& chain_vectors, unsigned L_max) {
    rep.check();
    if (lambda == 0) throw InputError("moments: lambda must be nonzero");
    if (chain_vectors.rows() != rep.dim)
        throw InputError("moments: chain vector shape mismatch");
    MomentTable mt;
    mt.radix = rep.radix;
    mt.lambda = lambda;
    mt.nu = chain_vectors.cols();
    mt.V = chain_vectors;
    extend_moments(rep, mt, L_max);
    return mt;
}

/// Exact residuals of both defining recursions in their matrix form (with
/// J on the left), plus the partition identity sum_r M_{l,r} = M_l. Zero
/// for a correct table; written independently of the solver above.
inline Rational moment_recursion_residual(const LinearRepQ& rep, const MomentTable& mt) {
    Rational worst(0);
    const unsigned B = rep.radix;
    const std::size_t d = rep.dim;
    Matrix<Rational> q = q_matrix(rep);
    Matrix<Rational> j(mt.nu, mt.nu);
    for (std::size_t i = 0; i < mt.nu; ++i) {
        j(i, i) = mt.lambda;
        if (i + 1 < mt.nu) j(i, i + 1) = 1;
    }
    std::vector<Matrix<Rational>> W(B);
    for (unsigned b = 0; b < B; ++b) W[b] = rep.A[b] * mt.V;

    Int Bl(1);
    for (unsigned l = 1; l <= mt.L_max; ++l) {
        Bl *= B;
        // full recursion: B^l M_l J - Q M_l = base + cross
        Matrix<Rational> lhs = (mt.full[l - 1] * j) * Rational(Bl) - q * mt.full[l - 1];
        for (unsigned b = 0; b + 1 < B; ++b)
            lhs -= W[b] * Rational(Bl - int_pow(Int(b + 1), l), Int(l));
        for (unsigned r = 1; r < B; ++r) {
            Matrix<Rational> inner(d, mt.nu);
            for (unsigned k = 1; k < l; ++k)
                inner += mt.full[k - 1] * Rational(binomial(l - 1, k - 1) * int_pow(Int(r), l - k));
            if (!inner.is_zero()) lhs -= rep.A[r] * inner;
        }
        worst = std::max(worst, max_abs(lhs));

        // partial recursion and the partition identity
        Matrix<Rational> partition(d, mt.nu);
        for (unsigned r = 0; r < B; ++r) {
            partition += mt.partial[l - 1][r];
            Matrix<Rational> plhs = mt.partial[l - 1][r] * j;
            for (unsigned b = 0; b < r; ++b)
                plhs -= W[b] * Rational(int_pow(Int(r + 1), l) - int_pow(Int(r), l), Int(l) * Bl);
            Matrix<Rational> inner(d, mt.nu);
            for (unsigned k = 1; k <= l; ++k) {
                Int re = (l == k) ? Int(1) : int_pow(Int(r), l - k);
                if (re == 0) continue;
                inner += mt.full[k - 1] * Rational(binomial(l - 1, k - 1) * re);
            }
            if (!inner.is_zero()) plhs -= (rep.A[r] * inner) * Rational(1, Bl);
            worst = std::max(worst, max_abs(plhs));
        }
        worst = std::max(worst, max_abs(partition - mt.full[l - 1]));
    }
    return worst;
}

}  // namespace rrat
