#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "rrat/charpoly.hpp"
#include "rrat/matrix.hpp"
#include "rrat/rational.hpp"

namespace rrat {

/// An eigenvalue of Q, exact rational or a flagged approximation.
struct Eigenvalue {
    bool exact = true;
    Rational value = 0;                 // meaningful when exact
    std::complex<double> approx{0, 0};  // always filled
    double error_radius = 0;

    double modulus() const { return exact ? std::abs(to_double(value)) : std::abs(approx); }
    /// theta with lambda = rho * e^{i theta}; exact values are real, so 0 or pi.
    double phase() const {
        if (exact) return value < 0 ? std::acos(-1.0) : 0.0;
        return std::arg(approx);
    }
};

struct JordanChain {
    Eigenvalue lambda;
    std::size_t size = 0;       // nu
    std::size_t first_col = 0;  // column of V^{(0)} in P
};

/// Jordan data for Q: chains, change of basis P (columns are the chain
/// vectors V^{(0)}..V^{(nu-1)} in chain order), the Jordan matrix Lambda
/// with Q*P = P*Lambda, and after decompose_c the coordinates gamma of C.
struct JordanDecomposition {
    std::vector<JordanChain> chains;
    Matrix<Rational> P, Lambda;
    Vec<Rational> gamma;
    bool approximate = false;
    double residual = 0;  // ||QP - P Lambda||_max on the numeric path
};

namespace detail {

// Incremental exact span with leftmost-pivot elimination; insert() returns
// true when v was independent and got added.
class Span {
public:
    explicit Span(std::size_t n) : n_(n) {}
    bool insert(Vec<Rational> v) {
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (v[pivots_[r]] == 0) continue;
            Rational f = v[pivots_[r]];
            for (std::size_t j = 0; j < n_; ++j)
                if (rows_[r][j] != 0) v[j] -= f * rows_[r][j];
        }
        std::size_t piv = 0;
        while (piv < n_ && v[piv] == 0) ++piv;
        if (piv == n_) return false;
        Rational lead = v[piv];
        for (auto& x : v) x /= lead;
        rows_.push_back(std::move(v));
        pivots_.push_back(piv);
        return true;
    }
    bool contains(Vec<Rational> v) {
        Span copy = *this;
        return !copy.insert(std::move(v));
    }
    std::size_t dim() const { return rows_.size(); }

private:
    std::size_t n_;
    std::vector<Vec<Rational>> rows_;
    std::vector<std::size_t> pivots_;
};

}  // namespace detail

/// Exact Jordan decomposition over the rationals. Requires the
/// characteristic polynomial to split over Q; otherwise throws and the
/// caller may opt into the numeric fallback (jordan_numeric.hpp).
inline JordanDecomposition jordan_decompose(const Matrix<Rational>& q) {
    std::size_t d = q.rows();
    if (q.cols() != d) throw InputError("jordan_decompose: matrix must be square");
    std::vector<Rational> rem;
    std::map<Rational, unsigned> roots = rational_roots(char_poly(q), &rem);
    if (rem.size() > 1)
        throw UnsupportedError(
            "jordan_decompose: irrational eigenvalues present; exact Jordan form over Q is "
            "unavailable (numeric fallback requires explicit opt-in)");

    // eigenvalue order: decreasing modulus, then decreasing value
    std::vector<std::pair<Rational, unsigned>> eigs(roots.begin(), roots.end());
    std::sort(eigs.begin(), eigs.end(), [](const auto& a, const auto& b) {
        Rational ma = rat_abs(a.first), mb = rat_abs(b.first);
        if (ma != mb) return ma > mb;
        return a.first > b.first;
    });

    JordanDecomposition jd;
    jd.P = Matrix<Rational>(d, d);
    jd.Lambda = Matrix<Rational>(d, d);
    std::size_t col = 0;

    for (const auto& [lambda, mult] : eigs) {
        Matrix<Rational> m = q;
        for (std::size_t i = 0; i < d; ++i) m(i, i) -= lambda;
        // kernel filtration of (Q - lambda I)^k up to the full root space
        std::vector<Matrix<Rational>> kernels;  // kernels[k-1] = basis of ker M^k
        Matrix<Rational> mk = m;
        while (true) {
            kernels.push_back(kernel_basis(mk));
            if (kernels.back().cols() >= mult) break;
            mk = mk * m;
        }
        std::size_t height = kernels.size();

        // chains found at this eigenvalue: pairs (top vector, height)
        std::vector<std::pair<Vec<Rational>, std::size_t>> tops;
        for (std::size_t k = height; k >= 1; --k) {
            detail::Span span(d);
            if (k >= 2)
                for (std::size_t j = 0; j < kernels[k - 2].cols(); ++j)
                    span.insert(kernels[k - 2].column(j));
            for (const auto& [top, h] : tops) {
                // the chain's vector at height k is M^{h-k} top
                Vec<Rational> v = top;
                for (std::size_t i = 0; i < h - k; ++i) v = m * v;
                span.insert(std::move(v));
            }
            for (std::size_t j = 0; j < kernels[k - 1].cols(); ++j) {
                Vec<Rational> u = kernels[k - 1].column(j);
                if (span.insert(u)) tops.emplace_back(std::move(u), k);
            }
        }
        std::sort(tops.begin(), tops.end(),
                  [](const auto& a, const auto& b) { return a.second > b.second; });

        for (const auto& [top, h] : tops) {
            JordanChain chain;
            chain.lambda.exact = true;
            chain.lambda.value = lambda;
            chain.lambda.approx = {to_double(lambda), 0.0};
            chain.size = h;
            chain.first_col = col;
            // V^{(j)} = M^{h-1-j} top, so V^{(0)} is the eigenvector
            std::vector<Vec<Rational>> vs(h);
            vs[h - 1] = top;
            for (std::size_t j = h - 1; j-- > 0;) vs[j] = m * vs[j + 1];
            for (std::size_t j = 0; j < h; ++j) {
                jd.P.set_column(col + j, vs[j]);
                jd.Lambda(col + j, col + j) = lambda;
                if (j + 1 < h) jd.Lambda(col + j, col + j + 1) = 1;
            }
            col += h;
            jd.chains.push_back(std::move(chain));
        }
    }
    if (col != d)
        throw InputError("jordan_decompose: internal error, chain vectors do not fill the space");
    if (!(q * jd.P == jd.P * jd.Lambda))
        throw InputError("jordan_decompose: internal error, Q*P != P*Lambda");
    return jd;
}

/// Builds a decomposition from an explicitly given basis P and Jordan
/// matrix Lambda (e.g. a published basis shipped as a fixture). Chains are
/// read off Lambda's superdiagonal; the caller's Q is checked against
/// Q*P = P*Lambda exactly.
inline JordanDecomposition jordan_from_matrices(const Matrix<Rational>& q,
                                                const Matrix<Rational>& p,
                                                const Matrix<Rational>& lambda) {
    std::size_t d = q.rows();
    if (p.rows() != d || p.cols() != d || lambda.rows() != d || lambda.cols() != d)
        throw InputError("jordan_from_matrices: shape mismatch");
    if (!(q * p == p * lambda))
        throw ValidationError("jordan_from_matrices: Q*P != P*Lambda for the supplied basis");
    JordanDecomposition jd;
    jd.P = p;
    jd.Lambda = lambda;
    std::size_t col = 0;
    while (col < d) {
        JordanChain chain;
        chain.lambda.exact = true;
        chain.lambda.value = lambda(col, col);
        chain.lambda.approx = {to_double(lambda(col, col)), 0.0};
        chain.first_col = col;
        std::size_t len = 1;
        while (col + len < d && lambda(col + len - 1, col + len) == 1 &&
               lambda(col + len, col + len) == lambda(col, col))
            ++len;
        chain.size = len;
        col += len;
        jd.chains.push_back(std::move(chain));
    }
    return jd;
}

/// Expands C over the Jordan basis: returns gamma with P*gamma = C, and
/// stores it in the decomposition.
inline Vec<Rational> decompose_c(JordanDecomposition& jd, const Vec<Rational>& c) {
    if (jd.approximate)
        throw UnsupportedError("decompose_c requires an exact Jordan decomposition");
    jd.gamma = solve_linear(jd.P, c);
    return jd.gamma;
}

/// Matrix of the chain vectors V^{(0)}..V^{(nu-1)} of one chain (d x nu).
inline Matrix<Rational> chain_vectors(const JordanDecomposition& jd, const JordanChain& chain) {
    Matrix<Rational> v(jd.P.rows(), chain.size);
    for (std::size_t j = 0; j < chain.size; ++j)
        v.set_column(j, jd.P.column(chain.first_col + j));
    return v;
}

}  // namespace rrat
