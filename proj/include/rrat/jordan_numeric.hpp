#pragma once

#include <complex>
#include <vector>

#include "rrat/charpoly.hpp"
#include "rrat/jordan.hpp"
#include "rrat/polyroots.hpp"

namespace rrat {

/// Numeric (double precision) Jordan data for matrices whose eigenvalues
/// are not all rational. Opt-in fallback: every result is flagged
/// approximate and carries the residual max|QP - P Lambda|. Downstream
/// consumers must treat anything built from it as approximate too.
struct NumericJordan {
    std::vector<JordanChain> chains;  // lambda entries have exact = false
    Matrix<std::complex<double>> P, Lambda;
    double residual = 0;
    double cluster_separation = 0;
};

namespace detail {

using CD = std::complex<double>;

inline std::size_t complex_rank(Matrix<CD> m, double tol) {
    std::size_t rank = 0;
    for (std::size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
        std::size_t piv = rank;
        double best = 0;
        for (std::size_t r = rank; r < m.rows(); ++r)
            if (std::abs(m(r, col)) > best) {
                best = std::abs(m(r, col));
                piv = r;
            }
        if (best <= tol) continue;
        for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(rank, j));
        CD inv = m(rank, col);
        for (std::size_t j = col; j < m.cols(); ++j) m(rank, j) /= inv;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r == rank) continue;
            CD f = m(r, col);
            if (std::abs(f) == 0) continue;
            for (std::size_t j = col; j < m.cols(); ++j) m(r, j) -= f * m(rank, j);
        }
        ++rank;
    }
    return rank;
}

// numeric kernel basis via elimination with a pivot threshold
inline Matrix<CD> complex_kernel(Matrix<CD> m, double tol) {
    std::size_t n = m.cols();
    std::vector<std::size_t> pivots;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < n && rank < m.rows(); ++col) {
        std::size_t piv = rank;
        double best = 0;
        for (std::size_t r = rank; r < m.rows(); ++r)
            if (std::abs(m(r, col)) > best) {
                best = std::abs(m(r, col));
                piv = r;
            }
        if (best <= tol) continue;
        for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(rank, j));
        CD inv = m(rank, col);
        for (std::size_t j = col; j < n; ++j) m(rank, j) /= inv;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r == rank) continue;
            CD f = m(r, col);
            for (std::size_t j = col; j < n; ++j) m(r, j) -= f * m(rank, j);
        }
        pivots.push_back(col);
        ++rank;
    }
    std::vector<bool> is_pivot(n, false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < n; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);
    Matrix<CD> ker(n, free_cols.size());
    for (std::size_t f = 0; f < free_cols.size(); ++f) {
        ker(free_cols[f], f) = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) ker(pivots[r], f) = -m(r, free_cols[f]);
    }
    return ker;
}

}  // namespace detail

inline NumericJordan jordan_decompose_numeric(const Matrix<double>& q, double tol = 1e-9) {
    using detail::CD;
    std::size_t d = q.rows();
    if (q.cols() != d) throw InputError("jordan_decompose_numeric: matrix must be square");

    Matrix<CD> qc(d, d);
    double scale = 1e-300;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            qc(i, j) = q(i, j);
            scale = std::max(scale, std::abs(q(i, j)));
        }

    auto cp = char_poly(q);
    std::vector<CD> coeffs(cp.begin(), cp.end());
    std::vector<CD> roots = poly_roots(coeffs);

    // greedy clustering of the numeric roots
    std::vector<std::pair<CD, unsigned>> clusters;
    for (const CD& r : roots) {
        bool merged = false;
        for (auto& [c, m] : clusters) {
            if (std::abs(r - c) <= 1e-6 * std::max(1.0, scale)) {
                c = (c * double(m) + r) / double(m + 1);
                ++m;
                merged = true;
                break;
            }
        }
        if (!merged) clusters.emplace_back(r, 1);
    }
    double separation = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < clusters.size(); ++i)
        for (std::size_t j = i + 1; j < clusters.size(); ++j)
            separation = std::min(separation, std::abs(clusters[i].first - clusters[j].first));
    if (clusters.size() > 1 && separation <= 100 * tol * std::max(1.0, scale))
        throw UnsupportedError(
            "jordan_decompose_numeric: eigenvalue clusters separated below tolerance; the "
            "numeric path cannot resolve the Jordan structure");

    std::sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) {
        if (std::abs(a.first) != std::abs(b.first)) return std::abs(a.first) > std::abs(b.first);
        return a.first.real() > b.first.real();
    });

    NumericJordan nj;
    nj.cluster_separation = separation;
    nj.P = Matrix<CD>(d, d);
    nj.Lambda = Matrix<CD>(d, d);
    std::size_t col = 0;
    double ktol = tol * std::max(1.0, scale);

    for (const auto& [lambda, mult] : clusters) {
        Matrix<CD> m = qc;
        for (std::size_t i = 0; i < d; ++i) m(i, i) -= lambda;
        std::vector<Matrix<CD>> kernels;
        Matrix<CD> mk = m;
        while (true) {
            kernels.push_back(detail::complex_kernel(mk, ktol));
            if (kernels.back().cols() >= mult || kernels.size() >= d) break;
            mk = mk * m;
        }
        std::size_t height = kernels.size();

        std::vector<std::pair<Vec<CD>, std::size_t>> tops;
        for (std::size_t k = height; k >= 1; --k) {
            // numeric span test: rank of the stacked candidate set
            std::vector<Vec<CD>> span_vecs;
            if (k >= 2)
                for (std::size_t j = 0; j < kernels[k - 2].cols(); ++j)
                    span_vecs.push_back(kernels[k - 2].column(j));
            for (const auto& [top, h] : tops) {
                Vec<CD> v = top;
                for (std::size_t i = 0; i < h - k; ++i) v = m * v;
                span_vecs.push_back(std::move(v));
            }
            for (std::size_t j = 0; j < kernels[k - 1].cols(); ++j) {
                Vec<CD> u = kernels[k - 1].column(j);
                Matrix<CD> stack(span_vecs.size() + 1, d);
                for (std::size_t r = 0; r < span_vecs.size(); ++r)
                    for (std::size_t cc = 0; cc < d; ++cc) stack(r, cc) = span_vecs[r][cc];
                for (std::size_t cc = 0; cc < d; ++cc) stack(span_vecs.size(), cc) = u[cc];
                if (detail::complex_rank(stack, ktol) == span_vecs.size() + 1) {
                    span_vecs.push_back(u);
                    tops.emplace_back(std::move(u), k);
                }
            }
        }
        std::sort(tops.begin(), tops.end(),
                  [](const auto& a, const auto& b) { return a.second > b.second; });

        for (const auto& [top, h] : tops) {
            JordanChain chain;
            chain.lambda.exact = false;
            chain.lambda.approx = lambda;
            chain.lambda.error_radius = 10 * ktol;
            chain.size = h;
            chain.first_col = col;
            std::vector<Vec<CD>> vs(h);
            vs[h - 1] = top;
            for (std::size_t j = h - 1; j-- > 0;) vs[j] = m * vs[j + 1];
            for (std::size_t j = 0; j < h; ++j) {
                nj.P.set_column(col + j, vs[j]);
                nj.Lambda(col + j, col + j) = lambda;
                if (j + 1 < h) nj.Lambda(col + j, col + j + 1) = 1;
            }
            col += h;
            nj.chains.push_back(std::move(chain));
        }
    }
    if (col != d)
        throw UnsupportedError(
            "jordan_decompose_numeric: could not assemble a full chain basis at this tolerance");

    Matrix<CD> res = qc * nj.P - nj.P * nj.Lambda;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) nj.residual = std::max(nj.residual, std::abs(res(i, j)));
    if (nj.residual > 1e4 * ktol)
        throw UnsupportedError("jordan_decompose_numeric: residual above tolerance (" +
                               std::to_string(nj.residual) + ")");
    return nj;
}

}  // namespace rrat
