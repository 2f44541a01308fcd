#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "rrat/error.hpp"

namespace rrat {

template <class T>
using Vec = std::vector<T>;

/// Dense row-major matrix over an arbitrary commutative ring/field T.
template <class T>
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(std::size_t r, std::size_t c) : rows_(r), cols_(c), a_(r * c, T(0)) {}
    Matrix(std::initializer_list<std::initializer_list<T>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        a_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw InputError("ragged matrix initializer");
            a_.insert(a_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    Matrix& operator+=(const Matrix& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    Matrix& operator*=(const T& c) {
        for (auto& x : a_) x *= c;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, const T& c) { return a *= c; }
    friend Matrix operator*(const T& c, Matrix a) { return a *= c; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw InputError("matrix product shape mismatch");
        Matrix r(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T& aik = a(i, k);
                if (aik == T(0)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }

    bool is_zero() const {
        return std::all_of(a_.begin(), a_.end(), [](const T& x) { return x == T(0); });
    }

    Matrix transposed() const {
        Matrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    Vec<T> column(std::size_t j) const {
        Vec<T> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }
    void set_column(std::size_t j, const Vec<T>& c) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }

private:
    void check_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw InputError("matrix shape mismatch");
    }

    std::size_t rows_, cols_;
    std::vector<T> a_;
};

template <class T>
Vec<T> operator*(const Matrix<T>& a, const Vec<T>& v) {
    if (a.cols() != v.size()) throw InputError("matrix-vector shape mismatch");
    Vec<T> r(a.rows(), T(0));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (a(i, j) != T(0)) r[i] += a(i, j) * v[j];
    return r;
}

template <class T>
Vec<T> operator*(const Vec<T>& v, const Matrix<T>& a) {
    if (a.rows() != v.size()) throw InputError("vector-matrix shape mismatch");
    Vec<T> r(a.cols(), T(0));
    for (std::size_t i = 0; i < a.rows(); ++i)
        if (v[i] != T(0))
            for (std::size_t j = 0; j < a.cols(); ++j) r[j] += v[i] * a(i, j);
    return r;
}

template <class T>
T dot(const Vec<T>& a, const Vec<T>& b) {
    T r(0);
    for (std::size_t i = 0; i < a.size(); ++i) r += a[i] * b[i];
    return r;
}

template <class T>
Vec<T>& add_scaled(Vec<T>& acc, const T& c, const Vec<T>& v) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c * v[i];
    return acc;
}

template <class T>
bool is_zero_vec(const Vec<T>& v) {
    return std::all_of(v.begin(), v.end(), [](const T& x) { return x == T(0); });
}

/// Maximum absolute column sum. Requires an ordered field (abs via comparison).
template <class T>
T one_norm(const Matrix<T>& m) {
    T best(0);
    for (std::size_t j = 0; j < m.cols(); ++j) {
        T s(0);
        for (std::size_t i = 0; i < m.rows(); ++i) s += m(i, j) < T(0) ? T(-m(i, j)) : m(i, j);
        if (s > best) best = s;
    }
    return best;
}

/// Maximum absolute row sum.
template <class T>
T inf_norm(const Matrix<T>& m) {
    T best(0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        T s(0);
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) < T(0) ? T(-m(i, j)) : m(i, j);
        if (s > best) best = s;
    }
    return best;
}

template <class T>
T max_abs(const Matrix<T>& m) {
    T best(0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            T v = m(i, j) < T(0) ? T(-m(i, j)) : m(i, j);
            if (v > best) best = v;
        }
    return best;
}

/// Exact Gaussian elimination over a field. Returns the rank; `m` ends in
/// reduced row echelon form. Pivot search prefers the leftmost column and,
/// within a column, the topmost unused row, which keeps results deterministic.
template <class T>
std::size_t rref_in_place(Matrix<T>& m, std::vector<std::size_t>* pivot_cols = nullptr) {
    std::size_t rank = 0;
    for (std::size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
        std::size_t piv = rank;
        while (piv < m.rows() && m(piv, col) == T(0)) ++piv;
        if (piv == m.rows()) continue;
        if (piv != rank)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(rank, j));
        T inv = m(rank, col);
        for (std::size_t j = col; j < m.cols(); ++j) m(rank, j) /= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == rank || m(i, col) == T(0)) continue;
            T f = m(i, col);
            for (std::size_t j = col; j < m.cols(); ++j) m(i, j) -= f * m(rank, j);
        }
        if (pivot_cols) pivot_cols->push_back(col);
        ++rank;
    }
    return rank;
}

/// Kernel basis of m (columns are basis vectors), from the RREF with free
/// variables set to unit values in increasing column order.
template <class T>
Matrix<T> kernel_basis(Matrix<T> m) {
    std::size_t n = m.cols();
    std::vector<std::size_t> pivots;
    rref_in_place(m, &pivots);
    std::vector<bool> is_pivot(n, false);
    for (auto c : pivots) is_pivot[c] = true;

    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < n; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);

    Matrix<T> ker(n, free_cols.size());
    for (std::size_t f = 0; f < free_cols.size(); ++f) {
        ker(free_cols[f], f) = T(1);
        for (std::size_t r = 0; r < pivots.size(); ++r) ker(pivots[r], f) = -m(r, free_cols[f]);
    }
    return ker;
}

/// Solves a*x = b exactly; throws if the system is singular/inconsistent.
template <class T>
Vec<T> solve_linear(const Matrix<T>& a, const Vec<T>& b) {
    if (a.rows() != a.cols() || a.rows() != b.size())
        throw InputError("solve_linear expects a square system");
    std::size_t n = a.rows();
    Matrix<T> m(n, n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m(i, j) = a(i, j);
        m(i, n) = b[i];
    }
    std::vector<std::size_t> pivots;
    std::size_t rank = rref_in_place(m, &pivots);
    if (rank < n) {
        for (std::size_t i = rank; i < n; ++i)
            if (m(i, n) != T(0)) throw InputError("solve_linear: inconsistent system");
        throw InputError("solve_linear: singular system");
    }
    Vec<T> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = m(i, n);
    return x;
}

template <class T>
Matrix<T> inverse(const Matrix<T>& a) {
    if (a.rows() != a.cols()) throw InputError("inverse of non-square matrix");
    std::size_t n = a.rows();
    Matrix<T> m(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m(i, j) = a(i, j);
        m(i, n + i) = T(1);
    }
    if (rref_in_place(m) < n) throw InputError("inverse: singular matrix");
    Matrix<T> inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = m(i, n + j);
    return inv;
}

template <class T>
Matrix<T> mat_pow(Matrix<T> base, unsigned long e) {
    Matrix<T> r = Matrix<T>::identity(base.rows());
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

}  // namespace rrat
