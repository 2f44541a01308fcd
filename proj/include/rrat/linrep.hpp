#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "rrat/matrix.hpp"
#include "rrat/rational.hpp"

namespace rrat {

/// Radix-B digit word, most significant digit first. The word for 0 is empty.
struct DigitWord {
    unsigned radix = 2;
    std::vector<unsigned> digits;

    std::size_t size() const { return digits.size(); }
};

inline DigitWord digits(std::uint64_t n, unsigned radix) {
    if (radix < 2) throw InputError("radix must be >= 2");
    DigitWord w;
    w.radix = radix;
    while (n) {
        w.digits.push_back(static_cast<unsigned>(n % radix));
        n /= radix;
    }
    std::reverse(w.digits.begin(), w.digits.end());
    return w;
}

inline std::uint64_t word_value(const DigitWord& w) {
    std::uint64_t n = 0;
    for (unsigned d : w.digits) n = n * w.radix + d;
    return n;
}

/// A linear representation (L, (A_b)_{0<=b<B}, C) of a radix-rational
/// sequence: s_n = L * A_{msd} * ... * A_{lsd} * C over the radix-B digits
/// of n. T is the scalar type; Rational gives the exact regime, double the
/// float regime used by representations with irrational entries.
template <class T>
struct LinearRep {
    unsigned radix = 2;
    std::size_t dim = 0;
    Vec<T> L;
    std::vector<Matrix<T>> A;
    Vec<T> C;

    void check() const {
        if (radix < 2) throw InputError("linear representation: radix must be >= 2");
        if (A.size() != radix) throw InputError("linear representation: expected one matrix per digit");
        if (L.size() != dim || C.size() != dim)
            throw InputError("linear representation: L/C size differs from dim");
        for (const auto& m : A)
            if (m.rows() != dim || m.cols() != dim)
                throw InputError("linear representation: matrix size differs from dim");
    }
};

using LinearRepQ = LinearRep<Rational>;
using LinearRepD = LinearRep<double>;

/// Exact user-supplied reference for validation, e.g. a direct recurrence.
using SequenceOracle = std::function<Rational(std::uint64_t)>;

template <class T>
T eval_word(const LinearRep<T>& rep, const DigitWord& w) {
    if (w.radix != rep.radix) throw InputError("eval_word: radix mismatch");
    if (rep.dim == 0) return T(0);
    Vec<T> row = rep.L;
    for (unsigned b : w.digits) {
        if (b >= rep.radix) throw InputError("eval_word: digit out of range");
        row = row * rep.A[b];
    }
    return dot(row, rep.C);
}

template <class T>
T eval_seq(const LinearRep<T>& rep, std::uint64_t n) {
    return eval_word(rep, digits(n, rep.radix));
}

/// All of u_0..u_N in one pass, sharing the L*A_w prefixes along the digit
/// trie (one vector-matrix product per value instead of one per digit).
template <class T>
Vec<T> eval_range(const LinearRep<T>& rep, std::uint64_t N) {
    Vec<T> out(N + 1, T(0));
    if (rep.dim == 0) return out;
    out[0] = dot(rep.L, rep.C);
    // iterative DFS over numbers by their digit words (no leading zeros)
    struct Item {
        std::uint64_t n;
        Vec<T> row;
    };
    std::vector<Item> stack;
    for (unsigned b = rep.radix; b-- > 1;)
        if (b <= N) stack.push_back({b, rep.L * rep.A[b]});
    while (!stack.empty()) {
        Item it = std::move(stack.back());
        stack.pop_back();
        out[it.n] = dot(it.row, rep.C);
        for (unsigned b = rep.radix; b-- > 0;) {
            std::uint64_t child = it.n * rep.radix + b;
            if (child / rep.radix != it.n || child > N) continue;
            stack.push_back({child, it.row * rep.A[b]});
        }
    }
    return out;
}

template <class T>
bool is_zero_insensitive(const LinearRep<T>& rep) {
    if (rep.dim == 0) return true;
    return rep.L * rep.A[0] == rep.L;
}

template <class T>
Matrix<T> q_matrix(const LinearRep<T>& rep) {
    Matrix<T> q(rep.dim, rep.dim);
    for (const auto& a : rep.A) q += a;
    return q;
}

template <class T>
T partial_sum_direct(const LinearRep<T>& rep, std::uint64_t N) {
    Vec<T> u = eval_range(rep, N);
    T s(0);
    for (const T& x : u) s += x;
    return s;
}

/// Sigma_K(x) = sum of A_w * V over all length-K words w with (0.w)_B <= x,
/// by brute-force enumeration. This is the oracle the O(K) recursion is
/// checked against; the guard caps B^K.
template <class T>
Vec<T> sigma_direct(const LinearRep<T>& rep, const Vec<T>& V, unsigned K, const Rational& x,
                    std::uint64_t guard = std::uint64_t(1) << 20) {
    if (rep.dim == 0) return {};
    double words = std::pow(double(rep.radix), double(K));
    if (words > double(guard)) throw InputError("sigma_direct: enumeration guard exceeded");
    // (0.w)_B <= x  <=>  value(w) <= x * B^K
    Rational scaled = x * Rational(int_pow(Int(rep.radix), K));
    Int last = numerator(scaled) / denominator(scaled);  // floor for x >= 0
    Vec<T> acc(rep.dim, T(0));
    Int nwords = int_pow(Int(rep.radix), K);
    for (Int i = 0; i < nwords && i <= last; ++i) {
        // digits of i, least significant applied first
        Vec<T> v = V;
        Int m = i;
        for (unsigned k = 0; k < K; ++k) {
            unsigned b = static_cast<unsigned>(m % rep.radix);
            m /= rep.radix;
            v = rep.A[b] * v;
        }
        for (std::size_t j = 0; j < rep.dim; ++j) acc[j] += v[j];
    }
    return acc;
}

/// Same sum via the one-digit-at-a-time recursion
///   Sigma_{K+1}(x) = sum_{b<x_1} A_b Q^K V + A_{x_1} Sigma_K(Bx - x_1),
/// with x passed as an explicit mantissa word (ties follow "<=" exactly).
/// O(K) matrix-vector work.
template <class T>
Vec<T> sigma_recursive(const LinearRep<T>& rep, const Vec<T>& V, unsigned K,
                       const DigitWord& mantissa) {
    if (mantissa.radix != rep.radix) throw InputError("sigma_recursive: radix mismatch");
    if (mantissa.size() < K) throw InputError("sigma_recursive: mantissa shorter than K");
    if (rep.dim == 0) return {};
    Matrix<T> q = q_matrix(rep);
    // qkv[j] = Q^j V
    std::vector<Vec<T>> qkv(K ? K : 1);
    qkv[0] = V;
    for (unsigned j = 1; j < K; ++j) qkv[j] = q * qkv[j - 1];
    // prefix_below[b] = sum_{b' < b} A_{b'}
    std::vector<Matrix<T>> prefix_below(rep.radix, Matrix<T>(rep.dim, rep.dim));
    for (unsigned b = 1; b < rep.radix; ++b)
        prefix_below[b] = prefix_below[b - 1] + rep.A[b - 1];

    Vec<T> s = V;  // Sigma_0
    for (unsigned pos = K; pos >= 1; --pos) {
        unsigned d = mantissa.digits[pos - 1];
        if (d >= rep.radix) throw InputError("sigma_recursive: digit out of range");
        Vec<T> t = rep.A[d] * s;
        if (d > 0) {
            Vec<T> head = prefix_below[d] * qkv[K - pos];
            for (std::size_t i = 0; i < rep.dim; ++i) t[i] += head[i];
        }
        s = std::move(t);
    }
    return s;
}

/// Converts a radix-B representation into the equivalent radix-B^2 one
/// (A'_d = A_{d/B} * A_{d%B}), used when eigenvalue phases call for pairing
/// two digits at a time.
template <class T>
LinearRep<T> square_radix(const LinearRep<T>& rep) {
    LinearRep<T> out;
    out.radix = rep.radix * rep.radix;
    out.dim = rep.dim;
    out.L = rep.L;
    out.C = rep.C;
    out.A.reserve(out.radix);
    for (unsigned d = 0; d < out.radix; ++d)
        out.A.push_back(rep.A[d / rep.radix] * rep.A[d % rep.radix]);
    return out;
}

/// Exact partial sum through the series identity: cutting [0,N] at the
/// powers of B gives s_N = L(I - A_0) sum_{k<=K} Q^k C + S_{K+1}(B^{t-1});
/// the first term vanishes for zero-insensitive representations.
template <class T>
T partial_sum_via_series(const LinearRep<T>& rep, std::uint64_t N) {
    if (rep.dim == 0) return T(0);
    if (N == 0) return eval_seq(rep, 0);
    DigitWord w = digits(N, rep.radix);
    unsigned K = static_cast<unsigned>(w.size() - 1);
    Vec<T> tail = sigma_recursive(rep, rep.C, K + 1, w);
    T s = dot(rep.L, tail);
    if (!is_zero_insensitive(rep)) {
        Matrix<T> q = q_matrix(rep);
        Vec<T> qc = rep.C, sum = rep.C;
        for (unsigned k = 1; k <= K; ++k) {
            qc = q * qc;
            for (std::size_t i = 0; i < rep.dim; ++i) sum[i] += qc[i];
        }
        Vec<T> row = rep.L;
        Vec<T> la0 = rep.L * rep.A[0];
        for (std::size_t i = 0; i < rep.dim; ++i) row[i] -= la0[i];
        s += dot(row, sum);
    }
    return s;
}

}  // namespace rrat
