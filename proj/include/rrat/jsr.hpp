#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "rrat/charpoly.hpp"
#include "rrat/jordan.hpp"
#include "rrat/linrep.hpp"
#include "rrat/polyroots.hpp"

namespace rrat {

enum class NormId { one, inf, two };

inline std::string norm_name(NormId n) {
    switch (n) {
        case NormId::one: return "1";
        case NormId::inf: return "inf";
        case NormId::two: return "2";
    }
    return "?";
}

inline NormId norm_from_name(const std::string& s) {
    if (s == "1" || s == "one") return NormId::one;
    if (s == "inf" || s == "infinity") return NormId::inf;
    if (s == "2" || s == "two") return NormId::two;
    throw InputError("unknown norm id: " + s);
}

namespace detail {

inline Matrix<double> to_double_matrix(const Matrix<Rational>& m) {
    Matrix<double> md(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) md(i, j) = to_double(m(i, j));
    return md;
}
inline const Matrix<double>& to_double_matrix(const Matrix<double>& m) { return m; }

inline double two_norm(const Matrix<double>& m) {
    Matrix<double> mtm = m.transposed() * m;
    auto cp = char_poly(mtm);
    std::vector<std::complex<double>> c(cp.begin(), cp.end());
    double best = 0;
    for (const auto& r : poly_roots(c)) best = std::max(best, r.real());
    return std::sqrt(std::max(best, 0.0));
}

template <class T>
double norm_value(const Matrix<T>& m, NormId norm) {
    if (norm == NormId::two) return two_norm(to_double_matrix(m));
    if constexpr (std::is_same_v<T, Rational>)
        return to_double(norm == NormId::one ? one_norm(m) : inf_norm(m));
    else
        return norm == NormId::one ? one_norm(m) : inf_norm(m);
}

template <class T>
double spectral_radius_numeric(const Matrix<T>& m) {
    auto cp = char_poly(to_double_matrix(m));
    std::vector<std::complex<double>> c(cp.begin(), cp.end());
    double best = 0;
    for (const auto& r : poly_roots(c)) best = std::max(best, std::abs(r));
    return best;
}

/// Exact spectral radius when the characteristic polynomial splits over Q.
inline std::optional<Rational> spectral_radius_exact(const Matrix<Rational>& m) {
    std::vector<Rational> rem;
    auto roots = rational_roots(char_poly(m), &rem);
    if (rem.size() > 1) return std::nullopt;
    Rational best(0);
    for (const auto& [r, mult] : roots) {
        Rational a = rat_abs(r);
        if (a > best) best = a;
    }
    return best;
}

// depth-first enumeration of all A_w with |w| = len, left-to-right products
template <class T, class Visit, class Prune>
void enumerate_products(const LinearRep<T>& rep, unsigned len, Visit&& visit, Prune&& prune) {
    std::vector<unsigned> word;
    std::function<void(const Matrix<T>&)> rec = [&](const Matrix<T>& prefix) {
        if (word.size() == len) {
            visit(word, prefix);
            return;
        }
        if (!word.empty() && prune(prefix, static_cast<unsigned>(len - word.size()))) return;
        for (unsigned b = 0; b < rep.radix; ++b) {
            word.push_back(b);
            rec(prefix * rep.A[b]);
            word.pop_back();
        }
    };
    rec(Matrix<T>::identity(rep.dim));
}

}  // namespace detail

/// A word certifying the finiteness property: spectralRadius(A_w)^{1/T}
/// meets the length-T norm bound, so rho* equals it exactly.
struct FinitenessWitness {
    NormId norm = NormId::one;
    unsigned T = 1;
    DigitWord word;
    bool exact = true;
    Rational radius_pow_T = 0;  // exact spectral radius of A_w = (rho*)^T, exact path
    double value = 0;           // rho* as a double
};

/// Certified bounds at word length T: lower <= rho* <= upper with
/// upper = max_{|w|=T} ||A_w||^{1/T} and lower the largest
/// spectralRadius(A_w)^{1/T} encountered. The inner maximum is kept as an
/// exact rational on the exact path with the 1- or inf-norm.
struct JsrBounds {
    unsigned T = 1;
    NormId norm = NormId::one;
    double upper = 0;
    double lower = 0;
    Rational max_norm = 0;
    bool max_norm_exact = false;
    DigitWord argmax_word;
    std::optional<FinitenessWitness> witness;
};

template <class T>
JsrBounds jsr_bounds(const LinearRep<T>& rep, unsigned T_len, NormId norm = NormId::one,
                     std::uint64_t guard = std::uint64_t(1) << 24) {
    if (rep.dim == 0) throw InputError("jsr_bounds: empty representation");
    if (T_len == 0) throw InputError("jsr_bounds: word length must be >= 1");
    if (std::pow(double(rep.radix), double(T_len)) > double(guard))
        throw InputError("jsr_bounds: enumeration guard exceeded");

    constexpr bool exact_scalar = std::is_same_v<T, Rational>;
    const bool exact_norm = exact_scalar && norm != NormId::two;

    JsrBounds out;
    out.T = T_len;
    out.norm = norm;
    out.argmax_word.radix = rep.radix;

    double best_sr = 0;

    if (exact_norm) {
        if constexpr (exact_scalar) {
            auto exact_of = [&](const Matrix<Rational>& m) {
                return norm == NormId::one ? one_norm(m) : inf_norm(m);
            };
            Rational step_max(0);
            for (const auto& a : rep.A) step_max = std::max(step_max, exact_of(a));
            std::vector<Rational> step_pow(T_len + 1, Rational(1));
            for (unsigned k = 1; k <= T_len; ++k) step_pow[k] = step_pow[k - 1] * step_max;

            Rational best(0);
            detail::enumerate_products(
                rep, T_len,
                [&](const std::vector<unsigned>& word, const Matrix<Rational>& prod) {
                    Rational nv = exact_of(prod);
                    if (nv > best) {
                        best = nv;
                        out.argmax_word.digits = word;
                    }
                    best_sr = std::max(best_sr, detail::spectral_radius_numeric(prod));
                },
                [&](const Matrix<Rational>& prefix, unsigned remaining) {
                    // submultiplicative bound, evaluated exactly: safe to cut
                    return exact_of(prefix) * step_pow[remaining] <= best;
                });
            out.max_norm = best;
            out.max_norm_exact = true;
            out.upper = std::pow(to_double(best), 1.0 / T_len);
        }
    } else {
        double step_max = 0;
        for (const auto& a : rep.A) step_max = std::max(step_max, detail::norm_value(a, norm));
        double best = 0;
        detail::enumerate_products(
            rep, T_len,
            [&](const std::vector<unsigned>& word, const Matrix<T>& prod) {
                double nv = detail::norm_value(prod, norm);
                if (nv > best) {
                    best = nv;
                    out.argmax_word.digits = word;
                }
                best_sr = std::max(best_sr, detail::spectral_radius_numeric(prod));
            },
            [&](const Matrix<T>& prefix, unsigned remaining) {
                double bound =
                    detail::norm_value(prefix, norm) * std::pow(step_max, double(remaining));
                return bound < best * (1.0 - 1e-12);  // float path: keep a margin
            });
        out.upper = std::pow(best, 1.0 / T_len);
    }
    out.lower = std::pow(best_sr, 1.0 / T_len);
    return out;
}

/// Scans the length-T words for one whose spectral radius attains the norm
/// maximum at the same length. On the exact path the certificate is an
/// exact rational equality; absence is NOT a disproof of the finiteness
/// property. Float regime uses float_tol.
template <class T>
std::optional<FinitenessWitness> finiteness_check(const LinearRep<T>& rep, unsigned T_len,
                                                  NormId norm = NormId::one,
                                                  std::uint64_t guard = std::uint64_t(1) << 24,
                                                  double float_tol = 1e-9) {
    JsrBounds bounds = jsr_bounds(rep, T_len, norm, guard);
    constexpr bool exact_scalar = std::is_same_v<T, Rational>;
    std::optional<FinitenessWitness> found;

    detail::enumerate_products(
        rep, T_len,
        [&](const std::vector<unsigned>& word, const Matrix<T>& prod) {
            if (found) return;
            if constexpr (exact_scalar) {
                if (bounds.max_norm_exact) {
                    auto sr = detail::spectral_radius_exact(prod);
                    if (sr && *sr == bounds.max_norm) {
                        FinitenessWitness w;
                        w.norm = norm;
                        w.T = T_len;
                        w.word.radix = rep.radix;
                        w.word.digits = word;
                        w.exact = true;
                        w.radius_pow_T = *sr;
                        w.value = std::pow(to_double(*sr), 1.0 / T_len);
                        found = std::move(w);
                    }
                    return;
                }
            }
            double sr = detail::spectral_radius_numeric(prod);
            double target = std::pow(bounds.upper, double(T_len));
            if (std::abs(sr - target) <= float_tol * std::max(1.0, target)) {
                FinitenessWitness w;
                w.norm = norm;
                w.T = T_len;
                w.word.radix = rep.radix;
                w.word.digits = word;
                w.exact = false;
                w.value = std::pow(sr, 1.0 / T_len);
                found = std::move(w);
            }
        },
        [](const Matrix<T>&, unsigned) { return false; });
    return found;
}

/// Split of the gamma-weighted Jordan chains at the cut modulus r: chains
/// with |lambda| > r carry the expansion, the rest feed the error term.
struct EigenClassification {
    std::vector<std::size_t> retained;    // indices into jd.chains
    std::vector<std::size_t> rest;
    std::vector<std::size_t> active_top;  // per retained chain: largest j with gamma != 0
    double r_used = 0;
    double error_exponent = 0;  // log_B of the error growth
    bool improved = false;      // finiteness witness upgraded the exponent
    unsigned log_power = 0;     // log_B^m N factor per the improved bound
    bool empty_warning = false;
};

inline EigenClassification classify_eigenvalues(const JordanDecomposition& jd,
                                                const JsrBounds& bounds, double r,
                                                unsigned radix) {
    if (jd.gamma.empty())
        throw InputError("classify_eigenvalues: decompose_c must run first (gamma missing)");
    EigenClassification out;
    out.r_used = r;
    const double logB = std::log(double(radix));
    out.error_exponent = std::log(r) / logB;

    for (std::size_t i = 0; i < jd.chains.size(); ++i) {
        const JordanChain& ch = jd.chains[i];
        std::size_t top = ch.size;
        while (top > 0 && jd.gamma[ch.first_col + top - 1] == 0) --top;
        if (top == 0) continue;  // gamma-free chain contributes nothing
        if (ch.lambda.modulus() > r) {
            out.retained.push_back(i);
            out.active_top.push_back(top - 1);
        } else {
            out.rest.push_back(i);
        }
    }
    out.empty_warning = out.retained.empty();

    if (bounds.witness) {
        const FinitenessWitness& w = *bounds.witness;
        out.improved = true;
        out.error_exponent = std::log(w.value) / logB;
        unsigned m = 0;
        for (std::size_t i : out.rest) {
            const JordanChain& ch = jd.chains[i];
            bool at_rho_star;
            if (w.exact && ch.lambda.exact)
                at_rho_star = rat_pow(rat_abs(ch.lambda.value), w.T) == w.radius_pow_T;
            else
                at_rho_star = std::abs(ch.lambda.modulus() - w.value) <= 1e-12;
            if (at_rho_star) m = std::max<unsigned>(m, static_cast<unsigned>(ch.size));
        }
        out.log_power = m;
    }
    return out;
}

}  // namespace rrat
