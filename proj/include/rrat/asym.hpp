#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rrat/dilation.hpp"
#include "rrat/jordan.hpp"
#include "rrat/jsr.hpp"
#include "rrat/linrep.hpp"

namespace rrat {

/// One summand of the periodic factor: coeff * rho^{1-{t}} e^{i theta (1-{t})}
/// * (L . F^{(q)}(B^{{t}-1})) * binom(1-{t}, p), where F is the dilation
/// solution of the chain this primitive points into.
struct PhiPrimitive {
    std::size_t chain = 0;  // index into AsymptoticExpansion::chains
    unsigned q = 0;         // chain column of F
    unsigned p = 0;         // binomial index
    Rational coeff = 0;     // exact combination coefficient
};

/// One term N^{log_B rho} * binom(log_B N, m) * e^{i theta log_B N} * Phi(log_B N).
struct ExpansionTerm {
    Rational rho = 0;       // |lambda|, exact
    bool theta_pi = false;  // lambda < 0 (theta = pi); rational eigenvalues only
    unsigned m = 0;
    std::vector<PhiPrimitive> phi;
};

struct RetainedChain {
    Rational lambda = 0;
    std::size_t nu = 0;          // chain size
    std::size_t active_top = 0;  // largest j with gamma != 0
    Vec<Rational> gamma;         // nu coefficients
    Matrix<Rational> V;          // d x nu
    DilationSolution sol;
};

struct ExpansionOptions {
    std::optional<double> r;  // cut modulus; default per the finiteness rule
    NormId norm = NormId::one;
    unsigned T = 8;
    unsigned depth = 10;  // cascade depth
    std::uint64_t jsr_guard = std::uint64_t(1) << 24;
    // optional externally supplied Jordan basis (e.g. a published one);
    // the Jordan basis is not unique and gamma / the individual F depend
    // on it, so reproducing published intermediate values needs this
    std::optional<JordanDecomposition> basis;
};

struct AsymptoticExpansion {
    unsigned radix = 2;
    Vec<Rational> L;
    std::vector<RetainedChain> chains;
    std::vector<ExpansionTerm> terms;  // sorted by decreasing (rho, m)
    double error_exponent = 0;
    bool improved = false;
    unsigned log_power = 0;
    bool empty() const { return terms.empty(); }
    // provenance
    double r_used = 0;
    NormId norm = NormId::one;
    unsigned T = 0;
};

/// A_K(x) for the subchain V^{(0)}..V^{(top)}:
///   sum_{l=0}^{top} binom(K,l) lambda^{K-l} F^{(top-l)}(x),
/// the asymptotic shape of Sigma_K(x) on that chain. Exact at B-adic x.
inline Vec<Rational> a_k_polynomial(const LinearRepQ& rep, const DilationSolution& sol,
                                    std::size_t top, unsigned K, const Rational& x) {
    Matrix<Rational> f = evaluate_F(rep, sol, x).value;
    Vec<Rational> acc(rep.dim, Rational(0));
    for (std::size_t l = 0; l <= top && l <= K; ++l) {
        Rational coef = Rational(binomial(K, static_cast<unsigned long>(l))) *
                        rat_pow(sol.lambda, long(K - l));
        add_scaled(acc, coef, f.column(top - l));
    }
    return acc;
}

/// LRtoAE: linear representation in, asymptotic expansion out.
/// Pipeline: Q, Jordan basis, gamma, JSR bounds + finiteness witness,
/// classification at r, cascade per retained chain, then the K+1
/// substitution and Chu-Vandermonde collection into (rho, theta, m) terms.
inline AsymptoticExpansion build_expansion(const LinearRepQ& rep,
                                           const ExpansionOptions& opt = {}) {
    rep.check();
    if (!is_zero_insensitive(rep))
        throw ValidationError(
            "build_expansion: representation is not zero-insensitive (L*A_0 != L); the "
            "expansion requires insensitivity to leftmost zeroes");
    if (rep.dim == 0) {
        AsymptoticExpansion out;
        out.radix = rep.radix;
        out.error_exponent = -std::numeric_limits<double>::infinity();
        return out;
    }

    Matrix<Rational> q = q_matrix(rep);
    JordanDecomposition jd;
    if (opt.basis) {
        jd = *opt.basis;
        if (!(q * jd.P == jd.P * jd.Lambda))
            throw ValidationError("build_expansion: supplied basis does not reduce Q");
    } else {
        jd = jordan_decompose(q);
    }
    decompose_c(jd, rep.C);

    JsrBounds bounds = jsr_bounds(rep, opt.T, opt.norm, opt.jsr_guard);
    bounds.witness = finiteness_check(rep, opt.T, opt.norm, opt.jsr_guard);

    // default cut: the witness pins r = rho*; otherwise take the log-scale
    // midpoint between the upper bound and the smallest usable modulus
    double r;
    if (opt.r) {
        r = *opt.r;
    } else if (bounds.witness) {
        r = bounds.witness->value;
    } else {
        double smallest_above = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < jd.chains.size(); ++i) {
            const JordanChain& ch = jd.chains[i];
            bool active = false;
            for (std::size_t j = 0; j < ch.size; ++j)
                if (jd.gamma[ch.first_col + j] != 0) active = true;
            double mod = ch.lambda.modulus();
            if (active && mod > bounds.upper) smallest_above = std::min(smallest_above, mod);
        }
        r = std::isfinite(smallest_above) ? std::sqrt(bounds.upper * smallest_above)
                                          : bounds.upper;
    }

    EigenClassification cls = classify_eigenvalues(jd, bounds, r, rep.radix);

    AsymptoticExpansion out;
    out.radix = rep.radix;
    out.L = rep.L;
    out.error_exponent = cls.error_exponent;
    out.improved = cls.improved;
    out.log_power = cls.log_power;
    out.r_used = r;
    out.norm = opt.norm;
    out.T = opt.T;

    // terms keyed by (rho, theta_pi, m); collected across chains
    std::map<std::pair<Rational, unsigned>, ExpansionTerm> collected;

    for (std::size_t ri = 0; ri < cls.retained.size(); ++ri) {
        const JordanChain& ch = jd.chains[cls.retained[ri]];
        if (!ch.lambda.exact)
            throw UnsupportedError("build_expansion: retained eigenvalue is not rational");
        RetainedChain rc;
        rc.lambda = ch.lambda.value;
        rc.nu = ch.size;
        rc.active_top = cls.active_top[ri];
        rc.V = chain_vectors(jd, ch);
        rc.gamma.resize(ch.size);
        for (std::size_t j = 0; j < ch.size; ++j) rc.gamma[j] = jd.gamma[ch.first_col + j];
        rc.sol = cascade_solve(rep, ch.lambda, ch.size, rc.V, opt.depth);
        out.chains.push_back(std::move(rc));
        std::size_t ci = out.chains.size() - 1;
        const RetainedChain& c = out.chains.back();

        // gamma_j * lambda^{K+1-l} binom(K+1,l) F^{(j-l)}(x), K+1 = log_B N + (1-t),
        // binom(log_B N + 1 - t, l) = sum_m binom(log_B N, m) binom(1-t, l-m)
        for (std::size_t j = 0; j <= c.active_top; ++j) {
            if (c.gamma[j] == 0) continue;
            for (std::size_t l = 0; l <= j; ++l) {
                Rational lam_pow = rat_pow(c.lambda, -long(l));
                for (unsigned m = 0; m <= l; ++m) {
                    PhiPrimitive prim;
                    prim.chain = ci;
                    prim.q = static_cast<unsigned>(j - l);
                    prim.p = static_cast<unsigned>(l - m);
                    prim.coeff = c.gamma[j] * lam_pow;
                    auto key = std::make_pair(rat_abs(c.lambda), m);
                    ExpansionTerm& term = collected[key];
                    term.rho = rat_abs(c.lambda);
                    term.theta_pi = c.lambda < 0;
                    term.m = m;
                    term.phi.push_back(prim);
                }
            }
        }
    }

    // merge primitives with identical (chain, q, p), drop vanished ones
    for (auto& [key, term] : collected) {
        std::map<std::tuple<std::size_t, unsigned, unsigned>, Rational> merged;
        for (const auto& p : term.phi) merged[{p.chain, p.q, p.p}] += p.coeff;
        term.phi.clear();
        for (const auto& [k, coeff] : merged) {
            if (coeff == 0) continue;
            term.phi.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), coeff});
        }
        if (!term.phi.empty()) out.terms.push_back(term);
    }
    std::sort(out.terms.begin(), out.terms.end(), [](const ExpansionTerm& a, const ExpansionTerm& b) {
        if (a.rho != b.rho) return a.rho > b.rho;
        return a.m > b.m;
    });
    return out;
}

/// Phi value of one term at the grid-compatible point x = B^{{t}-1},
/// i.e. {t} = 1 + log_B x with x in [1/B, 1]. Complex in general
/// (theta = pi terms); exact-rational real part when theta = 0 and
/// rho^{-log_B x} is rational is not attempted here - this is the numeric
/// evaluator, the exact route goes through a_k_polynomial.
inline std::complex<double> phi_value_at(const LinearRepQ& rep, const AsymptoticExpansion& exp,
                                         const ExpansionTerm& term, const Rational& x,
                                         unsigned refine_cap = 64) {
    double logB = std::log(double(exp.radix));
    double one_minus_t = -std::log(to_double(x)) / logB;  // 1 - {t} = -log_B x
    std::complex<double> total = 0;
    for (const PhiPrimitive& prim : term.phi) {
        const RetainedChain& c = exp.chains[prim.chain];
        Matrix<Rational> f = evaluate_F(rep, c.sol, x, refine_cap).value;
        Rational scalar(0);
        for (std::size_t i = 0; i < exp.L.size(); ++i) scalar += exp.L[i] * f(i, prim.q);
        double rho = std::abs(to_double(c.lambda));
        double mag = std::pow(rho, one_minus_t);
        double binom_factor = 1;
        for (unsigned i = 0; i < prim.p; ++i) binom_factor *= (one_minus_t - i) / (i + 1);
        std::complex<double> phase = 1;
        if (term.theta_pi) {
            double ang = std::acos(-1.0) * one_minus_t;
            phase = {std::cos(ang), std::sin(ang)};
        }
        total += to_double(prim.coeff) * mag * binom_factor * to_double(scalar) * phase;
    }
    return total;
}

/// Phi at an arbitrary real t: {t} maps to x = B^{{t}-1}, snapped to the
/// depth grid. Returns the value and a resolution error bound from the
/// supplied Holder data (infinite if none).
struct PhiEval {
    std::complex<double> value;
    double error_bound = 0;
};

inline PhiEval phi_eval(const LinearRepQ& rep, const AsymptoticExpansion& exp,
                        const ExpansionTerm& term, double t, unsigned depth,
                        const HolderReport* holder = nullptr) {
    double frac = t - std::floor(t);
    double xd = std::pow(double(exp.radix), frac - 1.0);
    // snap to j/B^depth
    double scale = std::pow(double(exp.radix), double(depth));
    Int j(static_cast<long long>(std::floor(xd * scale + 0.5)));
    Rational x(j, int_pow(Int(exp.radix), depth));
    if (x < Rational(1, exp.radix)) x = Rational(1, exp.radix);
    if (x > 1) x = 1;
    PhiEval out;
    out.value = phi_value_at(rep, exp, term, x);
    out.error_bound = holder ? holder->constant * std::pow(std::abs(to_double(x) - xd),
                                                           holder->alpha)
                             : std::numeric_limits<double>::infinity();
    if (std::abs(to_double(x) - xd) == 0) out.error_bound = 0;
    return out;
}

/// Sum of all terms at N (complex; real representations give negligible
/// imaginary part after conjugate pairing).
inline std::complex<double> expansion_eval(const LinearRepQ& rep, const AsymptoticExpansion& exp,
                                           std::uint64_t N, unsigned depth) {
    if (N == 0) throw InputError("expansion_eval: N must be >= 1");
    double logB = std::log(double(exp.radix));
    double logN = std::log(double(N)) / logB;
    std::complex<double> total = 0;
    for (const ExpansionTerm& term : exp.terms) {
        double rho = to_double(term.rho);
        double power = std::pow(double(N), std::log(rho) / logB);
        double binom_factor = 1;
        for (unsigned i = 0; i < term.m; ++i) binom_factor *= (logN - i) / (i + 1);
        std::complex<double> phase = 1;
        if (term.theta_pi) {
            double ang = std::acos(-1.0) * logN;
            phase = {std::cos(ang), std::sin(ang)};
        }
        total += power * binom_factor * phase * phi_eval(rep, exp, term, logN, depth).value;
    }
    return total;
}

/// Exact prediction of s_N from the retained chains: L applied to
/// sum_chains sum_j gamma_j A^{(j)}_{K+1}(N / B^{K+1}). This is the same
/// quantity as the collected expansion, evaluated without floats.
inline Rational predict_partial_sum(const LinearRepQ& rep, const AsymptoticExpansion& exp,
                                    std::uint64_t N) {
    if (N == 0) throw InputError("predict_partial_sum: N must be >= 1");
    DigitWord w = digits(N, exp.radix);
    unsigned K = static_cast<unsigned>(w.size() - 1);
    Rational x(Int(N), int_pow(Int(exp.radix), K + 1));
    Rational total(0);
    for (const RetainedChain& c : exp.chains) {
        for (std::size_t j = 0; j <= c.active_top; ++j) {
            if (c.gamma[j] == 0) continue;
            Vec<Rational> a = a_k_polynomial(rep, c.sol, j, K + 1, x);
            total += c.gamma[j] * dot(exp.L, a);
        }
    }
    return total;
}

struct ResidualRow {
    std::uint64_t N;
    Rational exact_sum;
    Rational predicted;
    Rational residual;
    double scaled;  // residual / N^{error_exponent}
};

/// Validates the expansion against exact partial sums on a list of N.
inline std::vector<ResidualRow> residual_report(const LinearRepQ& rep,
                                                const AsymptoticExpansion& exp,
                                                const std::vector<std::uint64_t>& Ns) {
    std::vector<ResidualRow> rows;
    rows.reserve(Ns.size());
    for (std::uint64_t n : Ns) {
        ResidualRow row;
        row.N = n;
        row.exact_sum = partial_sum_via_series(rep, n);
        row.predicted = n == 0 ? Rational(0) : predict_partial_sum(rep, exp, n);
        row.residual = row.exact_sum - row.predicted;
        row.scaled = to_double(row.residual) /
                     std::pow(double(n), exp.error_exponent == 0 ? 0.0 : exp.error_exponent);
        rows.push_back(std::move(row));
    }
    return rows;
}

/// One-sided continuity defect of a term's Phi at integer t: the exact
/// difference between the {t} -> 1^- limit (x -> 1) and the {t} = 0 value
/// (x = 1/B). Zero by QV = VJ for a correctly assembled expansion.
inline Rational phi_continuity_defect(const LinearRepQ& rep, const AsymptoticExpansion& exp,
                                      const ExpansionTerm& term) {
    // at {t} = 1: 1-{t} = 0: rho^0 binom(0,p) = [p == 0], F(1) = V
    // at {t} = 0: 1-{t} = 1: rho * e^{i theta} * binom(1,p) = [p <= 1], F(1/B)
    Rational at_one(0), at_zero(0);
    for (const PhiPrimitive& prim : term.phi) {
        const RetainedChain& c = exp.chains[prim.chain];
        if (prim.p == 0) {
            Rational s(0);
            for (std::size_t i = 0; i < exp.L.size(); ++i) s += exp.L[i] * c.V(i, prim.q);
            at_one += prim.coeff * s;
        }
        if (prim.p <= 1) {
            Matrix<Rational> f = evaluate_F(rep, c.sol, Rational(1, exp.radix)).value;
            Rational s(0);
            for (std::size_t i = 0; i < exp.L.size(); ++i) s += exp.L[i] * f(i, prim.q);
            at_zero += prim.coeff * c.lambda * s;  // rho e^{i theta} = lambda, exact
        }
    }
    return at_one - at_zero;
}

}  // namespace rrat
