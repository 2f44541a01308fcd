#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "rrat/asym.hpp"
#include "rrat/bigfloat.hpp"
#include "rrat/moments.hpp"
#include "rrat/newton.hpp"
#include "rrat/piecewise.hpp"

namespace rrat {

struct FourierCoefficient {
    long k = 0;
    std::string re, im;  // decimal strings at the requested precision
    double re_d = 0, im_d = 0;
    std::string method;  // "newton", "closed-form", "trapezoid"
    unsigned digits = 0;
    double est_error = 0;
};

struct MellinValue {
    std::string re, im;
    double re_d = 0, im_d = 0;
    unsigned digits = 0;         // requested
    unsigned digits_used = 0;    // working precision that produced it
    double peak_log10 = 0;       // largest intermediate term, log10
    unsigned n_used = 0;
    double est_error_log10 = 0;  // first neglected term, log10
};

namespace detail {

template <class T>
struct SeriesSum {
    Cplx<T> value;
    double peak_log10 = -INFINITY;
    double last_log10 = -INFINITY;
    unsigned n_used = 0;
    bool converged = false;
};

/// Partial sum of F*(s) = sum_n binom(s-1, n) Delta^n F*(1), stopping once
/// the terms stay below 10^stop_log10. The running peak is recorded: for
/// s on the lines used by the Fourier coefficients the terms rise far
/// above the result before decaying, and the working precision has to
/// absorb that excursion.
template <class T>
SeriesSum<T> newton_series_sum(const std::vector<Rational>& delta, const Cplx<T>& s,
                               double stop_log10) {
    SeriesSum<T> out;
    Cplx<T> binom{T(1), T(0)};
    Cplx<T> acc;
    unsigned below = 0;
    for (unsigned n = 0; n < delta.size(); ++n) {
        Cplx<T> term = binom * to_float<T>(delta[n]);
        acc += term;
        double mag = log10_of(cabs(term).template convert_to<double>());
        out.last_log10 = mag;
        if (mag > out.peak_log10) out.peak_log10 = mag;
        out.n_used = n + 1;
        if (mag < stop_log10) {
            if (++below >= 4 && n >= 8) {
                out.converged = true;
                break;
            }
        } else {
            below = 0;
        }
        binom = binom * Cplx<T>{s.re - T(1) - T(n), s.im} / T(n + 1);
        if (binom.re == 0 && binom.im == 0) {  // s at a positive integer: finite sum
            out.converged = true;
            break;
        }
    }
    out.value = acc;
    return out;
}

/// I_i = int_lo^hi x^c ln(x)^i dx for i = 0..i_max, complex exponent.
/// c == -1 exactly must be announced by the caller (it only arises from
/// exact cancellation, never approximately).
template <class T>
std::vector<Cplx<T>> power_log_integrals(const Cplx<T>& c, bool c_is_minus_one,
                                         const Rational& lo, const Rational& hi,
                                         unsigned i_max) {
    using std::log;
    std::vector<Cplx<T>> out(i_max + 1);
    T ln_lo = log(to_float<T>(lo));
    T ln_hi = log(to_float<T>(hi));
    if (c_is_minus_one) {
        T plo = ln_lo, phi = ln_hi;  // ln^{i+1} at the bounds
        for (unsigned i = 0; i <= i_max; ++i) {
            out[i] = Cplx<T>{(phi - plo) / T(i + 1), T(0)};
            plo *= ln_lo;
            phi *= ln_hi;
        }
        return out;
    }
    Cplx<T> cp1 = c + Cplx<T>{T(1), T(0)};
    Cplx<T> xlo = rational_pow(lo, cp1);
    Cplx<T> xhi = rational_pow(hi, cp1);
    T plo(1), phi(1);  // ln^i at the bounds
    for (unsigned i = 0; i <= i_max; ++i) {
        Cplx<T> boundary = (xhi * phi - xlo * plo) / cp1;
        out[i] = (i == 0) ? boundary : boundary - (T(i) * out[i - 1]) / cp1;
        plo *= ln_lo;
        phi *= ln_hi;
    }
    return out;
}

// binom(y, p) = y(y-1)...(y-p+1)/p! expanded in powers of y
inline std::vector<Rational> binom_poly_coeffs(unsigned p) {
    std::vector<Rational> c{1};
    for (unsigned i = 0; i < p; ++i) {
        std::vector<Rational> next(c.size() + 1, Rational(0));
        for (std::size_t d = 0; d < c.size(); ++d) {
            next[d + 1] += c[d];
            next[d] -= Rational(i) * c[d];
        }
        c = std::move(next);
    }
    Rational fact(1);
    for (unsigned i = 2; i <= p; ++i) fact *= i;
    for (auto& x : c) x /= fact;
    return c;
}

/// Contribution of one closed-form primitive to c_k:
/// (coeff / ln B) int_{1/B}^1 x^{s-1} P(x) binom(-log_B x, p) dx with
/// s = -log_B lambda - 2 pi i k / ln B (theta = pi folded in for
/// lambda < 0).
template <class T>
Cplx<T> closed_form_contribution(const PiecewisePoly& poly, const Rational& lambda,
                                 unsigned radix, unsigned p, long k, const Rational& coeff) {
    using std::log;
    T lnB = log(T(radix));
    Rational abs_lambda = rat_abs(lambda);
    T angle = T(2 * k) * pi_const<T>();
    if (lambda < 0) angle += pi_const<T>();
    Cplx<T> s{-log(to_float<T>(abs_lambda)) / lnB, -angle / lnB};

    std::vector<Rational> binom_c = binom_poly_coeffs(p);
    Cplx<T> total;
    Rational inv_b(1, radix);
    for (std::size_t piece = 0; piece < poly.pieces.size(); ++piece) {
        Rational lo = std::max(poly.breakpoints[piece], inv_b);
        Rational hi = poly.breakpoints[piece + 1];
        if (!(lo < hi)) continue;
        const std::vector<Rational>& mono = poly.pieces[piece];
        for (std::size_t j = 0; j < mono.size(); ++j) {
            if (mono[j] == 0) continue;
            Cplx<T> c = s + Cplx<T>{T(static_cast<long>(j)) - T(1), T(0)};
            // c + 1 = j - log_B lambda - chi_k: exactly -1 iff k = 0,
            // lambda > 0 and lambda = B^j
            bool log_case =
                (k == 0 && lambda > 0 && lambda == rat_pow(Rational(radix), long(j)));
            auto ints = power_log_integrals(c, log_case, lo, hi, p);
            T lnB_pow(1);
            for (std::size_t i = 0; i < binom_c.size(); ++i) {
                if (binom_c[i] != 0) {
                    Cplx<T> term = ints[i] * to_float<T>(mono[j] * binom_c[i]);
                    if (i % 2 == 1) term = -term;  // y^i = (-1/lnB)^i ln^i x
                    total += term / lnB_pow;
                }
                lnB_pow *= lnB;
            }
        }
    }
    return (total * to_float<T>(coeff)) / lnB;
}

constexpr unsigned kMaxPrecisionDigits = 640;

template <class F>
auto dispatch_precision(unsigned digits, F& f) {
    if (digits <= 40) return f.template run<BigFloat<40>>(40u);
    if (digits <= 80) return f.template run<BigFloat<80>>(80u);
    if (digits <= 160) return f.template run<BigFloat<160>>(160u);
    if (digits <= 320) return f.template run<BigFloat<320>>(320u);
    return f.template run<BigFloat<kMaxPrecisionDigits>>(kMaxPrecisionDigits);
}

// Envelope of the series |binom(s-1,n)| (1-1/B)^{n+1}/(n+1) in doubles on
// a log10 scale: the terms rise to a peak near n ~ |Im s| before the
// geometric decay wins, and the working precision must absorb the peak.
// Measuring the envelope directly is radix-aware and replaces the
// example-specific constants a fixed formula would hard-code; the caller
// still re-runs with more precision if the exact terms disagree.
struct SeriesEstimate {
    unsigned n_needed = 0;
    double peak_log10 = 0;
};

inline SeriesEstimate estimate_series(double s_re, double s_im, unsigned radix, unsigned m) {
    const double logq = std::log10(1.0 - 1.0 / radix);
    double logb = 0;  // log10 |binom(s-1, n)|
    SeriesEstimate est;
    unsigned below = 0;
    for (unsigned n = 0; n < 2000000; ++n) {
        double env = logb + (n + 1) * logq - std::log10(double(n + 1));
        if (env > est.peak_log10) est.peak_log10 = env;
        est.n_needed = n;
        if (env < -double(m) - 4) {
            if (++below >= 4) break;
        } else {
            below = 0;
        }
        logb += 0.5 * std::log10((s_re - 1 - n) * (s_re - 1 - n) + s_im * s_im) -
                std::log10(double(n + 1));
    }
    return est;
}

struct MellinRunner {
    const NewtonCoefficients& nc;
    double s_re, s_im;
    unsigned m;
    template <class T>
    MellinValue run(unsigned digits) const {
        auto sum = newton_series_sum(nc.delta, Cplx<T>{T(s_re), T(s_im)}, -double(m) - 2);
        if (!sum.converged)
            throw UnsupportedError(
                "mellin_eval: series not converged within the available differences; last "
                "term magnitude 10^" +
                std::to_string(sum.last_log10) + " (extend n_max)");
        MellinValue v;
        v.re = to_fixed_string(sum.value.re, m);
        v.im = to_fixed_string(sum.value.im, m);
        v.re_d = sum.value.re.template convert_to<double>();
        v.im_d = sum.value.im.template convert_to<double>();
        v.digits = m;
        v.digits_used = digits;
        v.peak_log10 = sum.peak_log10;
        v.n_used = sum.n_used;
        v.est_error_log10 = sum.last_log10;
        return v;
    }
};

struct ClosedFormRunner {
    const PiecewisePoly& poly;
    const Rational& lambda;
    unsigned radix, p;
    long k;
    unsigned m;
    const Rational& coeff;
    template <class T>
    FourierCoefficient run(unsigned digits) const {
        Cplx<T> v = closed_form_contribution<T>(poly, lambda, radix, p, k, coeff);
        FourierCoefficient out;
        out.k = k;
        out.re = to_fixed_string(v.re, m);
        out.im = to_fixed_string(v.im, m);
        out.re_d = v.re.template convert_to<double>();
        out.im_d = v.im.template convert_to<double>();
        out.method = "closed-form";
        out.digits = m;
        out.est_error = std::pow(10.0, -double(digits) + 4);
        return out;
    }
};

}  // namespace detail

/// F*(s) by the Newton series at an arbitrary complex point, to an
/// absolute accuracy of 10^{-m}. The working precision starts at the
/// requested digits plus a guard and is enlarged and re-run whenever the
/// measured term peak shows the requested digits were not safely
/// separated from the cancellation.
inline MellinValue mellin_eval(const NewtonCoefficients& nc, double s_re, double s_im,
                               unsigned m) {
    detail::MellinRunner r{nc, s_re, s_im, m};
    unsigned digits = m + 12;
    for (;;) {
        MellinValue v = detail::dispatch_precision(digits, r);
        unsigned needed = m + static_cast<unsigned>(std::max(0.0, v.peak_log10)) + 8;
        if (v.digits_used >= needed) return v;
        if (v.digits_used >= detail::kMaxPrecisionDigits)
            throw UnsupportedError("mellin_eval: required precision exceeds the supported "
                                   "maximum of 640 digits");
        digits = needed;
    }
}

/// Exact-integration route for a primitive whose scalar dilation component
/// is a known piecewise polynomial, evaluated to m digits.
inline FourierCoefficient fourier_closed_form(const PiecewisePoly& poly, const Rational& lambda,
                                              unsigned radix, unsigned p, long k, unsigned m,
                                              const Rational& coeff = Rational(1)) {
    detail::ClosedFormRunner r{poly, lambda, radix, p, k, m, coeff};
    return detail::dispatch_precision(m + 12, r);
}

/// Computes Fourier coefficients of expansion terms, routing each phi
/// primitive through the closed-form integral when a verified closed form
/// is registered, and through the exact-moment Newton series otherwise.
/// Primitives with binomial index p >= 1 and no closed form would need
/// derivatives of the Mellin transform and are reported unsupported.
class FourierEngine {
public:
    FourierEngine(const LinearRepQ& rep, const AsymptoticExpansion& exp)
        : rep_(rep), exp_(exp) {}

    /// Registers a closed form for the scalar primitive L.F^{(q)} of one
    /// chain after verifying it exactly against the cascade grid.
    void register_closed_form(std::size_t chain, unsigned q, PiecewisePoly poly) {
        poly.check();
        if (chain >= exp_.chains.size())
            throw InputError("register_closed_form: chain index out of range");
        if (!verify_closed_form(exp_.L, exp_.chains[chain].sol, q, poly))
            throw ValidationError(
                "register_closed_form: candidate does not match the cascade grid");
        closed_forms_[{chain, q}] = std::move(poly);
    }

    bool has_closed_form(std::size_t chain, unsigned q) const {
        return closed_forms_.count({chain, q}) > 0;
    }

    FourierCoefficient coefficient(std::size_t term_index, long k, unsigned m) {
        const ExpansionTerm& term = exp_.terms.at(term_index);
        double peak_seed = 0;
        unsigned n_len = 32;
        for (const PhiPrimitive& prim : term.phi) {
            if (has_closed_form(prim.chain, prim.q)) continue;
            if (prim.p >= 1)
                throw UnsupportedError(
                    "fourier_coefficients: a primitive with binomial index p >= 1 has no "
                    "registered closed form; this requires derivatives of the Mellin transform "
                    "and is not supported");
            const RetainedChain& c = exp_.chains[prim.chain];
            double lnB = std::log(double(exp_.radix));
            double s_re = -std::log(std::abs(to_double(c.lambda))) / lnB;
            double s_im = -(2 * k * std::acos(-1.0) + (c.lambda < 0 ? std::acos(-1.0) : 0)) / lnB;
            auto est = detail::estimate_series(s_re, s_im, exp_.radix, m);
            n_len = std::max(n_len, est.n_needed + 16);
            peak_seed = std::max(peak_seed, est.peak_log10);
        }
        for (;;) {
            for (const PhiPrimitive& prim : term.phi)
                if (!has_closed_form(prim.chain, prim.q)) ensure_newton(prim, n_len);
            try {
                return evaluate_k(term, k, m, peak_seed);
            } catch (const UnsupportedError&) {
                if (n_len >= 20000) throw;
                n_len = n_len * 3 / 2 + 32;  // series was not converged: extend and retry
            }
        }
    }

    std::vector<FourierCoefficient> coefficients(std::size_t term_index, long k_min, long k_max,
                                                 unsigned m) {
        std::vector<FourierCoefficient> out;
        for (long k = k_min; k <= k_max; ++k) out.push_back(coefficient(term_index, k, m));
        return out;
    }

    const NewtonCoefficients& newton_table(std::size_t chain, unsigned q) const {
        auto it = newton_.find({chain, q});
        if (it == newton_.end()) throw InputError("newton table not built yet");
        return it->second;
    }
    const MomentTable& moment_table(std::size_t chain) const {
        auto it = moments_.find(chain);
        if (it == moments_.end()) throw InputError("moment table not built yet");
        return it->second;
    }

private:
    void ensure_newton(const PhiPrimitive& prim, unsigned n_len) {
        auto key = std::make_pair(prim.chain, prim.q);
        auto it = newton_.find(key);
        if (it != newton_.end() && it->second.delta.size() >= n_len + 1) return;
        const RetainedChain& c = exp_.chains[prim.chain];
        auto mit = moments_.find(prim.chain);
        if (mit == moments_.end())
            mit = moments_.emplace(prim.chain, moments(rep_, c.lambda, c.V, 0)).first;
        extend_moments(rep_, mit->second, n_len + 1);  // in place, keeps earlier entries
        newton_.insert_or_assign(
            key, newton_differences(mit->second, exp_.L, prim.q, mit->second.L_max - 1));
    }

    struct KResult {
        FourierCoefficient coeff;
        double peak_log10 = 0;
        unsigned digits_used = 0;
    };

    struct KRunner {
        const FourierEngine& eng;
        const ExpansionTerm& term;
        long k;
        unsigned m;
        template <class T>
        KResult run(unsigned digits) const {
            using std::log;
            T lnB = log(T(eng.exp_.radix));
            Cplx<T> total;
            double peak = 0;
            double worst_last = -INFINITY;
            for (const PhiPrimitive& prim : term.phi) {
                const RetainedChain& c = eng.exp_.chains[prim.chain];
                auto cf = eng.closed_forms_.find({prim.chain, prim.q});
                if (cf != eng.closed_forms_.end()) {
                    total += detail::closed_form_contribution<T>(
                        cf->second, c.lambda, eng.exp_.radix, prim.p, k, prim.coeff);
                    continue;
                }
                const NewtonCoefficients& nc = eng.newton_.at({prim.chain, prim.q});
                T angle = T(2 * k) * pi_const<T>();
                if (c.lambda < 0) angle += pi_const<T>();
                Cplx<T> s{-log(to_float<T>(rat_abs(c.lambda))) / lnB, -angle / lnB};
                auto sum = detail::newton_series_sum(nc.delta, s, -double(m) - 2);
                if (!sum.converged)
                    throw UnsupportedError("fourier: newton series not converged; last term "
                                           "magnitude 10^" +
                                           std::to_string(sum.last_log10));
                peak = std::max(peak, sum.peak_log10);
                worst_last = std::max(worst_last, sum.last_log10);
                total += (sum.value * to_float<T>(prim.coeff)) / lnB;
            }
            KResult res;
            res.coeff.k = k;
            res.coeff.re = to_fixed_string(total.re, m);
            res.coeff.im = to_fixed_string(total.im, m);
            res.coeff.re_d = total.re.template convert_to<double>();
            res.coeff.im_d = total.im.template convert_to<double>();
            res.coeff.method = "newton";
            res.coeff.digits = m;
            double neglected = worst_last == -INFINITY ? -double(digits) : worst_last;
            res.coeff.est_error =
                std::pow(10.0, std::max(neglected, peak - double(digits) + 4));
            res.peak_log10 = peak;
            res.digits_used = digits;
            return res;
        }
    };

    FourierCoefficient evaluate_k(const ExpansionTerm& term, long k, unsigned m,
                                  double peak_seed) const {
        unsigned digits = m + static_cast<unsigned>(std::max(0.0, peak_seed)) + 10;
        for (;;) {
            KRunner runner{*this, term, k, m};
            KResult res = detail::dispatch_precision(digits, runner);
            unsigned needed = m + static_cast<unsigned>(std::max(0.0, res.peak_log10)) + 8;
            if (res.digits_used >= needed) return res.coeff;
            if (res.digits_used >= detail::kMaxPrecisionDigits)
                throw UnsupportedError(
                    "fourier: required precision exceeds the supported maximum of 640 digits");
            digits = needed;
        }
    }

    const LinearRepQ& rep_;
    const AsymptoticExpansion& exp_;
    std::map<std::pair<std::size_t, unsigned>, PiecewisePoly> closed_forms_;
    std::map<std::size_t, MomentTable> moments_;
    std::map<std::pair<std::size_t, unsigned>, NewtonCoefficients> newton_;
};

/// Trapezoidal cross-check on the cascade grid: uniform nodes x_j = j/B^K,
/// j = B^{K-1}..B^K, applied to the full integrand
/// Phi(1 + log_B x) e^{-2 pi i k (1 + log_B x)} / (x ln B).
inline FourierCoefficient fourier_trapezoid(const LinearRepQ& rep, const AsymptoticExpansion& exp,
                                            std::size_t term_index, long k, unsigned depth,
                                            double alpha_hint = 1.0) {
    const ExpansionTerm& term = exp.terms.at(term_index);
    const unsigned B = exp.radix;
    const double lnB = std::log(double(B));
    const double two_pi = 2 * std::acos(-1.0);
    Int scale = int_pow(Int(B), depth);
    Int start = scale / B;
    std::complex<double> acc = 0;
    for (Int j = start; j <= scale; ++j) {
        Rational x(j, scale);
        double xd = to_double(x);
        double t = 1 + std::log(xd) / lnB;
        std::complex<double> phi = phi_value_at(rep, exp, term, x);
        std::complex<double> rot = std::exp(std::complex<double>(0, -two_pi * double(k) * t));
        double w = (j == start || j == scale) ? 0.5 : 1.0;
        acc += w * phi * rot / (xd * lnB);
    }
    acc /= to_double(Rational(scale));
    FourierCoefficient out;
    out.k = k;
    out.re_d = acc.real();
    out.im_d = acc.imag();
    out.re = to_fixed_string(acc.real(), 12);
    out.im = to_fixed_string(acc.imag(), 12);
    out.method = "trapezoid";
    out.digits = 12;
    out.est_error = std::pow(double(B), -double(depth) * alpha_hint);
    return out;
}

}  // namespace rrat
