#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "helpers.hpp"
#include "rrat/fourier.hpp"

using namespace rrat;
using testing_helpers::load_fixture;

namespace {

AsymptoticExpansion dichopile_expansion(const LinearRepQ& rep, unsigned depth = 10) {
    ExpansionOptions opt;
    opt.T = 8;
    opt.depth = depth;
    opt.basis = testing_helpers::dichopile_jordan(rep);
    return build_expansion(rep, opt);
}

Matrix<Rational> dichopile_chain_vectors() {
    Matrix<Rational> v(6, 2);
    v.set_column(0, {0, 0, 0, 0, 1, 0});
    v.set_column(1, {Rational(1, 6), Rational(1, 3), Rational(1, 3), Rational(1, 6),
                     Rational(-4, 3), Rational(5, 6)});
    return v;
}

// |a - b| for decimal strings, in high precision
double string_gap(const std::string& a, const std::string& b) {
    BigFloat<80> x(a), y(b);
    return std::abs((x - y).convert_to<double>());
}

std::string rational_decimal(const Rational& q, unsigned digits) {
    return to_decimal_string(to_float<BigFloat<80>>(q), digits);
}

const char* kC0 = "-0.36276483219909523733941579131627817954357682261599";
const char* kC1re = "0.00328444028368975642383395704527876596759317794466";
const char* kC1im = "0.00199132072044919779610043930356670834266095959747";

}  // namespace

TEST_CASE("moment tables for the dichopile chain at 2") {
    auto rep = load_fixture("dichopile.json");
    MomentTable mt = moments(rep, Rational(2), dichopile_chain_vectors(), 8);

    SECTION("f column: M^0_l = e_5 / (l+1)") {
        for (unsigned l = 1; l <= 8; ++l)
            for (std::size_t i = 0; i < 6; ++i)
                CHECK(mt.full[l - 1](i, 0) == (i == 4 ? Rational(1, l + 1) : Rational(0)));
    }

    SECTION("frozen g-column values") {
        Vec<Rational> m1{Rational(1, 24),  Rational(1, 6), Rational(1, 6),
                         Rational(1, 8),   Rational(-31, 36), Rational(41, 72)};
        CHECK(mt.full[0].column(1) == m1);
        Vec<Rational> m21{Rational(5, 144), Rational(7, 72),    Rational(7, 72),
                          Rational(1, 16),  Rational(-257, 576), Rational(41, 144)};
        CHECK(mt.partial[1][1].column(1) == m21);
    }

    SECTION("both recursions and the partition identity hold exactly") {
        CHECK(moment_recursion_residual(rep, mt) == 0);
    }

    SECTION("zero chain vectors give zero moments") {
        MomentTable z = moments(rep, Rational(2), Matrix<Rational>(6, 1), 4);
        for (unsigned l = 1; l <= 4; ++l) CHECK(z.full[l - 1].is_zero());
    }

    SECTION("resonance is reported with the offending l") {
        // B^1 * 1 = 2 is an eigenvalue of the dichopile Q
        Matrix<Rational> v(6, 1);
        v(4, 0) = 1;
        try {
            moments(rep, Rational(1), v, 4);
            FAIL("expected resonance");
        } catch (const UnsupportedError& e) {
            CHECK(std::string(e.what()).find("l = 1") != std::string::npos);
        }
    }
}

TEST_CASE("biased coin first moment against the trapezoid") {
    auto coin = load_fixture("biased_coin.json");
    MomentTable mt = moments(coin, Rational(1), Matrix<Rational>{{1}}, 3);
    CHECK(mt.full[0](0, 0) == Rational(1, 5));  // int F = 1 - E[X] = 1 - 4/5
    CHECK(moment_recursion_residual(coin, mt) == 0);

    Eigenvalue one;
    one.value = 1;
    Matrix<Rational> v(1, 1);
    v(0, 0) = 1;
    DilationSolution f = cascade_solve(coin, one, 1, v, 10);
    Rational trap(0);
    Rational h(1, 1024);
    for (Int j = 0; j < 1024; ++j)
        trap += (f.at(Rational(j, 1024))(0, 0) + f.at(Rational(j + 1, 1024))(0, 0)) / 2 * h;
    CHECK(std::abs(to_double(trap - mt.full[0](0, 0))) < 1e-3);
}

TEST_CASE("newton differences") {
    auto rep = load_fixture("dichopile.json");
    MomentTable mt = moments(rep, Rational(2), dichopile_chain_vectors(), 24);

    SECTION("g_5 primitive: frozen F*(l) and differences") {
        NewtonCoefficients nc = newton_differences(mt, rep.L, 1, 20);
        Vec<Rational> fstar{Rational(-7, 12),      Rational(-257, 576),   Rational(-89, 252),
                            Rational(-1549, 5376), Rational(-10769, 44640),
                            Rational(-91743, 444416)};
        for (std::size_t l = 0; l < fstar.size(); ++l) CHECK(nc.fstar[l] == fstar[l]);
        Vec<Rational> delta{Rational(-7, 12),        Rational(79, 576),
                            Rational(-89, 2016),     Rational(29, 1792),
                            Rational(-1327, 208320), Rational(10489, 3999744),
                            Rational(-94261, 84661248)};
        for (std::size_t n = 0; n < delta.size(); ++n) CHECK(nc.delta[n] == delta[n]);
        // the alternating-sum identity, written out directly
        for (unsigned n = 0; n <= 20; ++n) {
            Rational direct(0);
            for (unsigned k = 0; k <= n; ++k) {
                Rational term = Rational(binomial(n, k)) * nc.fstar[k];
                direct += (n - k) % 2 == 0 ? term : -term;
            }
            CHECK(nc.delta[n] == direct);
        }
        // integer points of the Newton series reproduce F* exactly
        for (unsigned l = 1; l <= 21; ++l)
            CHECK(newton_series_at_integer(nc, l) == nc.fstar[l - 1]);
    }

    SECTION("f primitive: F*(l) = (1 - 2^{-l-1})/(l+1) exactly") {
        NewtonCoefficients nc = newton_differences(mt, rep.L, 0, 20);
        for (unsigned l = 1; l <= 21; ++l) {
            Rational expect = (Rational(1) - Rational(1, Int(1) << (l + 1))) / Rational(l + 1);
            CHECK(nc.fstar[l - 1] == expect);
        }
    }

    SECTION("difference decay: |Delta^n| (n+1) 2^{n+1} stays bounded") {
        MomentTable big = moments(rep, Rational(2), dichopile_chain_vectors(), 101);
        NewtonCoefficients nc = newton_differences(big, rep.L, 1, 100);
        for (unsigned n = 10; n <= 100; ++n) {
            double scaled = std::abs(to_double(nc.delta[n])) * (n + 1) * std::pow(2.0, n + 1);
            CHECK(scaled < 1.2);
            CHECK(scaled > 0.5);
        }
    }

    SECTION("guards") {
        CHECK_THROWS_AS(newton_differences(mt, rep.L, 5, 10), InputError);   // bad column
        CHECK_THROWS_AS(newton_differences(mt, rep.L, 1, 200), InputError);  // table too short
    }
}

TEST_CASE("mellin evaluation at integer points") {
    auto rep = load_fixture("dichopile.json");
    MomentTable mt = moments(rep, Rational(2), dichopile_chain_vectors(), 24);
    NewtonCoefficients nc = newton_differences(mt, rep.L, 1, 20);

    // s = 1: the series collapses to Delta^0
    MellinValue at1 = mellin_eval(nc, 1.0, 0.0, 30);
    CHECK(std::abs(at1.re_d - to_double(nc.fstar[0])) < 1e-25);
    CHECK(at1.im_d == 0.0);
    CHECK(at1.n_used <= 2);  // the binomial factor vanishes exactly

    // s = 3: matches the exact rational F*(3) to full precision
    MellinValue at3 = mellin_eval(nc, 3.0, 0.0, 30);
    CHECK(string_gap(at3.re, rational_decimal(nc.fstar[2], 40)) < 1e-28);

    // too few differences for a non-integer point: reported, not silent
    NewtonCoefficients tiny = newton_differences(mt, rep.L, 1, 6);
    try {
        mellin_eval(tiny, -1.0, 0.0, 30);
        FAIL("expected an unsupported-error with the last term magnitude");
    } catch (const UnsupportedError& e) {
        CHECK(std::string(e.what()).find("magnitude 10^") != std::string::npos);
    }
}

TEST_CASE("fourier coefficients of the dichopile fluctuation") {
    auto rep = load_fixture("dichopile.json");
    AsymptoticExpansion exp = dichopile_expansion(rep);
    FourierEngine engine(rep, exp);

    // the f-component closed form L F^{(0)} = x, verified against the grid
    engine.register_closed_form(0, 0, PiecewisePoly::single({0, 1}));

    SECTION("newton route reproduces the 50-digit c_0 and c_1") {
        FourierCoefficient c0 = engine.coefficient(1, 0, 50);
        CHECK(string_gap(c0.re, kC0) < 1e-45);
        CHECK(std::abs(c0.im_d) < 1e-45);

        FourierCoefficient c1 = engine.coefficient(1, 1, 50);
        CHECK(string_gap(c1.re, kC1re) < 1e-45);
        CHECK(string_gap(c1.im, kC1im) < 1e-45);
    }

    SECTION("conjugate symmetry for the real representation") {
        FourierCoefficient cp = engine.coefficient(1, 2, 30);
        FourierCoefficient cm = engine.coefficient(1, -2, 30);
        CHECK(string_gap(cp.re, cm.re) < 1e-28);
        CHECK(std::abs(cp.im_d + cm.im_d) < 1e-28);
    }

    SECTION("without the closed form, the p = 1 primitive is unsupported") {
        FourierEngine bare(rep, exp);
        CHECK_THROWS_AS(bare.coefficient(1, 0, 20), UnsupportedError);
    }

    SECTION("the N log N term has constant Phi: c_0 = 1/2, c_1 = 0") {
        FourierCoefficient c0 = engine.coefficient(0, 0, 30);
        CHECK(std::abs(c0.re_d - 0.5) < 1e-28);
        FourierCoefficient c1 = engine.coefficient(0, 1, 30);
        CHECK(std::abs(c1.re_d) < 1e-28);
        CHECK(std::abs(c1.im_d) < 1e-28);
    }
}

TEST_CASE("closed-form integration of the explicit fluctuation part") {
    // the two f-primitives of the dichopile Phi_0 integrate to 5/4 at
    // k = 0 and to -i/(4 k pi) at k != 0
    PiecewisePoly x_poly = PiecewisePoly::single({0, 1});
    FourierCoefficient p0 = fourier_closed_form(x_poly, Rational(2), 2, 0, 0, 40);
    FourierCoefficient p1 = fourier_closed_form(x_poly, Rational(2), 2, 1, 0, 40, Rational(1, 2));
    CHECK(std::abs(p0.re_d + p1.re_d - 1.25) < 1e-35);
    CHECK(std::abs(p0.im_d + p1.im_d) < 1e-35);
    for (long k : {1L, 4L}) {
        FourierCoefficient q0 = fourier_closed_form(x_poly, Rational(2), 2, 0, k, 40);
        FourierCoefficient q1 =
            fourier_closed_form(x_poly, Rational(2), 2, 1, k, 40, Rational(1, 2));
        double expect_im = -1.0 / (4 * k * std::acos(-1.0));
        CHECK(std::abs(q0.re_d + q1.re_d) < 1e-30);
        CHECK(std::abs(q0.im_d + q1.im_d - expect_im) < 1e-30);
    }
    // zero polynomial integrates to zero
    FourierCoefficient z = fourier_closed_form(PiecewisePoly::single({0}), Rational(2), 2, 0, 3, 20);
    CHECK(z.re_d == 0.0);
    CHECK(z.im_d == 0.0);
}

TEST_CASE("zero chain vectors give vanishing differences") {
    auto rep = load_fixture("dichopile.json");
    MomentTable z = moments(rep, Rational(2), Matrix<Rational>(6, 2), 10);
    NewtonCoefficients nc = newton_differences(z, rep.L, 1, 8);
    for (const auto& d : nc.delta) CHECK(d == 0);
}

TEST_CASE("trapezoid route matches its published values") {
    auto rep = load_fixture("dichopile.json");
    AsymptoticExpansion exp = dichopile_expansion(rep, 12);

    FourierCoefficient t10 = fourier_trapezoid(rep, exp, 1, 0, 10);
    CHECK(std::abs(t10.re_d - (-0.3626476334)) < 1e-9);
    FourierCoefficient t12 = fourier_trapezoid(rep, exp, 1, 0, 12);
    CHECK(std::abs(t12.re_d - (-0.3627354935)) < 1e-9);

    FourierCoefficient t10k1 = fourier_trapezoid(rep, exp, 1, 1, 10);
    CHECK(std::abs(t10k1.re_d - 0.0032858226) < 1e-9);
    CHECK(std::abs(t10k1.im_d - 0.0019776043) < 1e-9);

    // K = 10 -> 12 shrinks the error roughly like B^{-K alpha}
    double exact = std::stod(std::string(kC0));
    double e10 = std::abs(t10.re_d - exact);
    double e12 = std::abs(t12.re_d - exact);
    CHECK(e12 < e10 / 2.0);

    // a constant integrand is integrated exactly at any depth
    FourierCoefficient m1 = fourier_trapezoid(rep, exp, 0, 0, 8);
    CHECK(m1.re_d == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("truncated fourier sums approach the fluctuation") {
    auto rep = load_fixture("dichopile.json");
    AsymptoticExpansion exp = dichopile_expansion(rep, 12);

    // coefficients via the (cheap, ~7 correct digits) trapezoid route
    std::vector<std::complex<double>> ck(11);
    for (long k = 0; k <= 10; ++k) {
        FourierCoefficient c = fourier_trapezoid(rep, exp, 1, k, 12);
        ck[k] = {c.re_d, c.im_d};
    }
    auto fourier_sum = [&](double t, long order) {
        std::complex<double> s = ck[0];
        for (long k = 1; k <= order; ++k) {
            std::complex<double> e =
                std::exp(std::complex<double>(0, 2 * std::acos(-1.0) * k * t));
            s += ck[k] * e + std::conj(ck[k]) * std::conj(e);
        }
        return s.real();
    };
    double sup3 = 0, sup10 = 0;
    for (Int j = 256; j <= 512; j += 4) {
        Rational x(j, 512);
        double t = 1 + std::log2(to_double(x));
        double phi = phi_value_at(rep, exp, exp.terms[1], x).real();
        sup3 = std::max(sup3, std::abs(phi - fourier_sum(t, 3)));
        sup10 = std::max(sup10, std::abs(phi - fourier_sum(t, 10)));
    }
    CHECK(sup10 < sup3);
}

TEST_CASE("constant fluctuation: c_0 is the constant, c_k vanish") {
    LinearRepQ ones;
    ones.radix = 2;
    ones.dim = 1;
    ones.L = {1};
    ones.C = {1};
    ones.A = {Matrix<Rational>{{1}}, Matrix<Rational>{{1}}};
    ExpansionOptions opt;
    opt.T = 1;
    AsymptoticExpansion exp = build_expansion(ones, opt);
    REQUIRE(exp.terms.size() == 1);

    FourierEngine engine(ones, exp);
    engine.register_closed_form(0, 0, PiecewisePoly::single({0, 1}));
    FourierCoefficient c0 = engine.coefficient(0, 0, 40);
    CHECK(std::abs(c0.re_d - 1.0) < 1e-35);
    for (long k : {1L, 3L}) {
        FourierCoefficient c = engine.coefficient(0, k, 40);
        CHECK(std::abs(c.re_d) < 1e-35);
        CHECK(std::abs(c.im_d) < 1e-35);
    }
}

TEST_CASE("radix-4 fluctuation: newton and trapezoid agree") {
    // exercises the moment recursions with B = 4 (nontrivial W_b sums and
    // r^{l-k} weights); the single size-1 chain needs no closed form
    auto rs4 = load_fixture("rudin_shapiro_radix4.json");
    ExpansionOptions opt;
    opt.T = 1;
    opt.depth = 10;
    AsymptoticExpansion exp = build_expansion(rs4, opt);
    REQUIRE(exp.terms.size() == 1);

    FourierEngine engine(rs4, exp);
    for (long k : {0L, 1L, 2L}) {
        FourierCoefficient nc = engine.coefficient(0, k, 12);
        FourierCoefficient tc = fourier_trapezoid(rs4, exp, 0, k, 10);
        CHECK(std::abs(nc.re_d - tc.re_d) < 2e-5);
        CHECK(std::abs(nc.im_d - tc.im_d) < 2e-5);
    }
    // the moment table the engine built satisfies its recursions exactly
    CHECK(moment_recursion_residual(rs4, engine.moment_table(0)) == 0);
}

TEST_CASE("sum-of-digits fluctuation: newton and trapezoid agree") {
    auto sod = load_fixture("sum_of_digits.json");
    ExpansionOptions opt;
    opt.T = 10;
    opt.depth = 14;
    AsymptoticExpansion exp = build_expansion(sod, opt);
    REQUIRE(exp.terms.size() == 2);

    // the eigenvector component solves into a multiple of x; find the
    // scalar from the chain data and register the verified closed form
    const RetainedChain& c = exp.chains[0];
    Rational slope(0);
    for (std::size_t i = 0; i < sod.L.size(); ++i) slope += sod.L[i] * c.V(i, 0);
    FourierEngine engine(sod, exp);
    engine.register_closed_form(0, 0, PiecewisePoly::single({0, slope}));

    for (long k : {0L, 1L}) {
        FourierCoefficient nc = engine.coefficient(1, k, 20);
        FourierCoefficient t12 = fourier_trapezoid(sod, exp, 1, k, 12);
        FourierCoefficient t14 = fourier_trapezoid(sod, exp, 1, k, 14);
        double g12 = std::hypot(nc.re_d - t12.re_d, nc.im_d - t12.im_d);
        double g14 = std::hypot(nc.re_d - t14.re_d, nc.im_d - t14.im_d);
        CHECK(g12 < 5e-4);
        CHECK(g14 < g12 / 2);  // the gap is trapezoid resolution, not a bias
    }
}
