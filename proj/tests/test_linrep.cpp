#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "helpers.hpp"
#include "rrat/linrep.hpp"
#include "rrat/linrep_io.hpp"

using namespace rrat;
using testing_helpers::load_fixture;

namespace {

DigitWord mantissa(std::vector<unsigned> ds, unsigned radix = 2) {
    DigitWord w;
    w.radix = radix;
    w.digits = std::move(ds);
    return w;
}

// deterministic random small representations, entries in {-1,0,1}, made
// zero-insensitive on demand by forcing A_0's action on L
LinearRepQ random_rep(std::mt19937& rng, unsigned radix, std::size_t dim, bool zero_insensitive) {
    std::uniform_int_distribution<int> entry(-1, 1);
    LinearRepQ rep;
    rep.radix = radix;
    rep.dim = dim;
    rep.L.resize(dim);
    rep.C.resize(dim);
    for (auto& x : rep.L) x = entry(rng);
    for (auto& x : rep.C) x = entry(rng);
    for (unsigned b = 0; b < radix; ++b) {
        Matrix<Rational> m(dim, dim);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) m(i, j) = entry(rng);
        rep.A.push_back(std::move(m));
    }
    if (zero_insensitive) {
        // force L*A_0 = L: take L = e_1 and pin the first row of A_0 to e_1
        rep.L.assign(dim, Rational(0));
        rep.L[0] = 1;
        for (std::size_t j = 0; j < dim; ++j) rep.A[0](0, j) = (j == 0) ? 1 : 0;
    }
    return rep;
}

}  // namespace

TEST_CASE("digit words") {
    CHECK(digits(5, 2).digits == std::vector<unsigned>{1, 0, 1});
    CHECK(digits(0, 7).digits.empty());
    CHECK(digits(10, 4).digits == std::vector<unsigned>{2, 2});
    for (std::uint64_t n : {0ull, 1ull, 7ull, 100ull, 12345ull})
        for (unsigned B : {2u, 3u, 7u}) CHECK(word_value(digits(n, B)) == n);
    // leading digit nonzero unless empty
    CHECK(digits(8, 2).digits.front() == 1);
}

TEST_CASE("dichopile evaluation pins the digit-product convention") {
    auto rep = load_fixture("dichopile.json");
    rep.check();

    CHECK(eval_word(rep, mantissa({1, 0, 1})) == 1);  // u_5 = f_5 - f_4
    CHECK(eval_word(rep, mantissa({})) == 0);         // L*C
    CHECK(eval_word(rep, mantissa({1, 0, 0})) == 2);  // u_4 = f_4 - f_3
    CHECK(eval_seq(rep, 1) == 1);
    CHECK(eval_seq(rep, 0) == 0);

    testing_helpers::DichopileOracle oracle;
    Vec<Rational> u = eval_range(rep, 1 << 12);
    for (std::uint64_t n = 0; n <= (1 << 12); ++n) {
        if (u[n] != oracle.u(n)) {
            CAPTURE(n);
            REQUIRE(u[n] == oracle.u(n));
        }
    }
    // first few values, frozen from the recurrence
    Vec<Rational> expect{0, 1, 1, 1, 2, 1, 2, 2};
    for (std::size_t n = 0; n < expect.size(); ++n) CHECK(u[n] == expect[n]);
}

TEST_CASE("rudin-shapiro evaluation") {
    auto rep = load_fixture("rudin_shapiro.json");
    CHECK(eval_seq(rep, 3) == -1);
    for (std::uint64_t n = 0; n <= 4096; ++n)
        CHECK(eval_seq(rep, n) == testing_helpers::rudin_shapiro(n));
}

TEST_CASE("zero insensitivity") {
    CHECK(is_zero_insensitive(load_fixture("dichopile.json")));
    CHECK(is_zero_insensitive(load_fixture("rudin_shapiro.json")));
    CHECK_FALSE(is_zero_insensitive(load_fixture("biased_coin.json")));

    LinearRepQ rep;
    rep.radix = 2;
    rep.dim = 2;
    rep.L = {1, 0};
    rep.A = {Matrix<Rational>(2, 2), Matrix<Rational>::identity(2)};
    rep.C = {1, 0};
    CHECK_FALSE(is_zero_insensitive(rep));  // L*A_0 = 0 != L

    // zero-insensitive => leading zeros do not change eval_word
    auto dich = load_fixture("dichopile.json");
    for (std::uint64_t n : {1ull, 5ull, 12ull, 100ull}) {
        DigitWord w = digits(n, 2);
        DigitWord padded = w;
        padded.digits.insert(padded.digits.begin(), {0, 0, 0});
        CHECK(eval_word(dich, w) == eval_word(dich, padded));
    }
}

TEST_CASE("q matrix") {
    auto rep = load_fixture("dichopile.json");
    Matrix<Rational> expected{{0, 0, 1, 0, 0, 0}, {1, 1, 0, 1, 0, 0}, {1, 0, 1, 1, 0, 0},
                              {0, 1, 0, 0, 0, 0}, {1, 0, 0, 0, 2, 1}, {1, 2, 0, 0, 0, 1}};
    CHECK(q_matrix(rep) == expected);

    auto coin = load_fixture("biased_coin.json");
    CHECK(q_matrix(coin) == Matrix<Rational>{{1}});

    LinearRepQ zero;
    zero.radix = 2;
    zero.dim = 2;
    zero.L = {1, 0};
    zero.C = {0, 1};
    zero.A = {Matrix<Rational>(2, 2), Matrix<Rational>(2, 2)};
    CHECK(q_matrix(zero).is_zero());
}

TEST_CASE("partial sums, direct") {
    auto rep = load_fixture("dichopile.json");
    CHECK(partial_sum_direct(rep, 4) == 5);  // f_4, partial sums of the differences telescope
    CHECK(partial_sum_direct(rep, 0) == eval_seq(rep, 0));
    auto sod = load_fixture("sum_of_digits.json");
    CHECK(partial_sum_direct(sod, 7) == 12);
}

TEST_CASE("sigma: direct enumeration vs O(K) recursion") {
    auto rep = load_fixture("dichopile.json");

    SECTION("K = 0 returns V") {
        Vec<Rational> v{1, 2, 3, 4, 5, 6};
        CHECK(sigma_direct(rep, v, 0, Rational(1, 3)) == v);
        CHECK(sigma_recursive(rep, v, 0, mantissa({0, 1})) == v);
    }

    SECTION("x = 1 gives Q^K V") {
        Matrix<Rational> q = q_matrix(rep);
        for (unsigned K : {1u, 3u, 5u}) {
            Vec<Rational> expect = mat_pow(q, K) * rep.C;
            CHECK(sigma_direct(rep, rep.C, K, Rational(1)) == expect);
            CHECK(sigma_recursive(rep, rep.C, K, mantissa(std::vector<unsigned>(K, 1))) == expect);
        }
    }

    SECTION("exhaustive agreement on the dyadic grid") {
        for (unsigned K = 1; K <= 8; ++K) {
            for (std::uint64_t j = 0; j < (1ull << K); ++j) {
                Rational x(j, std::uint64_t(1) << K);
                DigitWord m;
                m.radix = 2;
                for (int p = K - 1; p >= 0; --p) m.digits.push_back((j >> p) & 1);
                CHECK(sigma_direct(rep, rep.C, K, x) == sigma_recursive(rep, rep.C, K, m));
            }
        }
    }

    SECTION("guard") {
        CHECK_THROWS_AS(sigma_direct(rep, rep.C, 40, Rational(1)), InputError);
        DigitWord small = mantissa({1});
        CHECK_THROWS_AS(sigma_recursive(rep, rep.C, 2, small), InputError);
    }
}

TEST_CASE("partial sums via the series identity") {
    auto rep = load_fixture("dichopile.json");
    CHECK(partial_sum_via_series(rep, 4) == 5);
    // running comparison against the direct sums up to 10^4
    for (const auto& name : {"dichopile.json", "sum_of_digits.json", "rudin_shapiro.json"}) {
        auto r = load_fixture(name);
        Vec<Rational> u = eval_range(r, 10000);
        Rational acc(0);
        for (std::uint64_t N = 0; N <= 10000; ++N) {
            acc += u[N];
            if (partial_sum_via_series(r, N) != acc) {
                CAPTURE(name, N);
                REQUIRE(partial_sum_via_series(r, N) == acc);
            }
        }
    }
    // N = B^K - 1 with a zero-insensitive rep collapses to L Q^K C
    Matrix<Rational> q = q_matrix(rep);
    for (unsigned K : {1u, 4u, 9u})
        CHECK(partial_sum_via_series(rep, (1ull << K) - 1) == dot(rep.L, mat_pow(q, K) * rep.C));
}

TEST_CASE("random small representations: series identity is exact") {
    std::mt19937 rng(20240811);
    int built = 0;
    while (built < 40) {
        unsigned radix = 2 + (rng() % 2);
        std::size_t dim = 1 + (rng() % 3);
        bool zi = built % 2 == 0;
        LinearRepQ rep = random_rep(rng, radix, dim, zi);
        ++built;
        if (zi) REQUIRE(is_zero_insensitive(rep));
        for (std::uint64_t N : {0ull, 1ull, 7ull, 50ull, 200ull})
            CHECK(partial_sum_via_series(rep, N) == partial_sum_direct(rep, N));
    }
}

TEST_CASE("representation JSON round-trip is exact") {
    auto rep = load_fixture("biased_coin.json");
    auto j = rep_to_json(rep);
    auto back = rep_from_json(j);
    CHECK(back.L == rep.L);
    CHECK(back.C == rep.C);
    CHECK(back.A[0] == rep.A[0]);
    CHECK(back.A[1] == rep.A[1]);

    // big entries survive
    LinearRepQ big;
    big.radix = 2;
    big.dim = 1;
    big.L = {parse_rational("123456789012345678901234567890/7")};
    big.C = {parse_rational("-3/999999999999999999999999999989")};
    big.A = {Matrix<Rational>{{parse_rational("1/3")}}, Matrix<Rational>{{5}}};
    auto big2 = rep_from_json(rep_to_json(big));
    CHECK(big2.L == big.L);
    CHECK(big2.C == big.C);
    CHECK(big2.A[0] == big.A[0]);

    CHECK_THROWS_AS(parse_rational("1/0"), InputError);
    CHECK_THROWS_AS(parse_rational("x"), InputError);
}

TEST_CASE("transpose import flag") {
    auto rep = load_fixture("dichopile.json");
    auto j = rep_to_json(rep);
    auto t = rep_from_json(j, /*transpose=*/true);
    // importing the transpose convention swaps L/C and transposes each A_b,
    // which preserves all sequence values read in the opposite convention
    for (std::uint64_t n = 0; n <= 64; ++n) {
        DigitWord w = digits(n, 2);
        std::reverse(w.digits.begin(), w.digits.end());
        CHECK(eval_word(t, w) == eval_seq(rep, n));
    }
}

TEST_CASE("radix squaring matches the shipped radix-4 fixture") {
    auto rs2 = load_fixture("rudin_shapiro.json");
    auto rs4 = load_fixture("rudin_shapiro_radix4.json");
    auto sq = square_radix(rs2);
    REQUIRE(sq.radix == 4);
    for (unsigned b = 0; b < 4; ++b) CHECK(sq.A[b] == rs4.A[b]);
    for (std::uint64_t n = 0; n <= 1000; ++n) CHECK(eval_seq(sq, n) == eval_seq(rs2, n));
}

TEST_CASE("sigma in the float regime reproduces the rotation growth") {
    auto j = rep_from_json_float(load_json_file(testing_helpers::fixture("triangular_tiling.json")));
    for (unsigned Kp : {0u, 1u, 2u, 3u}) {
        DigitWord w;
        w.radix = 2;
        w.digits = {1, 1};
        for (unsigned i = 0; i < Kp; ++i) {
            w.digits.push_back(0);
            w.digits.push_back(1);
        }
        unsigned len = 2 * Kp + 2;
        Rational x(word_value(w), std::uint64_t(1) << len);
        Vec<double> direct = sigma_direct(j, j.C, len, x);
        Vec<double> rec = sigma_recursive(j, j.C, len, w);
        CHECK(std::abs(direct[0] - double(Kp + 1)) < 1e-9);
        CHECK(std::abs(direct[1]) < 1e-9);
        CHECK(std::abs(direct[0] - rec[0]) < 1e-12);
        CHECK(std::abs(direct[1] - rec[1]) < 1e-12);
    }
}

TEST_CASE("dimension-zero representation") {
    LinearRepQ zero;
    zero.radix = 3;
    zero.dim = 0;
    zero.A.assign(3, Matrix<Rational>(0, 0));
    CHECK(eval_seq(zero, 17) == 0);
    CHECK(partial_sum_direct(zero, 10) == 0);
    CHECK(partial_sum_via_series(zero, 10) == 0);
    CHECK(is_zero_insensitive(zero));
}
