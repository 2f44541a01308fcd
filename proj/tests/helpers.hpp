#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "rrat/jordan.hpp"
#include "rrat/linrep.hpp"
#include "rrat/linrep_io.hpp"

namespace testing_helpers {

inline std::string fixture(const std::string& name) {
    return std::string(RRAT_FIXTURE_DIR) + "/" + name;
}

inline rrat::LinearRepQ load_fixture(const std::string& name) {
    return rrat::load_rep(fixture(name));
}

inline rrat::Matrix<rrat::Rational> matrix_fixture(const nlohmann::json& j) {
    std::size_t d = j.size();
    rrat::Matrix<rrat::Rational> m(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k)
            m(i, k) = rrat::parse_rational(j.at(i).at(k).get<std::string>());
    return m;
}

// dichopile time recurrence: f_n = n + g_n, g_n = f_{floor(n/2)-1} + g_{ceil(n/2)}
// for n >= 2, with f_0 = g_0 = 0, f_1 = 1, g_1 = 0.
class DichopileOracle {
public:
    rrat::Rational f(std::uint64_t n) {
        if (n <= 1) return rrat::Rational(n);
        auto it = f_.find(n);
        if (it != f_.end()) return it->second;
        rrat::Rational v = rrat::Rational(n) + g(n);
        f_.emplace(n, v);
        return v;
    }
    rrat::Rational g(std::uint64_t n) {
        if (n <= 1) return 0;
        auto it = g_.find(n);
        if (it != g_.end()) return it->second;
        rrat::Rational v = f(n / 2 - 1) + g((n + 1) / 2);
        g_.emplace(n, v);
        return v;
    }
    // u_n = f_n - f_{n-1} with f_{-1} = 0
    rrat::Rational u(std::uint64_t n) { return n == 0 ? f(0) : f(n) - f(n - 1); }

private:
    std::map<std::uint64_t, rrat::Rational> f_, g_;
};

// Rudin-Shapiro: u_n = (-1)^{number of (overlapping) "11" patterns in binary n}
inline int rudin_shapiro(std::uint64_t n) {
    int count = 0;
    while (n) {
        if ((n & 3) == 3) ++count;
        n >>= 1;
    }
    return count % 2 ? -1 : 1;
}

// binary sum of digits
inline std::uint64_t sum_of_digits(std::uint64_t n) {
    std::uint64_t s = 0;
    while (n) {
        s += n & 1;
        n >>= 1;
    }
    return s;
}

// the published Jordan basis for the dichopile Q, from the shipped fixture
inline rrat::JordanDecomposition dichopile_jordan(const rrat::LinearRepQ& rep) {
    auto j = rrat::load_json_file(fixture("dichopile_jordan.json"));
    return rrat::jordan_from_matrices(rrat::q_matrix(rep), matrix_fixture(j.at("P")),
                                      matrix_fixture(j.at("Lambda")));
}

// binary powering cost: c_0 = c_1 = 0, c_{2n} = c_n + 1, c_{2n+1} = c_n + 2 (n >= 1)
inline std::uint64_t powering_cost(std::uint64_t n) {
    if (n <= 1) return 0;
    return powering_cost(n / 2) + 1 + (n & 1);
}

}  // namespace testing_helpers
