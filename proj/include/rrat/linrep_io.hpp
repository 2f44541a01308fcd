#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "rrat/linrep.hpp"

namespace rrat {

inline nlohmann::ordered_json rep_to_json(const LinearRepQ& rep) {
    nlohmann::ordered_json j;
    j["radix"] = rep.radix;
    j["dim"] = rep.dim;
    auto vec = [](const Vec<Rational>& v) {
        nlohmann::ordered_json a = nlohmann::ordered_json::array();
        for (const auto& x : v) a.push_back(format_rational(x));
        return a;
    };
    j["L"] = vec(rep.L);
    nlohmann::ordered_json mats = nlohmann::ordered_json::array();
    for (const auto& m : rep.A) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < m.rows(); ++i) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(format_rational(m(i, k)));
            rows.push_back(row);
        }
        mats.push_back(rows);
    }
    j["A"] = mats;
    j["C"] = vec(rep.C);
    return j;
}

namespace detail {

inline Rational json_rat(const nlohmann::json& v) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    throw InputError("expected an exact rational (\"p/q\" string or integer), got: " + v.dump());
}

inline double json_num(const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s.find('/') != std::string::npos) return to_double(parse_rational(s));
        return std::stod(s);
    }
    throw InputError("expected a numeric entry, got: " + v.dump());
}

template <class T, class Conv>
LinearRep<T> rep_from_json_impl(const nlohmann::json& j, Conv conv) {
    LinearRep<T> rep;
    rep.radix = j.at("radix").get<unsigned>();
    rep.dim = j.at("dim").get<std::size_t>();
    for (const auto& v : j.at("L")) rep.L.push_back(conv(v));
    for (const auto& v : j.at("C")) rep.C.push_back(conv(v));
    for (const auto& mj : j.at("A")) {
        Matrix<T> m(rep.dim, rep.dim);
        std::size_t i = 0;
        for (const auto& row : mj) {
            std::size_t k = 0;
            for (const auto& v : row) {
                if (i >= rep.dim || k >= rep.dim) throw InputError("matrix larger than dim");
                m(i, k++) = conv(v);
            }
            if (k != rep.dim) throw InputError("matrix row shorter than dim");
            ++i;
        }
        if (i != rep.dim) throw InputError("matrix with wrong number of rows");
        rep.A.push_back(std::move(m));
    }
    rep.check();
    return rep;
}

/// Imports a representation written in the reversed-word convention
/// (s_n = L A_lsd ... A_msd C): transpose every A_b and swap L with C.
template <class T>
LinearRep<T> transpose_convention(LinearRep<T> rep) {
    for (auto& a : rep.A) a = a.transposed();
    std::swap(rep.L, rep.C);
    return rep;
}

}  // namespace detail

inline bool rep_json_is_float(const nlohmann::json& j) {
    return j.value("mode", std::string("exact")) == "float";
}

inline LinearRepQ rep_from_json(const nlohmann::json& j, bool transpose = false) {
    if (rep_json_is_float(j))
        throw InputError("representation file is in float mode; exact regime required");
    auto rep = detail::rep_from_json_impl<Rational>(j, detail::json_rat);
    return transpose ? detail::transpose_convention(std::move(rep)) : rep;
}

inline LinearRepD rep_from_json_float(const nlohmann::json& j, bool transpose = false) {
    auto rep = detail::rep_from_json_impl<double>(j, detail::json_num);
    return transpose ? detail::transpose_convention(std::move(rep)) : rep;
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InputError("JSON parse error in " + path + ": " + e.what());
    }
    return j;
}

inline LinearRepQ load_rep(const std::string& path, bool transpose = false) {
    return rep_from_json(load_json_file(path), transpose);
}

inline void save_rep(const LinearRepQ& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open file for writing: " + path);
    out << rep_to_json(rep).dump(2) << "\n";
}

}  // namespace rrat
