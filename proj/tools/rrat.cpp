// rrat: asymptotic expansions of radix-rational sequences from linear
// representations. Subcommands cover evaluation, spectral analysis, the
// cascade algorithm, expansion assembly, Fourier coefficients of the
// periodic fluctuations, validation, and an end-to-end pipeline.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rrat/asym.hpp"
#include "rrat/closure.hpp"
#include "rrat/fourier.hpp"
#include "rrat/jsr.hpp"
#include "rrat/linrep_io.hpp"
#include "rrat/version.hpp"

using namespace rrat;
using nlohmann::ordered_json;

namespace {

struct RunConfig {
    std::string rep_path;
    std::string out_path;          // empty: stdout
    std::string oracle_path;
    std::string closed_forms_path;
    std::string basis_path;
    bool transpose = false;
    bool float_mode = false;
    unsigned T = 8;
    std::string norm = "1";
    double r = 0;  // 0: default rule
    unsigned depth = 10;
    long kmax = 10;
    unsigned digits = 30;
    std::uint64_t nmax = 4096;
    unsigned term = std::numeric_limits<unsigned>::max();
    std::string method = "newton";
    unsigned decimal = 0;  // 0: exact rational cells
    unsigned jobs = 1;     // accepted for interface stability; evaluation is sequential

    ordered_json echo(const std::string& cmd) const {
        ordered_json j;
        j["command"] = cmd;
        j["version"] = kVersion;
        j["rep"] = rep_path;
        j["transpose"] = transpose;
        j["float"] = float_mode;
        j["T"] = T;
        j["norm"] = norm;
        j["r"] = r;
        j["depth"] = depth;
        j["kmax"] = kmax;
        j["digits"] = digits;
        j["nmax"] = nmax;
        j["method"] = method;
        j["decimal"] = decimal;
        j["jobs"] = jobs;
        return j;
    }
};

std::ostream& open_out(const RunConfig& cfg, std::ofstream& file) {
    if (cfg.out_path.empty()) return std::cout;
    file.open(cfg.out_path);
    if (!file) throw InputError("cannot open output file: " + cfg.out_path);
    return file;
}

std::string cell(const Rational& v, unsigned decimal) {
    if (decimal == 0) return format_rational(v);
    std::ostringstream os;
    os.precision(decimal);
    os << std::scientific << to_double(v);
    return os.str();
}

std::string fmt(double v, int prec = 17) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

Matrix<Rational> json_matrix(const nlohmann::json& j) {
    std::size_t d = j.size();
    Matrix<Rational> m(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k)
            m(i, k) = parse_rational(j.at(i).at(k).get<std::string>());
    return m;
}

ExpansionOptions expansion_options(const RunConfig& cfg, const LinearRepQ& rep) {
    ExpansionOptions opt;
    opt.T = cfg.T;
    opt.norm = norm_from_name(cfg.norm);
    opt.depth = cfg.depth;
    if (cfg.r > 0) opt.r = cfg.r;
    if (!cfg.basis_path.empty()) {
        auto j = load_json_file(cfg.basis_path);
        opt.basis = jordan_from_matrices(q_matrix(rep), json_matrix(j.at("P")),
                                         json_matrix(j.at("Lambda")));
    }
    return opt;
}

void load_closed_forms(FourierEngine& engine, const std::string& path) {
    if (path.empty()) return;
    auto j = load_json_file(path);
    for (const auto& entry : j) {
        PiecewisePoly poly;
        for (const auto& b : entry.at("breakpoints"))
            poly.breakpoints.push_back(parse_rational(b.get<std::string>()));
        for (const auto& piece : entry.at("pieces")) {
            std::vector<Rational> coeffs;
            for (const auto& c : piece) coeffs.push_back(parse_rational(c.get<std::string>()));
            poly.pieces.push_back(std::move(coeffs));
        }
        engine.register_closed_form(entry.at("chain").get<std::size_t>(),
                                    entry.at("q").get<unsigned>(), std::move(poly));
    }
}

std::size_t default_term(const AsymptoticExpansion& exp) {
    for (std::size_t i = 0; i < exp.terms.size(); ++i)
        if (exp.terms[i].m == 0) return i;
    return 0;
}

// --- rendering ---------------------------------------------------------------

ordered_json expansion_json(const AsymptoticExpansion& exp) {
    ordered_json j;
    j["radix"] = exp.radix;
    j["error_exponent"] = exp.error_exponent;
    j["error_improved"] = exp.improved;
    j["error_log_power"] = exp.log_power;
    j["r"] = exp.r_used;
    j["norm"] = norm_name(exp.norm);
    j["T"] = exp.T;
    ordered_json chains = ordered_json::array();
    for (const auto& c : exp.chains) {
        ordered_json cj;
        cj["lambda"] = format_rational(c.lambda);
        cj["size"] = c.nu;
        cj["active_top"] = c.active_top;
        ordered_json g = ordered_json::array();
        for (const auto& x : c.gamma) g.push_back(format_rational(x));
        cj["gamma"] = g;
        chains.push_back(cj);
    }
    j["chains"] = chains;
    ordered_json terms = ordered_json::array();
    for (const auto& t : exp.terms) {
        ordered_json tj;
        tj["rho"] = format_rational(t.rho);
        tj["theta"] = t.theta_pi ? "pi" : "0";
        tj["m"] = t.m;
        ordered_json prims = ordered_json::array();
        for (const auto& p : t.phi) {
            ordered_json pj;
            pj["chain"] = p.chain;
            pj["q"] = p.q;
            pj["p"] = p.p;
            pj["coeff"] = format_rational(p.coeff);
            prims.push_back(pj);
        }
        tj["phi"] = prims;
        terms.push_back(tj);
    }
    j["terms"] = terms;
    return j;
}

// constant-Phi detection for display: the exact one-sided values at the
// integers agree and interior samples match them
bool phi_is_constant(const LinearRepQ& rep, const AsymptoticExpansion& exp,
                     const ExpansionTerm& term, Rational& value) {
    if (phi_continuity_defect(rep, exp, term) != 0) return false;
    Rational at_one(0);
    for (const PhiPrimitive& prim : term.phi) {
        if (prim.p != 0) continue;
        const RetainedChain& c = exp.chains[prim.chain];
        Rational s(0);
        for (std::size_t i = 0; i < exp.L.size(); ++i) s += exp.L[i] * c.V(i, prim.q);
        at_one += prim.coeff * s;
    }
    for (std::uint64_t j = 1; j < 8; ++j) {
        Rational x(exp.radix * 8 - j, exp.radix * 8);
        if (x < Rational(1, exp.radix)) continue;
        auto v = phi_value_at(rep, exp, term, x);
        if (std::abs(v.real() - to_double(at_one)) > 1e-12 || std::abs(v.imag()) > 1e-12)
            return false;
    }
    value = at_one;
    return true;
}

// collected log-scale rendering: binom(log_B N, m) written out as
// log_B(N)^m / m!, so a constant-Phi term prints like "1/2 * N * log2(N)"
std::string expansion_text_logscale(const LinearRepQ& rep, const AsymptoticExpansion& exp) {
    std::ostringstream os;
    const double logB = std::log(double(exp.radix));
    std::string logname = "log" + std::to_string(exp.radix);
    std::size_t phi_index = 0;
    bool first = true;
    for (const auto& term : exp.terms) {
        if (!first) os << " + ";
        first = false;
        Rational cst;
        bool constant = phi_is_constant(rep, exp, term, cst);
        if (constant) {
            Rational fact(1);
            for (unsigned i = 2; i <= term.m; ++i) fact *= i;
            os << format_rational(cst / fact) << " * ";
        }
        double alpha = std::log(to_double(term.rho)) / logB;
        if (alpha == 1.0)
            os << "N";
        else
            os << "N^" << fmt(alpha, 6);
        if (term.m == 1)
            os << " * " << logname << "(N)";
        else if (term.m >= 2)
            os << " * " << logname << "(N)^" << term.m;
        if (term.theta_pi) os << " * exp(i*pi*" << logname << " N)";
        if (!constant) os << " * Phi_" << phi_index++ << "(" << logname << " N)";
    }
    if (first) os << "0";
    os << " + O(N^" << fmt(exp.error_exponent, 6);
    if (exp.improved && exp.log_power > 0) os << " * " << logname << "(N)^" << exp.log_power;
    os << ")";
    return os.str();
}

std::string expansion_text(const LinearRepQ& rep, const AsymptoticExpansion& exp) {
    std::ostringstream os;
    const double logB = std::log(double(exp.radix));
    std::string logname = "log" + std::to_string(exp.radix);
    std::size_t phi_index = 0;
    bool first = true;
    for (const auto& term : exp.terms) {
        if (!first) os << " + ";
        first = false;
        double alpha = std::log(to_double(term.rho)) / logB;
        os << "N^" << fmt(alpha, 6);
        if (term.m >= 1) os << " * binom(" << logname << " N, " << term.m << ")";
        if (term.theta_pi) {
            // negative eigenvalue: the phase pairs with Phi into a real value
            os << " * Re[exp(i*pi*" << logname << " N) * Phi_" << phi_index++ << "("
               << logname << " N)]";
            continue;
        }
        Rational cst;
        if (phi_is_constant(rep, exp, term, cst))
            os << " * [" << format_rational(cst) << "]";
        else
            os << " * Phi_" << phi_index++ << "(" << logname << " N)";
    }
    if (first) os << "0";
    os << " + O(N^" << fmt(exp.error_exponent, 6);
    if (exp.improved && exp.log_power > 0)
        os << " * " << logname << "(N)^" << exp.log_power;
    os << ")";
    return os.str();
}

// --- subcommands ---------------------------------------------------------------

int cmd_eval(const RunConfig& cfg) {
    std::ofstream file;
    std::ostream& out = open_out(cfg, file);
    if (cfg.float_mode) {
        LinearRepD rep = rep_from_json_float(load_json_file(cfg.rep_path), cfg.transpose);
        rep.check();
        out << "n,u_n\n";
        Vec<double> u = eval_range(rep, cfg.nmax);
        for (std::uint64_t n = 0; n <= cfg.nmax; ++n) out << n << "," << fmt(u[n]) << "\n";
        return 0;
    }
    LinearRepQ rep = load_rep(cfg.rep_path, cfg.transpose);
    rep.check();
    out << "n,u_n\n";
    Vec<Rational> u = eval_range(rep, cfg.nmax);
    for (std::uint64_t n = 0; n <= cfg.nmax; ++n)
        out << n << "," << cell(u[n], cfg.decimal) << "\n";
    return 0;
}

int cmd_check(const RunConfig& cfg) {
    LinearRepQ rep = load_rep(cfg.rep_path, cfg.transpose);
    rep.check();
    ordered_json j;
    j["radix"] = rep.radix;
    j["dim"] = rep.dim;
    j["zero_insensitive"] = is_zero_insensitive(rep);
    if (rep.dim > 0) {
        auto cp = char_poly(q_matrix(rep));
        std::vector<Rational> rem;
        auto roots = rational_roots(cp, &rem);
        ordered_json ev = ordered_json::array();
        for (const auto& [r, m] : roots) {
            ordered_json e;
            e["value"] = format_rational(r);
            e["multiplicity"] = m;
            ev.push_back(e);
        }
        j["rational_eigenvalues"] = ev;
        j["irrational_factor_degree"] = rem.size() > 1 ? rem.size() - 1 : 0;
    }
    std::ofstream file;
    open_out(cfg, file) << j.dump(2) << "\n";
    return 0;
}

int cmd_jsr(const RunConfig& cfg) {
    NormId norm = norm_from_name(cfg.norm);
    ordered_json j;
    auto fill = [&](const auto& rep) {
        JsrBounds b = jsr_bounds(rep, cfg.T, norm);
        b.witness = finiteness_check(rep, cfg.T, norm);
        j["T"] = b.T;
        j["norm"] = norm_name(b.norm);
        j["upper"] = b.upper;
        j["lower"] = b.lower;
        if (b.max_norm_exact) j["max_norm"] = format_rational(b.max_norm);
        if (b.witness) {
            j["witness"]["word"] = b.witness->word.digits;
            j["witness"]["rho_star"] = b.witness->value;
            j["witness"]["exact"] = b.witness->exact;
            if (b.witness->exact)
                j["witness"]["radius_pow_T"] = format_rational(b.witness->radius_pow_T);
        } else {
            j["witness"] = nullptr;
        }
    };
    if (cfg.float_mode) {
        LinearRepD rep = rep_from_json_float(load_json_file(cfg.rep_path), cfg.transpose);
        rep.check();
        fill(rep);
    } else {
        LinearRepQ rep = load_rep(cfg.rep_path, cfg.transpose);
        rep.check();
        fill(rep);
    }
    std::ofstream file;
    open_out(cfg, file) << j.dump(2) << "\n";
    return 0;
}

int cmd_jordan(const RunConfig& cfg) {
    LinearRepQ rep = load_rep(cfg.rep_path, cfg.transpose);
    rep.check();
    JordanDecomposition jd = jordan_decompose(q_matrix(rep));
    decompose_c(jd, rep.C);
    ordered_json j;
    ordered_json chains = ordered_json::array();
    for (const auto& c : jd.chains) {
        ordered_json cj;
        cj["lambda"] = format_rational(c.lambda.value);
        cj["size"] = c.size;
        chains.push_back(cj);
    }
    j["chains"] = chains;
    ordered_json g = ordered_json::array();
    for (const auto& x : jd.gamma) g.push_back(format_rational(x));
    j["gamma"] = g;
    auto matj = [](const Matrix<Rational>& m) {
        ordered_json rows = ordered_json::array();
        for (std::size_t i = 0; i < m.rows(); ++i) {
            ordered_json row = ordered_json::array();
            for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(format_rational(m(i, k)));
            rows.push_back(row);
        }
        return rows;
    };
    j["P"] = matj(jd.P);
    j["Lambda"] = matj(jd.Lambda);
    std::ofstream file;
    open_out(cfg, file) << j.dump(2) << "\n";
    return 0;
}

int cmd_cascade(const RunConfig& cfg) {
    LinearRepQ rep = load_rep(cfg.rep_path, cfg.transpose);
    rep.check();
    JordanDecomposition jd = jordan_decompose(q_matrix(rep));
    decompose_c(jd, rep.C);
    std::ofstream file;
    std::ostream& out = open_out(cfg, file);
    // solve each gamma-active chain and emit one block of columns per chain
    std::vector<std::pair<std::size_t, DilationSolution>> sols;
    for (std::size_t i = 0; i < jd.chains.size(); ++i) {
        const JordanChain& ch = jd.chains[i];
        bool active = false;
        for (std::size_t q = 0; q < ch.size; ++q)
            if (jd.gamma[ch.first_col + q] != 0) active = true;
        if (!active || ch.lambda.value == 0) continue;
        sols.emplace_back(
            i, cascade_solve(rep, ch.lambda, ch.size, chain_vectors(jd, ch), cfg.depth));
    }
    out << "x";
    for (auto& [ci, sol] : sols)
        for (std::size_t comp = 0; comp < rep.dim; ++comp)
            for (std::size_t q = 0; q < sol.nu; ++q)
                out << ",chain" << ci << "_F" << q << "_c" << (comp + 1);
    out << "\n";
    if (sols.empty()) return 0;
    for (const auto& [x, unused] : sols.front().second.values) {
        (void)unused;
        out << cell(x, 0);
        for (auto& [ci, sol] : sols) {
            const Matrix<Rational>& f = sol.at(x);
            for (std::size_t comp = 0; comp < rep.dim; ++comp)
                for (std::size_t q = 0; q < sol.nu; ++q)
                    out << "," << cell(f(comp, q), cfg.decimal);
        }
        out << "\n";
    }
    return 0;
}

int cmd_expand(const RunConfig& cfg) {
    LinearRepQ rep = load_rep(cfg.rep_path, cfg.transpose);
    rep.check();
    AsymptoticExpansion exp = build_expansion(rep, expansion_options(cfg, rep));
    ordered_json j = expansion_json(exp);
    j["text"] = expansion_text(rep, exp);
    j["text_logscale"] = expansion_text_logscale(rep, exp);
    std::ofstream file;
    open_out(cfg, file) << j.dump(2) << "\n";
    return 0;
}

int cmd_phi(const RunConfig& cfg) {
    LinearRepQ rep = load_rep(cfg.rep_path, cfg.transpose);
    rep.check();
    AsymptoticExpansion exp = build_expansion(rep, expansion_options(cfg, rep));
    std::ofstream file;
    std::ostream& out = open_out(cfg, file);
    out << "t";
    for (std::size_t i = 0; i < exp.terms.size(); ++i)
        out << ",phi" << i << "_re,phi" << i << "_im";
    out << "\n";
    if (exp.empty()) return 0;
    Int scale = int_pow(Int(exp.radix), cfg.depth);
    for (Int jx = scale / exp.radix; jx <= scale; ++jx) {
        Rational x(jx, scale);
        double t = 1 + std::log(to_double(x)) / std::log(double(exp.radix));
        out << fmt(t);
        for (const auto& term : exp.terms) {
            auto v = phi_value_at(rep, exp, term, x);
            out << "," << fmt(v.real()) << "," << fmt(v.imag());
        }
        out << "\n";
    }
    return 0;
}

int cmd_fourier(const RunConfig& cfg) {
    LinearRepQ rep = load_rep(cfg.rep_path, cfg.transpose);
    rep.check();
    AsymptoticExpansion exp = build_expansion(rep, expansion_options(cfg, rep));
    if (exp.empty()) throw UnsupportedError("fourier: empty expansion has no fluctuation");
    std::size_t term =
        cfg.term == std::numeric_limits<unsigned>::max() ? default_term(exp) : cfg.term;
    FourierEngine engine(rep, exp);
    load_closed_forms(engine, cfg.closed_forms_path);

    std::ofstream file;
    std::ostream& out = open_out(cfg, file);
    bool newton = cfg.method == "newton" || cfg.method == "both";
    bool trap = cfg.method == "trapezoid" || cfg.method == "both";
    if (!newton && !trap) throw InputError("fourier: method must be newton, trapezoid or both");
    std::vector<FourierCoefficient> nc, tc;
    for (long k = 0; k <= cfg.kmax; ++k) {
        if (newton) nc.push_back(engine.coefficient(term, k, cfg.digits));
        if (trap) tc.push_back(fourier_trapezoid(rep, exp, term, k, cfg.depth));
    }
    out << "k,re,im,method,est_error\n";
    for (const auto& c : nc)
        out << c.k << "," << c.re << "," << c.im << ",newton," << fmt(c.est_error, 3) << "\n";
    for (const auto& c : tc)
        out << c.k << "," << c.re << "," << c.im << ",trapezoid," << fmt(c.est_error, 3) << "\n";
    if (newton && trap) {
        out << "\nk,newton_re,newton_im,trapezoid_re,trapezoid_im,gap\n";
        for (std::size_t i = 0; i < nc.size(); ++i) {
            double gap = std::hypot(nc[i].re_d - tc[i].re_d, nc[i].im_d - tc[i].im_d);
            out << nc[i].k << "," << fmt(nc[i].re_d) << "," << fmt(nc[i].im_d) << ","
                << fmt(tc[i].re_d) << "," << fmt(tc[i].im_d) << "," << fmt(gap, 3) << "\n";
        }
    }
    return 0;
}

int cmd_validate(const RunConfig& cfg) {
    std::ofstream file;
    std::ostream& out = open_out(cfg, file);
    LinearRepQ rep = load_rep(cfg.rep_path, cfg.transpose);
    int failures = 0;
    auto report = [&](const std::string& name, bool ok, const std::string& detail = "") {
        out << (ok ? "PASS " : "FAIL ") << name;
        if (!ok && !detail.empty()) out << ": " << detail;
        out << "\n";
        if (!ok) ++failures;
    };

    try {
        rep.check();
        report("structure", true);
    } catch (const Error& e) {
        report("structure", false, e.what());
        out << "result: FAIL\n";
        return 1;
    }

    {
        auto back = rep_from_json(rep_to_json(rep));
        bool ok = back.L == rep.L && back.C == rep.C;
        for (unsigned b = 0; ok && b < rep.radix; ++b) ok = back.A[b] == rep.A[b];
        report("json_round_trip", ok);
    }
    if (!is_zero_insensitive(rep))
        out << "NOTE zero_insensitive: L*A_0 != L; `expand` will refuse this representation\n";

    {
        bool ok = true;
        std::string detail;
        for (unsigned K = 0; K <= 4 && ok; ++K) {
            Int den = int_pow(Int(rep.radix), K);
            for (Int j = 0; j < den && ok; ++j) {
                Rational x(j, den);
                DigitWord m;
                m.radix = rep.radix;
                Int v = j;
                std::vector<unsigned> ds;
                for (unsigned p = 0; p < K; ++p) {
                    ds.push_back(static_cast<unsigned>(v % rep.radix));
                    v /= rep.radix;
                }
                m.digits.assign(ds.rbegin(), ds.rend());
                if (sigma_direct(rep, rep.C, K, x) != sigma_recursive(rep, rep.C, K, m)) {
                    ok = false;
                    detail = "Sigma_K mismatch at K=" + std::to_string(K) +
                             ", x=" + format_rational(x);
                }
            }
        }
        report("sigma_recursive_vs_direct", ok, detail);
    }
    {
        bool ok = true;
        std::string detail;
        std::uint64_t lim = std::min<std::uint64_t>(cfg.nmax, 500);
        Rational acc(0);
        Vec<Rational> u = eval_range(rep, lim);
        for (std::uint64_t n = 0; n <= lim; ++n) {
            acc += u[n];
            if (partial_sum_via_series(rep, n) != acc) {
                ok = false;
                detail = "partial sum identity fails at N=" + std::to_string(n);
                break;
            }
        }
        report("partial_sum_series_vs_direct", ok, detail);
    }
    if (rep.dim > 0) {
        try {
            JordanDecomposition jd = jordan_decompose(q_matrix(rep));
            report("jordan_exact", q_matrix(rep) * jd.P == jd.P * jd.Lambda);
        } catch (const UnsupportedError& e) {
            out << "NOTE jordan_exact skipped: " << e.what() << "\n";
        }
    }
    if (!cfg.oracle_path.empty()) {
        std::ifstream in(cfg.oracle_path);
        if (!in) throw InputError("cannot open oracle file: " + cfg.oracle_path);
        std::string line;
        bool ok = true;
        std::string detail;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto comma = line.find(',');
            if (comma == std::string::npos)
                throw InputError("oracle CSV: malformed line " + line);
            std::uint64_t n = std::stoull(line.substr(0, comma));
            Rational v = parse_rational(line.substr(comma + 1));
            if (eval_seq(rep, n) != v) {
                ok = false;
                detail = "oracle mismatch at n=" + std::to_string(n);
                break;
            }
        }
        report("oracle", ok, detail);
    }
    out << "result: " << (failures == 0 ? "PASS" : "FAIL") << "\n";
    return failures == 0 ? 0 : 1;
}

int cmd_pipeline(const RunConfig& cfg) {
    if (cfg.out_path.empty()) throw InputError("pipeline: --out DIR is required");
    std::filesystem::create_directories(cfg.out_path);
    auto path = [&](const std::string& name) { return cfg.out_path + "/" + name; };

    LinearRepQ rep = load_rep(cfg.rep_path, cfg.transpose);
    rep.check();

    ordered_json manifest;
    manifest["config"] = cfg.echo("pipeline");
    ordered_json files = ordered_json::array();

    RunConfig sub = cfg;

    if (!is_zero_insensitive(rep)) {
        // no expansion possible; still emit the dilation solutions of the
        // gamma-active chains (e.g. a limit distribution function)
        manifest["note"] =
            "representation is not zero-insensitive: expansion skipped, cascade data only";
        sub.out_path = path("cascade.csv");
        cmd_cascade(sub);
        files.push_back("cascade.csv");
        manifest["files"] = files;
        std::ofstream mf(path("manifest.json"));
        mf << manifest.dump(2) << "\n";
        return 0;
    }

    AsymptoticExpansion exp = build_expansion(rep, expansion_options(cfg, rep));
    {
        ordered_json j = expansion_json(exp);
        j["text"] = expansion_text(rep, exp);
        j["text_logscale"] = expansion_text_logscale(rep, exp);
        std::ofstream f(path("expansion.json"));
        f << j.dump(2) << "\n";
        std::ofstream t(path("expansion.txt"));
        t << expansion_text(rep, exp) << "\n" << expansion_text_logscale(rep, exp) << "\n";
        files.push_back("expansion.json");
        files.push_back("expansion.txt");
    }
    sub.out_path = path("cascade.csv");
    cmd_cascade(sub);
    files.push_back("cascade.csv");
    sub.out_path = path("phi.csv");
    cmd_phi(sub);
    files.push_back("phi.csv");
    if (!exp.empty()) {
        sub.out_path = path("fourier.csv");
        sub.method = "both";
        try {
            cmd_fourier(sub);
            files.push_back("fourier.csv");
        } catch (const UnsupportedError& e) {
            manifest["fourier_note"] = e.what();
        }
        std::vector<std::uint64_t> Ns;
        for (std::uint64_t n = 256; n <= cfg.nmax; n *= 2) Ns.push_back(n);
        if (Ns.empty()) Ns.push_back(cfg.nmax);
        auto rows = residual_report(rep, exp, Ns);
        std::ofstream f(path("residuals.csv"));
        f << "N,s_N,predicted,residual,residual_scaled\n";
        for (const auto& row : rows)
            f << row.N << "," << format_rational(row.exact_sum) << ","
              << format_rational(row.predicted) << "," << format_rational(row.residual) << ","
              << fmt(row.scaled) << "\n";
        files.push_back("residuals.csv");
    }
    manifest["expansion_text"] = expansion_text(rep, exp);
    manifest["files"] = files;
    std::ofstream mf(path("manifest.json"));
    mf << manifest.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"asymptotic expansions of radix-rational sequences"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    RunConfig cfg;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--rep", cfg.rep_path, "representation JSON file")->required();
        sub->add_option("--out", cfg.out_path, "output file (default: stdout)");
        sub->add_flag("--transpose", cfg.transpose,
                      "import a representation written in the reversed-word convention");
        sub->add_option("--jobs", cfg.jobs,
                        "worker cap; evaluation is sequential and deterministic at every level");
    };

    auto* eval = app.add_subcommand("eval", "evaluate u_n for n = 0..nmax (CSV)");
    add_common(eval);
    eval->add_option("--nmax", cfg.nmax, "largest index (default 4096)");
    eval->add_flag("--float", cfg.float_mode, "float regime for non-rational entries");
    eval->add_option("--decimal", cfg.decimal, "decimal digits (default: exact rationals)");

    auto* check = app.add_subcommand("check", "structural summary of a representation");
    add_common(check);

    auto* jsr = app.add_subcommand("jsr", "joint spectral radius bounds (JSON)");
    add_common(jsr);
    jsr->add_option("--t", cfg.T, "word length (default 8)");
    jsr->add_option("--norm", cfg.norm, "subordinate norm: 1, inf or 2 (default 1)");
    jsr->add_flag("--float", cfg.float_mode, "float regime");

    auto* jordan = app.add_subcommand("jordan", "exact Jordan data of Q (JSON)");
    add_common(jordan);

    auto* cascade = app.add_subcommand("cascade", "dilation solutions on the B-adic grid (CSV)");
    add_common(cascade);
    cascade->add_option("--depth", cfg.depth, "grid depth K (default 10)");
    cascade->add_option("--decimal", cfg.decimal, "decimal digits (default: exact rationals)");

    auto* expand = app.add_subcommand("expand", "assemble the asymptotic expansion");
    add_common(expand);
    expand->add_option("--r", cfg.r, "error cut modulus (default: finiteness rule)");
    expand->add_option("--t", cfg.T, "JSR word length (default 8)");
    expand->add_option("--norm", cfg.norm, "subordinate norm (default 1)");
    expand->add_option("--depth", cfg.depth, "cascade depth (default 10)");
    expand->add_option("--basis", cfg.basis_path, "Jordan basis JSON {P, Lambda}");

    auto* phi = app.add_subcommand("phi", "periodic fluctuations on a grid (CSV)");
    add_common(phi);
    phi->add_option("--depth", cfg.depth, "grid depth (default 10)");
    phi->add_option("--r", cfg.r, "error cut modulus");
    phi->add_option("--basis", cfg.basis_path, "Jordan basis JSON {P, Lambda}");

    auto* fourier = app.add_subcommand("fourier", "Fourier coefficients of the fluctuation");
    add_common(fourier);
    fourier->add_option("--kmax", cfg.kmax, "largest harmonic (default 10)");
    fourier->add_option("--digits", cfg.digits, "requested digits (default 30)");
    fourier->add_option("--method", cfg.method, "newton, trapezoid or both (default newton)");
    fourier->add_option("--depth", cfg.depth, "cascade/trapezoid depth (default 10)");
    fourier->add_option("--term", cfg.term, "expansion term index (default: first m = 0 term)");
    fourier->add_option("--closed-forms", cfg.closed_forms_path,
                        "JSON list of verified closed forms per (chain, q)");
    fourier->add_option("--basis", cfg.basis_path, "Jordan basis JSON {P, Lambda}");
    fourier->add_option("--r", cfg.r, "error cut modulus");

    auto* validate = app.add_subcommand("validate", "run the identity suite; exit 1 on failure");
    add_common(validate);
    validate->add_option("--nmax", cfg.nmax, "partial-sum check bound (default 4096, capped 500)");
    validate->add_option("--oracle", cfg.oracle_path, "CSV n,value with exact reference values");

    auto* pipeline = app.add_subcommand("pipeline", "full artifact bundle into --out DIR");
    add_common(pipeline);
    pipeline->add_option("--r", cfg.r, "error cut modulus");
    pipeline->add_option("--t", cfg.T, "JSR word length");
    pipeline->add_option("--norm", cfg.norm, "subordinate norm");
    pipeline->add_option("--depth", cfg.depth, "cascade depth");
    pipeline->add_option("--kmax", cfg.kmax, "largest harmonic");
    pipeline->add_option("--digits", cfg.digits, "fourier digits");
    pipeline->add_option("--nmax", cfg.nmax, "residual grid upper bound");
    pipeline->add_option("--closed-forms", cfg.closed_forms_path, "closed forms JSON");
    pipeline->add_option("--basis", cfg.basis_path, "Jordan basis JSON {P, Lambda}");

    CLI11_PARSE(app, argc, argv);

    try {
        std::string name = app.get_subcommands().front()->get_name();
        std::cerr << cfg.echo(name).dump() << "\n";  // config echo for reproducibility
        if (name == "eval") return cmd_eval(cfg);
        if (name == "check") return cmd_check(cfg);
        if (name == "jsr") return cmd_jsr(cfg);
        if (name == "jordan") return cmd_jordan(cfg);
        if (name == "cascade") return cmd_cascade(cfg);
        if (name == "expand") return cmd_expand(cfg);
        if (name == "phi") return cmd_phi(cfg);
        if (name == "fourier") return cmd_fourier(cfg);
        if (name == "validate") return cmd_validate(cfg);
        if (name == "pipeline") return cmd_pipeline(cfg);
        std::cerr << "unknown subcommand\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
