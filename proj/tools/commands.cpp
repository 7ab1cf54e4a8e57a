#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <fmt/format.h>

#include "dv/errors.hpp"
#include "dv/f3_loop.hpp"
#include "dv/io.hpp"
#include "dv/lemma_suites.hpp"
#include "dv/position_space.hpp"
#include "dv/radial_spectral.hpp"
#include "dv/renormalization.hpp"
#include "dv/special_functions.hpp"

namespace dv::cli {

namespace {

using nlohmann::json;

std::string path_in(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.output_dir) / name).string();
}

std::vector<double> log_spaced(double lo, double hi, long long n) {
    if (!(lo > 0.0) || !(hi > lo)) throw DomainError("grid requires 0 < min < max");
    if (n < 2) throw DomainError("grid requires at least 2 points");
    return log_grid(lo, hi, static_cast<std::size_t>(n));
}

CutoffParams cutoff_from(const RunConfig& cfg) {
    const auto l = cfg.optional_number("log_lambda");
    if (!l) throw DomainError("missing parameter --log-lambda");
    return make_cutoff(*l);
}

AnalyticDensity density_from(const RunConfig& cfg) {
    const double sigma = cfg.number("sigma");
    if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
    return AnalyticDensity::gaussian(cfg.number("charge"), sigma);
}

std::vector<double> grid_from(const RunConfig& cfg) {
    return log_spaced(cfg.number("k_min"), cfg.number("k_max"), cfg.integer("grid_points"));
}

json state_json(const CouplingState& s) {
    return {{"alpha_bare", s.alpha_bare()},
            {"alpha_ph", s.alpha_ph()},
            {"z3", s.z3()},
            {"b_lambda", s.cutoff().b_lambda},
            {"log_lambda", s.cutoff().log_lambda}};
}

json norm_json(const NormPair& n) { return {{"l2", n.l2}, {"coulomb", n.coulomb}, {"combined", n.combined}}; }

CommandOutcome cmd_multiplier(const RunConfig& cfg) {
    const std::string& fn = cfg.string("function");
    const std::vector<double> r = log_spaced(cfg.number("rmin"), cfg.number("rmax"), cfg.integer("points"));
    std::function<double(double)> f;
    if (fn == "U") {
        f = uehling_multiplier;
    } else if (fn == "U_prime") {
        f = uehling_derivative;
    } else if (fn == "Phi") {
        f = phi;
    } else if (fn == "E") {
        f = energy;
    } else if (fn == "U_Lambda" || fn == "B_Lambda_k" || fn == "Z_Lambda") {
        const CutoffParams c = cutoff_from(cfg);
        if (fn == "U_Lambda") f = [c](double x) { return cutoff_multiplier(x, c); };
        if (fn == "B_Lambda_k") f = [c](double x) { return b_lambda_k(x, c); };
        if (fn == "Z_Lambda") f = [c](double x) { return z_lambda(x, c); };
    } else {
        throw DomainError("unknown function '" + fn + "'");
    }
    const std::vector<double> v = multiplier_values(r, MultiplierSpec::custom_function(f));
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < r.size(); ++i) rows.push_back({r[i], v[i]});
    write_csv(path_in(cfg, "multiplier.csv"), {"r", "value"}, rows);
    return {0, {{"rows", rows.size()}}};
}

CommandOutcome cmd_renorm(const RunConfig& cfg) {
    const auto aph = cfg.optional_number("alpha_ph");
    const auto z3 = cfg.optional_number("z3");
    const auto abare = cfg.optional_number("alpha_bare");
    const auto ll = cfg.optional_number("log_lambda");
    std::optional<CouplingState> st;
    if (aph && z3 && !abare && !ll) {
        st = bare_from_physical(*aph, *z3);
    } else if (abare && ll && !aph && !z3) {
        st = physical_from_bare(*abare, make_cutoff(*ll));
    } else {
        throw DomainError("renorm needs either --alpha-ph and --z3, or --alpha-bare and --log-lambda");
    }
    const json out = state_json(*st);
    write_json(path_in(cfg, "renorm.json"), out);
    return {0, out};
}

CommandOutcome cmd_expand(const RunConfig& cfg) {
    const long long order = cfg.integer("order");
    if (order < 0 || order > 64) throw DomainError("order must be in [0, 64]");
    const RadialProfile nu = sample_density(density_from(cfg), grid_from(cfg));
    std::optional<CutoffParams> cut;
    if (auto l = cfg.optional_number("log_lambda")) cut = make_cutoff(*l);
    std::optional<F3GalerkinEvaluator> f3;
    if (cfg.boolean("f3")) {
        std::vector<double> sig;
        std::stringstream ss(cfg.string("probe_sigmas"));
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                sig.push_back(std::stod(cell));
            } catch (...) {
                throw DomainError("probe_sigmas must be a comma-separated list of numbers");
            }
        }
        const long long n = cfg.integer("f3_samples");
        if (n <= 0) throw DomainError("f3_samples must be > 0");
        f3.emplace(sig, static_cast<std::uint64_t>(n), cfg.seed);
    }
    const ExpansionResult ex = expand_coefficients(nu, static_cast<int>(order), cut, f3 ? &*f3 : nullptr);
    write_expansion(cfg.output_dir, ex);
    return {0, {{"orders", ex.orders.size()}, {"unsupported_terms", ex.unsupported_terms}}};
}

CommandOutcome cmd_scf(const RunConfig& cfg) {
    const long long order = cfg.integer("order");
    if (order < 0 || order > 64) throw DomainError("order must be in [0, 64]");
    const CouplingState st = bare_from_physical(cfg.number("alpha_ph"), cfg.number("z3"));
    const RadialProfile nu = sample_density(density_from(cfg), grid_from(cfg));
    const RadialProfile rho = solve_linear_scf(nu, st);
    const RadialProfile rho_q = polarization_density(nu, rho, st);
    const RemainderResult rem = remainder(nu, static_cast<int>(order), st);
    write_profile_csv(path_in(cfg, "rho_ph.csv"), rho);
    write_profile_csv(path_in(cfg, "rho_q.csv"), rho_q);
    write_profile_csv(path_in(cfg, "remainder.csv"), rem.r_n);
    json out = state_json(st);
    const double nu0 = nu.value_at(0.0);
    out["nu_hat_0"] = nu0;
    out["total_charge"] = renormalized_total_charge(nu0, st);
    out["order"] = order;
    out["remainder_norm"] = norm_json(rem.norm);
    out["rho_ph_norm"] = norm_json(norms(rho));
    write_json(path_in(cfg, "scf.json"), out);
    return {0, out};
}

CommandOutcome cmd_uehling(const RunConfig& cfg) {
    const std::string& route = cfg.string("route");
    if (route != "direct" && route != "fourier" && route != "both")
        throw DomainError("route must be direct, fourier or both");
    const AnalyticDensity d = density_from(cfg);
    const std::vector<double> xs = log_spaced(cfg.number("xmin"), cfg.number("xmax"), cfg.integer("points"));
    json out = json::object();
    std::optional<RadialPotential> direct, fourier;
    if (route != "fourier") {
        direct = uehling_potential_direct(d, xs);
        write_potential_csv(path_in(cfg, "potential_direct.csv"), *direct);
    }
    if (route != "direct") {
        fourier = uehling_potential_fourier(sample_density(d, grid_from(cfg)), xs);
        write_potential_csv(path_in(cfg, "potential_fourier.csv"), *fourier);
    }
    if (direct && fourier) {
        double worst = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            worst = std::max(worst, std::abs(direct->values[i] - fourier->values[i]) / std::abs(fourier->values[i]));
        out["max_route_rel_diff"] = worst;
    }
    return {0, out};
}

CommandOutcome cmd_lemma_check(const RunConfig& cfg) {
    const std::string& which = cfg.string("suite");
    std::vector<std::string> names = which == "all" ? default_suites() : std::vector<std::string>{which};
    json suites = json::array();
    bool all_passed = true;
    std::printf("%-18s %-6s %s\n", "suite", "result", "detail");
    for (const auto& n : names) {
        const SuiteResult r = run_suite(n, cfg.seed);
        all_passed = all_passed && r.passed;
        suites.push_back(r.to_json());
        std::printf("%-18s %-6s %s\n", n.c_str(), r.passed ? "PASS" : "FAIL", r.detail.c_str());
        std::fflush(stdout);
    }
    const json out = {{"suites", suites}, {"all_passed", all_passed}};
    write_json(path_in(cfg, "lemma_check.json"), out);
    return {all_passed ? 0 : 2, {{"all_passed", all_passed}}};
}

CommandOutcome cmd_f3_mc(const RunConfig& cfg) {
    const std::string& fn = cfg.string("functional");
    const long long n = cfg.integer("samples");
    if (n <= 0) throw DomainError("samples must be > 0");
    const double sigma = cfg.number("mu_sigma");
    const double zsig = cfg.number("zeta_sigma");
    if (!(sigma > 0.0) || !(zsig > 0.0)) throw DomainError("widths must be > 0");
    const std::vector<double> grid = log_grid();
    const RadialProfile mu = gaussian_profile(grid, cfg.number("charge"), sigma);
    McEstimate e;
    if (fn == "loop1") {
        e = loop1_response_mc(mu, cfg.number("k"), cutoff_from(cfg), static_cast<std::uint64_t>(n), cfg.seed);
    } else if (fn == "f3") {
        std::optional<CutoffParams> cut;
        if (auto l = cfg.optional_number("log_lambda")) cut = make_cutoff(*l);
        const RadialProfile zeta = gaussian_profile(grid, 1.0, zsig);
        e = f3_pairing_mc(mu, mu, mu, zeta, cut, EpsilonMask::parse(cfg.string("mask")), static_cast<std::uint64_t>(n),
                          cfg.seed);
    } else {
        throw DomainError("functional must be f3 or loop1");
    }
    json out = e.to_json();
    out["functional"] = fn;
    write_json(path_in(cfg, "f3_mc.json"), out);
    return {0, out};
}

}  // namespace

CommandOutcome run_command(const RunConfig& cfg) {
    if (cfg.command == "multiplier") return cmd_multiplier(cfg);
    if (cfg.command == "renorm") return cmd_renorm(cfg);
    if (cfg.command == "expand") return cmd_expand(cfg);
    if (cfg.command == "scf") return cmd_scf(cfg);
    if (cfg.command == "uehling") return cmd_uehling(cfg);
    if (cfg.command == "lemma-check") return cmd_lemma_check(cfg);
    if (cfg.command == "f3-mc") return cmd_f3_mc(cfg);
    throw DomainError("unknown command: " + cfg.command);
}

}  // namespace dv::cli
