#include "dv/lemma_suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "dv/errors.hpp"
#include "dv/f3_loop.hpp"
#include "dv/parallel.hpp"
#include "dv/position_space.hpp"
#include "dv/radial_spectral.hpp"
#include "dv/renormalization.hpp"
#include "dv/special_functions.hpp"

namespace dv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kKappa1 = 258.0 / kPi;
constexpr double kKappa0 = 15.0 * kPi / 2.0;

// Fixed tolerances of the suites.
constexpr double kUFormsRelTol = 1e-10;
constexpr double kSmallRRelTol = 1e-4;
constexpr double kBAsymptoticCap = 10.0;  // |B_L - asymptotic| <= cap / L^2
constexpr double kSlopeMargin = 0.15;     // remainder slope >= N + 1 - margin
constexpr double kUniformityFactor = 10.0;
constexpr double kDiffRateMargin = 0.2;   // slope <= -(N + 1 - n) + margin
constexpr double kChargeRelTol = 1e-10;
constexpr double kRoutesRelTol = 1e-6;
constexpr double kJnBand = 0.15;
constexpr double kTauBand = 0.10;
constexpr double kZScore = 3.0;
constexpr int kLoopSeeds = 100;
constexpr int kLoopSeedsRequired = 95;
constexpr std::uint64_t kLoopSamples = 1000000;
constexpr double kAlgebraTol = 1e-13;
constexpr double kTrilinearTol = 1e-12;

const std::array<double, 4> kLambdas = {1.0, 10.0, 100.0, 1000.0};
constexpr std::size_t kPoints = 1000;

std::vector<double> log_points(double lo, double hi, std::size_t n) {
    std::vector<double> r(n);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) r[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return r;
}

std::vector<double> eval_all(const std::vector<double>& xs, const std::function<double(double)>& f) {
    std::vector<double> out(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) { out[i] = f(xs[i]); });
    return out;
}

// Records one inequality check; keeps the worst margin seen.
struct Tally {
    std::size_t checks = 0, violations = 0;
    double worst = -std::numeric_limits<double>::infinity();  // max of lhs/rhs style ratios
    std::string first_failure;

    void check(bool ok, double ratio, const std::string& where) {
        ++checks;
        worst = std::max(worst, ratio);
        if (!ok) {
            if (violations == 0) first_failure = where;
            ++violations;
        }
    }
};

SuiteResult finish(const std::string& name, const Tally& t, nlohmann::json metrics, std::string detail = {}) {
    SuiteResult r;
    r.name = name;
    r.checks = t.checks;
    r.violations = t.violations;
    r.passed = t.violations == 0 && t.checks > 0;
    r.metrics = std::move(metrics);
    r.metrics["worst_ratio"] = t.worst;
    if (detail.empty())
        detail = r.passed ? fmt::format("{} checks, worst ratio {:.4g}", t.checks, t.worst)
                          : fmt::format("{} of {} checks failed; first at {}", t.violations, t.checks, t.first_failure);
    r.detail = std::move(detail);
    return r;
}

struct LambdaTable {
    double lambda;
    CutoffParams cutoff;
    std::vector<double> r, u, ul;
};

// r log-spaced over [1e-3, hi_factor * 2L] with U and U_L at each point.
LambdaTable lambda_table(double lambda, double hi_factor) {
    LambdaTable t;
    t.lambda = lambda;
    t.cutoff = make_cutoff(std::log(lambda));
    t.r = log_points(1e-3, hi_factor * 2.0 * lambda, kPoints);
    t.u = eval_all(t.r, uehling_multiplier);
    const CutoffParams c = t.cutoff;
    t.ul = eval_all(t.r, [c](double r) { return cutoff_multiplier(r, c); });
    return t;
}

}  // namespace

nlohmann::json SuiteResult::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["passed"] = passed;
    j["checks"] = checks;
    j["violations"] = violations;
    j["detail"] = detail;
    j["metrics"] = metrics;
    return j;
}

SuiteResult suite_ue() {
    Tally t;
    const std::vector<double> r = log_points(1e-3, 1e6, kPoints);
    const std::vector<double> u = eval_all(r, uehling_multiplier);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double le = std::log(energy(r[i]));
        const double lower = 2.0 / (15.0 * kPi) * (1.0 + le);
        const double upper = 1.0 + 2.0 / (3.0 * kPi) * le;
        const double v = 1.0 + u[i];
        t.check(lower <= v && v <= upper, std::max(lower / v, v / upper), fmt::format("r = {:.6g}", r[i]));
    }
    return finish("UE", t, {{"r_min", 1e-3}, {"r_max", 1e6}, {"points", kPoints}});
}

SuiteResult suite_plaute() {
    Tally t;
    for (double lam : kLambdas) {
        const LambdaTable tab = lambda_table(lam, 1.0);
        const double bound_scale = kKappa1 / (2.0 * energy(lam));
        for (std::size_t i = 0; i < tab.r.size(); ++i) {
            const double lhs = std::abs(tab.ul[i] - tab.u[i]);
            const double rhs = bound_scale * tab.r[i];
            t.check(lhs <= rhs, lhs / rhs, fmt::format("Lambda = {}, r = {:.6g}", lam, tab.r[i]));
        }
    }
    return finish("plaute", t, {{"kappa1", kKappa1}});
}

SuiteResult suite_estim_ulu() {
    Tally t;
    nlohmann::json sups = nlohmann::json::array();
    for (double lam : kLambdas) {
        // Past 2L the cutoff multiplier vanishes, so the sup also covers r > 2L.
        const LambdaTable tab = lambda_table(lam, 2.0);
        const double b = tab.cutoff.b_lambda;
        for (int m = 0; m <= 3; ++m) {
            double sup = 0.0;
            for (std::size_t i = 0; i < tab.r.size(); ++i)
                sup = std::max(sup, std::abs(tab.ul[i] - tab.u[i]) / std::pow(1.0 + tab.u[i], m + 1));
            const double rhs = std::pow(kKappa0, m + 3) * std::max(std::pow(1.0 + b, -m), 1.0 / energy(2.0 * lam));
            t.check(sup <= rhs, sup / rhs, fmt::format("Lambda = {}, m = {}", lam, m));
            sups.push_back({{"lambda", lam}, {"m", m}, {"sup", sup}, {"bound", rhs}});
        }
    }
    return finish("estim-ULU", t, {{"kappa0", kKappa0}, {"sups", sups}});
}

SuiteResult suite_elise() {
    Tally t;
    for (double lam : kLambdas) {
        LambdaTable tab = lambda_table(lam, 1.0);
        tab.r.insert(tab.r.begin(), 0.0);
        tab.u.insert(tab.u.begin(), uehling_multiplier(0.0));
        tab.ul.insert(tab.ul.begin(), cutoff_multiplier(0.0, tab.cutoff));
        for (std::size_t i = 0; i < tab.r.size(); ++i) {
            const double rhs = kKappa1 * (1.0 + tab.u[i]);
            t.check(tab.ul[i] >= 0.0 && tab.ul[i] <= rhs, tab.ul[i] / rhs,
                    fmt::format("Lambda = {}, r = {:.6g}", lam, tab.r[i]));
        }
    }
    return finish("elise", t, {{"kappa1", kKappa1}});
}

SuiteResult suite_jn() {
    Tally t;
    const PhiLandscape land = phi_landscape();
    const JnResult j3 = jn_constant(1e3, land);
    const JnResult j6 = jn_constant(1e6, land);
    const double ratio3 = j3.j_n * 3.0 * kPi / std::log(1e3);
    const double ratio6 = j6.j_n * 3.0 * kPi / std::log(1e6);
    const double tau_ref = std::sqrt(15.0 * kPi / (1e6 * std::log(1e6)));
    const double tau_ratio = j6.tau_n / tau_ref;
    t.check(std::abs(ratio6 - 1.0) <= kJnBand, std::abs(ratio6 - 1.0) / kJnBand, "J_n 3pi/ln n at n = 1e6");
    t.check(std::abs(ratio6 - 1.0) < std::abs(ratio3 - 1.0), std::abs(ratio6 - 1.0) / std::abs(ratio3 - 1.0),
            "ratio closer to 1 at n = 1e6 than at n = 1e3");
    t.check(std::abs(tau_ratio - 1.0) <= kTauBand, std::abs(tau_ratio - 1.0) / kTauBand, "tau_n at n = 1e6");
    nlohmann::json m = {{"jn_ratio_1e3", ratio3}, {"jn_ratio_1e6", ratio6}, {"tau_ratio_1e6", tau_ratio},
                        {"tau_1e6", j6.tau_n}, {"jn_1e6", j6.j_n}};
    std::string detail = fmt::format("J*3pi/ln n = {:.5f} (1e3), {:.5f} (1e6); tau ratio {:.5f}", ratio3, ratio6, tau_ratio);
    return finish("jn", t, m, t.violations ? detail + "; " + t.first_failure + " out of band" : detail);
}

SuiteResult suite_diff_rate() {
    Tally t;
    constexpr int N = 3;
    const RadialProfile nu = gaussian_profile(log_grid());
    const std::array<double, 4> lambdas = {10.0, 30.0, 100.0, 300.0};
    nlohmann::json slopes = nlohmann::json::array();
    std::vector<double> xs;
    std::vector<CutoffParams> cuts;
    for (double lam : lambdas) {
        cuts.push_back(make_cutoff(std::log(lam)));
        xs.push_back(std::log(1.0 + cuts.back().b_lambda));
    }
    for (int n = 0; n <= N; ++n) {
        std::vector<double> ys;
        for (const auto& c : cuts) ys.push_back(coefficient_gap_log(nu, n, N, c).log_combined);
        const double slope = fit_slope(xs, ys);
        const double limit = -(N + 1 - n) + kDiffRateMargin;
        t.check(slope <= limit, slope - limit, fmt::format("n = {} (slope {:.4g})", n, slope));
        slopes.push_back({{"n", n}, {"slope", slope}, {"limit", limit}, {"log_gaps", ys}});
    }
    return finish("diff-rate", t, {{"slopes", slopes}});
}

SuiteResult suite_remainder_slope() {
    Tally t;
    const RadialProfile nu = gaussian_profile(log_grid());
    const std::array<double, 4> alphas = {0.02, 0.04, 0.08, 0.16};
    const std::array<double, 3> z3s = {0.2, 0.5, 0.8};
    nlohmann::json rows = nlohmann::json::array();
    for (int N = 1; N <= 3; ++N) {
        std::vector<double> sup_ratio;
        for (double z3 : z3s) {
            std::vector<double> xs, ys;
            double sup = 0.0;
            for (double a : alphas) {
                const CouplingState st = bare_from_physical(a, z3);
                const double norm = remainder(nu, N, st).norm.combined;
                xs.push_back(std::log(a));
                ys.push_back(std::log(norm));
                sup = std::max(sup, norm / std::pow(a, N + 1));
            }
            const double slope = fit_slope(xs, ys);
            const double limit = N + 1 - kSlopeMargin;
            t.check(slope >= limit, limit - slope, fmt::format("N = {}, Z3 = {} (slope {:.4g})", N, z3, slope));
            sup_ratio.push_back(sup);
            rows.push_back({{"N", N}, {"z3", z3}, {"slope", slope}, {"sup_ratio", sup}});
        }
        const auto [lo, hi] = std::minmax_element(sup_ratio.begin(), sup_ratio.end());
        const double spread = *hi / *lo;
        t.check(spread < kUniformityFactor, spread / kUniformityFactor,
                fmt::format("N = {} uniformity in Z3 (spread {:.4g})", N, spread));
    }
    return finish("remainder-slope", t, {{"rows", rows}});
}

SuiteResult suite_u_forms() {
    Tally t;
    const std::vector<double> r = log_points(1e-2, 1e4, kPoints);
    std::vector<double> rel(r.size());
    parallel_for(r.size(), [&](std::size_t i) {
        const double a = uehling_multiplier(r[i]);
        const double b = uehling_integral(r[i]);
        rel[i] = std::abs(a - b) / std::abs(b);
    });
    for (std::size_t i = 0; i < r.size(); ++i)
        t.check(rel[i] <= kUFormsRelTol, rel[i] / kUFormsRelTol, fmt::format("r = {:.6g}", r[i]));
    const double rs = 1e-3;
    const double small = uehling_multiplier(rs) / (rs * rs / (15.0 * kPi));
    t.check(std::abs(small - 1.0) <= kSmallRRelTol, std::abs(small - 1.0) / kSmallRRelTol, "small-r law at r = 1e-3");
    return finish("u-forms", t, {{"max_rel", *std::max_element(rel.begin(), rel.end())}, {"small_r_ratio", small}});
}

SuiteResult suite_b_asymptotics() {
    Tally t;
    nlohmann::json rows = nlohmann::json::array();
    for (double lam : {1e2, 1e3, 1e4}) {
        const double l = std::log(lam);
        const double diff = std::abs(b_lambda0(l) - b_lambda_asymptotic(l));
        const double cap = kBAsymptoticCap / (lam * lam);
        t.check(diff <= cap, diff / cap, fmt::format("Lambda = {}", lam));
        rows.push_back({{"lambda", lam}, {"diff", diff}, {"cap", cap}});
    }
    return finish("b-asymptotics", t, {{"rows", rows}});
}

SuiteResult suite_charge_identity() {
    Tally t;
    const RadialProfile nu = gaussian_profile(log_grid());
    const double nu0 = nu.value_at(0.0);
    nlohmann::json rows = nlohmann::json::array();
    for (double a : {0.05, 0.1, 0.2})
        for (double z3 : {0.2, 0.5, 0.8}) {
            const CouplingState st = bare_from_physical(a, z3);
            const double rho_ph0 = scf_density_at(nu0, cutoff_multiplier(0.0, st.cutoff()), st);
            const double rho_q0 = nu0 - st.z3() * rho_ph0;
            const double lhs = nu0 - rho_q0;
            const double rhs = renormalized_total_charge(nu0, st);
            const double rel = std::abs(lhs - rhs) / std::abs(rhs);
            t.check(rel <= kChargeRelTol, rel / kChargeRelTol, fmt::format("alpha_ph = {}, Z3 = {}", a, z3));
            rows.push_back({{"alpha_ph", a}, {"z3", z3}, {"rel_error", rel}});
        }
    return finish("charge-identity", t, {{"rows", rows}});
}

SuiteResult suite_uehling_routes() {
    Tally t;
    const AnalyticDensity d = AnalyticDensity::gaussian();
    const RadialProfile nu = sample_density(d, log_grid());
    nlohmann::json rows = nlohmann::json::array();
    for (double x : {0.5, 1.0, 2.0, 5.0}) {
        const double a = uehling_potential_direct(d, x);
        const double b = uehling_potential_fourier(nu, x);
        const double rel = std::abs(a - b) / std::abs(b);
        t.check(rel <= kRoutesRelTol, rel / kRoutesRelTol, fmt::format("x = {}", x));
        rows.push_back({{"x", x}, {"direct", a}, {"fourier", b}, {"rel_error", rel}});
    }
    return finish("uehling-routes", t, {{"rows", rows}});
}

SuiteResult suite_loop1(std::uint64_t seed) {
    Tally t;
    const RadialProfile nu = gaussian_profile(log_grid());
    const CutoffParams c = make_cutoff(std::log(10.0));
    const double oracle = -b_lambda_k(1.0, c);
    const McEstimate first = loop1_response_mc(nu, 1.0, c, kLoopSamples, seed);
    const double z0 = std::abs(first.value - oracle) / first.std_error;
    t.check(z0 <= kZScore, z0 / kZScore, fmt::format("seed {}", seed));
    int pass = 0;
    std::vector<double> zs;
    for (int s = 0; s < kLoopSeeds; ++s) {
        const McEstimate e = loop1_response_mc(nu, 1.0, c, kLoopSamples, seed + 1 + static_cast<std::uint64_t>(s));
        const double z = std::abs(e.value - oracle) / e.std_error;
        zs.push_back(z);
        pass += z <= kZScore;
    }
    t.check(pass >= kLoopSeedsRequired, static_cast<double>(kLoopSeedsRequired) / std::max(pass, 1),
            fmt::format("{} of {} seeds within 3 sigma", pass, kLoopSeeds));
    return finish("loop1", t,
                  {{"oracle", oracle}, {"estimate", first.to_json()}, {"z_first", z0}, {"seeds_passing", pass},
                   {"z_max", *std::max_element(zs.begin(), zs.end())}});
}

SuiteResult suite_f3_structure(std::uint64_t seed) {
    Tally t;
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, 3.0);
    auto rand_vec = [&] { return Vec3(nd(gen), nd(gen), nd(gen)); };
    const DiracMatrices& d = dirac_matrices();
    const SpinorMatrix id = SpinorMatrix::Identity();

    double clifford = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const SpinorMatrix ac = d.alpha[i] * d.alpha[j] + d.alpha[j] * d.alpha[i] - (i == j ? 2.0 : 0.0) * id;
            clifford = std::max(clifford, ac.norm());
        }
        clifford = std::max(clifford, (d.alpha[i] * d.beta + d.beta * d.alpha[i]).norm());
        clifford = std::max(clifford, std::abs(d.alpha[i].trace()));
    }
    clifford = std::max(clifford, (d.beta * d.beta - id).norm());
    clifford = std::max(clifford, std::abs(d.beta.trace()));
    t.check(clifford <= kAlgebraTol, clifford / kAlgebraTol, "Clifford relations");

    double proj = 0.0;
    for (int s = 0; s < 1000; ++s) {
        const Vec3 p = rand_vec();
        const SpinorMatrix pp = projector(p, 1), pm = projector(p, -1);
        proj = std::max({proj, (pp * pp - pp).norm(), (pm * pm - pm).norm(), (pp + pm - id).norm(), (pp * pm).norm(),
                         std::abs(pp.trace() - 2.0), (pp - pp.adjoint()).norm()});
    }
    t.check(proj <= kAlgebraTol, proj / kAlgebraTol, "projector algebra");

    const auto& patterns = residue_sign_patterns();
    bool structure = patterns.size() == 14;
    for (const auto& pt : patterns) {
        const int sum = pt[0] + pt[1] + pt[2] + pt[3];
        if (sum == 4 || sum == -4) structure = false;
    }
    t.check(structure, structure ? 0.0 : 1.0, "14 residue sign patterns");

    // Every residue weight against eta-quadrature at one random point.
    std::array<Vec3, 4> p;
    for (auto& v : p) v = rand_vec();
    std::array<double, 4> e{};
    for (std::size_t i = 0; i < 4; ++i) e[i] = energy(p[i].norm());
    double worst_z = 0.0;
    for (const auto& pt : patterns) {
        const double tr = chain_trace(p, pt);
        const EtaQuadrature q = eta_weight_quadrature(pt, e);
        const double diff = std::abs(eta_weight(pt, e) - q.value) * std::abs(tr);
        // Quadrature error floored at rounding level of the weight.
        const double sigma = std::max(q.error, 1e-15 * std::abs(q.value)) * std::abs(tr);
        const double z = sigma > 0.0 ? diff / sigma : 0.0;
        worst_z = std::max(worst_z, z);
        t.check(diff <= kZScore * sigma || diff == 0.0, z / kZScore,
                fmt::format("pattern {},{},{},{}", pt[0], pt[1], pt[2], pt[3]));
    }
    const EtaQuadrature full = resolvent_chain_quadrature(p);
    const double res = residue_chain(p);
    const double sigma_full = std::max(full.error, 1e-14 * std::abs(full.value));
    t.check(std::abs(res - full.value) <= kZScore * sigma_full, std::abs(res - full.value) / (kZScore * sigma_full),
            "residue sum vs resolvent quadrature");

    // Trilinearity under common random numbers.
    const RadialProfile mu = gaussian_profile(log_grid());
    const double lam = 2.5;
    const RadialProfile mu_s = mu.scaled(lam);
    const std::optional<CutoffParams> cut = make_cutoff(std::log(10.0));
    const EpsilonMask mask = EpsilonMask::all(1);
    const std::uint64_t n = 20000;
    const McEstimate base = f3_pairing_mc(mu, mu, mu, mu, cut, mask, n, seed);
    double tri = 0.0;
    for (int slot = 0; slot < 3; ++slot) {
        const McEstimate sc = f3_pairing_mc(slot == 0 ? mu_s : mu, slot == 1 ? mu_s : mu, slot == 2 ? mu_s : mu, mu, cut,
                                            mask, n, seed);
        tri = std::max(tri, std::abs(sc.value / (lam * base.value) - 1.0));
    }
    t.check(tri <= kTrilinearTol, tri / kTrilinearTol, "trilinearity");

    return finish("f3-structure", t,
                  {{"clifford_residual", clifford}, {"projector_residual", proj}, {"eta_worst_z", worst_z},
                   {"residue_sum", res}, {"resolvent_quadrature", full.value}, {"trilinearity_residual", tri}});
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"UE",       "plaute",        "estim-ULU",       "elise",
                                                   "jn",       "diff-rate",     "remainder-slope", "u-forms",
                                                   "b-asymptotics", "charge-identity", "uehling-routes", "loop1",
                                                   "f3-structure"};
    return names;
}

const std::vector<std::string>& default_suites() {
    static const std::vector<std::string> names = {"UE", "plaute", "estim-ULU", "elise", "jn", "diff-rate",
                                                   "remainder-slope"};
    return names;
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
    static const std::map<std::string, std::function<SuiteResult(std::uint64_t)>> table = {
        {"UE", [](std::uint64_t) { return suite_ue(); }},
        {"plaute", [](std::uint64_t) { return suite_plaute(); }},
        {"estim-ULU", [](std::uint64_t) { return suite_estim_ulu(); }},
        {"elise", [](std::uint64_t) { return suite_elise(); }},
        {"jn", [](std::uint64_t) { return suite_jn(); }},
        {"diff-rate", [](std::uint64_t) { return suite_diff_rate(); }},
        {"remainder-slope", [](std::uint64_t) { return suite_remainder_slope(); }},
        {"u-forms", [](std::uint64_t) { return suite_u_forms(); }},
        {"b-asymptotics", [](std::uint64_t) { return suite_b_asymptotics(); }},
        {"charge-identity", [](std::uint64_t) { return suite_charge_identity(); }},
        {"uehling-routes", [](std::uint64_t) { return suite_uehling_routes(); }},
        {"loop1", [](std::uint64_t s) { return suite_loop1(s); }},
        {"f3-structure", [](std::uint64_t s) { return suite_f3_structure(s); }},
    };
    auto it = table.find(name);
    if (it == table.end()) throw DomainError("unknown suite: " + name);
    const auto t0 = std::chrono::steady_clock::now();
    SuiteResult r = it->second(seed);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace dv
