#include "dv/radial_spectral.hpp"

#include <cmath>
#include <limits>

#include "dv/errors.hpp"
#include "dv/io.hpp"
#include "dv/parallel.hpp"

namespace dv {

MultiplierSpec MultiplierSpec::uehling() { return MultiplierSpec{}; }

MultiplierSpec MultiplierSpec::cutoff_multiplier(const CutoffParams& c) {
    MultiplierSpec s;
    s.kind = Kind::Cutoff;
    s.cutoff = c;
    return s;
}

MultiplierSpec MultiplierSpec::one_plus_u_power(int m) {
    MultiplierSpec s;
    s.kind = Kind::OnePlusUPower;
    s.power = m;
    return s;
}

MultiplierSpec MultiplierSpec::custom_function(std::function<double(double)> f) {
    MultiplierSpec s;
    s.kind = Kind::Custom;
    s.custom = std::move(f);
    return s;
}

std::vector<double> multiplier_values(const std::vector<double>& grid, const MultiplierSpec& spec) {
    std::vector<double> out(grid.size());
    std::function<double(double)> f;
    switch (spec.kind) {
        case MultiplierSpec::Kind::Uehling:
            f = [](double k) { return uehling_multiplier(k); };
            break;
        case MultiplierSpec::Kind::Cutoff: {
            if (!spec.cutoff) throw DomainError("cutoff multiplier needs CutoffParams");
            const CutoffParams c = *spec.cutoff;
            f = [c](double k) { return dv::cutoff_multiplier(k, c); };
            break;
        }
        case MultiplierSpec::Kind::OnePlusUPower: {
            const int m = spec.power;
            f = [m](double k) { return std::pow(1.0 + uehling_multiplier(k), m); };
            break;
        }
        case MultiplierSpec::Kind::Custom:
            if (!spec.custom) throw DomainError("custom multiplier needs a function");
            f = spec.custom;
            break;
    }
    parallel_for(grid.size(), [&](std::size_t i) { out[i] = f(grid[i]); });
    return out;
}

RadialProfile apply_multiplier(const RadialProfile& p, const std::vector<double>& values) {
    if (values.size() != p.size()) throw DomainError("multiplier table does not match the grid");
    std::vector<double> v(p.values());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= values[i];
    return p.with_values(std::move(v));
}

RadialProfile apply_multiplier(const RadialProfile& p, const MultiplierSpec& spec) {
    return apply_multiplier(p, multiplier_values(p.k(), spec));
}

RadialProfile truncate(const RadialProfile& p, const CutoffParams& cutoff) {
    if (!(cutoff.log_lambda >= 0.0)) throw DomainError("truncation requires Lambda >= 1");
    const double two_lambda = 2.0 * cutoff.lambda();
    if (p.k().back() <= two_lambda) return p;
    std::vector<double> v(p.values());
    for (std::size_t i = 0; i < v.size(); ++i)
        if (p.k()[i] > two_lambda) v[i] = 0.0;
    return p.with_values(std::move(v));
}

std::optional<RadialProfile> ZeroEvaluator::evaluate(int, std::span<const RadialProfile* const> args,
                                                     const std::optional<CutoffParams>&) {
    if (args.empty()) throw DomainError("F_j needs at least one argument");
    return args.front()->with_values(std::vector<double>(args.front()->size(), 0.0));
}

namespace {

// All tuples of j non-negative integers summing to total, in lexicographic order.
void compositions(int total, int parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (parts == 1) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int first = 0; first <= total; ++first) {
        cur.push_back(first);
        compositions(total - first, parts - 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace

namespace {

ExpansionResult expand_with_table(const RadialProfile& nu, int N, const std::optional<CutoffParams>& cutoff,
                                  NonlinearEvaluator* f_eval, const std::vector<double>* table) {
    if (N < 0) throw DomainError("expansion order must be >= 0");
    ZeroEvaluator zero;
    NonlinearEvaluator* eval = f_eval ? f_eval : &zero;
    ExpansionResult res;
    res.cutoff_used = cutoff;
    res.orders.push_back(cutoff ? truncate(nu, *cutoff) : nu);
    if (N >= 1) {
        const std::vector<double> mult =
            table ? *table
                  : multiplier_values(nu.k(), cutoff ? MultiplierSpec::cutoff_multiplier(*cutoff)
                                                     : MultiplierSpec::uehling());
        for (int n = 1; n <= N; ++n) {
            RadialProfile next = apply_multiplier(res.orders.back(), mult);
            for (int j = 3; j <= n; j += 2) {
                std::vector<std::vector<int>> comps;
                std::vector<int> cur;
                compositions(n - j, j, cur, comps);
                for (const auto& comp : comps) {
                    std::vector<const RadialProfile*> args;
                    for (int idx : comp) args.push_back(&res.orders[static_cast<std::size_t>(idx)]);
                    std::optional<RadialProfile> term;
                    try {
                        term = eval->evaluate(j, args, cutoff);
                    } catch (const std::exception& e) {
                        throw std::runtime_error("F_" + std::to_string(j) + " evaluation failed at order " +
                                                 std::to_string(n) + ": " + e.what());
                    }
                    if (!term) {
                        ++res.unsupported_terms;
                        continue;
                    }
                    if (term->k() != next.k()) throw DomainError("F_j returned a profile on a different grid");
                    next = next.plus(*term);
                }
            }
            res.orders.push_back(std::move(next));
        }
    }
    for (const auto& p : res.orders) res.order_norms.push_back(norms(p));
    return res;
}

}  // namespace

ExpansionResult expand_coefficients(const RadialProfile& nu, int N, const std::optional<CutoffParams>& cutoff,
                                    NonlinearEvaluator* f_eval) {
    return expand_with_table(nu, N, cutoff, f_eval, nullptr);
}

double scf_density_at(double nu_hat, double ul, const CouplingState& state) {
    const double denom = 1.0 - state.alpha_ph() * ul;
    if (!(denom > 0.0)) throw DomainError("1 - alpha_ph U_Lambda(k) <= 0: unphysical parameters");
    return nu_hat / denom;
}

RadialProfile solve_linear_scf(const RadialProfile& nu, const CouplingState& state,
                               const std::vector<double>& cutoff_values) {
    const RadialProfile trunc = truncate(nu, state.cutoff());
    std::vector<double> v(trunc.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = scf_density_at(trunc.values()[i], cutoff_values[i], state);
    return trunc.with_values(std::move(v));
}

RadialProfile solve_linear_scf(const RadialProfile& nu, const CouplingState& state) {
    return solve_linear_scf(nu, state, multiplier_values(nu.k(), MultiplierSpec::cutoff_multiplier(state.cutoff())));
}

RadialProfile polarization_density(const RadialProfile& nu, const RadialProfile& rho_ph, const CouplingState& state) {
    return nu.minus(rho_ph.scaled(state.z3()));
}

RemainderResult remainder(const RadialProfile& nu, int N, const CouplingState& state, NonlinearEvaluator* f_eval) {
    if (N < 0) throw DomainError("remainder requires N >= 0");
    const CutoffParams& c = state.cutoff();
    const double a = state.alpha_ph();
    const std::vector<double> ul = multiplier_values(nu.k(), MultiplierSpec::cutoff_multiplier(c));
    const RadialProfile trunc = truncate(nu, c);
    // With F = 0 the remainder is the geometric tail (a U_L)^{N+1} nu_L / (1 - a U_L); forming it
    // directly avoids subtracting N+1 nearly equal terms.
    std::vector<double> r(nu.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = std::pow(a * ul[i], N + 1) * trunc.values()[i] / (1.0 - a * ul[i]);
    if (f_eval) {
        const RadialProfile rho = solve_linear_scf(nu, state, ul);
        const RadialProfile* args[3] = {&rho, &rho, &rho};
        std::optional<RadialProfile> f3 = f_eval->evaluate(3, args, c);
        if (f3) {
            const double a3 = a * a * a;
            for (std::size_t i = 0; i < r.size(); ++i) r[i] += a3 * f3->values()[i] / (1.0 - a * ul[i]);
        }
        // Subtract the nonlinear parts of the expansion coefficients, nu_n - U_L^n nu_L.
        ExpansionResult ex = expand_with_table(nu, N, c, f_eval, &ul);
        double an = 1.0;
        for (int n = 0; n <= N; ++n) {
            const auto& vn = ex.orders[static_cast<std::size_t>(n)].values();
            for (std::size_t i = 0; i < r.size(); ++i)
                r[i] -= an * (vn[i] - std::pow(ul[i], n) * trunc.values()[i]);
            an *= a;
        }
    }
    RemainderResult out{trunc.with_values(std::move(r)), {}};
    out.norm = norms(out.r_n);
    return out;
}

namespace {

void check_gap_args(int n, int N) {
    if (n < 0 || N < n) throw DomainError("coefficient gap requires 0 <= n <= N");
}

}  // namespace

NormPair coefficient_gap(const RadialProfile& nu, int n, int N, const CutoffParams& cutoff) {
    check_gap_args(n, N);
    const std::vector<double> u = multiplier_values(nu.k(), MultiplierSpec::uehling());
    const std::vector<double> ul = multiplier_values(nu.k(), MultiplierSpec::cutoff_multiplier(cutoff));
    const RadialProfile trunc = truncate(nu, cutoff);
    std::vector<double> d(nu.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = std::pow(ul[i], n) * trunc.values()[i] - std::pow(u[i], n) * nu.values()[i];
    return norms(nu.with_values(std::move(d)));
}

LogNormPair coefficient_gap_log(const RadialProfile& nu, int n, int N, const CutoffParams& cutoff) {
    check_gap_args(n, N);
    const std::vector<double> u = multiplier_values(nu.k(), MultiplierSpec::uehling());
    const std::vector<double> ul = multiplier_values(nu.k(), MultiplierSpec::cutoff_multiplier(cutoff));
    const double two_lambda = 2.0 * cutoff.lambda();
    std::vector<double> logs(nu.size());
    for (std::size_t i = 0; i < logs.size(); ++i) {
        const double k = nu.k()[i];
        const double keep = k <= two_lambda ? 1.0 : 0.0;
        const double factor = std::abs(keep * std::pow(ul[i], n) - std::pow(u[i], n));
        const double lnu = nu.tag() ? nu.tag()->log_abs_fourier(k) : std::log(std::abs(nu.values()[i]));
        logs[i] = factor > 0.0 ? lnu + std::log(factor) : -std::numeric_limits<double>::infinity();
    }
    return log_norms(nu.k(), logs);
}

double fit_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 3) throw DomainError("fit_slope needs >= 3 paired points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw DomainError("fit_slope: abscissae are not distinct");
    return sxy / sxx;
}

void write_expansion(const std::string& dir, const ExpansionResult& result) {
    ensure_directory(dir);
    nlohmann::json j;
    j["orders"] = nlohmann::json::array();
    j["norms"] = nlohmann::json::array();
    for (std::size_t n = 0; n < result.orders.size(); ++n) {
        const std::string name = "order_" + std::to_string(n) + ".csv";
        write_profile_csv(dir + "/" + name, result.orders[n]);
        j["orders"].push_back(name);
        const NormPair& np = result.order_norms[n];
        j["norms"].push_back({{"l2", np.l2}, {"coulomb", np.coulomb}, {"combined", np.combined}});
    }
    if (result.cutoff_used)
        j["cutoff"] = {{"log_lambda", result.cutoff_used->log_lambda}, {"b_lambda", result.cutoff_used->b_lambda}};
    else
        j["cutoff"] = nullptr;
    j["convention"] = "f^(k) = int f(x) exp(-i k.x) dx; radial profiles in |k|; combined norm = L2 + Coulomb";
    j["unsupported_terms"] = result.unsupported_terms;
    write_json(dir + "/expansion.json", j);
}

}  // namespace dv
