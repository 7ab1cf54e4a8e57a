#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dv/radial_profile.hpp"
#include "dv/renormalization.hpp"
#include "dv/special_functions.hpp"

namespace dv {

struct MultiplierSpec {
    enum class Kind { Uehling, Cutoff, OnePlusUPower, Custom };
    Kind kind = Kind::Uehling;
    std::optional<CutoffParams> cutoff;     // Kind::Cutoff
    int power = 1;                          // Kind::OnePlusUPower
    std::function<double(double)> custom;   // Kind::Custom

    static MultiplierSpec uehling();
    static MultiplierSpec cutoff_multiplier(const CutoffParams& c);
    static MultiplierSpec one_plus_u_power(int m);
    static MultiplierSpec custom_function(std::function<double(double)> f);
};

// Multiplier values at the grid nodes (evaluated in parallel, one slot per node).
std::vector<double> multiplier_values(const std::vector<double>& grid, const MultiplierSpec& spec);

RadialProfile apply_multiplier(const RadialProfile& p, const MultiplierSpec& spec);
RadialProfile apply_multiplier(const RadialProfile& p, const std::vector<double>& values);

// Zeroes values at k > 2 Lambda (k = 2 Lambda is kept).
RadialProfile truncate(const RadialProfile& p, const CutoffParams& cutoff);

// Supplies F_j(mu_1, ..., mu_j). std::nullopt means "not available for this j";
// the recursion then drops the term and counts it.
class NonlinearEvaluator {
public:
    virtual ~NonlinearEvaluator() = default;
    virtual std::optional<RadialProfile> evaluate(int j, std::span<const RadialProfile* const> args,
                                                  const std::optional<CutoffParams>& cutoff) = 0;
};

class ZeroEvaluator : public NonlinearEvaluator {
public:
    std::optional<RadialProfile> evaluate(int j, std::span<const RadialProfile* const> args,
                                          const std::optional<CutoffParams>& cutoff) override;
};

struct ExpansionResult {
    std::vector<RadialProfile> orders;
    std::vector<NormPair> order_norms;
    std::optional<CutoffParams> cutoff_used;
    int unsupported_terms = 0;
};

// nu_0 = nu (truncated with a cutoff), nu_1 = U nu, and for n >= 2
// nu_n = U nu_{n-1} + sum_{j odd >= 3} sum_{n_1+...+n_j = n-j} F_j(nu_{n_1}, ..., nu_{n_j}).
// Even j vanish identically and are never requested from the evaluator.
ExpansionResult expand_coefficients(const RadialProfile& nu, int N, const std::optional<CutoffParams>& cutoff,
                                    NonlinearEvaluator* f_eval = nullptr);

// Pointwise rho_ph^(k) = nu_Lambda^(k) / (1 - alpha_ph U_Lambda(k)).
double scf_density_at(double nu_hat, double cutoff_multiplier_value, const CouplingState& state);

RadialProfile solve_linear_scf(const RadialProfile& nu, const CouplingState& state);
RadialProfile solve_linear_scf(const RadialProfile& nu, const CouplingState& state,
                               const std::vector<double>& cutoff_values);

// rho_Q^ = nu^ - Z_3 rho_ph^ (from alpha_ph rho_ph = alpha (nu - rho_Q)).
RadialProfile polarization_density(const RadialProfile& nu, const RadialProfile& rho_ph, const CouplingState& state);

struct RemainderResult {
    RadialProfile r_n;
    NormPair norm;
};

// R_N = rho_ph - sum_{n <= N} alpha_ph^n nu_{n,Lambda}. With an evaluator, rho_ph carries the
// first-order F_3 correction (nu_Lambda + alpha_ph^3 F_3(rho_lin)) / (1 - alpha_ph U_Lambda).
RemainderResult remainder(const RadialProfile& nu, int N, const CouplingState& state,
                          NonlinearEvaluator* f_eval = nullptr);

// ||nu_{n,Lambda} - nu_n|| with F = 0, i.e. of U_Lambda^n nu_Lambda - U^n nu.
NormPair coefficient_gap(const RadialProfile& nu, int n, int N, const CutoffParams& cutoff);
// Same quantity in log form; uses log |nu^| from the analytic tag so that Gaussian tails beyond
// 2 Lambda do not underflow.
LogNormPair coefficient_gap_log(const RadialProfile& nu, int n, int N, const CutoffParams& cutoff);

double fit_slope(std::span<const double> xs, std::span<const double> ys);

void write_expansion(const std::string& dir, const ExpansionResult& result);

}  // namespace dv
