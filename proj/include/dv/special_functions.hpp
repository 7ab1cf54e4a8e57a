#pragma once

#include <utility>

namespace dv {

// Ultraviolet cutoff stored as ln(Lambda), with B_Lambda cached.
struct CutoffParams {
    double log_lambda = 0.0;
    double b_lambda = 0.0;

    double lambda() const;
};

// Builds a CutoffParams with b_lambda = b_lambda0(log_lambda). Requires log_lambda >= 0.
CutoffParams make_cutoff(double log_lambda);

struct PhiLandscape {
    double t_minus = 0.0;
    double t_plus = 0.0;
    double phi0 = 0.0;
    double t_max = 0.0;    // location of the sampled maximum of Phi
    double phi_max = 0.0;
};

struct JnResult {
    double tau_n = 0.0;
    double j_n = 0.0;
};

// Series branch of U is used for r below this value.
inline constexpr double kUehlingSeriesThreshold = 0.5;
// b_lambda0 switches to its asymptotic expansion above this ln(Lambda).
inline constexpr double kAsymptoticLogLambda = 30.0;
// Above this ln(Lambda) the cutoff multiplier equals U to double precision.
inline constexpr double kCutoffSaturationLogLambda = 300.0;

double energy(double r);

double uehling_multiplier(double r);
double uehling_closed_form(double r);
double uehling_series(double r);
// U(r) = (r^2 / 4pi) int_0^1 (z^2 - z^4/3) / (1 + r^2 (1 - z^2) / 4) dz by adaptive quadrature.
double uehling_integral(double r, double rel_tol = 1e-13);

double uehling_derivative(double r);
double phi(double r);
PhiLandscape phi_landscape();

double z_lambda(double r, const CutoffParams& cutoff);
// 1 - Z_Lambda(r) without cancellation.
double one_minus_z_lambda(double r, const CutoffParams& cutoff);

double b_lambda_k(double k, const CutoffParams& cutoff);
double b_lambda0(double log_lambda);
// The large-Lambda expansion (2/3pi) ln L - 5/(9pi) + 2 ln 2/(3pi).
double b_lambda_asymptotic(double log_lambda);

double cutoff_multiplier(double r, const CutoffParams& cutoff);

JnResult jn_constant(double n);
JnResult jn_constant(double n, const PhiLandscape& landscape);
// Value of (1 + U(n tau)) / (1 + U(tau))^n.
double jn_objective(double n, double tau);

}  // namespace dv
