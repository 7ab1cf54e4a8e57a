#include "dv/renormalization.hpp"

#include <cmath>
#include <numbers>

#include "dv/errors.hpp"

namespace dv {

CouplingState CouplingState::make(double alpha_bare, double alpha_ph, double z3, const CutoffParams& cutoff) {
    if (!(alpha_bare > 0.0) || !(alpha_ph > 0.0)) throw DomainError("couplings must be positive");
    if (!(z3 > 0.0 && z3 < 1.0)) throw DomainError("Z_3 must lie in (0, 1)");
    if (!(cutoff.log_lambda >= 0.0) || !(cutoff.b_lambda > 0.0)) throw DomainError("invalid cutoff");
    if (std::abs(alpha_ph - z3 * alpha_bare) > 1e-12 * alpha_bare)
        throw DomainError("inconsistent state: alpha_ph != Z_3 alpha");
    if (std::abs(z3 - 1.0 / (1.0 + alpha_bare * cutoff.b_lambda)) > 1e-12)
        throw DomainError("inconsistent state: Z_3 != 1/(1 + alpha B_Lambda)");
    if (!(alpha_ph * cutoff.b_lambda < 1.0)) throw DomainError("Landau constraint alpha_ph B_Lambda < 1 violated");
    return CouplingState(alpha_bare, alpha_ph, z3, cutoff);
}

CouplingState physical_from_bare(double alpha_bare, const CutoffParams& cutoff) {
    if (!(alpha_bare > 0.0)) throw DomainError("alpha_bare must be > 0");
    const double z3 = 1.0 / (1.0 + alpha_bare * cutoff.b_lambda);
    return CouplingState::make(alpha_bare, z3 * alpha_bare, z3, cutoff);
}

CutoffParams lambda_from_b(double b_target) {
    const double b1 = b_lambda0(0.0);
    if (!(b_target >= b1))
        throw DomainError("target B_Lambda is below B at Lambda = 1; the cutoff would be below 1");
    if (b_target == b1) return CutoffParams{0.0, b1};
    const double seed = 1.5 * std::numbers::pi * b_target + 5.0 / 6.0 - std::log(2.0);
    double lo = std::max(0.0, seed - 2.0), hi = std::max(seed + 2.0, 1.0);
    while (lo > 0.0 && b_lambda0(lo) > b_target) lo = std::max(0.0, lo - 4.0);
    while (b_lambda0(hi) < b_target) hi += 4.0;
    // dB/dlnL < 1, so a bracket narrower than 1e-11 in ln L meets the 1e-10 target.
    for (int it = 0; it < 200 && hi - lo > 1e-11; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (b_lambda0(mid) < b_target) lo = mid; else hi = mid;
    }
    const double ll = 0.5 * (lo + hi);
    return CutoffParams{ll, b_lambda0(ll)};
}

CouplingState bare_from_physical(double alpha_ph, double z3) {
    if (!(alpha_ph > 0.0)) throw DomainError("alpha_ph must be > 0");
    if (!(z3 > 0.0 && z3 < 1.0)) throw DomainError("Z_3 must lie in (0, 1)");
    const double b = (1.0 - z3) / alpha_ph;
    CutoffParams cutoff = lambda_from_b(b);
    cutoff.b_lambda = b;  // agrees with b_lambda0(log_lambda) to 1e-10
    return CouplingState::make(alpha_ph / z3, alpha_ph, z3, cutoff);
}

double renormalized_total_charge(double nu_hat_at_zero, const CouplingState& state) {
    return state.z3() * nu_hat_at_zero;
}

}  // namespace dv
