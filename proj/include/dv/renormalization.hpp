#pragma once

#include "dv/special_functions.hpp"

namespace dv {

// (alpha, alpha_ph, Z_3) together with the cutoff they refer to.
// Constructed only through make(), which enforces Z_3 = 1/(1 + alpha B_Lambda),
// alpha_ph = Z_3 alpha and the Landau constraint alpha_ph B_Lambda < 1.
class CouplingState {
public:
    static CouplingState make(double alpha_bare, double alpha_ph, double z3, const CutoffParams& cutoff);

    double alpha_bare() const { return alpha_bare_; }
    double alpha_ph() const { return alpha_ph_; }
    double z3() const { return z3_; }
    const CutoffParams& cutoff() const { return cutoff_; }

private:
    CouplingState(double a, double aph, double z3, const CutoffParams& c)
        : alpha_bare_(a), alpha_ph_(aph), z3_(z3), cutoff_(c) {}
    double alpha_bare_;
    double alpha_ph_;
    double z3_;
    CutoffParams cutoff_;
};

CouplingState physical_from_bare(double alpha_bare, const CutoffParams& cutoff);
CouplingState bare_from_physical(double alpha_ph, double z3);

// Inverts B_Lambda: returns the cutoff with |b_lambda0(log_lambda) - b_target| <= 1e-10.
CutoffParams lambda_from_b(double b_target);

// Total charge seen at infinity in the linearized model: Z_3 times nu^(0).
double renormalized_total_charge(double nu_hat_at_zero, const CouplingState& state);

}  // namespace dv
