#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace dv {

// Outcome of one verification suite. Tolerances are fixed in the implementation.
struct SuiteResult {
    std::string name;
    bool passed = false;
    std::size_t checks = 0;
    std::size_t violations = 0;
    std::string detail;
    nlohmann::json metrics = nlohmann::json::object();
    double seconds = 0.0;

    nlohmann::json to_json() const;
};

// Suite names accepted by run_suite, in a stable order.
const std::vector<std::string>& suite_names();
// The set run by "all": the lemma and rate suites.
const std::vector<std::string>& default_suites();

// Throws DomainError for an unknown name. seed only affects the Monte Carlo suites.
SuiteResult run_suite(const std::string& name, std::uint64_t seed = 0);

SuiteResult suite_ue();               // sandwich bound on 1 + U
SuiteResult suite_plaute();           // |U_L - U| <= (258/pi) r / (2 E(L))
SuiteResult suite_estim_ulu();        // weighted sup bound, m = 0..3
SuiteResult suite_elise();            // 0 <= U_L <= (258/pi)(1 + U)
SuiteResult suite_jn();               // J_n and tau_n asymptotics
SuiteResult suite_diff_rate();        // ||nu_{n,L} - nu_n|| rate in 1 + B_L
SuiteResult suite_remainder_slope();  // ||R_N|| ~ alpha_ph^{N+1}, uniformly in Z_3
SuiteResult suite_u_forms();          // closed form vs integral form, small-r law
SuiteResult suite_b_asymptotics();    // B_L against its large-L expansion
SuiteResult suite_charge_identity();  // nu^(0) - rho_Q^(0) = Z_3 nu^(0)
SuiteResult suite_uehling_routes();   // direct vs Fourier Uehling potential
SuiteResult suite_loop1(std::uint64_t seed);
SuiteResult suite_f3_structure(std::uint64_t seed);

}  // namespace dv
