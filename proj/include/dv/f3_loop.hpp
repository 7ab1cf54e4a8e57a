#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dv/radial_profile.hpp"
#include "dv/radial_spectral.hpp"
#include "dv/special_functions.hpp"

namespace dv {

using SpinorMatrix = Eigen::Matrix4cd;
using Vec3 = Eigen::Vector3d;

struct DiracMatrices {
    std::array<SpinorMatrix, 3> alpha;
    SpinorMatrix beta;
};

// Standard (Dirac) representation.
const DiracMatrices& dirac_matrices();

// alpha.p + beta, the free Dirac operator in momentum space.
SpinorMatrix dirac_symbol(const Vec3& p);

// P_{+/-}(p) = (E(p) +/- (alpha.p + beta)) / (2 E(p)); sign must be +1 or -1.
SpinorMatrix projector(const Vec3& p, int sign);

// tr P_s(p) P_t(q) = 1 + s t (1 + p.q)/(E(p) E(q)).
double projector_pair_trace(const Vec3& p, int s, const Vec3& q, int t);

// Cutoff decorations pi^(eps) on the loop momenta: 1 -> |p| <= Lambda, -1 -> |p| > Lambda, 0 -> no constraint.
struct EpsilonMask {
    std::vector<int> flags;

    static EpsilonMask all(int flag, std::size_t length = 4);
    static EpsilonMask parse(const std::string& text);  // e.g. "1,1,-1,0"
    bool admits(std::size_t index, double momentum, double lambda) const;
    bool has_cutoff_flags() const;
    std::string to_string() const;
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    double lambda = 0.0;  // Lambda (not its log); +inf when no cutoff applies
    std::vector<int> mask;
    bool variance_overflow = false;

    nlohmann::json to_json() const;
};

class MonteCarloError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Counter-based generator: the stream for (seed, index) does not depend on how the
// samples are split between threads.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t index);
    std::uint64_t next();
    double uniform();  // in (0, 1)

private:
    std::uint64_t state_;
};

struct MomentumSample {
    Vec3 p0;                 // loop momentum
    std::array<Vec3, 3> q;   // transfers, p_i = p_{i-1} - q_i
    double weight = 0.0;     // reciprocal of the joint sampling density
};

// Loop momentum from 3/(4pi (1+|p|)^4), optionally restricted to |p| <= Lambda (flag 1) or
// |p| > Lambda (flag -1); transfers from 1/(4pi q^2 (1+q)^2); directions uniform.
class ImportanceSampler {
public:
    ImportanceSampler(double lambda, int loop_flag, std::uint64_t seed);

    MomentumSample draw(std::uint64_t index) const;
    // Loop momentum alone, with its reciprocal density.
    std::pair<Vec3, double> draw_loop(CounterRng& rng) const;
    static std::pair<Vec3, double> draw_transfer(CounterRng& rng);

    double loop_density(const Vec3& p) const;
    static double transfer_density(const Vec3& q);

private:
    double lambda_;
    int flag_;
    std::uint64_t seed_;
    double y3_lo_, y3_span_;
};

// Residue weight (1/2pi) int prod_i 1/(delta_i E_i + i eta) d eta for two or four factors,
// in cancellation-free form. Zero when all signs agree.
double eta_weight(std::span<const int> delta, std::span<const double> energies);

struct EtaQuadrature {
    double value = 0.0;
    double error = 0.0;
};
// Same weight by direct numerical integration over eta.
EtaQuadrature eta_weight_quadrature(std::span<const int> delta, std::span<const double> energies);

// The 14 sign patterns delta in {-1,1}^4 other than +-(1,1,1,1).
const std::vector<std::array<int, 4>>& residue_sign_patterns();

// Re tr[P_{d0}(p0) P_{d1}(p1) P_{d2}(p2) P_{d3}(p3)] for the given pattern.
double chain_trace(const std::array<Vec3, 4>& p, const std::array<int, 4>& delta);

// sum over patterns of eta_weight * chain_trace at fixed momenta.
double residue_chain(const std::array<Vec3, 4>& p);
// (1/2pi) int Re tr prod_i (D(p_i) + i eta)^-1 d eta with explicit 4x4 inverses.
EtaQuadrature resolvent_chain_quadrature(const std::array<Vec3, 4>& p);

// Monte Carlo estimate of the first-order loop multiplier at |k| (expectation -B_Lambda(k)).
McEstimate loop1_response_mc(const RadialProfile& nu, double k, const CutoffParams& cutoff,
                             std::uint64_t n_samples, std::uint64_t seed);

// Single-sample integrand of the pairing <zeta, F_3^eps(mu1, mu2, mu3)> divided by the
// zeta factor; exposed for covariance and validation tests.
double f3_integrand_core(const MomentumSample& s, const std::array<const RadialProfile*, 3>& mu,
                         const EpsilonMask& mask, double lambda);

// Importance-sampled tr(Q_3 zeta) summing the 14 residue terms.
McEstimate f3_pairing_mc(const RadialProfile& mu1, const RadialProfile& mu2, const RadialProfile& mu3,
                         const RadialProfile& zeta, const std::optional<CutoffParams>& cutoff,
                         const EpsilonMask& mask, std::uint64_t n_samples, std::uint64_t seed);

// Same samples for several test functions (common random numbers).
std::vector<McEstimate> f3_pairing_mc_multi(const std::array<const RadialProfile*, 3>& mu,
                                            const std::vector<const RadialProfile*>& zetas,
                                            const std::optional<CutoffParams>& cutoff, const EpsilonMask& mask,
                                            std::uint64_t n_samples, std::uint64_t seed);

// F_3 for expand_coefficients: Galerkin projection onto Gaussians exp(-sigma^2 k^2/2) using
// Monte Carlo pairings. Returns nullopt for j != 3.
class F3GalerkinEvaluator : public NonlinearEvaluator {
public:
    F3GalerkinEvaluator(std::vector<double> probe_sigmas, std::uint64_t n_samples, std::uint64_t seed);

    std::optional<RadialProfile> evaluate(int j, std::span<const RadialProfile* const> args,
                                          const std::optional<CutoffParams>& cutoff) override;

    const std::vector<double>& probe_sigmas() const { return sigmas_; }
    const std::vector<McEstimate>& last_pairings() const { return pairings_; }
    const std::vector<double>& last_coefficients() const { return coefficients_; }
    // Analytic L2 Gram matrix of the probes.
    Eigen::MatrixXd gram() const;

private:
    std::vector<double> sigmas_;
    std::uint64_t n_samples_;
    std::uint64_t seed_;
    std::vector<McEstimate> pairings_;
    std::vector<double> coefficients_;
};

}  // namespace dv
