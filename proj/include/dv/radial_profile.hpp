#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dv {

// Sum of Gaussian charge distributions, nu^(k) = sum_i Z_i exp(-sigma_i^2 k^2 / 2)
// with the convention f^(k) = int f(x) e^{-i k.x} dx.
struct GaussianTerm {
    double charge = 1.0;
    double sigma = 1.0;
};

struct AnalyticDensity {
    std::vector<GaussianTerm> terms;

    static AnalyticDensity gaussian(double charge = 1.0, double sigma = 1.0);

    double fourier(double k) const;
    double position(double r) const;
    // log |nu^(k)|, accurate where nu^(k) itself underflows.
    double log_abs_fourier(double k) const;
    AnalyticDensity scaled(double c) const;
    AnalyticDensity plus(const AnalyticDensity& o) const;
};

class CubicSpline;

// Radial function of |k| sampled on a strictly increasing grid.
// Off-grid values: exact for tagged analytic profiles, otherwise a natural cubic
// spline in ln k; constant below the first node and zero above the last.
class RadialProfile {
public:
    RadialProfile() = default;
    RadialProfile(std::vector<double> k, std::vector<double> values,
                  std::optional<AnalyticDensity> tag = std::nullopt);

    const std::vector<double>& k() const { return k_; }
    const std::vector<double>& values() const { return values_; }
    const std::optional<AnalyticDensity>& tag() const { return tag_; }
    std::size_t size() const { return k_.size(); }

    double value_at(double k) const;

    RadialProfile scaled(double c) const;
    RadialProfile plus(const RadialProfile& o) const;
    RadialProfile minus(const RadialProfile& o) const;
    RadialProfile with_values(std::vector<double> values) const;

private:
    std::vector<double> k_;
    std::vector<double> values_;
    std::optional<AnalyticDensity> tag_;
    std::shared_ptr<const CubicSpline> spline_;
};

// Log-spaced grid; defaults follow the library's standard momentum grid.
std::vector<double> log_grid(double k_min = 1e-4, double k_max = 1e4, std::size_t n = 2048);

RadialProfile sample_density(const AnalyticDensity& density, const std::vector<double>& grid);
RadialProfile gaussian_profile(const std::vector<double>& grid, double charge = 1.0, double sigma = 1.0);

struct NormPair {
    double l2 = 0.0;
    double coulomb = 0.0;
    double combined = 0.0;
};

struct NormReport {
    NormPair value;
    NormPair error;  // difference to the same rule on every other node
};

struct LogNormPair {
    double log_l2 = 0.0;
    double log_coulomb = 0.0;
    double log_combined = 0.0;
};

// coulomb^2 = 4pi int |f^|^2 dk,  l2^2 = (2pi)^-3 4pi int k^2 |f^|^2 dk,  combined = l2 + coulomb.
NormPair norms(const RadialProfile& p);
NormReport norms_with_estimate(const RadialProfile& p);
// Throws DomainError when the half-grid estimate exceeds rel_tol relative to a nonzero norm.
NormPair norms_checked(const RadialProfile& p, double rel_tol = 1e-6);
// Same norms computed from log |f^| on the grid (entries may be -inf).
LogNormPair log_norms(const std::vector<double>& k, const std::vector<double>& log_abs_values);

// Quadrature weights w_i with int_0^inf g(k) dk ~ sum w_i g(k_i) for g ~ const near 0
// (trapezoid in ln k plus the left tail and its endpoint correction).
std::vector<double> dk_weights(const std::vector<double>& k);

// (2pi)^-3 4pi int k^2 f^ g^ dk, the L2 pairing of two radial densities.
double l2_inner(const RadialProfile& f, const RadialProfile& g);

void write_profile_csv(const std::string& path, const RadialProfile& p);
RadialProfile read_profile_csv(const std::string& path);

}  // namespace dv
