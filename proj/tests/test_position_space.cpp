#include <doctest.h>

#include <cmath>

#include "dv/errors.hpp"
#include "dv/position_space.hpp"

using namespace dv;
using doctest::Approx;

TEST_CASE("zero density has zero potential") {
    CHECK(uehling_potential_direct(AnalyticDensity{}, 1.0) == 0.0);
    const RadialProfile z = gaussian_profile(log_grid(), 0.0);
    CHECK(uehling_potential_fourier(z, 1.0) == 0.0);
}

TEST_CASE("Fourier route reproduces the Gaussian Coulomb potential") {
    const RadialProfile g = gaussian_profile(log_grid());
    for (double x : {0.1, 0.5, 1.0, 3.0, 8.0}) {
        const PotentialValue v = radial_potential_fourier(g, x, [](double) { return 1.0; });
        INFO("x = " << x);
        CHECK(v.value == Approx(std::erf(x / std::sqrt(2.0)) / x).epsilon(1e-10));
    }
}

TEST_CASE("direct and Fourier routes agree") {
    const AnalyticDensity d = AnalyticDensity::gaussian();
    const RadialProfile g = sample_density(d, log_grid());
    for (double x : {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        const double a = uehling_potential_direct(d, x);
        const double b = uehling_potential_fourier(g, x);
        INFO("x = " << x);
        CHECK(a > 0.0);
        CHECK(std::abs(a - b) <= 1e-6 * std::abs(b));
    }
}

TEST_CASE("potential decays faster than Coulomb") {
    const AnalyticDensity d = AnalyticDensity::gaussian();
    CHECK(uehling_potential_direct(d, 10.0) < 1e-6 * uehling_potential_direct(d, 1.0));
}

TEST_CASE("potential is finite as x approaches zero") {
    const RadialProfile g = gaussian_profile(log_grid());
    const double a = uehling_potential_fourier(g, 1e-3);
    const double b = uehling_potential_fourier(g, 2e-3);
    CHECK(std::isfinite(a));
    CHECK(a == Approx(b).epsilon(1e-3));
}

TEST_CASE("linearity in the density") {
    const AnalyticDensity a = AnalyticDensity::gaussian(1.0, 1.0);
    const AnalyticDensity b = AnalyticDensity::gaussian(0.5, 2.0);
    const double x = 1.5;
    const double sum = uehling_potential_direct(a.scaled(2.0).plus(b), x);
    CHECK(sum == Approx(2.0 * uehling_potential_direct(a, x) + uehling_potential_direct(b, x)).epsilon(1e-10));
    const std::vector<double> grid = log_grid();
    const double fs = uehling_potential_fourier(sample_density(a.scaled(2.0).plus(b), grid), x);
    CHECK(fs == Approx(2.0 * uehling_potential_fourier(sample_density(a, grid), x) +
                       uehling_potential_fourier(sample_density(b, grid), x))
                    .epsilon(1e-12));
}

TEST_CASE("batch evaluation and domain checks") {
    const AnalyticDensity d = AnalyticDensity::gaussian();
    const std::vector<double> xs = {0.5, 1.0, 2.0};
    const RadialPotential p = uehling_potential_direct(d, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(p.values[i] == uehling_potential_direct(d, xs[i]));
    CHECK_THROWS_AS(uehling_potential_direct(d, 0.0), DomainError);
    CHECK_THROWS_AS(uehling_potential_fourier(gaussian_profile(log_grid()), -1.0), DomainError);
    const PotentialValue v = uehling_potential_fourier_detail(gaussian_profile(log_grid()), 1.0);
    CHECK(v.tail_bound < 1e-10 * v.value);
}
