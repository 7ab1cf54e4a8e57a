#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "dv/errors.hpp"
#include "dv/special_functions.hpp"

using namespace dv;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> r;
    for (int i = 0; i < n; ++i) r.push_back(lo * std::pow(hi / lo, i / double(n - 1)));
    return r;
}

// Reference values computed once with 40-digit mpmath quadrature of the integral definitions.
constexpr double kU1 = 0.019235320902829367;
constexpr double kB1 = 0.04948495803350217;         // B at Lambda = 1
constexpr double kB10 = 0.45993302447017251;
constexpr double kB100 = 0.94750964961464323;
constexpr double kB1e4 = 1.9247465058502798;
constexpr double kB10k1 = 0.43668538257318902;      // B_10(1)
constexpr double kB10k5 = 0.25217315387885995;      // B_10(5)
constexpr double kB10k195 = 1.0215453983985872e-4;  // B_10(19.5)
constexpr double kB100k1 = 0.92787592967963763;     // B_100(1)
constexpr double kU100k1 = 0.019633719935005601;    // U_100(1)
constexpr double kPhi1e5RLogR = 0.7479820417;       // Phi(1e5) r ln r

}  // namespace

TEST_CASE("energy") {
    CHECK(energy(0.0) == 1.0);
    CHECK(energy(1.0) == Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(energy(20.0) == Approx(std::sqrt(401.0)).epsilon(1e-15));
    CHECK(energy(1e200) == Approx(1e200));
}

TEST_CASE("Uehling multiplier values") {
    CHECK(uehling_multiplier(0.0) == 0.0);
    CHECK(rel(uehling_multiplier(1.0), kU1) < 1e-13);
    CHECK(std::abs(uehling_multiplier(1.0) - 0.01924) < 1e-4);
    const double r = 1e-3;
    CHECK(std::abs(uehling_multiplier(r) / (r * r / (15 * kPi)) - 1.0) < 1e-4);
}

TEST_CASE("Uehling closed form, series and integral agree") {
    for (double r : logspace(1e-2, 1e4, 200)) {
        INFO("r = " << r);
        CHECK(rel(uehling_multiplier(r), uehling_integral(r)) < 1e-10);
    }
    // Both branches on either side of the switch point.
    for (double r : {0.3, 0.45, 0.5, 0.55, 0.7}) {
        INFO("r = " << r);
        CHECK(rel(uehling_series(r), uehling_closed_form(r)) < 1e-12);
    }
}

TEST_CASE("Uehling integral against an independent tanh-sinh oracle") {
    boost::math::quadrature::tanh_sinh<double> ts;
    for (double r : {0.05, 1.0, 30.0, 2000.0}) {
        // In t = 1 - z so the peak near z = 1 keeps full relative precision.
        auto f = [r](double t) {
            const double z = 1.0 - t;
            return (z * z - z * z * z * z / 3) / (1 + r * r * t * (2.0 - t) / 4);
        };
        const double t0 = std::min(0.5, 4.0 / (r * r));
        const double ref = r * r / (4 * kPi) * (ts.integrate(f, 0.0, t0) + ts.integrate(f, t0, 1.0));
        INFO("r = " << r);
        CHECK(rel(uehling_multiplier(r), ref) < 1e-12);
    }
}

TEST_CASE("Uehling multiplier is non-decreasing") {
    double prev = 0.0;
    for (double r : logspace(1e-4, 1e8, 500)) {
        const double u = uehling_multiplier(r);
        CHECK(u >= prev);
        prev = u;
    }
}

TEST_CASE("Uehling derivative") {
    CHECK(uehling_derivative(0.0) == 0.0);
    for (double r : logspace(1e-2, 1e3, 60)) {
        const double h = 1e-5 * r;
        const double fd = (uehling_multiplier(r + h) - uehling_multiplier(r - h)) / (2 * h);
        INFO("r = " << r);
        CHECK(rel(uehling_derivative(r), fd) < 1e-6);
    }
    const double big = 1e6;
    CHECK(uehling_derivative(big) * 3 * kPi * big / 2 == Approx(1.0).epsilon(0.01));
    CHECK(uehling_derivative(1e-3) > 0.0);
}

TEST_CASE("Phi limits") {
    CHECK(phi(0.0) == 0.0);
    const double r = 1e-4;
    CHECK(phi(r) / (2 * r / (15 * kPi)) == Approx(1.0).epsilon(1e-3));
    // At r = 1e5 the large-r law is still far from its limit: r ln r Phi(r) = 0.748.
    CHECK(phi(1e5) * 1e5 * std::log(1e5) == Approx(kPhi1e5RLogR).epsilon(1e-8));
    // The approach to 1 is slow (a 1/ln r correction) and monotone.
    double prev = 0.0;
    for (double x : {1e5, 1e10, 1e20, 1e40}) {
        const double v = phi(x) * x * std::log(x);
        CHECK(v > prev);
        prev = v;
    }
    CHECK(prev == Approx(1.0).epsilon(0.1));
}

TEST_CASE("Phi landscape") {
    const PhiLandscape l = phi_landscape();
    CHECK(l.t_minus > 0.0);
    CHECK(l.t_minus < l.t_max);
    CHECK(l.t_max < l.t_plus);
    CHECK(phi(l.t_minus / 2) < l.phi0);
    CHECK(phi(2 * l.t_plus) < l.phi0);
    CHECK(std::abs(phi(l.t_minus) - phi(l.t_plus)) < 1e-9);
    CHECK(std::abs(phi(l.t_minus) - l.phi0) < 1e-9);
    CHECK(l.phi0 < l.phi_max);
    // Monotone tails on a sample.
    double prev = 0.0;
    for (double r : logspace(1e-3, l.t_minus, 50)) {
        CHECK(phi(r) > prev);
        prev = phi(r);
    }
    prev = phi(l.t_plus);
    for (double r : logspace(l.t_plus * 1.001, 1e4, 50)) {
        CHECK(phi(r) < prev);
        prev = phi(r);
    }
}

TEST_CASE("Z_Lambda") {
    const CutoffParams c = make_cutoff(std::log(10.0));
    CHECK(z_lambda(2.0 * c.lambda(), c) == 0.0);
    CHECK(z_lambda(1e-9, c) == Approx(10.0 / std::sqrt(101.0)).epsilon(1e-8));
    CHECK(z_lambda(10.0, c) == Approx(10.0 / (std::sqrt(101.0) + 1.0)).epsilon(1e-14));
    CHECK(one_minus_z_lambda(10.0, c) == Approx(1.0 - 10.0 / (std::sqrt(101.0) + 1.0)).epsilon(1e-14));
    CHECK_THROWS_AS(z_lambda(0.0, c), DomainError);
    CHECK_THROWS_AS(z_lambda(20.5, c), DomainError);
}

TEST_CASE("B_Lambda at zero momentum") {
    CHECK(rel(b_lambda0(0.0), kB1) < 1e-12);
    CHECK(rel(b_lambda0(std::log(10.0)), kB10) < 1e-12);
    CHECK(rel(b_lambda0(std::log(100.0)), kB100) < 1e-12);
    CHECK(rel(b_lambda0(std::log(1e4)), kB1e4) < 1e-12);
    CHECK(std::abs(b_lambda0(std::log(1e4)) - b_lambda_asymptotic(std::log(1e4))) <= 1e-6);
    CHECK(b_lambda0(std::log(10.0)) < b_lambda0(std::log(100.0)));
    // Asymptotic branch is continuous across its switch point; the step equals slope times width.
    const double h = 1e-6;
    const double step = b_lambda0(kAsymptoticLogLambda + h) - b_lambda0(kAsymptoticLogLambda - h);
    CHECK(std::abs(step - 2.0 * h * 2.0 / (3.0 * kPi)) < 1e-12);
    CHECK_THROWS_AS(b_lambda0(-0.1), DomainError);
}

TEST_CASE("B_Lambda(k)") {
    const CutoffParams c10 = make_cutoff(std::log(10.0));
    const CutoffParams c100 = make_cutoff(std::log(100.0));
    CHECK(std::abs(b_lambda_k(0.0, c10) - c10.b_lambda) < 1e-9);
    CHECK(b_lambda_k(2.0 * c10.lambda(), c10) == 0.0);
    CHECK(rel(b_lambda_k(1.0, c10), kB10k1) < 1e-11);
    CHECK(rel(b_lambda_k(5.0, c10), kB10k5) < 1e-11);
    CHECK(rel(b_lambda_k(19.5, c10), kB10k195) < 1e-9);
    CHECK(rel(b_lambda_k(1.0, c100), kB100k1) < 1e-11);
    for (double k : logspace(1e-3, 19.99, 40)) {
        const double b = b_lambda_k(k, c10);
        CHECK(b >= 0.0);
        CHECK(b <= c10.b_lambda);
    }
    CHECK_THROWS_AS(b_lambda_k(20.1, c10), DomainError);
}

TEST_CASE("cutoff multiplier") {
    const CutoffParams c = make_cutoff(std::log(50.0));
    CHECK(cutoff_multiplier(0.0, c) == 0.0);
    CHECK(cutoff_multiplier(2.0 * c.lambda(), c) == Approx(c.b_lambda).epsilon(1e-14));
    CHECK(cutoff_multiplier(100.5, c) == 0.0);
    CHECK(std::abs(cutoff_multiplier(1.0, c) - uehling_multiplier(1.0)) <= 258.0 / kPi / (2 * energy(50.0)));
    const CutoffParams c100 = make_cutoff(std::log(100.0));
    CHECK(rel(cutoff_multiplier(1.0, c100), kU100k1) < 1e-10);
    CHECK(rel(cutoff_multiplier(1.0, c100), c100.b_lambda - b_lambda_k(1.0, c100)) < 1e-10);
    for (double r : logspace(1e-3, 99.9, 40)) {
        const double u = cutoff_multiplier(r, c);
        CHECK(u >= 0.0);
        CHECK(u <= c.b_lambda);
    }
}

TEST_CASE("cutoff multiplier converges monotonically in Lambda") {
    for (double r : {0.01, 0.3, 1.0, 5.0, 15.0}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double lam : {10.0, 20.0, 40.0, 80.0, 160.0, 320.0}) {
            const double err = std::abs(cutoff_multiplier(r, make_cutoff(std::log(lam))) - uehling_multiplier(r));
            INFO("r = " << r << ", Lambda = " << lam);
            CHECK(err < prev);
            prev = err;
        }
    }
}

TEST_CASE("cutoff multiplier at huge Lambda") {
    const CutoffParams c = make_cutoff(320.0);
    CHECK(cutoff_multiplier(1.0, c) == Approx(uehling_multiplier(1.0)).epsilon(1e-14));
    CHECK(c.b_lambda == Approx(b_lambda_asymptotic(320.0)).epsilon(1e-15));
}

TEST_CASE("J_n against direct maximization") {
    const double n = 100.0;
    const PhiLandscape land = phi_landscape();
    const JnResult j = jn_constant(n, land);
    CHECK(j.tau_n > 0.0);
    CHECK(j.tau_n < land.t_minus);
    // Brute-force grid followed by golden-section refinement in ln tau.
    double best_t = 0.0, best = -1.0;
    for (double t : logspace(1e-4, land.t_minus, 2000)) {
        const double v = jn_objective(n, t);
        if (v > best) best = v, best_t = t;
    }
    double a = std::log(best_t) - 0.01, b = std::log(best_t) + 0.01;
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 200; ++it) {
        const double c = b - g * (b - a), d = a + g * (b - a);
        if (jn_objective(n, std::exp(c)) > jn_objective(n, std::exp(d)))
            b = d;
        else
            a = c;
    }
    const double direct = jn_objective(n, std::exp(0.5 * (a + b)));
    CHECK(rel(j.j_n, direct) < 1e-6);
    CHECK(rel(j.j_n, jn_objective(n, j.tau_n)) < 1e-14);
}

TEST_CASE("J_n structure at large n") {
    const PhiLandscape land = phi_landscape();
    const JnResult j = jn_constant(1e6, land);
    CHECK(j.tau_n < land.t_minus);
    CHECK(1e6 * j.tau_n > land.t_plus);
    CHECK(std::abs(phi(j.tau_n) - phi(1e6 * j.tau_n)) < 1e-9 * phi(j.tau_n));
    // The ratio to (ln n)/(3 pi) decreases towards 1 as n grows.
    const double r3 = jn_constant(1e3, land).j_n * 3 * kPi / std::log(1e3);
    const double r6 = j.j_n * 3 * kPi / std::log(1e6);
    CHECK(r6 < r3);
    CHECK(r6 > 1.0);
}

TEST_CASE("make_cutoff validates") {
    CHECK_THROWS_AS(make_cutoff(-1.0), DomainError);
    const CutoffParams c = make_cutoff(std::log(10.0));
    CHECK(c.lambda() == Approx(10.0).epsilon(1e-14));
    CHECK(c.b_lambda > 0.0);
}
