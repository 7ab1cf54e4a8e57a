#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "dv/errors.hpp"
#include "dv/f3_loop.hpp"

using namespace dv;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 random_vec(std::mt19937_64& g, double scale = 3.0) {
    std::normal_distribution<double> n(0.0, scale);
    return Vec3(n(g), n(g), n(g));
}

std::array<double, 4> energies(const std::array<Vec3, 4>& p) {
    std::array<double, 4> e{};
    for (std::size_t i = 0; i < 4; ++i) e[i] = energy(p[i].norm());
    return e;
}

}  // namespace

TEST_CASE("Dirac matrices") {
    const DiracMatrices& d = dirac_matrices();
    const SpinorMatrix id = SpinorMatrix::Identity();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j)
            CHECK((d.alpha[i] * d.alpha[j] + d.alpha[j] * d.alpha[i] - (i == j ? 2.0 : 0.0) * id).norm() == 0.0);
        CHECK((d.alpha[i] * d.beta + d.beta * d.alpha[i]).norm() == 0.0);
        CHECK(std::abs(d.alpha[i].trace()) == 0.0);
        CHECK((d.alpha[i] - d.alpha[i].adjoint()).norm() == 0.0);
    }
    CHECK((d.beta * d.beta - id).norm() == 0.0);
    CHECK(std::abs(d.beta.trace()) == 0.0);
}

TEST_CASE("projectors") {
    const SpinorMatrix p0 = projector(Vec3::Zero(), 1);
    CHECK((p0 - (SpinorMatrix::Identity() + dirac_matrices().beta) / 2.0).norm() < 1e-15);
    CHECK(p0(0, 0).real() == 1.0);
    CHECK(p0(1, 1).real() == 1.0);
    CHECK(std::abs(p0(2, 2)) == 0.0);
    CHECK(std::abs(p0(3, 3)) == 0.0);
    CHECK_THROWS_AS(projector(Vec3::Zero(), 0), DomainError);

    std::mt19937_64 g(5);
    for (int s = 0; s < 1000; ++s) {
        const Vec3 p = random_vec(g), q = random_vec(g);
        const SpinorMatrix pp = projector(p, 1), pm = projector(p, -1);
        CHECK((pp * pp - pp).norm() <= 1e-13);
        CHECK((pp + pm - SpinorMatrix::Identity()).norm() <= 1e-13);
        CHECK((pp * pm).norm() <= 1e-13);
        CHECK(std::abs(pp.trace() - 2.0) <= 1e-13);
        const double tr = (pp * projector(q, -1)).trace().real();
        CHECK(tr >= -1e-15);
        CHECK(tr == Approx(projector_pair_trace(p, 1, q, -1)).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("residue weights against eta quadrature") {
    const std::array<int, 2> d2 = {1, -1};
    const std::array<double, 2> e2 = {1.3, 2.1};
    CHECK(eta_weight(d2, e2) == Approx(-1.0 / 3.4).epsilon(1e-15));
    CHECK(eta_weight_quadrature(d2, e2).value == Approx(-1.0 / 3.4).epsilon(1e-12));

    CHECK(residue_sign_patterns().size() == 14);
    std::mt19937_64 g(17);
    for (int trial = 0; trial < 5; ++trial) {
        std::array<Vec3, 4> p;
        for (auto& v : p) v = random_vec(g);
        const auto e = energies(p);
        for (const auto& d : residue_sign_patterns()) {
            const EtaQuadrature q = eta_weight_quadrature(d, e);
            CHECK(eta_weight(d, e) == Approx(q.value).epsilon(1e-11));
        }
        const std::array<int, 4> same = {1, 1, 1, 1};
        CHECK(eta_weight(same, e) == 0.0);
        CHECK(std::abs(eta_weight_quadrature(same, e).value) < 1e-14);
        const EtaQuadrature full = resolvent_chain_quadrature(p);
        CHECK(residue_chain(p) == Approx(full.value).epsilon(1e-10));
    }
}

TEST_CASE("residue weights at large energies stay finite and accurate") {
    const std::array<double, 4> e = {1e6, 1.0, 3e5, 1.5};
    const std::array<int, 4> d = {1, -1, 1, -1};
    CHECK(eta_weight(d, e) == Approx(eta_weight_quadrature(d, e).value).epsilon(1e-9));
}

TEST_CASE("chain trace of the explicit pattern") {
    std::mt19937_64 g(3);
    std::array<Vec3, 4> p;
    for (auto& v : p) v = random_vec(g);
    const std::array<int, 4> d = {1, -1, -1, -1};
    SpinorMatrix m = projector(p[0], 1) * projector(p[1], -1) * projector(p[2], -1) * projector(p[3], -1);
    CHECK(chain_trace(p, d) == Approx(m.trace().real()).epsilon(1e-13));
}

TEST_CASE("counter-based generator and sampler") {
    CounterRng a(1, 42), b(1, 42), c(1, 43);
    CHECK(a.next() == b.next());
    CHECK(a.next() != c.next());
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
    const ImportanceSampler s1(10.0, 1, 9), s2(10.0, 1, 9);
    for (std::uint64_t i = 0; i < 100; ++i) {
        const MomentumSample x = s1.draw(i), y = s2.draw(i);
        CHECK(x.p0 == y.p0);
        CHECK(x.weight == y.weight);
        CHECK(x.weight > 0.0);
        CHECK(std::isfinite(x.weight));
        CHECK(x.p0.norm() <= 10.0);
    }
    const ImportanceSampler outer(10.0, -1, 9);
    for (std::uint64_t i = 0; i < 100; ++i) CHECK(outer.draw(i).p0.norm() > 10.0);
    CHECK_THROWS_AS(ImportanceSampler(0.5, 1, 0), DomainError);
}

TEST_CASE("importance weights integrate a known density") {
    // E[w g(p)] = int g for the unit Gaussian g, for each radial law.
    auto g3 = [](const Vec3& p) { return std::exp(-p.squaredNorm() / 2) / std::pow(2 * kPi, 1.5); };
    for (int flag : {0, 1}) {
        const ImportanceSampler s(2.0, flag, 123);
        double m = 0.0, m2 = 0.0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            CounterRng rng(123, static_cast<std::uint64_t>(i));
            auto [p, w] = s.draw_loop(rng);
            CHECK(w * s.loop_density(p) == Approx(1.0).epsilon(1e-12));
            const double v = w * g3(p);
            m += v;
            m2 += v * v;
        }
        m /= n;
        const double se = std::sqrt((m2 / n - m * m) / n);
        // Mass of the Gaussian inside |p| <= 2.
        const double inside = std::erf(2 / std::sqrt(2.0)) - std::sqrt(2 / kPi) * 2 * std::exp(-2.0);
        const double expect = flag == 0 ? 1.0 : inside;
        CHECK(std::abs(m - expect) <= 3 * se);
    }
    double m = 0.0, m2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        CounterRng rng(7, static_cast<std::uint64_t>(i));
        auto [q, w] = ImportanceSampler::draw_transfer(rng);
        const double v = w * g3(q);
        m += v;
        m2 += v * v;
    }
    m /= n;
    CHECK(std::abs(m - 1.0) <= 3 * std::sqrt((m2 / n - m * m) / n));
}

TEST_CASE("loop-1 oracle") {
    const RadialProfile nu = gaussian_profile(log_grid());
    const CutoffParams c = make_cutoff(std::log(10.0));
    const McEstimate e = loop1_response_mc(nu, 1.0, c, 1000000, 2024);
    CHECK(std::abs(e.value + b_lambda_k(1.0, c)) <= 3 * e.std_error);
    CHECK(e.n_samples == 1000000);
    CHECK(e.seed == 2024);
    CHECK(e.lambda == Approx(10.0).epsilon(1e-14));

    const McEstimate edge = loop1_response_mc(nu, 19.99, c, 200000, 1);
    CHECK(std::abs(edge.value) <= 3 * edge.std_error + 1e-12);

    CHECK_THROWS_AS(loop1_response_mc(nu, 1.0, c, 0, 1), MonteCarloError);
    CHECK_THROWS_AS(loop1_response_mc(nu, 2.0 * c.lambda(), c, 100, 1), DomainError);
    CHECK_THROWS_AS(loop1_response_mc(nu, 0.0, c, 100, 1), DomainError);
}

TEST_CASE("loop-1 standard error scales like 1/sqrt(n)") {
    const RadialProfile nu = gaussian_profile(log_grid());
    const CutoffParams c = make_cutoff(std::log(10.0));
    for (std::uint64_t t = 0; t < 10; ++t) {
        const double a = loop1_response_mc(nu, 1.0, c, 50000, 100 + t).std_error;
        const double b = loop1_response_mc(nu, 1.0, c, 100000, 200 + t).std_error;
        CHECK(b / a >= 0.6);
        CHECK(b / a <= 0.8);
    }
}

TEST_CASE("F_3 pairing: determinism, linearity, symmetry") {
    const RadialProfile mu = gaussian_profile(log_grid());
    const std::optional<CutoffParams> c = make_cutoff(std::log(10.0));
    const EpsilonMask all1 = EpsilonMask::all(1);
    const McEstimate a = f3_pairing_mc(mu, mu, mu, mu, c, all1, 20000, 5);
    const McEstimate b = f3_pairing_mc(mu, mu, mu, mu, c, all1, 20000, 5);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);

    // Thread count does not change a single bit.
    setenv("DV_THREADS", "1", 1);
    const McEstimate one = f3_pairing_mc(mu, mu, mu, mu, c, all1, 20000, 5);
    setenv("DV_THREADS", "3", 1);
    const McEstimate three = f3_pairing_mc(mu, mu, mu, mu, c, all1, 20000, 5);
    unsetenv("DV_THREADS");
    CHECK(one.value == three.value);
    CHECK(one.std_error == three.std_error);

    for (double lam : {2.0, -0.5}) {
        const McEstimate s = f3_pairing_mc(mu.scaled(lam), mu, mu, mu, c, all1, 20000, 5);
        CHECK(std::abs(s.value / (lam * a.value) - 1.0) <= 1e-12);
        const McEstimate t = f3_pairing_mc(mu, mu, mu.scaled(lam), mu, c, all1, 20000, 5);
        CHECK(std::abs(t.value / (lam * a.value) - 1.0) <= 1e-12);
    }

    // With equal insertions every ordering is the same computation.
    const RadialProfile mu2 = gaussian_profile(log_grid(), 1.0, 1.0);
    const McEstimate p = f3_pairing_mc(mu2, mu, mu, mu, c, all1, 20000, 5);
    const McEstimate q = f3_pairing_mc(mu, mu, mu2, mu, c, all1, 20000, 5);
    CHECK(std::abs(p.value - q.value) <= 3 * std::hypot(p.std_error, q.std_error));

    const std::vector<McEstimate> multi = f3_pairing_mc_multi({&mu, &mu, &mu}, {&mu, &mu2}, c, all1, 20000, 5);
    CHECK(multi[0].value == a.value);
}

TEST_CASE("F_3 integrand is rotation invariant") {
    const RadialProfile mu = gaussian_profile(log_grid());
    const ImportanceSampler s(10.0, 1, 77);
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(0.7, Vec3(1, 2, -0.5).normalized()).toRotationMatrix();
    for (std::uint64_t i = 0; i < 200; ++i) {
        const MomentumSample x = s.draw(i);
        MomentumSample y = x;
        y.p0 = rot * x.p0;
        for (auto& q : y.q) q = rot * q;
        const double a = f3_integrand_core(x, {&mu, &mu, &mu}, EpsilonMask::all(1), 10.0);
        const double b = f3_integrand_core(y, {&mu, &mu, &mu}, EpsilonMask::all(1), 10.0);
        CHECK(std::abs(a - b) <= 1e-12 * std::abs(a) + 1e-300);
    }
}

TEST_CASE("F_3 with a cutoff-complement decoration does not grow with Lambda") {
    const RadialProfile mu = gaussian_profile(log_grid());
    const EpsilonMask mask = EpsilonMask::parse("-1,0,0,0");
    std::vector<McEstimate> est;
    for (double lam : {10.0, 40.0, 160.0})
        est.push_back(f3_pairing_mc(mu, mu, mu, mu, make_cutoff(std::log(lam)), mask, 200000, 31));
    for (std::size_t i = 1; i < est.size(); ++i)
        CHECK(std::abs(est[i].value) <= std::abs(est[i - 1].value) + 3 * std::hypot(est[i].std_error, est[i - 1].std_error));
}

TEST_CASE("F_3 argument checks and serialization") {
    const RadialProfile mu = gaussian_profile(log_grid());
    CHECK_THROWS_AS(f3_pairing_mc(mu, mu, mu, mu, std::nullopt, EpsilonMask::all(1), 100, 1), DomainError);
    CHECK_THROWS_AS(f3_pairing_mc(mu, mu, mu, mu, std::nullopt, EpsilonMask::all(0, 3), 100, 1), DomainError);
    CHECK_THROWS_AS(f3_pairing_mc(mu, mu, mu, mu, std::nullopt, EpsilonMask::all(0), 0, 1), MonteCarloError);
    CHECK_THROWS_AS(EpsilonMask::parse("1,2,0,0"), DomainError);
    CHECK_THROWS_AS(EpsilonMask::parse("1,x"), DomainError);
    CHECK(EpsilonMask::parse("1,1,-1,0").to_string() == "1,1,-1,0");

    const McEstimate e = f3_pairing_mc(mu, mu, mu, mu, std::nullopt, EpsilonMask::all(0), 1000, 4);
    const nlohmann::json j = e.to_json();
    for (const char* k : {"value", "std_error", "n_samples", "seed", "lambda", "mask"}) CHECK(j.contains(k));
    CHECK(j.at("lambda").is_null());
}

TEST_CASE("Galerkin F_3 evaluator") {
    F3GalerkinEvaluator f({0.5, 1.0, 2.0}, 2000, 3);
    const Eigen::MatrixXd g = f.gram();
    const std::vector<double> grid = log_grid();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(g(i, j) == Approx(l2_inner(gaussian_profile(grid, 1.0, f.probe_sigmas()[i]),
                                             gaussian_profile(grid, 1.0, f.probe_sigmas()[j])))
                                 .epsilon(1e-10));
    const RadialProfile mu = gaussian_profile(grid);
    const RadialProfile* args[3] = {&mu, &mu, &mu};
    CHECK_FALSE(f.evaluate(5, std::span<const RadialProfile* const>(args, 3), std::nullopt).has_value());
    const auto out = f.evaluate(3, std::span<const RadialProfile* const>(args, 3), make_cutoff(std::log(10.0)));
    REQUIRE(out.has_value());
    CHECK(out->tag().has_value());
    CHECK(f.last_coefficients().size() == 3);
    CHECK_THROWS_AS(F3GalerkinEvaluator({}, 10, 0), DomainError);
}
