#include "dv/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "dv/errors.hpp"
#include "dv/quadrature.hpp"

namespace dv {

namespace {

constexpr double kPi = std::numbers::pi;

// Tight options for the smooth integrands below; the absolute floor only guards
// identically-zero integrals.
QuadOptions tight(double rel = 1e-13) {
    QuadOptions o;
    o.abs_tol = 1e-300;
    o.rel_tol = rel;
    o.max_intervals = 8000;
    return o;
}

inline double vp_weight(double z) { return z * z - z * z * z * z / 3.0; }

// Breakpoints [lo, hi] with an extra node at c when it falls strictly inside.
std::vector<double> with_break(double lo, double hi, double c) {
    if (c > lo && c < hi) return {lo, c, hi};
    return {lo, hi};
}

// E(s) - s, stable for both signs of s.
double energy_minus(double s) {
    if (s >= 0.0) return 1.0 / (energy(s) + s);
    return energy(s) - s;
}

double lambda_checked(const CutoffParams& c) {
    if (!(c.log_lambda >= 0.0)) throw DomainError("cutoff requires log_lambda >= 0");
    if (c.log_lambda > 700.0) throw DomainError("log_lambda too large to represent Lambda");
    return std::exp(c.log_lambda);
}

// (1/pi) int_{u0}^{u1} f(z)/(1+z) du with z = 1 - e^{-u}; this is the B_Lambda integrand
// after the endpoint substitution.
double b_tail(double u0, double u1) {
    if (!(u1 > u0)) return 0.0;
    auto g = [](double u) {
        const double z = -std::expm1(-u);
        return vp_weight(z) / (1.0 + z);
    };
    return integrate_or_throw(g, {u0, u1}, tight(), "B_Lambda integral") / kPi;
}

}  // namespace

double CutoffParams::lambda() const { return std::exp(log_lambda); }

CutoffParams make_cutoff(double log_lambda) {
    if (!(log_lambda >= 0.0) || !std::isfinite(log_lambda))
        throw DomainError("cutoff requires finite log_lambda >= 0 (Lambda >= 1)");
    return CutoffParams{log_lambda, b_lambda0(log_lambda)};
}

double energy(double r) { return std::hypot(1.0, r); }

double uehling_closed_form(double r) {
    if (r <= 0.0) throw DomainError("closed form of U requires r > 0");
    const double r2 = r * r;
    const double s = std::sqrt(4.0 + r2);
    // log((s + r)/(s - r)) = 2 asinh(r/2)
    return (12.0 - 5.0 * r2) / (9.0 * kPi * r2) +
           s * (r2 - 2.0) / (3.0 * kPi * r2 * r) * 2.0 * std::asinh(0.5 * r);
}

double uehling_series(double r) {
    // U = (r^2/4pi) sum_n (-r^2/4)^n c_n,  c_n = int (z^2 - z^4/3)(1 - z^2)^n dz
    const double x = -0.25 * r * r;
    double i1 = 1.0 / 3.0, i2 = 1.0 / 5.0;
    double power = 1.0;
    double sum = 0.0;
    for (int n = 0; n < 200; ++n) {
        const double term = power * (i1 - i2 / 3.0);
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
        const double m = n + 1;
        i1 *= 2.0 * m / (2.0 * m + 3.0);
        i2 *= 2.0 * m / (2.0 * m + 5.0);
        power *= x;
    }
    return r * r / (4.0 * kPi) * sum;
}

double uehling_multiplier(double r) {
    if (!(r >= 0.0)) throw DomainError("U(r) requires r >= 0");
    if (r == 0.0) return 0.0;
    if (r < kUehlingSeriesThreshold) return uehling_series(r);
    return uehling_closed_form(r);
}

double uehling_integral(double r, double rel_tol) {
    if (!(r >= 0.0)) throw DomainError("U(r) requires r >= 0");
    if (r == 0.0) return 0.0;
    const double r2 = r * r;
    auto g = [r2](double u) {
        const double e = std::exp(-u);
        const double z = -std::expm1(-u);
        return vp_weight(z) * e / (1.0 + 0.25 * r2 * e * (1.0 + z));
    };
    const double knee = std::max(0.0, 2.0 * std::log(r));
    const double umax = knee + 45.0;
    return r2 / (4.0 * kPi) *
           integrate_or_throw(g, with_break(0.0, umax, knee), tight(rel_tol), "U integral form");
}

double uehling_derivative(double r) {
    if (!(r >= 0.0)) throw DomainError("U'(r) requires r >= 0");
    if (r == 0.0) return 0.0;
    const double r2 = r * r;
    auto g = [r2](double u) {
        const double e = std::exp(-u);
        const double z = -std::expm1(-u);
        const double d = 1.0 + 0.25 * r2 * e * (1.0 + z);
        return vp_weight(z) * e / (d * d);
    };
    const double knee = std::max(0.0, 2.0 * std::log(r));
    const double umax = knee + 45.0;
    return r / (2.0 * kPi) *
           integrate_or_throw(g, with_break(0.0, umax, knee), tight(), "U' integral");
}

double phi(double r) {
    if (!(r >= 0.0)) throw DomainError("Phi(r) requires r >= 0");
    if (r == 0.0) return 0.0;
    return uehling_derivative(r) / (1.0 + uehling_multiplier(r));
}

PhiLandscape phi_landscape() {
    // Coarse scan for the maximum, then Brent refinement in ln r.
    double best_x = 0.0, best_v = -1.0;
    const int n = 241;
    for (int i = 0; i < n; ++i) {
        const double x = -3.0 * std::log(10.0) + 6.0 * std::log(10.0) * i / (n - 1);
        const double v = phi(std::exp(x));
        if (!std::isfinite(v)) throw QuadratureError("phi_landscape: non-finite Phi", v, 0.0);
        if (v > best_v) {
            best_v = v;
            best_x = x;
        }
    }
    const double h = 6.0 * std::log(10.0) / (n - 1);
    auto neg = [](double x) { return -phi(std::exp(x)); };
    auto m = boost::math::tools::brent_find_minima(neg, best_x - h, best_x + h, 52);
    PhiLandscape out;
    out.t_max = std::exp(m.first);
    out.phi_max = -m.second;
    out.phi0 = 0.9 * out.phi_max;

    auto level = [&](double x) { return phi(std::exp(x)) - out.phi0; };
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    auto lo = boost::math::tools::toms748_solve(level, std::log(1e-6), m.first, tol, iters);
    iters = 200;
    auto hi = boost::math::tools::toms748_solve(level, m.first, std::log(1e8), tol, iters);
    out.t_minus = std::exp(0.5 * (lo.first + lo.second));
    out.t_plus = std::exp(0.5 * (hi.first + hi.second));
    return out;
}

double z_lambda(double r, const CutoffParams& cutoff) {
    const double lam = lambda_checked(cutoff);
    if (!(r > 0.0) || r > 2.0 * lam) throw DomainError("Z_Lambda(r) requires 0 < r <= 2 Lambda");
    return (2.0 * lam - r) / (energy(lam) + energy(lam - r));
}

double one_minus_z_lambda(double r, const CutoffParams& cutoff) {
    const double lam = lambda_checked(cutoff);
    if (!(r >= 0.0) || r > 2.0 * lam) throw DomainError("Z_Lambda(r) requires 0 <= r <= 2 Lambda");
    return (energy_minus(lam) + energy_minus(lam - r)) / (energy(lam) + energy(lam - r));
}

double b_lambda_asymptotic(double log_lambda) {
    return 2.0 / (3.0 * kPi) * log_lambda - 5.0 / (9.0 * kPi) + 2.0 * std::log(2.0) / (3.0 * kPi);
}

double b_lambda0(double log_lambda) {
    if (!(log_lambda >= 0.0)) throw DomainError("B_Lambda requires Lambda >= 1");
    if (log_lambda > kAsymptoticLogLambda) return b_lambda_asymptotic(log_lambda);
    const double lam = std::exp(log_lambda);
    const double e = energy(lam);
    // 1 - Lambda/E(Lambda) = 1/(E (E + Lambda))
    return b_tail(0.0, std::log(e) + std::log(e + lam));
}

double b_lambda_k(double k, const CutoffParams& cutoff) {
    const double lam = lambda_checked(cutoff);
    if (!(k >= 0.0) || k > 2.0 * lam) throw DomainError("B_Lambda(k) requires 0 <= k <= 2 Lambda");
    if (k == 0.0) return b_lambda0(cutoff.log_lambda);
    if (k == 2.0 * lam) return 0.0;
    const double k2 = k * k;
    const double uk = -std::log(one_minus_z_lambda(k, cutoff));
    const double zk = z_lambda(k, cutoff);
    auto g1 = [k2](double u) {
        const double e = std::exp(-u);
        const double z = -std::expm1(-u);
        return vp_weight(z) / ((1.0 + z) * (1.0 + 0.25 * k2 * e * (1.0 + z)));
    };
    const double el = energy(lam);
    auto g2 = [k, el](double z) { return (z - z * z * z / 3.0) / (el - 0.5 * k * z); };
    const double first =
        integrate_or_throw(g1, with_break(0.0, uk, 2.0 * std::log(k)), tight(), "B_Lambda(k) first term") / kPi;
    const double second = k / (2.0 * kPi) * integrate_or_throw(g2, {0.0, zk}, tight(), "B_Lambda(k) second term");
    return first + second;
}

double cutoff_multiplier(double r, const CutoffParams& cutoff) {
    if (!(r >= 0.0)) throw DomainError("U_Lambda(r) requires r >= 0");
    if (!(cutoff.log_lambda >= 0.0)) throw DomainError("cutoff requires Lambda >= 1");
    if (r == 0.0) return 0.0;
    if (cutoff.log_lambda > kCutoffSaturationLogLambda) return uehling_multiplier(r);
    const double lam = std::exp(cutoff.log_lambda);
    if (r > 2.0 * lam) return 0.0;
    if (r == 2.0 * lam) return b_lambda0(cutoff.log_lambda);

    // U_Lambda = B_Lambda - B_Lambda(r), regrouped so that no two large terms cancel:
    //   (r^2/4pi) int_0^{Z_r} f/(1+a)  -  (r/2pi) int_0^{Z_r} (z - z^3/3)/(E(L) - r z/2)
    //   + (1/pi) int_{Z_r}^{L/E(L)} f/(1 - z^2)
    const double r2 = r * r;
    const double el = energy(lam);
    const double ur = -std::log(one_minus_z_lambda(r, cutoff));
    const double umax = std::log(el) + std::log(el + lam);
    const double zr = z_lambda(r, cutoff);

    auto g1 = [r2](double u) {
        const double e = std::exp(-u);
        const double z = -std::expm1(-u);
        return vp_weight(z) * e / (1.0 + 0.25 * r2 * e * (1.0 + z));
    };
    auto g2 = [r, el](double z) { return (z - z * z * z / 3.0) / (el - 0.5 * r * z); };
    const double term1 = r2 / (4.0 * kPi) *
                         integrate_or_throw(g1, with_break(0.0, ur, 2.0 * std::log(r)), tight(), "U_Lambda first term");
    const double term2 = r / (2.0 * kPi) * integrate_or_throw(g2, {0.0, zr}, tight(), "U_Lambda second term");
    const double term3 = b_tail(ur, umax);
    return term1 - term2 + term3;
}

double jn_objective(double n, double tau) {
    return std::exp(std::log1p(uehling_multiplier(n * tau)) - n * std::log1p(uehling_multiplier(tau)));
}

JnResult jn_constant(double n) { return jn_constant(n, phi_landscape()); }

JnResult jn_constant(double n, const PhiLandscape& landscape) {
    if (!(n >= 2.0)) throw DomainError("J_n requires n >= 2");
    auto g = [n](double tau) { return phi(tau) - phi(n * tau); };
    double lo = 1e-12, hi = landscape.t_minus;
    double glo = g(lo), ghi = g(hi);
    if (!(glo < 0.0 && ghi > 0.0))
        throw DomainError("J_n: Phi(tau) = Phi(n tau) is not bracketed in (0, T_-) for this n");
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) {
            lo = hi = mid;
            break;
        }
        if (gm < 0.0) lo = mid; else hi = mid;
    }
    JnResult out;
    out.tau_n = 0.5 * (lo + hi);
    out.j_n = jn_objective(n, out.tau_n);
    return out;
}

}  // namespace dv
