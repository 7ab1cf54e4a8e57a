#include "dv/position_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dv/errors.hpp"
#include "dv/io.hpp"
#include "dv/parallel.hpp"
#include "dv/quadrature.hpp"
#include "dv/special_functions.hpp"

namespace dv {

namespace {

constexpr double kPi = std::numbers::pi;

QuadOptions opts(double rel) {
    QuadOptions o;
    o.abs_tol = 1e-300;
    o.rel_tol = rel;
    o.max_intervals = 4000;
    return o;
}

double max_sigma(const AnalyticDensity& nu) {
    double s = 0.0;
    for (const auto& t : nu.terms) s = std::max(s, t.sigma);
    return s;
}

// int e^{-mu|x-y|} nu(|y|)/|x-y| d^3y
//   = (2pi/(mu x)) int_0^inf s nu(s) (e^{-mu|x-s|} - e^{-mu(x+s)}) ds,
// split at s = x and written in w = mu|x - s|.
QuadResult yukawa_average(const AnalyticDensity& nu, double x, double mu) {
    const double w_cap = 60.0;
    const double s_far = x + 40.0 * max_sigma(nu);
    auto inside = [&](double w) {
        const double s = x - w / mu;
        return s * nu.position(s) * std::exp(-w) * (-std::expm1(-2.0 * mu * s));
    };
    const double damp = -std::expm1(-2.0 * mu * x);
    auto outside = [&](double w) {
        const double s = x + w / mu;
        return s * nu.position(s) * std::exp(-w) * damp;
    };
    const double w_in = std::min(mu * x, w_cap);
    const double w_out = std::min(mu * (s_far - x), w_cap);
    QuadResult a = integrate(inside, 0.0, w_in, opts(1e-12));
    QuadResult b = integrate(outside, 0.0, w_out, opts(1e-12));
    const double pref = 2.0 * kPi / (mu * x) / mu;
    QuadResult out;
    out.value = pref * (a.value + b.value);
    out.error = pref * (a.error + b.error);
    out.converged = a.converged && b.converged;
    out.evaluations = a.evaluations + b.evaluations;
    return out;
}

// Wynn epsilon extrapolation of a sequence of partial sums.
double wynn_epsilon(const std::vector<double>& s) {
    const std::size_t n = s.size();
    if (n < 3) return s.empty() ? 0.0 : s.back();
    std::vector<double> prev(n + 1, 0.0), cur(s.begin(), s.end());
    double best = s.back();
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<double> next(cur.size() - 1);
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const double d = cur[i + 1] - cur[i];
            if (d == 0.0) return best;
            next[i] = prev[i + 1] + 1.0 / d;
        }
        prev = cur;
        cur = next;
        if (k % 2 == 0 && !cur.empty() && std::isfinite(cur.back())) best = cur.back();
    }
    return best;
}

}  // namespace

PotentialValue uehling_potential_direct_detail(const AnalyticDensity& nu, double x) {
    if (!(x > 0.0)) throw DomainError("potential requires x > 0");
    if (nu.terms.empty()) return {};
    bool failed = false;
    double inner_err = 0.0;
    auto outer = [&](double u) {
        const double t = std::cosh(u);
        const double th = std::tanh(u);
        // sqrt(t^2 - 1) dt (2/t^2 + 1/t^4) = tanh^2 u (2 + 1/cosh^2 u) du
        const double w = th * th * (2.0 + 1.0 / (t * t));
        QuadResult y = yukawa_average(nu, x, 2.0 * t);
        if (!y.converged) failed = true;
        inner_err = std::max(inner_err, std::abs(y.error));
        return w * y.value;
    };
    QuadResult r = integrate(outer, std::vector<double>{0.0, 1.0, 3.0, 8.0, 25.0}, opts(1e-11));
    if (!r.converged || failed)
        throw QuadratureError("direct Uehling potential did not converge", r.value / (3.0 * kPi), r.error);
    PotentialValue out;
    out.value = r.value / (3.0 * kPi);
    out.error = (r.error + 25.0 * 3.0 * inner_err) / (3.0 * kPi);
    return out;
}

double uehling_potential_direct(const AnalyticDensity& nu, double x) {
    return uehling_potential_direct_detail(nu, x).value;
}

PotentialValue radial_potential_fourier(const RadialProfile& nu, double x, const std::function<double(double)>& m) {
    if (!(x > 0.0)) throw DomainError("potential requires x > 0");
    auto g = [&](double k) {
        const double v = nu.value_at(k);
        return v == 0.0 ? 0.0 : m(k) * v;
    };
    auto integrand = [&](double k) { return std::sin(k * x) * g(k) / k; };
    const double half = kPi / x;
    const double k_end = nu.tag() ? std::numeric_limits<double>::infinity() : nu.k().back();
    std::vector<double> partial;
    double sum = 0.0, err = 0.0;
    int quiet = 0;
    PotentialValue out;
    for (int j = 0; j < 200000; ++j) {
        const double a = j * half;
        double b = (j + 1) * half;
        const bool last = b >= k_end;
        if (last) b = k_end;
        QuadResult r = integrate(integrand, a, b, opts(1e-13));
        if (!r.converged) throw QuadratureError("oscillatory panel did not converge", sum, r.error);
        sum += r.value;
        err += r.error;
        partial.push_back(sum);
        if (last) break;
        // Both the panel and the envelope at its end are negligible: the tail is done.
        const double envelope = std::abs(g(b)) / b * half;
        if (std::abs(r.value) <= 1e-17 * std::abs(sum) && envelope <= 1e-17 * std::abs(sum)) {
            if (++quiet >= 3) break;
        } else {
            quiet = 0;
        }
        if (j == 199999) throw QuadratureError("oscillatory tail not converged", sum, err);
    }
    // The accelerated limit of the last partial sums measures what the panels left out.
    const std::size_t tail = std::min<std::size_t>(partial.size(), 12);
    const std::vector<double> last_sums(partial.end() - static_cast<std::ptrdiff_t>(tail), partial.end());
    const double accel = wynn_epsilon(last_sums);
    const double k_stop = partial.size() * half;
    const double envelope = std::isfinite(k_stop) && k_stop < k_end ? std::abs(g(k_stop)) / k_stop * half : 0.0;
    out.value = 2.0 / (kPi * x) * sum;
    out.error = 2.0 / (kPi * x) * err;
    out.tail_bound = 2.0 / (kPi * x) * std::max(std::abs(accel - sum), envelope);
    return out;
}

PotentialValue uehling_potential_fourier_detail(const RadialProfile& nu, double x) {
    return radial_potential_fourier(nu, x, [](double k) { return uehling_multiplier(k); });
}

double uehling_potential_fourier(const RadialProfile& nu, double x) {
    return uehling_potential_fourier_detail(nu, x).value;
}

RadialPotential uehling_potential_direct(const AnalyticDensity& nu, const std::vector<double>& xs) {
    RadialPotential p{xs, std::vector<double>(xs.size())};
    parallel_for(xs.size(), [&](std::size_t i) { p.values[i] = uehling_potential_direct(nu, xs[i]); });
    return p;
}

RadialPotential uehling_potential_fourier(const RadialProfile& nu, const std::vector<double>& xs) {
    RadialPotential p{xs, std::vector<double>(xs.size())};
    parallel_for(xs.size(), [&](std::size_t i) { p.values[i] = uehling_potential_fourier(nu, xs[i]); });
    return p;
}

void write_potential_csv(const std::string& path, const RadialPotential& p) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < p.x.size(); ++i) rows.push_back({p.x[i], p.values[i]});
    write_csv(path, {"x", "value"}, rows);
}

}  // namespace dv
