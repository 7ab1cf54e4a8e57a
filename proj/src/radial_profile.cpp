#include "dv/radial_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dv/errors.hpp"
#include "dv/io.hpp"
#include "dv/parallel.hpp"

namespace dv {

namespace {
constexpr double kPi = std::numbers::pi;
}

AnalyticDensity AnalyticDensity::gaussian(double charge, double sigma) {
    if (!(sigma > 0.0)) throw DomainError("Gaussian width must be > 0");
    return AnalyticDensity{{GaussianTerm{charge, sigma}}};
}

double AnalyticDensity::fourier(double k) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.charge * std::exp(-0.5 * t.sigma * t.sigma * k * k);
    return s;
}

double AnalyticDensity::position(double r) const {
    double s = 0.0;
    for (const auto& t : terms) {
        const double v = t.sigma * t.sigma;
        s += t.charge * std::pow(2.0 * kPi * v, -1.5) * std::exp(-0.5 * r * r / v);
    }
    return s;
}

double AnalyticDensity::log_abs_fourier(double k) const {
    bool same_sign = true;
    for (const auto& t : terms) same_sign = same_sign && (t.charge > 0.0) == (terms.front().charge > 0.0);
    if (terms.empty()) return -std::numeric_limits<double>::infinity();
    if (!same_sign) return std::log(std::abs(fourier(k)));
    double m = -std::numeric_limits<double>::infinity();
    std::vector<double> logs;
    for (const auto& t : terms) {
        if (t.charge == 0.0) continue;
        logs.push_back(std::log(std::abs(t.charge)) - 0.5 * t.sigma * t.sigma * k * k);
        m = std::max(m, logs.back());
    }
    if (logs.empty()) return m;
    double s = 0.0;
    for (double l : logs) s += std::exp(l - m);
    return m + std::log(s);
}

AnalyticDensity AnalyticDensity::scaled(double c) const {
    AnalyticDensity out = *this;
    for (auto& t : out.terms) t.charge *= c;
    return out;
}

AnalyticDensity AnalyticDensity::plus(const AnalyticDensity& o) const {
    AnalyticDensity out = *this;
    out.terms.insert(out.terms.end(), o.terms.begin(), o.terms.end());
    return out;
}

// Natural cubic spline in s = ln k.
class CubicSpline {
public:
    CubicSpline(const std::vector<double>& k, const std::vector<double>& y) : y_(y) {
        const std::size_t n = k.size();
        s_.resize(n);
        for (std::size_t i = 0; i < n; ++i) s_[i] = std::log(k[i]);
        m_.assign(n, 0.0);
        if (n < 3) return;
        std::vector<double> c(n, 0.0), d(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = s_[i] - s_[i - 1], h1 = s_[i + 1] - s_[i];
            const double a = h0 / 6.0, b = (h0 + h1) / 3.0, cc = h1 / 6.0;
            const double rhs = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
            const double denom = b - a * c[i - 1];
            c[i] = cc / denom;
            d[i] = (rhs - a * d[i - 1]) / denom;
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m_[i] = d[i] - c[i] * m_[i + 1];
            if (i == 1) break;
        }
    }

    double operator()(double s) const {
        const std::size_t n = s_.size();
        if (n == 1) return y_[0];
        auto it = std::upper_bound(s_.begin(), s_.end(), s);
        std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - s_.begin())) - 1;
        i = std::min(i, n - 2);
        const double h = s_[i + 1] - s_[i];
        const double a = (s_[i + 1] - s) / h, b = (s - s_[i]) / h;
        return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    }

private:
    std::vector<double> s_, y_, m_;
};

RadialProfile::RadialProfile(std::vector<double> k, std::vector<double> values, std::optional<AnalyticDensity> tag)
    : k_(std::move(k)), values_(std::move(values)), tag_(std::move(tag)) {
    if (k_.size() != values_.size()) throw DomainError("profile grid and values differ in length");
    if (k_.empty()) throw DomainError("profile grid is empty");
    for (std::size_t i = 0; i < k_.size(); ++i) {
        if (!(k_[i] > 0.0) || !std::isfinite(k_[i])) throw DomainError("profile grid must be positive and finite");
        if (i > 0 && !(k_[i] > k_[i - 1])) throw DomainError("profile grid must be strictly increasing");
        if (!std::isfinite(values_[i])) throw DomainError("profile values must be finite");
    }
    spline_ = std::make_shared<const CubicSpline>(k_, values_);
}

double RadialProfile::value_at(double k) const {
    if (tag_) return tag_->fourier(k);
    if (k <= k_.front()) return values_.front();
    if (k > k_.back()) return 0.0;
    return (*spline_)(std::log(k));
}

RadialProfile RadialProfile::scaled(double c) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= c;
    std::optional<AnalyticDensity> t;
    if (tag_) t = tag_->scaled(c);
    return RadialProfile(k_, std::move(v), std::move(t));
}

RadialProfile RadialProfile::plus(const RadialProfile& o) const {
    if (o.k_ != k_) throw DomainError("profiles live on different grids");
    std::vector<double> v(values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.values_[i];
    std::optional<AnalyticDensity> t;
    if (tag_ && o.tag_) t = tag_->plus(*o.tag_);
    return RadialProfile(k_, std::move(v), std::move(t));
}

RadialProfile RadialProfile::minus(const RadialProfile& o) const { return plus(o.scaled(-1.0)); }

RadialProfile RadialProfile::with_values(std::vector<double> values) const {
    return RadialProfile(k_, std::move(values));
}

std::vector<double> log_grid(double k_min, double k_max, std::size_t n) {
    if (!(k_min > 0.0 && k_max > k_min) || n < 2) throw DomainError("invalid grid specification");
    std::vector<double> k(n);
    const double a = std::log(k_min), b = std::log(k_max);
    for (std::size_t i = 0; i < n; ++i) k[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    k.front() = k_min;
    k.back() = k_max;
    return k;
}

RadialProfile sample_density(const AnalyticDensity& density, const std::vector<double>& grid) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = density.fourier(grid[i]);
    return RadialProfile(grid, std::move(v), density);
}

RadialProfile gaussian_profile(const std::vector<double>& grid, double charge, double sigma) {
    return sample_density(AnalyticDensity::gaussian(charge, sigma), grid);
}

namespace {

// Trapezoid weights in s = ln k for int g dk = int g k ds, no tails.
std::vector<double> trapezoid_weights(const std::vector<double>& k) {
    const std::size_t n = k.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = std::log(k[i + 1]) - std::log(k[i]);
        w[i] += 0.5 * h * k[i];
        w[i + 1] += 0.5 * h * k[i + 1];
    }
    return w;
}

// Euler-Maclaurin h^2/12 term at the first node for an integrand behaving like k^p near 0,
// returned per unit of F'(s_0)/F(s_0) = p + 1.
double left_endpoint_correction(const std::vector<double>& k) {
    if (k.size() < 2) return 0.0;
    const double h = std::log(k[1]) - std::log(k[0]);
    return h * h / 12.0;
}

NormPair norms_on(const std::vector<double>& k, const std::vector<double>& v) {
    const std::vector<double> w = trapezoid_weights(k);
    std::vector<double> c(k.size()), l(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double f2 = v[i] * v[i];
        c[i] = w[i] * f2;
        l[i] = w[i] * k[i] * k[i] * f2;
    }
    const double f0 = v.front() * v.front();
    const double k0 = k.front();
    const double e = left_endpoint_correction(k);
    const double coulomb2 = 4.0 * kPi * (pairwise_sum(c) + k0 * f0 * (1.0 + e));
    const double l22 = 4.0 * kPi / std::pow(2.0 * kPi, 3) * (pairwise_sum(l) + k0 * k0 * k0 * f0 * (1.0 / 3.0 + 3.0 * e));
    NormPair out;
    out.coulomb = std::sqrt(coulomb2);
    out.l2 = std::sqrt(l22);
    out.combined = out.l2 + out.coulomb;
    return out;
}

double log_sum_exp(const std::vector<double>& xs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    std::vector<double> e(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) e[i] = std::exp(xs[i] - m);
    return m + std::log(pairwise_sum(e));
}

}  // namespace

std::vector<double> dk_weights(const std::vector<double>& k) {
    std::vector<double> w = trapezoid_weights(k);
    w.front() += k.front() * (1.0 + left_endpoint_correction(k));
    return w;
}

NormPair norms(const RadialProfile& p) { return norms_on(p.k(), p.values()); }

NormReport norms_with_estimate(const RadialProfile& p) {
    NormReport r;
    r.value = norms(p);
    std::vector<double> hk, hv;
    for (std::size_t i = 0; i < p.size(); i += 2) {
        hk.push_back(p.k()[i]);
        hv.push_back(p.values()[i]);
    }
    if (hk.back() != p.k().back()) {
        hk.push_back(p.k().back());
        hv.push_back(p.values().back());
    }
    const NormPair h = norms_on(hk, hv);
    r.error.l2 = std::abs(h.l2 - r.value.l2);
    r.error.coulomb = std::abs(h.coulomb - r.value.coulomb);
    r.error.combined = std::abs(h.combined - r.value.combined);
    return r;
}

NormPair norms_checked(const RadialProfile& p, double rel_tol) {
    const NormReport r = norms_with_estimate(p);
    if (r.error.combined > rel_tol * r.value.combined)
        throw DomainError("grid too coarse for the norm integrals: estimated error " +
                          format_double(r.error.combined) + " on " + format_double(r.value.combined));
    return r.value;
}

LogNormPair log_norms(const std::vector<double>& k, const std::vector<double>& log_abs_values) {
    const std::vector<double> w = trapezoid_weights(k);
    std::vector<double> c(k.size()), l(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double lf2 = 2.0 * log_abs_values[i];
        c[i] = std::log(w[i]) + lf2;
        l[i] = std::log(w[i]) + 2.0 * std::log(k[i]) + lf2;
    }
    const double e = left_endpoint_correction(k);
    c.push_back(std::log(k.front()) + std::log1p(e) + 2.0 * log_abs_values.front());
    l.push_back(3.0 * std::log(k.front()) + std::log(1.0 / 3.0 + 3.0 * e) + 2.0 * log_abs_values.front());
    LogNormPair out;
    out.log_coulomb = 0.5 * (std::log(4.0 * kPi) + log_sum_exp(c));
    out.log_l2 = 0.5 * (std::log(4.0 * kPi) - 3.0 * std::log(2.0 * kPi) + log_sum_exp(l));
    out.log_combined = log_sum_exp({out.log_l2, out.log_coulomb});
    return out;
}

double l2_inner(const RadialProfile& f, const RadialProfile& g) {
    if (f.k() != g.k()) throw DomainError("profiles live on different grids");
    const std::vector<double>& k = f.k();
    const std::vector<double> w = trapezoid_weights(k);
    std::vector<double> t(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) t[i] = w[i] * k[i] * k[i] * f.values()[i] * g.values()[i];
    const double k0 = k.front();
    const double tail = k0 * k0 * k0 * (1.0 / 3.0 + 3.0 * left_endpoint_correction(k)) * f.values().front() *
                        g.values().front();
    return 4.0 * kPi / std::pow(2.0 * kPi, 3) * (pairwise_sum(t) + tail);
}

void write_profile_csv(const std::string& path, const RadialProfile& p) {
    std::vector<std::vector<double>> rows;
    rows.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) rows.push_back({p.k()[i], p.values()[i]});
    write_csv(path, {"k", "value"}, rows);
}

RadialProfile read_profile_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    if (t.header != std::vector<std::string>{"k", "value"}) throw IoError("profile CSV must have header k,value");
    std::vector<double> k, v;
    for (const auto& row : t.rows) {
        k.push_back(row[0]);
        v.push_back(row[1]);
    }
    try {
        return RadialProfile(std::move(k), std::move(v));
    } catch (const DomainError& e) {
        throw IoError(std::string("invalid profile in ") + path + ": " + e.what());
    }
}

}  // namespace dv
