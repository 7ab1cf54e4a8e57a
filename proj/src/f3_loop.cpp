#include "dv/f3_loop.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "dv/errors.hpp"
#include "dv/parallel.hpp"
#include "dv/quadrature.hpp"

namespace dv {

namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

DiracMatrices build_dirac() {
    DiracMatrices d;
    const cd i(0.0, 1.0);
    Eigen::Matrix2cd sx, sy, sz, id;
    sx << 0, 1, 1, 0;
    sy << 0, -i, i, 0;
    sz << 1, 0, 0, -1;
    id = Eigen::Matrix2cd::Identity();
    const std::array<Eigen::Matrix2cd, 3> sigma = {sx, sy, sz};
    for (int k = 0; k < 3; ++k) {
        d.alpha[k].setZero();
        d.alpha[k].block<2, 2>(0, 2) = sigma[k];
        d.alpha[k].block<2, 2>(2, 0) = sigma[k];
    }
    d.beta.setZero();
    d.beta.block<2, 2>(0, 0) = id;
    d.beta.block<2, 2>(2, 2) = -id;
    return d;
}

struct Moments {
    double n = 0.0, mean = 0.0, m2 = 0.0;
};

Moments combine(const Moments& a, const Moments& b) {
    if (a.n == 0.0) return b;
    if (b.n == 0.0) return a;
    Moments out;
    out.n = a.n + b.n;
    const double d = b.mean - a.mean;
    out.mean = a.mean + d * (b.n / out.n);
    out.m2 = a.m2 + b.m2 + d * d * (a.n * b.n / out.n);
    return out;
}

Moments reduce_tree(const std::vector<Moments>& xs, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return xs[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return combine(reduce_tree(xs, lo, mid), reduce_tree(xs, mid, hi));
}

constexpr std::uint64_t kChunk = 4096;

// Runs fn(index, out) for every sample and returns per-component moments. Chunks are fixed
// and reduced in a fixed tree, so the result does not depend on the thread count.
template <class Fn>
std::vector<Moments> mc_moments(std::uint64_t n_samples, std::size_t dim, Fn fn) {
    if (n_samples == 0) throw MonteCarloError("Monte Carlo needs at least one sample");
    const std::uint64_t n_chunks = (n_samples + kChunk - 1) / kChunk;
    std::vector<std::vector<Moments>> per_chunk(n_chunks, std::vector<Moments>(dim));
    parallel_for(n_chunks, [&](std::size_t c) {
        const std::uint64_t begin = c * kChunk;
        const std::uint64_t end = std::min<std::uint64_t>(n_samples, begin + kChunk);
        std::vector<double> buf((end - begin) * dim);
        for (std::uint64_t s = begin; s < end; ++s) fn(s, &buf[(s - begin) * dim]);
        const double cnt = static_cast<double>(end - begin);
        for (std::size_t d = 0; d < dim; ++d) {
            std::vector<double> col(end - begin);
            for (std::uint64_t s = 0; s < end - begin; ++s) col[s] = buf[s * dim + d];
            const double mean = pairwise_sum(col) / cnt;
            for (double& x : col) x = (x - mean) * (x - mean);
            per_chunk[c][d] = Moments{cnt, mean, pairwise_sum(col)};
        }
    });
    std::vector<Moments> out(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        std::vector<Moments> col(n_chunks);
        for (std::uint64_t c = 0; c < n_chunks; ++c) col[c] = per_chunk[c][d];
        out[d] = reduce_tree(col, 0, col.size());
    }
    return out;
}

McEstimate to_estimate(const Moments& m, std::uint64_t seed, double lambda, const std::vector<int>& mask) {
    McEstimate e;
    e.value = m.mean;
    e.n_samples = static_cast<std::uint64_t>(m.n);
    e.seed = seed;
    e.lambda = lambda;
    e.mask = mask;
    if (m.n > 1.0) e.std_error = std::sqrt(m.m2 / (m.n - 1.0) / m.n);
    if (!std::isfinite(e.std_error)) e.variance_overflow = true;
    return e;
}

std::string describe(const Vec3& p) { return fmt::format("({:.6g}, {:.6g}, {:.6g})", p.x(), p.y(), p.z()); }

inline std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Vec3 unit_vector(CounterRng& rng) {
    const double c = 2.0 * rng.uniform() - 1.0;
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double ph = 2.0 * kPi * rng.uniform();
    return Vec3(s * std::cos(ph), s * std::sin(ph), c);
}

}  // namespace

const DiracMatrices& dirac_matrices() {
    static const DiracMatrices d = build_dirac();
    return d;
}

SpinorMatrix dirac_symbol(const Vec3& p) {
    const DiracMatrices& d = dirac_matrices();
    return p.x() * d.alpha[0] + p.y() * d.alpha[1] + p.z() * d.alpha[2] + d.beta;
}

SpinorMatrix projector(const Vec3& p, int sign) {
    if (sign != 1 && sign != -1) throw DomainError("projector sign must be +1 or -1");
    const double e = energy(p.norm());
    return (e * SpinorMatrix::Identity() + static_cast<double>(sign) * dirac_symbol(p)) / (2.0 * e);
}

double projector_pair_trace(const Vec3& p, int s, const Vec3& q, int t) {
    return 1.0 + s * t * (1.0 + p.dot(q)) / (energy(p.norm()) * energy(q.norm()));
}

EpsilonMask EpsilonMask::all(int flag, std::size_t length) { return EpsilonMask{std::vector<int>(length, flag)}; }

EpsilonMask EpsilonMask::parse(const std::string& text) {
    EpsilonMask m;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        int v = 0;
        try {
            v = std::stoi(cell);
        } catch (...) {
            throw DomainError("mask entries must be -1, 0 or 1");
        }
        if (v < -1 || v > 1) throw DomainError("mask entries must be -1, 0 or 1");
        m.flags.push_back(v);
    }
    return m;
}

bool EpsilonMask::admits(std::size_t index, double momentum, double lambda) const {
    const int f = flags.at(index);
    if (f == 1) return momentum <= lambda;
    if (f == -1) return momentum > lambda;
    return true;
}

bool EpsilonMask::has_cutoff_flags() const {
    for (int f : flags)
        if (f != 0) return true;
    return false;
}

std::string EpsilonMask::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < flags.size(); ++i) s += (i ? "," : "") + std::to_string(flags[i]);
    return s;
}

nlohmann::json McEstimate::to_json() const {
    nlohmann::json j;
    j["value"] = value;
    j["std_error"] = std_error;
    j["n_samples"] = n_samples;
    j["seed"] = seed;
    j["lambda"] = std::isfinite(lambda) ? nlohmann::json(lambda) : nlohmann::json(nullptr);
    j["mask"] = mask;
    j["variance_overflow"] = variance_overflow;
    return j;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t index)
    : state_(splitmix(splitmix(seed) ^ splitmix(index ^ 0xD1B54A32D192ED03ULL))) {}

std::uint64_t CounterRng::next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double CounterRng::uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

ImportanceSampler::ImportanceSampler(double lambda, int loop_flag, std::uint64_t seed)
    : lambda_(lambda), flag_(loop_flag), seed_(seed), y3_lo_(0.0), y3_span_(1.0) {
    if (loop_flag < -1 || loop_flag > 1) throw DomainError("loop flag must be -1, 0 or 1");
    if (loop_flag != 0 && !(lambda >= 1.0)) throw DomainError("sampler cutoff requires Lambda >= 1");
    // y = p/(1+p) has density 3 y^2 on [0, 1]; restrict to the admitted shell.
    if (loop_flag == 1) {
        const double yl = lambda / (1.0 + lambda);
        y3_lo_ = 0.0;
        y3_span_ = yl * yl * yl;
    } else if (loop_flag == -1) {
        const double omy = 1.0 / (1.0 + lambda);  // 1 - y at the cutoff
        const double y = 1.0 - omy;
        y3_span_ = omy * (1.0 + y + y * y);     // 1 - y^3
        y3_lo_ = 1.0 - y3_span_;
    }
}

std::pair<Vec3, double> ImportanceSampler::draw_loop(CounterRng& rng) const {
    const double u = rng.uniform();
    double one_minus_y;
    if (flag_ == -1) {
        // 1 - y^3 = u * span, solved for 1 - y without cancellation.
        one_minus_y = -std::expm1(std::log1p(-u * y3_span_) / 3.0);
    } else {
        one_minus_y = 1.0 - std::cbrt(y3_lo_ + u * y3_span_);
    }
    const double y = 1.0 - one_minus_y;
    const double r = y / one_minus_y;
    const Vec3 p = r * unit_vector(rng);
    const double onep = 1.0 + r;
    const double density = 3.0 / (4.0 * kPi * onep * onep * onep * onep) / y3_span_;
    return {p, 1.0 / density};
}

std::pair<Vec3, double> ImportanceSampler::draw_transfer(CounterRng& rng) {
    const double u = rng.uniform();
    const double q = u / (1.0 - u);
    const Vec3 v = q * unit_vector(rng);
    return {v, 4.0 * kPi * q * q * (1.0 + q) * (1.0 + q)};
}

MomentumSample ImportanceSampler::draw(std::uint64_t index) const {
    CounterRng rng(seed_, index);
    MomentumSample s;
    auto [p0, w0] = draw_loop(rng);
    s.p0 = p0;
    s.weight = w0;
    for (int i = 0; i < 3; ++i) {
        auto [q, wq] = draw_transfer(rng);
        s.q[static_cast<std::size_t>(i)] = q;
        s.weight *= wq;
    }
    return s;
}

double ImportanceSampler::loop_density(const Vec3& p) const {
    const double r = p.norm();
    if (flag_ == 1 && r > lambda_) return 0.0;
    if (flag_ == -1 && r <= lambda_) return 0.0;
    const double onep = 1.0 + r;
    return 3.0 / (4.0 * kPi * onep * onep * onep * onep) / y3_span_;
}

double ImportanceSampler::transfer_density(const Vec3& q) {
    const double r = q.norm();
    return 1.0 / (4.0 * kPi * r * r * (1.0 + r) * (1.0 + r));
}

double eta_weight(std::span<const int> delta, std::span<const double> e) {
    if (delta.size() != e.size()) throw DomainError("eta_weight: sign and energy counts differ");
    const std::size_t n = delta.size();
    std::vector<std::size_t> plus, minus;
    for (std::size_t i = 0; i < n; ++i) (delta[i] > 0 ? plus : minus).push_back(i);
    if (plus.empty() || minus.empty()) return 0.0;
    if (n == 2) return -1.0 / (e[0] + e[1]);
    if (n != 4) throw DomainError("eta_weight implemented for two or four factors");
    if (plus.size() == 1 || minus.size() == 1) {
        const std::size_t j = plus.size() == 1 ? plus[0] : minus[0];
        double prod = 1.0;
        for (std::size_t i = 0; i < n; ++i)
            if (i != j) prod *= e[j] + e[i];
        return -1.0 / prod;
    }
    double sum = 0.0, prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) sum += e[i];
    for (std::size_t a : plus)
        for (std::size_t b : minus) prod *= e[a] + e[b];
    return sum / prod;
}

EtaQuadrature eta_weight_quadrature(std::span<const int> delta, std::span<const double> e) {
    // eta = tan(theta); the integrand decays at least like eta^-2.
    auto f = [&](double th) {
        const double eta = std::tan(th);
        const double c = std::cos(th);
        cd prod(1.0, 0.0);
        for (std::size_t i = 0; i < delta.size(); ++i) prod /= cd(delta[i] * e[i], eta);
        return prod.real() / (c * c);
    };
    QuadOptions o;
    o.abs_tol = 1e-300;
    o.rel_tol = 1e-13;
    QuadResult r = integrate(f, std::vector<double>{-0.5 * kPi, 0.0, 0.5 * kPi}, o);
    return {r.value / (2.0 * kPi), r.error / (2.0 * kPi)};
}

const std::vector<std::array<int, 4>>& residue_sign_patterns() {
    static const std::vector<std::array<int, 4>> patterns = [] {
        std::vector<std::array<int, 4>> out;
        for (int m = 0; m < 16; ++m) {
            std::array<int, 4> d{};
            int plus = 0;
            for (int i = 0; i < 4; ++i) {
                d[static_cast<std::size_t>(i)] = (m >> (3 - i)) & 1 ? 1 : -1;
                plus += d[static_cast<std::size_t>(i)] > 0;
            }
            if (plus == 0 || plus == 4) continue;
            out.push_back(d);
        }
        return out;
    }();
    return patterns;
}

double chain_trace(const std::array<Vec3, 4>& p, const std::array<int, 4>& delta) {
    SpinorMatrix m = projector(p[0], delta[0]);
    for (std::size_t i = 1; i < 4; ++i) m = m * projector(p[i], delta[i]);
    return m.trace().real();
}

double residue_chain(const std::array<Vec3, 4>& p) {
    std::array<std::array<SpinorMatrix, 2>, 4> proj;
    std::array<double, 4> e{};
    for (std::size_t i = 0; i < 4; ++i) {
        e[i] = energy(p[i].norm());
        proj[i][0] = projector(p[i], 1);
        proj[i][1] = SpinorMatrix::Identity() - proj[i][0];
    }
    std::array<std::array<SpinorMatrix, 2>, 2> left, right;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            left[a][b].noalias() = proj[0][a] * proj[1][b];
            right[a][b].noalias() = proj[2][a] * proj[3][b];
        }
    double total = 0.0;
    for (const auto& d : residue_sign_patterns()) {
        const int a = d[0] > 0 ? 0 : 1, b = d[1] > 0 ? 0 : 1, c = d[2] > 0 ? 0 : 1, g = d[3] > 0 ? 0 : 1;
        // Re tr(L R) = Re sum_ij L_ij R_ji
        const SpinorMatrix& l = left[a][b];
        const SpinorMatrix& r = right[c][g];
        double tr = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) tr += (l(i, j) * r(j, i)).real();
        total += eta_weight(d, e) * tr;
    }
    return total;
}

EtaQuadrature resolvent_chain_quadrature(const std::array<Vec3, 4>& p) {
    std::array<SpinorMatrix, 4> h;
    for (std::size_t i = 0; i < 4; ++i) h[i] = dirac_symbol(p[i]);
    auto f = [&](double th) {
        const double eta = std::tan(th);
        const double c = std::cos(th);
        SpinorMatrix m = SpinorMatrix::Identity();
        for (std::size_t i = 0; i < 4; ++i)
            m = m * (h[i] + cd(0.0, eta) * SpinorMatrix::Identity()).inverse();
        return m.trace().real() / (c * c);
    };
    QuadOptions o;
    o.abs_tol = 1e-300;
    o.rel_tol = 1e-12;
    QuadResult r = integrate(f, std::vector<double>{-0.5 * kPi, -0.25 * kPi, 0.0, 0.25 * kPi, 0.5 * kPi}, o);
    return {r.value / (2.0 * kPi), r.error / (2.0 * kPi)};
}

McEstimate loop1_response_mc(const RadialProfile& nu, double k, const CutoffParams& cutoff, std::uint64_t n_samples,
                             std::uint64_t seed) {
    const double lam = cutoff.lambda();
    if (!(k > 0.0 && k < 2.0 * lam)) throw DomainError("loop1_response_mc requires 0 < k < 2 Lambda");
    if (nu.value_at(k) == 0.0) throw DomainError("loop1_response_mc needs nu^(k) != 0");
    if (n_samples == 0) throw MonteCarloError("zero samples requested");
    const ImportanceSampler sampler(lam, 1, seed);
    const Vec3 kvec(0.0, 0.0, k);
    const double pref = -4.0 * kPi / (k * k) / std::pow(2.0 * kPi, 3);
    auto fn = [&](std::uint64_t idx, double* out) {
        CounterRng rng(seed, idx);
        auto [q, w] = sampler.draw_loop(rng);
        const Vec3 p = q + kvec;
        double v = 0.0;
        if (p.norm() <= lam) {
            const double ep = energy(p.norm()), eq = energy(q.norm());
            const double traces = projector_pair_trace(p, 1, q, -1) + projector_pair_trace(p, -1, q, 1);
            v = pref * traces / (ep + eq) * w;
        }
        if (!std::isfinite(v)) throw MonteCarloError("non-finite loop sample at q = " + describe(q));
        out[0] = v;
    };
    return to_estimate(mc_moments(n_samples, 1, fn)[0], seed, lam, {1, 1});
}

double f3_integrand_core(const MomentumSample& s, const std::array<const RadialProfile*, 3>& mu,
                         const EpsilonMask& mask, double lambda) {
    std::array<Vec3, 4> p;
    p[0] = s.p0;
    for (std::size_t i = 1; i < 4; ++i) p[i] = p[i - 1] - s.q[i - 1];
    for (std::size_t i = 0; i < 4; ++i)
        if (!mask.admits(i, p[i].norm(), lambda)) return 0.0;
    double phi = 1.0;
    for (std::size_t j = 0; j < 3; ++j) {
        const double q = s.q[j].norm();
        phi *= 4.0 * kPi * mu[j]->value_at(q) / (q * q);
    }
    if (phi == 0.0) return 0.0;
    return std::pow(2.0 * kPi, -12) * residue_chain(p) * phi * s.weight;
}

std::vector<McEstimate> f3_pairing_mc_multi(const std::array<const RadialProfile*, 3>& mu,
                                            const std::vector<const RadialProfile*>& zetas,
                                            const std::optional<CutoffParams>& cutoff, const EpsilonMask& mask,
                                            std::uint64_t n_samples, std::uint64_t seed) {
    if (mask.flags.size() != 4) throw DomainError("F_3 mask must have four entries");
    if (!cutoff && mask.has_cutoff_flags()) throw DomainError("mask uses cutoff flags but no cutoff was given");
    if (zetas.empty()) throw DomainError("at least one test function is required");
    const double lam = cutoff ? cutoff->lambda() : std::numeric_limits<double>::infinity();
    const ImportanceSampler sampler(cutoff ? lam : 1.0, cutoff ? mask.flags[0] : 0, seed);
    auto fn = [&](std::uint64_t idx, double* out) {
        const MomentumSample s = sampler.draw(idx);
        const double core = f3_integrand_core(s, mu, mask, lam);
        if (!std::isfinite(core))
            throw MonteCarloError("non-finite F_3 sample at p0 = " + describe(s.p0));
        const double qn = (s.q[0] + s.q[1] + s.q[2]).norm();
        for (std::size_t z = 0; z < zetas.size(); ++z) out[z] = core == 0.0 ? 0.0 : core * zetas[z]->value_at(qn);
    };
    const std::vector<Moments> m = mc_moments(n_samples, zetas.size(), fn);
    std::vector<McEstimate> out;
    for (const auto& mm : m) out.push_back(to_estimate(mm, seed, lam, mask.flags));
    return out;
}

McEstimate f3_pairing_mc(const RadialProfile& mu1, const RadialProfile& mu2, const RadialProfile& mu3,
                         const RadialProfile& zeta, const std::optional<CutoffParams>& cutoff,
                         const EpsilonMask& mask, std::uint64_t n_samples, std::uint64_t seed) {
    return f3_pairing_mc_multi({&mu1, &mu2, &mu3}, {&zeta}, cutoff, mask, n_samples, seed)[0];
}

F3GalerkinEvaluator::F3GalerkinEvaluator(std::vector<double> probe_sigmas, std::uint64_t n_samples,
                                         std::uint64_t seed)
    : sigmas_(std::move(probe_sigmas)), n_samples_(n_samples), seed_(seed) {
    if (sigmas_.empty()) throw DomainError("probe basis is empty");
    for (double s : sigmas_)
        if (!(s > 0.0)) throw DomainError("probe widths must be > 0");
}

Eigen::MatrixXd F3GalerkinEvaluator::gram() const {
    const std::size_t n = sigmas_.size();
    Eigen::MatrixXd g(n, n);
    // (2pi)^-3 4pi int k^2 exp(-a k^2) dk = pi^{3/2} / ((2pi)^3 a^{3/2}),  a = (s_i^2 + s_j^2)/2
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double a = 0.5 * (sigmas_[i] * sigmas_[i] + sigmas_[j] * sigmas_[j]);
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::pow(kPi, 1.5) / (std::pow(2.0 * kPi, 3) * std::pow(a, 1.5));
        }
    return g;
}

std::optional<RadialProfile> F3GalerkinEvaluator::evaluate(int j, std::span<const RadialProfile* const> args,
                                                           const std::optional<CutoffParams>& cutoff) {
    if (j != 3) return std::nullopt;
    if (args.size() != 3) throw DomainError("F_3 takes three arguments");
    const std::vector<double>& grid = args[0]->k();
    std::vector<RadialProfile> probes;
    for (double s : sigmas_) probes.push_back(gaussian_profile(grid, 1.0, s));
    std::vector<const RadialProfile*> zp;
    for (const auto& p : probes) zp.push_back(&p);
    const EpsilonMask mask = EpsilonMask::all(cutoff ? 1 : 0);
    pairings_ = f3_pairing_mc_multi({args[0], args[1], args[2]}, zp, cutoff, mask, n_samples_, seed_);
    Eigen::VectorXd y(static_cast<Eigen::Index>(sigmas_.size()));
    for (std::size_t i = 0; i < sigmas_.size(); ++i) y(static_cast<Eigen::Index>(i)) = pairings_[i].value;
    const Eigen::VectorXd c = gram().colPivHouseholderQr().solve(y);
    coefficients_.assign(c.data(), c.data() + c.size());
    AnalyticDensity d;
    for (std::size_t i = 0; i < sigmas_.size(); ++i) d.terms.push_back({coefficients_[i], sigmas_[i]});
    return sample_density(d, grid);
}

}  // namespace dv
