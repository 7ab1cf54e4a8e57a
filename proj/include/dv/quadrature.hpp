#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "dv/errors.hpp"

namespace dv {

struct QuadOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

namespace detail {

// Gauss-Kronrod 10/21 rule. Abscissae and weights are pulled from Boost.Math once.
struct Gk21Rule {
    std::array<double, 11> x{};   // x[0] = 0, then decreasing magnitude order as in Boost
    std::array<double, 11> wk{};  // Kronrod weights
    std::array<double, 11> wg{};  // Gauss weights, zero where the node is Kronrod-only
};

const Gk21Rule& gk21_rule();

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk21_panel(F& f, double a, double b) {
    const Gk21Rule& rule = gk21_rule();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fc = f(c);
    double k = rule.wk[0] * fc;
    double g = rule.wg[0] * fc;
    for (int i = 1; i < 11; ++i) {
        const double dx = h * rule.x[i];
        const double s = f(c - dx) + f(c + dx);
        k += rule.wk[i] * s;
        g += rule.wg[i] * s;
    }
    return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace detail

// Globally adaptive quadrature over [a, b] split at the given interior breakpoints.
// The panel with the largest error estimate is bisected until the summed estimate
// meets max(abs_tol, rel_tol * |value|).
template <class F>
QuadResult integrate(F&& f, const std::vector<double>& points, const QuadOptions& opt = {}) {
    QuadResult res;
    if (points.size() < 2) return res;
    std::priority_queue<detail::Panel> heap;
    double value = 0.0, error = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (points[i + 1] == points[i]) continue;
        detail::Panel p = detail::gk21_panel(f, points[i], points[i + 1]);
        res.evaluations += 21;
        value += p.value;
        error += p.error;
        heap.push(p);
    }
    int intervals = static_cast<int>(heap.size());
    while (!heap.empty() && error > std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
        if (intervals >= opt.max_intervals) {
            res.converged = false;
            break;
        }
        detail::Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            res.converged = false;
            heap.push(worst);
            break;
        }
        detail::Panel left = detail::gk21_panel(f, worst.a, mid);
        detail::Panel right = detail::gk21_panel(f, mid, worst.b);
        res.evaluations += 42;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }
    // Re-sum from the panels so the reported value has no accumulated update drift.
    std::vector<detail::Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const detail::Panel& l, const detail::Panel& r) { return l.a < r.a; });
    value = 0.0;
    error = 0.0;
    for (const auto& p : panels) {
        value += p.value;
        error += p.error;
    }
    res.value = value;
    res.error = error;
    if (!std::isfinite(value)) res.converged = false;
    return res;
}

template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
    return integrate(std::forward<F>(f), std::vector<double>{a, b}, opt);
}

// Same as integrate() but throws QuadratureError when the tolerance is not met.
template <class F>
double integrate_or_throw(F&& f, const std::vector<double>& points, const QuadOptions& opt,
                          const char* what) {
    QuadResult r = integrate(std::forward<F>(f), points, opt);
    if (!r.converged) throw QuadratureError(std::string(what) + ": quadrature did not converge", r.value, r.error);
    return r.value;
}

}  // namespace dv
