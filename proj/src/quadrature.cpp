#include "dv/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace dv::detail {

namespace {

Gk21Rule build_rule() {
    using kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
    using gauss = boost::math::quadrature::gauss<double, 10>;
    Gk21Rule rule;
    const auto& kx = kronrod::abscissa();
    const auto& kw = kronrod::weights();
    const auto& gx = gauss::abscissa();
    const auto& gw = gauss::weights();
    for (std::size_t i = 0; i < kx.size() && i < rule.x.size(); ++i) {
        rule.x[i] = kx[i];
        rule.wk[i] = kw[i];
        rule.wg[i] = 0.0;
        for (std::size_t j = 0; j < gx.size(); ++j) {
            if (std::abs(gx[j] - kx[i]) < 1e-14) rule.wg[i] = gw[j];
        }
    }
    return rule;
}

}  // namespace

const Gk21Rule& gk21_rule() {
    static const Gk21Rule rule = build_rule();
    return rule;
}

}  // namespace dv::detail
