#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dv/radial_profile.hpp"

namespace dv {

struct RadialPotential {
    std::vector<double> x;
    std::vector<double> values;
};

struct PotentialValue {
    double value = 0.0;
    double error = 0.0;       // quadrature error estimate
    double tail_bound = 0.0;  // bound on the neglected oscillatory tail (Fourier route)
};

// (nu_1 * |x|^-1)(x) from the t-integral representation
//   (1/3pi) int_1^inf sqrt(t^2-1) (2/t^2 + 1/t^4) int e^{-2t|x-y|} nu(y)/|x-y| dy dt,
// with t = cosh u and the Yukawa convolution reduced to a radial integral.
PotentialValue uehling_potential_direct_detail(const AnalyticDensity& nu, double x);
double uehling_potential_direct(const AnalyticDensity& nu, double x);

// (2/(pi x)) int_0^inf sin(kx) m(k) nu^(k)/k dk: the potential of the density with Fourier
// transform m(k) nu^(k). Panels follow the half periods of sin(kx); partial sums are
// summed directly, with Wynn's epsilon algorithm only estimating the neglected tail.
PotentialValue radial_potential_fourier(const RadialProfile& nu, double x, const std::function<double(double)>& m);

// Fourier route with m = U.
PotentialValue uehling_potential_fourier_detail(const RadialProfile& nu, double x);
double uehling_potential_fourier(const RadialProfile& nu, double x);

// Batch helpers over a radius grid (parallel over x).
RadialPotential uehling_potential_direct(const AnalyticDensity& nu, const std::vector<double>& xs);
RadialPotential uehling_potential_fourier(const RadialProfile& nu, const std::vector<double>& xs);

void write_potential_csv(const std::string& path, const RadialPotential& p);

}  // namespace dv
