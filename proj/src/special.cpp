#include "nld/special.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <numbers>

namespace nld {

double sphere_area(int d) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

double ball_volume(int d) {
    return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

namespace {

// -\sum_{k>=1} (-s^2/4)^k Gamma(d/2) / (k! Gamma(d/2 + k))
double series_one_minus(int d, double s) {
    const double nu = 0.5 * d;
    const double z = -0.25 * s * s;
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 60; ++k) {
        term *= z / (k * (nu + k - 1.0));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return -sum;
}

}  // namespace

double spherical_cos_mean(int d, double s) {
    s = std::abs(s);
    if (d == 1) return std::cos(s);
    if (d == 3) return s < 1e-4 ? 1.0 - s * s / 6.0 : std::sin(s) / s;
    if (s < 2.0) return 1.0 - series_one_minus(d, s);
    if (d % 2 == 1 && s > 0.5 * d) {
        // Odd dimension: (d-2)!! j_n(s) / s^n with n = (d-3)/2, upward recurrence.
        const int n = (d - 3) / 2;
        const double sn = std::sin(s), cs = std::cos(s);
        double jm = sn / s, j = sn / (s * s) - cs / s;
        for (int m = 1; m < n; ++m) {
            const double next = (2 * m + 1) / s * j - jm;
            jm = j;
            j = next;
        }
        double dfact = 1.0;
        for (int m = d - 2; m > 1; m -= 2) dfact *= m;
        return dfact * j / std::pow(s, n);
    }
    const double nu = 0.5 * d - 1.0;
    return std::tgamma(0.5 * d) * std::pow(2.0 / s, nu) * boost::math::cyl_bessel_j(nu, s);
}

double one_minus_spherical_cos_mean(int d, double s) {
    s = std::abs(s);
    if (s < 2.0) return series_one_minus(d, s);
    return 1.0 - spherical_cos_mean(d, s);
}

}  // namespace nld
