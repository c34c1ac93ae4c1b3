#pragma once

namespace nld {

/// Surface area of the unit sphere S^{d-1} in R^d (2 for d = 1).
double sphere_area(int d);

/// Volume of the unit ball in R^d.
double ball_volume(int d);

/// Spherical average of cos(s * theta_1) over theta in S^{d-1}, i.e. the
/// radial Fourier factor Gamma(d/2) (2/s)^{d/2-1} J_{d/2-1}(s).
double spherical_cos_mean(int d, double s);

/// 1 - spherical_cos_mean(d, s), accurate for small s.
double one_minus_spherical_cos_mean(int d, double s);

}  // namespace nld
