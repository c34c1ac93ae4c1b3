#pragma once

#include "nld/field.hpp"
#include "nld/potential_kernels.hpp"
#include "nld/quadrature.hpp"

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace nld {

/// Critical right-hand side: ((y_d)_+)^{2-alpha}, or (y_d)_+ ln^{-beta}(1 + 1/(y_d)_+)
/// for alpha = 1 (beta in (0, 1)).
FieldFunction make_counterexample_f(double alpha, int dim, double beta = 0.5);

/// ((y_d)_+)^{2-alpha} ln^{-beta}(1 + 1/(y_d)_+), beta > 1.
FieldFunction make_corrected_f(double alpha, int dim, double beta);

/// h = 2^{-4}, ..., 2^{-16}.
std::vector<double> default_h_sequence();

struct ProbeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double log_power = 1.0;  ///< abscissa is ln(1/h)^log_power
};

struct ProbeCurve {
    std::vector<double> h;      ///< strictly decreasing
    std::vector<double> value;  ///< D(h)
    double log_power = 1.0;     ///< expected growth law of a divergent curve
    ProbeFit fit;
    std::string label;
};

void to_json(nlohmann::json& j, const ProbeCurve& c);

/// Left-sided quotient of the derivative of g = G * f at the origin along e_d:
///   D(h) = \int_{B_{1/4}} (G(|y|) - G(|y + h e_d|)) / h  d_d f(y) dy.
/// For d >= 2 f must depend on y_d only (the transverse integral is done radially).
/// d_d f comes from f.grad when present, otherwise from a scaled central difference.
ProbeCurve second_difference_curve(const KernelProfile& profile, const FieldFunction& f,
                                   std::span<const double> h_seq);

enum class ProbeVerdict { Divergent, Bounded, Inconclusive };

std::string to_string(ProbeVerdict v);

struct ProbeReport {
    ProbeVerdict verdict = ProbeVerdict::Inconclusive;
    ProbeFit fit;
    bool increments_non_decreasing = false;
    bool differences_shrinking = false;
    double last_difference = 0.0;
    std::string note;
};

void to_json(nlohmann::json& j, const ProbeReport& r);

/// Divergent: slope > 0 against ln(1/h)^log_power with R^2 > 0.99 and increments per unit
/// abscissa non-decreasing (2% slack) over the 8 smallest h. Bounded: successive
/// differences shrink and the last one is below bounded_tol * max(1, |D|). Anything else
/// is Inconclusive.
ProbeReport divergence_fit(ProbeCurve& curve, double bounded_tol = 0.02);

/// Curve for the critical (corrected = false) or log-corrected right-hand side of the
/// stable model (alpha, dim), with the matching growth law attached.
ProbeCurve counterexample_curve(double alpha, int dim, bool corrected, double beta,
                                std::span<const double> h_seq);

/// \int_{S_2} y_d^{2-alpha} |y|^{-(d+2-alpha)} dy over the cone {|y_i| < y_d < a},
/// a = 1/(4 sqrt d), on dyadic panels toward y_d = 0 (d <= 3).
quad::ImproperResult cone_lower_bound(double alpha, int dim);

}  // namespace nld
