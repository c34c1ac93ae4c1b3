#pragma once

#include "nld/domain.hpp"
#include "nld/field.hpp"
#include "nld/levy_models.hpp"
#include "nld/potential_kernels.hpp"
#include "nld/quadrature.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace nld {

/// Which modulus the Dini test is run on: the field's own modulus against S = |G''|
/// (gradient integral of G finite), or the gradient's modulus against S = |G'|.
enum class DiniBranch { FieldModulus, GradientModulus };

enum class DiniVerdict { Finite, Divergent, Inconclusive };

std::string to_string(DiniBranch b);
std::string to_string(DiniVerdict v);

struct DiniReport {
    DiniBranch branch = DiniBranch::FieldModulus;
    DiniVerdict verdict = DiniVerdict::Inconclusive;
    double value = 0.0;      ///< integral (Finite) or last partial integral
    double rate_hint = 0.0;  ///< fitted per-panel growth rate of the partial integrals
    double log_exponent = 0.0;
    double upper = 0.5;
    std::vector<double> t, integrand;        ///< sample table (geometric in t)
    std::vector<double> panel_edges, panel_sums;
    std::string note;
};

void to_json(nlohmann::json& j, const DiniReport& r);

/// \int_0^upper S_eff(t) omega(t) dt on dyadic panels toward 0. Divergent is issued only
/// when the partial integrals over the last 8 panels are non-decreasing and the fitted
/// tail exponent reaches the divergence threshold; otherwise the verdict is
/// Inconclusive. Throws std::invalid_argument for sign-changing integrands.
DiniReport dini_integral(const std::function<double(double)>& s_eff, const ModulusSpec& omega,
                         double upper = 0.5);

DiniBranch select_branch(const KernelProfile& profile);

/// S(t) t^{d-1} for the profile's branch.
std::function<double(double)> effective_weight(const KernelProfile& profile);

struct ModulusOptions {
    long pairs_per_scale = 10000;
    int refine_iterations = 60;
    std::uint64_t seed = 12345;
};

/// Tabulated modulus t -> sup{|f(x) - f(y)| : x, y in dom, |x - y| <= t} (or of grad f)
/// from stratified random pairs (|x - y| in [t/2, t]) plus local hill climbing; made
/// monotone by a running maximum.
ModulusSpec estimate_modulus(const FieldFunction& field, const Domain& dom, std::span<const double> t_grid,
                             bool use_gradient, const ModulusOptions& opts = {});

struct RegularityReport {
    bool applies = false;
    std::string verdict;  ///< "applies" or "inconclusive"
    std::string reason;
    bool condition_a = false;
    bool growth_condition = false;  ///< tail comparison of the majorant
    GrowthReport growth;
    DiniBranch branch = DiniBranch::FieldModulus;
    std::string modulus;  ///< description of the modulus used
    bool modulus_declared = false;
    DiniReport dini;
};

void to_json(nlohmann::json& j, const RegularityReport& r);

/// Aggregates the model conditions, the kernel growth check, the branch choice and the
/// Dini integral. Never asserts that the solution fails to be C^2.
RegularityReport classify_regularity(const LevyModel& model, const KernelProfile& profile, const FieldFunction& f,
                                     const Domain& dom);

struct KatoCurve {
    std::vector<double> r, value;  ///< value[i] = max_x \int_0^{r_i} P_t|f 1_D|(x) dt
    bool decreasing = false;
    double tail_slope = 0.0;  ///< log-log slope over the smallest radii
    bool consistent = false;  ///< decreasing with a positive tail slope
};

/// Nested quadrature (time kernel \int_0^r p_t dt tabulated in |x - y|, then space).
/// Spatial quadrature is implemented for d <= 2.
KatoCurve kato_curve(const LevyModel& model, const FieldFunction& f, const Domain& dom, std::span<const double> r_grid,
                     std::span<const Point> x_grid);

}  // namespace nld
