#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace nld {

class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Bernstein function data of a subordinator. Either the Levy density `levy_density`
/// or the analytic continuation `complex_exponent` (complete Bernstein case) must be
/// present for the subordinate Levy density to be computable.
struct SubordinatorSpec {
    std::string kind = "custom";  ///< "stable", "geometric_stable" or "custom"
    double index = 0.0;           ///< alpha for the named kinds
    std::function<double(double)> laplace_exponent;
    std::function<double(double)> levy_density;       ///< optional
    std::function<double(double)> potential_density;  ///< optional
    std::function<std::complex<double>(std::complex<double>)> complex_exponent;  ///< optional
    double drift = 0.0;
    bool complete_bernstein = false;
};

/// phi(lambda) = lambda^{alpha/2}
SubordinatorSpec stable_subordinator(double alpha);
/// phi(lambda) = ln(1 + lambda^{alpha/2})
SubordinatorSpec geometric_stable_subordinator(double alpha);

/// Throws ModelError unless phi(0+) = 0 and phi is non-decreasing and concave on a
/// logarithmic check grid.
void validate(const SubordinatorSpec& spec);

/// Which density of the subordinator to push through the Gaussian kernel.
enum class SubordinatorMeasure { Levy, Potential };

bool has_density(const SubordinatorSpec& spec, SubordinatorMeasure which);

/// mu(t) or u(t); from the explicit callable or, for complete Bernstein
/// exponents, by Laplace inversion of the Stieltjes representation.
double subordinator_density(const SubordinatorSpec& spec, SubordinatorMeasure which, double t);

/// \int_0^\infty (4 pi t)^{-d/2} exp(-r^2/4t) m(t) dt for m = mu or u.
double subordinate_gaussian(const SubordinatorSpec& spec, SubordinatorMeasure which, int dim,
                            double r);

enum class Family { Stable, TruncatedStable, SubordinateBM };

std::string to_string(Family f);

/// Isotropic unimodal Levy measure with radial density nu. Immutable.
class LevyModel {
public:
    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] Family family() const { return family_; }
    /// Stability index (stable, truncated stable) or the named subordinator index.
    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] std::pair<double, double> cutoff() const { return cutoff_; }
    [[nodiscard]] const SubordinatorSpec* subordinator() const { return sub_.get(); }

    [[nodiscard]] double nu(double r) const;
    /// nu' (order 1) or nu'' (order 2).
    [[nodiscard]] double nu_derivative(double r, int order) const;
    [[nodiscard]] double nu_star(double r) const;
    [[nodiscard]] bool nu_star_zero() const { return nu_star_zero_; }
    [[nodiscard]] std::optional<double> support_radius() const { return support_; }

    [[nodiscard]] bool has_closed_psi() const;
    /// Closed form psi as a function of |xi|; throws if there is none.
    [[nodiscard]] double psi_closed(double rho) const;
    /// psi(|xi|) for repeated evaluation: the closed form, or else a log-log spline
    /// of quadrature values built on first use.
    [[nodiscard]] double psi(double rho) const;

    [[nodiscard]] double r0() const { return r0_; }
    /// C with nu*(r) <= C nu*(r+1) on the r >= r0 check grid (NaN when nu* == 0).
    [[nodiscard]] double growth_constant() const { return growth_constant_; }
    /// \int (1 ^ |h|^2) nu(|h|) dh
    [[nodiscard]] double levy_integral() const { return levy_integral_; }
    [[nodiscard]] bool infinite_mass() const { return infinite_mass_; }

    /// Compact label, e.g. "stable(alpha=1.5, d=1)".
    [[nodiscard]] std::string label() const;

private:
    friend LevyModel make_stable(double, int);
    friend LevyModel make_truncated_stable(double, int, std::pair<double, double>);
    friend LevyModel make_subordinate_bm(const SubordinatorSpec&, int);
    LevyModel();
    void finish_construction();
    struct PsiCache;

    int dim_ = 1;
    Family family_ = Family::Stable;
    double alpha_ = 1.0;
    double stable_const_ = 0.0;
    std::pair<double, double> cutoff_{0.5, 1.0};
    std::shared_ptr<const SubordinatorSpec> sub_;
    bool nu_star_zero_ = false;
    std::optional<double> support_;
    double r0_ = 1.0;
    double growth_constant_ = 0.0;
    double levy_integral_ = 0.0;
    bool infinite_mass_ = true;
    std::shared_ptr<PsiCache> psi_cache_;
};

/// Normalizing constant making psi(xi) = |xi|^alpha.
double stable_levy_constant(double alpha, int dim);

LevyModel make_stable(double alpha, int dim);
LevyModel make_truncated_stable(double alpha, int dim,
                                std::pair<double, double> cutoff = {0.5, 1.0});
LevyModel make_subordinate_bm(const SubordinatorSpec& spec, int dim);

/// Smooth cutoff equal to 1 on [0, a] and 0 on [b, inf).
double smooth_cutoff(double r, double a, double b);

/// psi(xi) = \int (1 - cos(xi.x)) nu(|x|) dx; closed form when recorded.
double char_exponent(const LevyModel& model, std::span<const double> xi);
/// Same, always by radial quadrature.
double char_exponent_quadrature(const LevyModel& model, double rho);
/// psi as a function of |xi| (closed form if available).
double psi_radial(const LevyModel& model, double rho);

struct Concentration {
    double K = 0.0;
    double h = 0.0;
};

Concentration concentration(const LevyModel& model, double r);

struct ScalingReport {
    double alpha_tested = 0.0;
    double c_fit = 0.0;
    bool satisfied = false;
    double worst_lambda = 0.0;
    double worst_r = 0.0;
    double c_refined = 0.0;  ///< constant on the refined and extended grid
};

ScalingReport check_lower_scaling(const LevyModel& model, double alpha,
                                  std::span<const double> lambda_grid,
                                  std::span<const double> r_grid);

struct ConditionAReport {
    double sup_first = 0.0;   ///< sup |nu'|/nu*
    double sup_second = 0.0;  ///< sup |nu''|/nu*
    bool passes = false;
    std::string diagnosis;
};

ConditionAReport check_condition_A(const LevyModel& model);

void to_json(nlohmann::json& j, const LevyModel& m);
LevyModel model_from_json(const nlohmann::json& j);

}  // namespace nld
