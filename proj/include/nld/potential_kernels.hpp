#pragma once

#include "nld/levy_models.hpp"
#include "nld/point.hpp"
#include "nld/quadrature.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nld {

enum class KernelCase { TransientU, CompensatedW0, CompensatedW1 };
enum class GradBranch { GradDivergent, GradIntegrable };

std::string to_string(KernelCase k);
std::string to_string(GradBranch b);

/// Kernel case together with the two integrals that decide it.
struct CaseTag {
    KernelCase kernel_case = KernelCase::TransientU;
    Point x0;  ///< compensation point (origin for U and W0, e_d for W1)
    double inverse_psi_integral = 0.0;  ///< \int_{B_1} dxi / psi
    quad::Verdict inverse_psi_verdict = quad::Verdict::Inconclusive;
    double resolvent_integral = 0.0;  ///< \int_0^\infty dxi / (1 + psi), d = 1 only
    quad::Verdict resolvent_verdict = quad::Verdict::Inconclusive;
};

using RadialProfile = std::function<double(double)>;

/// Radial fundamental solution with derivatives and majorant. Immutable.
struct KernelProfile {
    KernelCase kernel_case = KernelCase::TransientU;
    Point x0;
    int dim = 1;
    RadialProfile g, g1, g2, g3;  ///< g3 may be empty
    RadialProfile S;
    bool closed_form = false;
    GradBranch branch = GradBranch::GradDivergent;
    double gradient_integral = 0.0;  ///< \int_0^{1/2} |G'(t)| t^{d-1} dt (partial sum if divergent)
    quad::Verdict gradient_verdict = quad::Verdict::Inconclusive;
    double r0 = 1.0;
    std::string label;
};

/// (2 pi)^{-k} |S^{k-1}| \int_0^\infty a(rho) rho^{k-1} Lambda_k(rho r) d rho: the Fourier
/// inverse in R^k of the radial symbol a. `cutoff` is a frequency beyond which a is
/// negligible (infinity if a only decays algebraically).
double radial_fourier(int k, const std::function<double(double)>& a, double r, double cutoff);

/// Frequency beyond which exp(-t psi) rho^{k-1} < exp(-46) (truncation rule for Fourier
/// inversion); infinity if no such frequency below 1e12 is found.
double fourier_cutoff(const LevyModel& model, double t, int k);

double transition_density(const LevyModel& model, double t, std::span<const double> x);
double transition_density_radial(const LevyModel& model, double t, double r);

CaseTag kernel_case(const LevyModel& model);

struct ProfileOptions {
    bool force_numeric = false;  ///< ignore closed forms (used to cross-check the numerics)
};

KernelProfile potential_profile(const LevyModel& model, const ProfileOptions& opts = {});

/// Riesz potential constant: U(x) = c |x|^{alpha - d} for the stable model, alpha < d.
double riesz_constant(double alpha, int dim);
/// W_0(x) = c |x|^{alpha - 1} for d = 1, alpha in (1, 2); c < 0.
double recurrent_stable_constant(double alpha);

/// U^lambda(x) by Fourier inversion of 1 / (lambda + psi).
double lambda_potential(const LevyModel& model, double lambda, std::span<const double> x);
/// U^lambda at radius r as \int_0^\infty e^{-lambda t} p_t(r) dt.
double lambda_potential_time(const LevyModel& model, double lambda, double r);

/// W_{x0}(x) = \int_0^\infty (p_t(x) - p_t(x0)) dt; time quadrature on (0, 1) plus the
/// Fourier form of the remaining tail.
double compensated_W(const LevyModel& model, std::span<const double> x0, std::span<const double> x);
double compensated_W_radial(const LevyModel& model, double x0_norm, double r);

struct GrowthReport {
    GradBranch branch = GradBranch::GradDivergent;
    double kappa = 0.0;
    double kappa_refined = 0.0;
    bool passes = false;
    bool s_monotone = false;
    double log_derivative_bound = 0.0;  ///< max r |G'(r)| / |G(r)|
    std::string diagnosis;
};

GrowthReport verify_growth_G(const KernelProfile& profile, std::span<const double> r_grid);

struct RecursionReport {
    std::vector<double> r;
    std::vector<double> residual;  ///< relative residual of G_d' = -2 pi r G_{d+2}
    double max_rel_residual = 0.0;
    bool passes = false;
    double gradient_integral = 0.0;
    quad::Verdict gradient_verdict = quad::Verdict::Inconclusive;
};

RecursionReport subordinate_green_recursion_check(const SubordinatorSpec& spec, int d,
                                                  std::span<const double> r_grid);

}  // namespace nld
