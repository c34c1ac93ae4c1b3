#pragma once

#include "nld/domain.hpp"
#include "nld/field.hpp"
#include "nld/levy_models.hpp"
#include "nld/monte_carlo.hpp"
#include "nld/point.hpp"
#include "nld/rng.hpp"

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace nld {

class SingularInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Smallest acceptance rate tolerated by the off-centre exit sampler.
inline constexpr double kExitAcceptanceFloor = 0.05;

/// Poisson kernel of the ball B(0, r) for the isotropic alpha-stable process with
/// psi(xi) = |xi|^alpha. Requires |x| < r < |z|.
double poisson_kernel_ball(double alpha, int dim, double r, const Point& x, const Point& z);

/// E^x tau_{B(0,r)} in closed form.
double exit_time_ball_mean(double alpha, int dim, double r, const Point& x);

/// Exit position from B(0, r) started at the centre; exact (r^2/|Z|^2 is Beta(alpha/2, 1 - alpha/2)).
Point sample_exit_ball_centred(double alpha, int dim, double r, Stream& rng);

/// Expected acceptance rate of the off-centre rejection sampler.
double exit_acceptance_rate(double alpha, int dim, double r, const Point& x);

/// Exit position from B(0, r) started at x (|x| < r): rejection from the centred
/// law. Throws TuningError when the acceptance rate is below kExitAcceptanceFloor.
Point sample_exit_ball(double alpha, int dim, double r, const Point& x, Stream& rng);

/// Same law, by walk-on-spheres inside the ball; works for any x in the ball.
Point sample_exit_ball_wos(double alpha, int dim, double r, const Point& x, Stream& rng,
                           double eps = 1e-9, long max_steps = 100000);

/// Density of |X_tau| at radius s > r for the walk started at x = |x| e_d. Closed
/// angular part: x = 0 in any dimension, or d in {1, 2}.
double exit_radius_density(double alpha, int dim, double r, double x_norm, double s);

/// Model CDF of |X_tau| at the given increasing radii, by quadrature of the density.
std::vector<double> exit_radius_cdf(double alpha, int dim, double r, double x_norm,
                                    std::span<const double> radii_sorted);

/// Normalized occupation law of the stable process in the unit ball started at the
/// centre: radial density proportional to G_{B_1}(0, rho e) rho^{d-1}, where the Green
/// function is evaluated through the Hunt formula against the free (or compensated)
/// kernel. Tables are built once per (alpha, dim) and shared.
class OccupationLaw {
public:
    static const OccupationLaw& get(double alpha, int dim);

    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] int dim() const { return dim_; }
    /// E^0 tau_{B_1} (closed form).
    [[nodiscard]] double mean_exit_time() const { return mean_exit_; }
    /// Total mass of the tabulated density (should equal mean_exit_time()).
    [[nodiscard]] double tabulated_mass() const { return mass_; }
    /// G_{B_1}(0, rho e), 0 < rho < 1.
    [[nodiscard]] double green_at(double rho) const;
    /// Radial CDF of the occupation law.
    [[nodiscard]] double cdf(double rho) const;
    /// Point of B_1 drawn from the occupation law.
    [[nodiscard]] Point sample(Stream& rng) const;

private:
    OccupationLaw(double alpha, int dim);
    double alpha_;
    int dim_;
    double mean_exit_ = 0.0;
    double mass_ = 0.0;
    double power_ = 1.0;  ///< rho = x^power_ on the table grid
    std::function<double(double)> kernel_;
    std::vector<double> x_, cdf_;
    struct Inverse;
    std::shared_ptr<Inverse> inverse_;
};

/// One walk-on-spheres trajectory: exit point and the accumulated Green contribution
/// of f (when f is given).
struct WalkSample {
    Point exit;
    double green = 0.0;
    long steps = 0;
};

/// P_D[g](x) by walk-on-spheres with exact ball exits.
McEstimate estimate_harmonic_measure(const LevyModel& model, const Domain& dom, const FieldFunction& g,
                                     const Point& x, const McConfig& cfg);

/// G_D[f](x): walk-on-spheres with per-ball occupation sampling (cfg.green = WalkOnSpheres)
/// or time discretization with exact stable increments (cfg.green = Path).
McEstimate estimate_green_operator(const LevyModel& model, const Domain& dom, const FieldFunction& f,
                                   const Point& x, const McConfig& cfg);

/// E^x tau_D = G_D[1](x).
McEstimate estimate_exit_time(const LevyModel& model, const Domain& dom, const Point& x, const McConfig& cfg);

/// G_B(x, y) for B = B(0, r) from the Hunt formula with sampled exit positions.
McEstimate green_function_ball(const LevyModel& model, double r, const Point& x, const Point& y,
                               const McConfig& cfg);

/// u(x) = -G_D[f](x) + P_D[g](x), one combined value per walk.
McEstimate solve_dirichlet(const LevyModel& model, const Domain& dom, const FieldFunction& f,
                           const FieldFunction& g, const Point& x, const McConfig& cfg);

/// u(x) - P_{B(x, rho)}[u](x).
McEstimate mean_value_residual(const LevyModel& model, const FieldFunction& u, const Point& x, double rho,
                               const McConfig& cfg);

/// Single-walk primitives (unbiased one-sample estimates).
WalkSample wos_walk(const LevyModel& model, const Domain& dom, const FieldFunction* f, const Point& x,
                    const McConfig& cfg, Stream& rng);
WalkSample path_walk(const LevyModel& model, const Domain& dom, const FieldFunction* f, const Point& x,
                     const McConfig& cfg, Stream& rng);

/// The solution u of the Dirichlet problem as a random field: draw() runs one walk
/// from x (inside dom) or returns g (outside); eval() averages cfg.n_samples walks.
FieldFunction solution_field(const LevyModel& model, const Domain& dom, const FieldFunction& f,
                             const FieldFunction& g, const McConfig& cfg);

/// Positive (alpha/2)-stable variable with Laplace transform exp(-lambda^{alpha/2}) (Kanter).
double positive_stable(double beta, Stream& rng);

/// Increment X_dt of the isotropic alpha-stable process with psi(xi) = |xi|^alpha.
Point stable_increment(double alpha, int dim, double dt, Stream& rng);

}  // namespace nld
