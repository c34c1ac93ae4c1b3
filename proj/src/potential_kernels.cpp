#include "nld/potential_kernels.hpp"

#include "nld/special.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace nld {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTailExponent = 46.0;
constexpr int kMaxHalfPeriods = 64;

quad::PanelOptions panels() {
    quad::PanelOptions o;
    o.inner.rel_tol = 1e-11;
    o.inner.abs_tol = 0.0;
    o.tail_rel_tol = 1e-11;
    return o;
}

// Outer integrals over time whose integrand is itself a quadrature value.
quad::PanelOptions time_panels() {
    quad::PanelOptions o;
    o.inner.rel_tol = 1e-10;
    o.inner.abs_tol = 1e-14;
    o.tail_rel_tol = 1e-10;
    return o;
}

double finite_or_throw(const quad::ImproperResult& r, const std::string& what) {
    if (r.verdict != quad::Verdict::Finite)
        throw quad::QuadratureError(what + ": " + r.note + " (verdict " + quad::to_string(r.verdict) + ")",
                                    r.error);
    return r.value;
}

// \int_0^T f dt: dyadic pieces down to t_c, panels toward zero below.
double time_integral(const quad::Integrand& f, double T, double t_c, const char* what) {
    const double split = std::min(T, t_c);
    double total = finite_or_throw(quad::integrate_to_zero(f, split, time_panels()), what);
    if (T > split) {
        std::vector<double> breaks;
        for (double b = 2.0 * split; b < T; b *= 2.0) breaks.push_back(b);
        auto o = time_panels().inner;
        o.max_intervals = 4000 + 20 * int(breaks.size());
        auto r = quad::integrate(f, split, T, breaks, o);
        if (!r.converged) throw quad::QuadratureError(std::string(what) + " did not converge", r.error);
        total += r.value;
    }
    return total;
}

double fourier_weight(int k) { return sphere_area(k) / std::pow(2.0 * kPi, k); }

// Index governing the small-scale behaviour; used only to pick time and length scales.
double scale_index(const LevyModel& m) {
    const double a = m.alpha();
    return a > 0.0 && a < 2.0 ? a : 2.0;
}

// Levy density of the k-dimensional model sharing the radial exponent (k = d, d+2, d+4).
double nu_lifted(const LevyModel& m, int k, double r) {
    const int d = m.dim();
    if (k == d) return m.nu(r);
    const double n1 = m.nu_derivative(r, 1);
    if (k == d + 2) return -n1 / (2.0 * kPi * r);
    if (k == d + 4) return (m.nu_derivative(r, 2) * r - n1) / (4.0 * kPi * kPi * r * r * r);
    throw ModelError("lifted Levy density only available up to dimension d + 4");
}

// Short-time threshold below which p_t(r) is replaced by its first-order term t nu(r).
double linear_time(const LevyModel& m, double r) { return 1e-3 * std::pow(r, scale_index(m)); }

// Sum of a panel integral on a fixed number of dyadic panels toward 0, then classified.
quad::ImproperResult dyadic_verdict(const quad::Integrand& f, double b, int n_panels = 28) {
    std::vector<double> sums;
    double hi = b;
    for (int k = 0; k < n_panels; ++k) {
        const double lo = 0.5 * hi;
        sums.push_back(boost::math::quadrature::gauss<double, 10>::integrate(f, lo, hi));
        hi = lo;
    }
    auto opts = panels();
    opts.tail_rel_tol = 1e-9;
    return quad::classify_panels(std::move(sums), std::max(1.0, -std::log2(b) + 1.0), opts);
}

double central_difference(const std::function<double(double)>& f, double r) {
    const double eta = std::cbrt(std::numeric_limits<double>::epsilon()) * r;
    return (f(r + eta) - f(r - eta)) / (2.0 * eta);
}

// \int_lo^hi f as a sum of half-period pieces, each to its own relative tolerance
// (the total may be far smaller than the pieces).
double chunked(const quad::Integrand& f, double lo, double hi, double half_period, const char* what) {
    double total = 0.0;
    for (double a = lo; a < hi; a += half_period) {
        const double b = std::min(hi, a + half_period);
        auto r = quad::integrate(f, a, b, quad::Options{1e-300, 1e-12, 2000});
        if (!r.converged)
            throw quad::QuadratureError(std::string(what) + ": finite Fourier range did not converge", r.error);
        total += r.value;
    }
    return total;
}

}  // namespace

std::string to_string(KernelCase k) {
    switch (k) {
        case KernelCase::TransientU: return "TransientU";
        case KernelCase::CompensatedW0: return "CompensatedW0";
        case KernelCase::CompensatedW1: return "CompensatedW1";
    }
    return "?";
}

std::string to_string(GradBranch b) {
    return b == GradBranch::GradDivergent ? "GradDivergent" : "GradIntegrable";
}

// ---------------------------------------------------------------- Fourier inversion

double radial_fourier(int k, const std::function<double(double)>& a, double r, double cutoff) {
    if (k < 1) throw ModelError("radial_fourier: dimension must be positive");
    const double w = fourier_weight(k);
    if (r == 0.0) {
        auto f = [&](double p) { return a(p) * std::pow(p, k - 1); };
        if (std::isfinite(cutoff)) return w * finite_or_throw(quad::integrate_to_zero(f, cutoff, panels()), "Fourier inversion at 0");
        return w * (finite_or_throw(quad::integrate_to_zero(f, 1.0, panels()), "Fourier inversion at 0") +
                    finite_or_throw(quad::integrate_to_infinity(f, 1.0, panels()), "Fourier inversion at 0"));
    }
    auto f = [&](double p) { return a(p) * std::pow(p, k - 1) * spherical_cos_mean(k, p * r); };
    const double half = kPi / r;
    const double rho_a = std::min(20.0 * half, cutoff);
    // Below the first zero the integrand keeps its sign; beyond, sum single half periods.
    const double rho_0 = std::min(0.5 * half, cutoff);
    double total = finite_or_throw(quad::integrate_to_zero(f, rho_0, panels()), "Fourier inversion");
    if (rho_a > rho_0) total += chunked(f, rho_0, rho_a, half, "Fourier inversion");
    if (!(cutoff > rho_a)) return w * total;
    if (std::isfinite(cutoff) && (cutoff - rho_a) / half <= kMaxHalfPeriods) {
        total += chunked(f, rho_a, cutoff, half, "Fourier inversion");
    } else {
        quad::OscillatoryOptions o;
        o.max_cycles = 2000;
        auto tail = quad::integrate_oscillatory(f, rho_a, half, o);
        if (!tail.converged)
            throw quad::QuadratureError("Fourier inversion: oscillatory tail did not converge", tail.error);
        total += tail.value;
    }
    return w * total;
}

double fourier_cutoff(const LevyModel& model, double t, int k) {
    auto ok = [&](double p) { return t * model.psi(p) - (k - 1) * std::log(p) >= kTailExponent; };
    double p = 1.0;
    if (ok(p)) {
        while (p > 1e-12 && ok(0.5 * p)) p *= 0.5;
        return p;
    }
    while (!ok(p)) {
        p *= 2.0;
        if (p > 1e12) return std::numeric_limits<double>::infinity();
    }
    return p;
}

double transition_density_radial(const LevyModel& model, double t, double r) {
    if (!model.infinite_mass())
        throw ModelError("transition_density: compound Poisson model (finite Levy measure) is unsupported");
    if (!(t > 0.0)) throw ModelError("transition_density: t must be positive");
    const double xi = fourier_cutoff(model, t, model.dim());
    return radial_fourier(
        model.dim(), [&](double p) { return std::exp(-t * model.psi(p)); }, std::abs(r), xi);
}

double transition_density(const LevyModel& model, double t, std::span<const double> x) {
    if (int(x.size()) != model.dim()) throw ModelError("transition_density: dimension mismatch");
    return transition_density_radial(model, t, norm(Point::from(x)));
}

// ---------------------------------------------------------------- case selection

CaseTag kernel_case(const LevyModel& model) {
    const int d = model.dim();
    CaseTag tag;
    tag.x0 = Point(d);
    const double omega = sphere_area(d);
    auto inv = quad::integrate_to_zero([&](double p) { return omega * std::pow(p, d - 1) / model.psi(p); }, 1.0,
                                       panels());
    tag.inverse_psi_integral = inv.value;
    tag.inverse_psi_verdict = inv.verdict;
    if (inv.verdict == quad::Verdict::Finite) {
        tag.kernel_case = KernelCase::TransientU;
        return tag;
    }
    if (d == 1) {
        auto g = [&](double p) { return 1.0 / (1.0 + model.psi(p)); };
        auto head = quad::integrate(g, 0.0, 1.0);
        auto tail = quad::integrate_to_infinity(g, 1.0, panels());
        tag.resolvent_integral = head.value + tail.value;
        tag.resolvent_verdict = tail.verdict;
        if (tail.verdict == quad::Verdict::Finite) {
            tag.kernel_case = KernelCase::CompensatedW0;
            return tag;
        }
    }
    tag.kernel_case = KernelCase::CompensatedW1;
    tag.x0 = Point::unit(d, d - 1);
    return tag;
}

// ---------------------------------------------------------------- potentials

double riesz_constant(double alpha, int dim) {
    if (!(alpha > 0.0 && alpha < dim)) throw ModelError("riesz_constant: need 0 < alpha < d");
    return std::tgamma(0.5 * (dim - alpha)) /
           (std::pow(2.0, alpha) * std::pow(kPi, 0.5 * dim) * std::tgamma(0.5 * alpha));
}

double recurrent_stable_constant(double alpha) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw ModelError("recurrent_stable_constant: need alpha in (1,2)");
    return std::tgamma(1.0 - alpha) * std::sin(0.5 * kPi * alpha) / kPi;
}

namespace {

// Potential U_k(r) of the k-dimensional model with the same radial exponent:
// \int_0^T p_t dt (first-order term below the linear threshold) plus the Fourier
// inverse of exp(-T psi)/psi.
double transient_potential(const LevyModel& model, int k, double r) {
    if (!(r > 0.0)) throw ModelError("potential: r must be positive");
    const double alpha = scale_index(model);
    // Splitting at the natural time scale keeps both pieces free of cancellation.
    const double T = std::pow(r, alpha);
    const double t_lin = linear_time(model, r);
    const double nu_k = nu_lifted(model, k, r);
    auto p = [&](double t) {
        if (t < t_lin) return t * nu_k;
        const double xi = fourier_cutoff(model, t, k);
        return radial_fourier(k, [&](double q) { return std::exp(-t * model.psi(q)); }, r, xi);
    };
    double total = time_integral(p, T, T, "potential time integral");
    const double xi = fourier_cutoff(model, T, k);
    total += radial_fourier(k, [&](double q) { return std::exp(-T * model.psi(q)) / model.psi(q); }, r, xi);
    return total;
}

bool subordinate_potential_available(const LevyModel& m) {
    return m.family() == Family::SubordinateBM && has_density(*m.subordinator(), SubordinatorMeasure::Potential);
}

// U_k for the lifted dimensions, by subordination when possible.
std::function<double(double)> lifted_potential(const LevyModel& model, int k) {
    if (subordinate_potential_available(model)) {
        auto spec = *model.subordinator();
        return [spec, k](double r) { return subordinate_gaussian(spec, SubordinatorMeasure::Potential, k, r); };
    }
    return [model, k](double r) { return transient_potential(model, k, r); };
}

}  // namespace

double compensated_W_radial(const LevyModel& model, double s0, double r) {
    if (!(r > 0.0)) throw ModelError("compensated_W: x must be nonzero");
    if (s0 < 0.0) throw ModelError("compensated_W: negative reference radius");
    if (r == s0) return 0.0;
    if (!model.infinite_mass())
        throw ModelError("compensated_W: compound Poisson model (finite Levy measure) is unsupported");
    const int d = model.dim();
    const double alpha = scale_index(model);
    const double big = std::max(r, s0);
    const double T = std::max(1.0, std::pow(big, alpha));
    const double t_lin = linear_time(model, s0 > 0.0 ? std::min(r, s0) : r);
    const double nu_r = model.nu(r);
    const double nu_s = s0 > 0.0 ? model.nu(s0) : 0.0;
    auto pt = [&](double t, double x) {
        const double xi = fourier_cutoff(model, t, d);
        return radial_fourier(d, [&](double q) { return std::exp(-t * model.psi(q)); }, x, xi);
    };
    auto f = [&](double t) {
        const double a = t < t_lin ? t * nu_r : pt(t, r);
        if (s0 > 0.0 && t < t_lin) return a - t * nu_s;
        return a - pt(t, s0);
    };
    double total = time_integral(f, T, std::pow(s0 > 0.0 ? std::min(r, s0) : r, alpha),
                                 "compensated kernel time integral");

    const double xi = fourier_cutoff(model, T, d);
    const double w = fourier_weight(d);
    auto g = [&](double q) {
        const double ps = model.psi(q);
        return std::exp(-T * ps) / ps * std::pow(q, d - 1) *
               (one_minus_spherical_cos_mean(d, q * s0) - one_minus_spherical_cos_mean(d, q * r));
    };
    const double split = std::min(1.0, xi);
    double tail = finite_or_throw(quad::integrate_to_zero(g, split, panels()), "compensated kernel Fourier tail");
    if (xi > split) {
        if (!std::isfinite(xi)) throw quad::QuadratureError("compensated kernel: no Fourier cutoff found", 0.0);
        tail += chunked(g, split, xi, kPi / big, "compensated kernel Fourier tail");
    }
    return total + w * tail;
}

double compensated_W(const LevyModel& model, std::span<const double> x0, std::span<const double> x) {
    if (int(x.size()) != model.dim() || int(x0.size()) != model.dim())
        throw ModelError("compensated_W: dimension mismatch");
    return compensated_W_radial(model, norm(Point::from(x0)), norm(Point::from(x)));
}

double lambda_potential(const LevyModel& model, double lambda, std::span<const double> x) {
    if (!(lambda > 0.0)) throw ModelError("lambda_potential: lambda must be positive");
    if (int(x.size()) != model.dim()) throw ModelError("lambda_potential: dimension mismatch");
    const double r = norm(Point::from(x));
    if (!(r > 0.0)) throw ModelError("lambda_potential: x must be nonzero");
    return radial_fourier(
        model.dim(), [&](double p) { return 1.0 / (lambda + model.psi(p)); }, r,
        std::numeric_limits<double>::infinity());
}

double lambda_potential_time(const LevyModel& model, double lambda, double r) {
    if (!(lambda > 0.0)) throw ModelError("lambda_potential: lambda must be positive");
    if (!(r > 0.0)) throw ModelError("lambda_potential: r must be positive");
    const double t_lin = linear_time(model, r);
    const double nu_r = model.nu(r);
    auto f = [&](double t) {
        if (t < t_lin) return t * nu_r;
        return std::exp(-lambda * t) * transition_density_radial(model, t, r);
    };
    const double split = std::max(1.0, std::pow(r, scale_index(model)));
    return finite_or_throw(quad::integrate_to_zero(f, split, time_panels()), "lambda potential") +
           finite_or_throw(quad::integrate_to_infinity(f, split, time_panels()), "lambda potential");
}

// ---------------------------------------------------------------- profiles

namespace {

void closed_stable_profile(KernelProfile& p, double alpha) {
    const int d = p.dim;
    if (p.kernel_case == KernelCase::TransientU) {
        const double c = riesz_constant(alpha, d);
        const double e = alpha - d;
        p.g = [c, e](double r) { return c * std::pow(r, e); };
        p.g1 = [c, e](double r) { return c * e * std::pow(r, e - 1); };
        p.g2 = [c, e](double r) { return c * e * (e - 1) * std::pow(r, e - 2); };
        p.g3 = [c, e](double r) { return c * e * (e - 1) * (e - 2) * std::pow(r, e - 3); };
    } else if (p.kernel_case == KernelCase::CompensatedW1) {
        // d = 1, alpha = 1
        p.g = [](double r) { return -std::log(r) / kPi; };
        p.g1 = [](double r) { return -1.0 / (kPi * r); };
        p.g2 = [](double r) { return 1.0 / (kPi * r * r); };
        p.g3 = [](double r) { return -2.0 / (kPi * r * r * r); };
    } else {
        const double c = recurrent_stable_constant(alpha);
        const double e = alpha - 1.0;
        p.g = [c, e](double r) { return c * std::pow(r, e); };
        p.g1 = [c, e](double r) { return c * e * std::pow(r, e - 1); };
        p.g2 = [c, e](double r) { return c * e * (e - 1) * std::pow(r, e - 2); };
        p.g3 = [c, e](double r) { return c * e * (e - 1) * (e - 2) * std::pow(r, e - 3); };
    }
}

}  // namespace

KernelProfile potential_profile(const LevyModel& model, const ProfileOptions& opts) {
    const CaseTag tag = kernel_case(model);
    KernelProfile p;
    p.kernel_case = tag.kernel_case;
    p.x0 = tag.x0;
    p.dim = model.dim();
    p.r0 = 1.0;
    const int d = p.dim;
    const bool closed = model.family() == Family::Stable && !opts.force_numeric;
    if (closed) {
        closed_stable_profile(p, model.alpha());
        p.closed_form = true;
    } else {
        auto u2 = lifted_potential(model, d + 2);
        auto u4 = lifted_potential(model, d + 4);
        if (p.kernel_case == KernelCase::TransientU) {
            p.g = lifted_potential(model, d);
        } else {
            const double s0 = norm(p.x0);
            p.g = [model, s0](double r) { return compensated_W_radial(model, s0, r); };
        }
        p.g1 = [u2](double r) { return -2.0 * kPi * r * u2(r); };
        p.g2 = [u2, u4](double r) { return -2.0 * kPi * u2(r) + 4.0 * kPi * kPi * r * r * u4(r); };
        if (subordinate_potential_available(model)) {
            auto u6 = lifted_potential(model, d + 6);
            p.g3 = [u4, u6](double r) {
                return 12.0 * kPi * kPi * r * u4(r) - 8.0 * kPi * kPi * kPi * r * r * r * u6(r);
            };
        }
        p.closed_form = false;
    }
    auto g1 = p.g1;
    auto integrand = [g1, d](double t) { return std::abs(g1(t)) * std::pow(t, d - 1); };
    const auto gi = p.closed_form ? quad::integrate_to_zero(integrand, 0.5, panels()) : dyadic_verdict(integrand, 0.5, 16);
    p.gradient_integral = gi.value;
    p.gradient_verdict = gi.verdict;
    p.branch = gi.verdict == quad::Verdict::Finite ? GradBranch::GradIntegrable : GradBranch::GradDivergent;
    if (p.branch == GradBranch::GradDivergent) {
        p.S = [g1](double r) { return std::abs(g1(r)); };
    } else {
        auto g2 = p.g2;
        p.S = [g2](double r) { return std::abs(g2(r)); };
    }
    std::ostringstream os;
    os << to_string(p.kernel_case) << " for " << model.label() << ", "
       << (p.closed_form ? "closed form" : "numeric") << ", " << to_string(p.branch);
    p.label = os.str();
    return p;
}

// ---------------------------------------------------------------- growth condition

GrowthReport verify_growth_G(const KernelProfile& profile, std::span<const double> r_grid) {
    GrowthReport rep;
    rep.branch = profile.branch;
    std::vector<double> grid;
    int dropped = 0;
    for (double r : r_grid) {
        if (r > 0.0 && r < profile.r0)
            grid.push_back(r);
        else
            ++dropped;
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::ostringstream diag;
    if (dropped) diag << dropped << " grid points outside (0, r0) ignored; ";
    if (grid.empty()) {
        diag << "empty grid";
        rep.diagnosis = diag.str();
        return rep;
    }
    auto g3 = profile.g3;
    if (!g3) {
        auto g2 = profile.g2;
        g3 = [g2](double r) { return central_difference(g2, r); };
    }
    const bool second = profile.branch == GradBranch::GradIntegrable;
    auto ratio = [&](double r) {
        const double s = profile.S(r);
        const double g1 = std::abs(profile.g1(r));
        const double g2 = std::abs(profile.g2(r));
        double k = std::max({profile.g(r) / s, g1 / s, r * g2 / s});
        if (second) k = std::max({k, g2 / s, r * std::abs(g3(r)) / s});
        return k;
    };
    rep.kappa = 0.0;
    for (double r : grid) rep.kappa = std::max(rep.kappa, ratio(r));

    std::vector<double> fine = grid;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) fine.push_back(std::sqrt(grid[i] * grid[i + 1]));
    fine.push_back(grid.front() / 10.0);
    fine.push_back(grid.front() / 100.0);
    std::sort(fine.begin(), fine.end());
    rep.kappa_refined = rep.kappa;
    rep.s_monotone = true;
    double prev_s = std::numeric_limits<double>::infinity();
    for (double r : fine) {
        rep.kappa_refined = std::max(rep.kappa_refined, ratio(r));
        const double s = profile.S(r);
        if (s > prev_s * (1.0 + 1e-9)) rep.s_monotone = false;
        prev_s = s;
        const double g = std::abs(profile.g(r));
        if (g > 0.0) rep.log_derivative_bound = std::max(rep.log_derivative_bound, r * std::abs(profile.g1(r)) / g);
    }
    rep.passes = std::isfinite(rep.kappa) && std::isfinite(rep.kappa_refined) &&
                 rep.kappa_refined <= 1.25 * rep.kappa && rep.s_monotone;
    diag << "kappa " << rep.kappa << " (refined " << rep.kappa_refined << ")";
    if (!rep.s_monotone) diag << "; majorant not monotone";
    rep.diagnosis = diag.str();
    return rep;
}

RecursionReport subordinate_green_recursion_check(const SubordinatorSpec& spec, int d,
                                                  std::span<const double> r_grid) {
    if (d < 3) throw ModelError("recursion check needs d >= 3");
    validate(spec);
    if (!has_density(spec, SubordinatorMeasure::Potential))
        throw ModelError("recursion check: potential measure of the subordinator is unavailable (unsupported)");
    auto G = [&](int k, double r) { return subordinate_gaussian(spec, SubordinatorMeasure::Potential, k, r); };
    RecursionReport rep;
    for (double r : r_grid) {
        if (!(r > 0.0)) throw ModelError("recursion check: radii must be positive");
        const double lhs = central_difference([&](double s) { return G(d, s); }, r);
        const double rhs = -2.0 * kPi * r * G(d + 2, r);
        const double res = std::abs(lhs - rhs) / std::abs(rhs);
        rep.r.push_back(r);
        rep.residual.push_back(res);
        rep.max_rel_residual = std::max(rep.max_rel_residual, res);
    }
    rep.passes = !rep.r.empty() && rep.max_rel_residual < 1e-4;
    auto gi = dyadic_verdict([&](double t) { return 2.0 * kPi * std::pow(t, d) * G(d + 2, t); }, 0.5);
    rep.gradient_integral = gi.value;
    rep.gradient_verdict = gi.verdict;
    return rep;
}

}  // namespace nld
