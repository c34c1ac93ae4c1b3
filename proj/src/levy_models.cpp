#include "nld/levy_models.hpp"

#include "nld/quadrature.hpp"
#include "nld/special.hpp"

#include <boost/math/interpolators/cardinal_quintic_b_spline.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace nld {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a * std::pow(b / a, n == 1 ? 0.0 : double(i) / (n - 1));
    return g;
}

quad::PanelOptions inner_panels() {
    quad::PanelOptions o;
    o.inner.rel_tol = 1e-11;
    o.inner.abs_tol = 0.0;
    o.tail_rel_tol = 1e-11;
    return o;
}

double finite_or_throw(const quad::ImproperResult& r, const char* what) {
    if (r.verdict != quad::Verdict::Finite) {
        throw quad::QuadratureError(std::string(what) + ": " + r.note + " (verdict " +
                                        quad::to_string(r.verdict) + ")",
                                    r.error);
    }
    return r.value;
}

// Split \int_0^\infty at `split` into panels toward zero and toward infinity.
double half_line(const quad::Integrand& f, double split, const char* what,
                 const quad::PanelOptions& opts = inner_panels()) {
    return finite_or_throw(quad::integrate_to_zero(f, split, opts), what) +
           finite_or_throw(quad::integrate_to_infinity(f, split, opts), what);
}

// Spectral density of the Stieltjes representation on the negative half-axis.
double spectral_density(const SubordinatorSpec& spec, SubordinatorMeasure which, double s) {
    const std::complex<double> z(-s, 0.0);
    const std::complex<double> phi = spec.complex_exponent(z);
    if (which == SubordinatorMeasure::Levy) return std::imag(phi) / kPi;
    return -std::imag(1.0 / phi) / kPi;
}

}  // namespace

// ---------------------------------------------------------------- subordinators

SubordinatorSpec stable_subordinator(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw ModelError("stable subordinator needs alpha in (0,2)");
    const double b = 0.5 * alpha;
    SubordinatorSpec s;
    s.kind = "stable";
    s.index = alpha;
    s.laplace_exponent = [b](double l) { return std::pow(l, b); };
    const double cmu = b / std::tgamma(1.0 - b);
    s.levy_density = [b, cmu](double t) { return cmu * std::pow(t, -1.0 - b); };
    const double cu = 1.0 / std::tgamma(b);
    s.potential_density = [b, cu](double t) { return cu * std::pow(t, b - 1.0); };
    s.complex_exponent = [b](std::complex<double> z) { return std::pow(z, b); };
    s.complete_bernstein = true;
    return s;
}

SubordinatorSpec geometric_stable_subordinator(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw ModelError("geometric stable subordinator needs alpha in (0,2)");
    const double b = 0.5 * alpha;
    SubordinatorSpec s;
    s.kind = "geometric_stable";
    s.index = alpha;
    s.laplace_exponent = [b](double l) { return std::log1p(std::pow(l, b)); };
    s.complex_exponent = [b](std::complex<double> z) { return std::log(1.0 + std::pow(z, b)); };
    s.complete_bernstein = true;
    return s;
}

void validate(const SubordinatorSpec& spec) {
    if (!spec.laplace_exponent) throw ModelError("subordinator: Laplace exponent missing");
    if (spec.drift < 0.0) throw ModelError("subordinator: negative drift");
    const auto& phi = spec.laplace_exponent;
    const double p0 = phi(1e-14);
    if (!(std::abs(p0) < 1e-3)) throw ModelError("subordinator: phi(0+) != 0");
    auto grid = logspace(1e-6, 1e6, 49);
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        v[i] = phi(grid[i]);
        if (!std::isfinite(v[i])) throw ModelError("subordinator: phi not finite on check grid");
        if (i > 0 && v[i] < v[i - 1] * (1.0 - 1e-12))
            throw ModelError("subordinator: phi decreasing on check grid");
    }
    // Concavity: slopes of consecutive chords are non-increasing.
    for (std::size_t i = 2; i < grid.size(); ++i) {
        const double s1 = (v[i - 1] - v[i - 2]) / (grid[i - 1] - grid[i - 2]);
        const double s2 = (v[i] - v[i - 1]) / (grid[i] - grid[i - 1]);
        if (s2 > s1 * (1.0 + 1e-9) + 1e-15) throw ModelError("subordinator: phi not concave");
    }
}

bool has_density(const SubordinatorSpec& spec, SubordinatorMeasure which) {
    const auto& explicit_fn =
        which == SubordinatorMeasure::Levy ? spec.levy_density : spec.potential_density;
    return bool(explicit_fn) || (spec.complete_bernstein && bool(spec.complex_exponent));
}

double subordinator_density(const SubordinatorSpec& spec, SubordinatorMeasure which, double t) {
    const auto& explicit_fn =
        which == SubordinatorMeasure::Levy ? spec.levy_density : spec.potential_density;
    if (explicit_fn) return explicit_fn(t);
    if (!has_density(spec, which))
        throw ModelError(which == SubordinatorMeasure::Levy
                             ? "subordinator Levy density unavailable"
                             : "subordinator potential density unavailable");
    // m(t) = \int_0^\infty e^{-ts} sigma(s) ds = t^{-1} \int_0^\infty e^{-v} sigma(v/t) dv
    auto g = [&](double v) { return std::exp(-v) * spectral_density(spec, which, v / t); };
    return half_line(g, 1.0, "subordinator density") / t;
}

double subordinate_gaussian(const SubordinatorSpec& spec, SubordinatorMeasure which, int dim,
                            double r) {
    const auto& explicit_fn =
        which == SubordinatorMeasure::Levy ? spec.levy_density : spec.potential_density;
    const double half_d = 0.5 * dim;
    if (explicit_fn) {
        auto g = [&](double t) {
            const double e = std::exp(-r * r / (4.0 * t));
            if (e == 0.0) return 0.0;
            return std::pow(4.0 * kPi * t, -half_d) * e * explicit_fn(t);
        };
        return half_line(g, 0.25 * r * r, "subordination integral");
    }
    if (!has_density(spec, which))
        throw ModelError(which == SubordinatorMeasure::Levy
                             ? "subordinator Levy density unavailable"
                             : "subordinator potential density unavailable");
    // Resolvent form: \int sigma(s) (2pi)^{-d/2} (sqrt(s)/r)^{d/2-1} K_{d/2-1}(r sqrt(s)) ds,
    // with s = v / r^2.
    const double order = std::abs(half_d - 1.0);
    const double pref = std::pow(2.0 * kPi, -half_d) / (r * r);
    auto g = [&](double v) {
        const double w = std::sqrt(v);
        if (w > 700.0) return 0.0;
        const double k = boost::math::cyl_bessel_k(order, w);
        return pref * spectral_density(spec, which, v / (r * r)) * std::pow(w / (r * r), half_d - 1.0) * k;
    };
    return half_line(g, 1.0, "subordination integral");
}

// ---------------------------------------------------------------- models

std::string to_string(Family f) {
    switch (f) {
        case Family::Stable: return "stable";
        case Family::TruncatedStable: return "truncated_stable";
        case Family::SubordinateBM: return "subordinate_bm";
    }
    return "?";
}

double stable_levy_constant(double alpha, int dim) {
    return std::pow(2.0, alpha) * std::tgamma(0.5 * (dim + alpha)) /
           (std::pow(kPi, 0.5 * dim) * std::abs(std::tgamma(-0.5 * alpha)));
}

double smooth_cutoff(double r, double a, double b) {
    if (r <= a) return 1.0;
    if (r >= b) return 0.0;
    const double u = (r - a) / (b - a);
    const double s1 = std::exp(-1.0 / (1.0 - u));
    const double s0 = std::exp(-1.0 / u);
    return s1 / (s1 + s0);
}

struct LevyModel::PsiCache {
    std::once_flag once;
    std::unique_ptr<boost::math::interpolators::cardinal_quintic_b_spline<double>> spline;
    double log_lo = 0.0, log_hi = 0.0;
    double psi_lo = 0.0, slope_lo = 2.0;
    double amp_hi = 0.0, shift_hi = 0.0;  // psi ~ amp rho^alpha + shift beyond the grid
};

LevyModel::LevyModel() : psi_cache_(std::make_shared<PsiCache>()) {}

double LevyModel::psi(double rho) const {
    rho = std::abs(rho);
    if (has_closed_psi()) return psi_closed(rho);
    if (rho == 0.0) return 0.0;
    PsiCache& c = *psi_cache_;
    std::call_once(c.once, [&] {
        constexpr int per_decade = 40;
        c.log_lo = std::log(1e-3);
        c.log_hi = std::log(1e4);
        const int n = 7 * per_decade + 1;
        const double h = (c.log_hi - c.log_lo) / (n - 1);
        std::vector<double> y(n);
        for (int i = 0; i < n; ++i) y[i] = std::log(char_exponent_quadrature(*this, std::exp(c.log_lo + i * h)));
        c.psi_lo = std::exp(y.front());
        c.slope_lo = (y[1] - y[0]) / h;
        const double x1 = std::exp(alpha_ * (c.log_hi - h)), x2 = std::exp(alpha_ * c.log_hi);
        c.amp_hi = (std::exp(y[n - 1]) - std::exp(y[n - 2])) / (x2 - x1);
        c.shift_hi = std::exp(y[n - 1]) - c.amp_hi * x2;
        c.spline = std::make_unique<boost::math::interpolators::cardinal_quintic_b_spline<double>>(
            y, c.log_lo, h);
    });
    const double lr = std::log(rho);
    if (lr < c.log_lo) return c.psi_lo * std::exp(c.slope_lo * (lr - c.log_lo));
    if (lr > c.log_hi) return c.amp_hi * std::pow(rho, alpha_) + c.shift_hi;
    return std::exp((*c.spline)(lr));
}

double LevyModel::nu(double r) const {
    if (!(r > 0.0)) throw ModelError("nu(r) needs r > 0");
    switch (family_) {
        case Family::Stable: return stable_const_ * std::pow(r, -dim_ - alpha_);
        case Family::TruncatedStable:
            return std::pow(r, -dim_ - alpha_) * smooth_cutoff(r, cutoff_.first, cutoff_.second);
        case Family::SubordinateBM:
            return subordinate_gaussian(*sub_, SubordinatorMeasure::Levy, dim_, r);
    }
    return 0.0;
}

double LevyModel::nu_derivative(double r, int order) const {
    if (order != 1 && order != 2) throw ModelError("nu_derivative: order must be 1 or 2");
    const double p = dim_ + alpha_;
    switch (family_) {
        case Family::Stable:
            return order == 1 ? -p * nu(r) / r : p * (p + 1.0) * nu(r) / (r * r);
        case Family::SubordinateBM: {
            // d/dr of the Gaussian subordination lowers the dimension by two.
            const double n2 = subordinate_gaussian(*sub_, SubordinatorMeasure::Levy, dim_ + 2, r);
            if (order == 1) return -2.0 * kPi * r * n2;
            const double n4 = subordinate_gaussian(*sub_, SubordinatorMeasure::Levy, dim_ + 4, r);
            return -2.0 * kPi * n2 + 4.0 * kPi * kPi * r * r * n4;
        }
        case Family::TruncatedStable: {
            const double eta = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, r);
            const double lo = std::max(r - eta, 0.5 * r);
            const double step = r - lo;
            if (order == 1) return (nu(r + step) - nu(lo)) / (2.0 * step);
            return (nu(r + step) - 2.0 * nu(r) + nu(lo)) / (step * step);
        }
    }
    return 0.0;
}

double LevyModel::nu_star(double r) const {
    if (nu_star_zero_) return 0.0;
    return nu(r);
}

bool LevyModel::has_closed_psi() const { return family_ != Family::TruncatedStable; }

double LevyModel::psi_closed(double rho) const {
    rho = std::abs(rho);
    switch (family_) {
        case Family::Stable: return std::pow(rho, alpha_);
        case Family::SubordinateBM: return rho == 0.0 ? 0.0 : sub_->laplace_exponent(rho * rho);
        case Family::TruncatedStable: break;
    }
    throw ModelError("no closed-form characteristic exponent for " + label());
}

std::string LevyModel::label() const {
    std::ostringstream os;
    os << to_string(family_) << "(";
    if (family_ == Family::SubordinateBM) os << "phi=" << sub_->kind << ", ";
    if (family_ != Family::SubordinateBM || sub_->kind != "custom") os << "alpha=" << alpha_ << ", ";
    os << "d=" << dim_ << ")";
    return os.str();
}

void LevyModel::finish_construction() {
    auto grid = logspace(1e-3, 1e3, family_ == Family::SubordinateBM ? 13 : 49);
    double prev = std::numeric_limits<double>::infinity();
    for (double r : grid) {
        const double v = nu(r);
        if (!(v >= 0.0) || v > prev * (1.0 + 1e-8))
            throw ModelError(label() + ": Levy density is not non-increasing");
        prev = v;
    }
    levy_integral_ = concentration(*this, 1.0).h;
    if (!std::isfinite(levy_integral_)) throw ModelError(label() + ": (1 ^ |h|^2) nu not integrable");

    if (family_ == Family::SubordinateBM) {
        // Without drift phi(inf) is the total mass of mu.
        const auto& phi = sub_->laplace_exponent;
        infinite_mass_ = phi(1e200) > 1.5 * phi(1e100);
    } else {
        infinite_mass_ = true;
    }

    if (nu_star_zero_) {
        growth_constant_ = std::numeric_limits<double>::quiet_NaN();
        if (!support_ || *support_ > r0_)
            throw ModelError(label() + ": nu* = 0 requires nu supported in B(0, r0)");
        for (double r : logspace(*support_, 1e3 * r0_, 13))
            if (nu(r) != 0.0) throw ModelError(label() + ": nu does not vanish beyond its support");
    } else {
        double c = 0.0;
        for (double r : logspace(r0_, 1e3 * r0_, family_ == Family::SubordinateBM ? 9 : 31)) {
            const double a = nu_star(r), b = nu_star(r + 1.0);
            if (!(b > 0.0)) throw ModelError(label() + ": nu* vanishes, growth condition fails");
            c = std::max(c, a / b);
        }
        growth_constant_ = c;
    }
}

LevyModel make_stable(double alpha, int dim) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw ModelError("make_stable: alpha must lie in (0,2)");
    if (dim < 1) throw ModelError("make_stable: dim must be positive");
    LevyModel m;
    m.dim_ = dim;
    m.family_ = Family::Stable;
    m.alpha_ = alpha;
    m.stable_const_ = stable_levy_constant(alpha, dim);
    m.finish_construction();
    return m;
}

LevyModel make_truncated_stable(double alpha, int dim, std::pair<double, double> cutoff) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw ModelError("make_truncated_stable: alpha must lie in (0,2)");
    if (dim < 1) throw ModelError("make_truncated_stable: dim must be positive");
    if (!(cutoff.first > 0.0 && cutoff.first < cutoff.second))
        throw ModelError("make_truncated_stable: cutoff must satisfy 0 < a < b");
    LevyModel m;
    m.dim_ = dim;
    m.family_ = Family::TruncatedStable;
    m.alpha_ = alpha;
    m.cutoff_ = cutoff;
    m.support_ = cutoff.second;
    m.nu_star_zero_ = true;
    m.r0_ = std::max(1.0, cutoff.second);
    m.finish_construction();
    return m;
}

LevyModel make_subordinate_bm(const SubordinatorSpec& spec, int dim) {
    if (dim < 1) throw ModelError("make_subordinate_bm: dim must be positive");
    validate(spec);
    if (spec.drift > 0.0)
        throw ModelError("make_subordinate_bm: positive drift adds a Gaussian part (unsupported)");
    if (!has_density(spec, SubordinatorMeasure::Levy))
        throw ModelError("make_subordinate_bm: Levy density mu missing and not recoverable from phi");
    LevyModel m;
    m.dim_ = dim;
    m.family_ = Family::SubordinateBM;
    m.alpha_ = spec.index;
    m.sub_ = std::make_shared<const SubordinatorSpec>(spec);
    m.finish_construction();
    return m;
}

// ---------------------------------------------------------------- psi

double char_exponent_quadrature(const LevyModel& model, double rho) {
    rho = std::abs(rho);
    if (rho == 0.0) return 0.0;
    const int d = model.dim();
    const double omega = sphere_area(d);
    auto body = [&](double r) {
        return omega * model.nu(r) * std::pow(r, d - 1) * one_minus_spherical_cos_mean(d, rho * r);
    };
    const double r_osc = 20.0 * kPi / rho;
    const auto support = model.support_radius();
    auto opts = inner_panels();
    opts.tail_rel_tol = 1e-13;
    if (support && *support <= r_osc)
        return finite_or_throw(quad::integrate_to_zero(body, *support, opts), "psi quadrature");
    double total = finite_or_throw(quad::integrate_to_zero(body, r_osc, opts), "psi quadrature");
    if (support) {
        auto r = quad::integrate(body, r_osc, *support, quad::Options{0.0, 1e-12, 20000});
        if (!r.converged) throw quad::QuadratureError("psi quadrature: body did not converge", r.error);
        return total + r.value;
    }
    auto mass = [&](double r) { return omega * model.nu(r) * std::pow(r, d - 1); };
    total += finite_or_throw(quad::integrate_to_infinity(mass, r_osc, opts), "psi quadrature tail");
    auto osc = [&](double r) {
        return omega * model.nu(r) * std::pow(r, d - 1) * spherical_cos_mean(d, rho * r);
    };
    auto tail = quad::integrate_oscillatory(osc, r_osc, kPi / rho);
    if (!tail.converged)
        throw quad::QuadratureError("psi quadrature: oscillatory tail did not converge", tail.error);
    return total - tail.value;
}

double psi_radial(const LevyModel& model, double rho) {
    return model.has_closed_psi() ? model.psi_closed(rho) : char_exponent_quadrature(model, rho);
}

double char_exponent(const LevyModel& model, std::span<const double> xi) {
    if (int(xi.size()) != model.dim()) throw ModelError("char_exponent: dimension mismatch");
    double s = 0.0;
    for (double v : xi) s += v * v;
    return psi_radial(model, std::sqrt(s));
}

// ---------------------------------------------------------------- concentration

Concentration concentration(const LevyModel& model, double r) {
    if (!(r > 0.0)) throw ModelError("concentration: r must be positive");
    const int d = model.dim();
    Concentration out;
    if (model.family() == Family::SubordinateBM) {
        // Average over the Gaussian layer: |B_t|^2/(2t) is chi-square with d degrees.
        const SubordinatorSpec& spec = *model.subordinator();
        auto k_part = [&](double t) {
            return 2.0 * t * d / (r * r) * boost::math::gamma_p(0.5 * d + 1.0, r * r / (4.0 * t));
        };
        std::map<double, double> memo;
        auto mu = [&](double t) {
            auto it = memo.find(t);
            if (it != memo.end()) return it->second;
            const double v = subordinator_density(spec, SubordinatorMeasure::Levy, t);
            memo.emplace(t, v);
            return v;
        };
        out.K = half_line([&](double t) { return mu(t) * k_part(t); }, r * r, "concentration K");
        out.h = half_line(
            [&](double t) {
                return mu(t) * (k_part(t) + boost::math::gamma_q(0.5 * d, r * r / (4.0 * t)));
            },
            r * r, "concentration h");
        return out;
    }
    const double omega = sphere_area(d);
    const auto support = model.support_radius();
    const double inner_end = support ? std::min(r, *support) : r;
    auto inner = [&](double p) { return omega * model.nu(p) * std::pow(p, d + 1) / (r * r); };
    out.K = finite_or_throw(quad::integrate_to_zero(inner, inner_end, inner_panels()), "concentration K");
    auto outer = [&](double p) { return omega * model.nu(p) * std::pow(p, d - 1); };
    double far = 0.0;
    if (!support) {
        far = finite_or_throw(quad::integrate_to_infinity(outer, r, inner_panels()), "concentration h");
    } else if (r < *support) {
        far = quad::integrate(outer, r, *support).value;
    }
    out.h = out.K + far;
    return out;
}

ScalingReport check_lower_scaling(const LevyModel& model, double alpha,
                                  std::span<const double> lambda_grid,
                                  std::span<const double> r_grid) {
    if (lambda_grid.empty() || r_grid.empty())
        throw ModelError("check_lower_scaling: grids must be nonempty");
    for (double l : lambda_grid)
        if (!(l > 0.0 && l <= 1.0)) throw ModelError("check_lower_scaling: lambda must lie in (0,1]");
    std::map<double, double> cache;
    auto h = [&](double r) {
        auto it = cache.find(r);
        if (it != cache.end()) return it->second;
        const double v = concentration(model, r).h;
        cache.emplace(r, v);
        return v;
    };
    ScalingReport rep;
    rep.alpha_tested = alpha;
    auto worst = [&](std::span<const double> ls, std::span<const double> rs, double* wl, double* wr) {
        double c = 0.0;
        for (double l : ls)
            for (double r : rs) {
                const double ratio = h(r) / (std::pow(l, alpha) * h(l * r));
                if (ratio > c) {
                    c = ratio;
                    if (wl) *wl = l;
                    if (wr) *wr = r;
                }
            }
        return c;
    };
    rep.c_fit = worst(lambda_grid, r_grid, &rep.worst_lambda, &rep.worst_r);

    // Refinement: geometric midpoints plus two decades beyond each end.
    auto refine = [](std::span<const double> g, bool upper_capped) {
        std::vector<double> s(g.begin(), g.end());
        std::sort(s.begin(), s.end());
        std::vector<double> out;
        for (std::size_t i = 0; i < s.size(); ++i) {
            out.push_back(s[i]);
            if (i + 1 < s.size()) out.push_back(std::sqrt(s[i] * s[i + 1]));
        }
        out.push_back(s.front() * 1e-1);
        out.push_back(s.front() * 1e-2);
        if (!upper_capped) {
            out.push_back(s.back() * 1e1);
            out.push_back(s.back() * 1e2);
        }
        return out;
    };
    const auto lr = refine(lambda_grid, true);
    const auto rr = refine(r_grid, false);
    rep.c_refined = worst(lr, rr, nullptr, nullptr);
    rep.satisfied = std::isfinite(rep.c_fit) && rep.c_refined <= 1.25 * rep.c_fit;
    return rep;
}

ConditionAReport check_condition_A(const LevyModel& model) {
    ConditionAReport rep;
    const double r0 = model.r0();
    if (model.nu_star_zero()) {
        for (double r : logspace(r0, 1e3 * r0, 25)) {
            if (model.nu(r) != 0.0) {
                rep.passes = false;
                rep.diagnosis = "nu* = 0 but nu does not vanish for r >= r0";
                return rep;
            }
        }
        rep.passes = true;
        rep.diagnosis = "nu* = 0 and nu vanishes for r >= r0";
        return rep;
    }
    const bool heavy = model.family() == Family::SubordinateBM;
    auto grid = logspace(r0, 1e2 * r0, heavy ? 9 : 41);
    double inner1 = 0, inner2 = 0, outer1 = 0, outer2 = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid[i];
        const double ns = model.nu_star(r);
        const double a = std::abs(model.nu_derivative(r, 1)) / ns;
        const double b = std::abs(model.nu_derivative(r, 2)) / ns;
        if (2 * i < grid.size()) {
            inner1 = std::max(inner1, a);
            inner2 = std::max(inner2, b);
        } else {
            outer1 = std::max(outer1, a);
            outer2 = std::max(outer2, b);
        }
    }
    rep.sup_first = std::max(inner1, outer1);
    rep.sup_second = std::max(inner2, outer2);
    const bool finite = std::isfinite(rep.sup_first) && std::isfinite(rep.sup_second);
    const bool steady = outer1 <= 2.0 * inner1 + 1e-300 && outer2 <= 2.0 * inner2 + 1e-300;
    rep.passes = finite && steady;
    if (!finite)
        rep.diagnosis = "derivative ratios not finite";
    else if (!steady)
        rep.diagnosis = "derivative ratios grow with r";
    else
        rep.diagnosis = "derivative ratios bounded on r >= r0";
    return rep;
}

// ---------------------------------------------------------------- json

void to_json(nlohmann::json& j, const LevyModel& m) {
    j = nlohmann::json::object();
    j["family"] = to_string(m.family());
    j["dim"] = m.dim();
    switch (m.family()) {
        case Family::Stable: j["alpha"] = m.alpha(); break;
        case Family::TruncatedStable:
            j["alpha"] = m.alpha();
            j["cutoff"] = {m.cutoff().first, m.cutoff().second};
            break;
        case Family::SubordinateBM: {
            const auto* s = m.subordinator();
            if (s->kind == "custom") throw ModelError("custom subordinators cannot be serialized");
            j["phi"] = {{"kind", s->kind}, {"alpha", s->index}};
            break;
        }
    }
}

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ModelError(where + ": unknown key '" + it.key() + "'");
    }
}

template <class T>
T required(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ModelError(where + ": missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ModelError(where + ": key '" + key + "' has the wrong type");
    }
}

}  // namespace

LevyModel model_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ModelError("model: expected an object");
    const auto family = required<std::string>(j, "family", "model");
    const int dim = required<int>(j, "dim", "model");
    if (family == "stable") {
        reject_unknown(j, {"family", "dim", "alpha"}, "model");
        return make_stable(required<double>(j, "alpha", "model"), dim);
    }
    if (family == "truncated_stable") {
        reject_unknown(j, {"family", "dim", "alpha", "cutoff"}, "model");
        std::pair<double, double> cut{0.5, 1.0};
        if (j.contains("cutoff")) {
            auto c = required<std::vector<double>>(j, "cutoff", "model");
            if (c.size() != 2) throw ModelError("model: cutoff must be a pair");
            cut = {c[0], c[1]};
        }
        return make_truncated_stable(required<double>(j, "alpha", "model"), dim, cut);
    }
    if (family == "subordinate_bm") {
        reject_unknown(j, {"family", "dim", "phi"}, "model");
        if (!j.contains("phi") || !j["phi"].is_object()) throw ModelError("model: missing object 'phi'");
        const auto& p = j["phi"];
        reject_unknown(p, {"kind", "alpha"}, "model.phi");
        const auto kind = required<std::string>(p, "kind", "model.phi");
        const double a = required<double>(p, "alpha", "model.phi");
        if (kind == "stable") return make_subordinate_bm(stable_subordinator(a), dim);
        if (kind == "geometric_stable") return make_subordinate_bm(geometric_stable_subordinator(a), dim);
        throw ModelError("model.phi: unknown kind '" + kind + "'");
    }
    throw ModelError("model: unknown family '" + family + "'");
}

}  // namespace nld
