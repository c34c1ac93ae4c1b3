#include "nld/regularity.hpp"

#include "nld/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <variant>

#include <math.h>  // pchip calls unqualified isnan
#include <boost/math/interpolators/pchip.hpp>

namespace nld {

namespace {

constexpr double kPi = std::numbers::pi;

Point random_direction(int dim, Stream& rng) {
    Point u(dim);
    if (dim == 1) {
        u[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
        return u;
    }
    double n = 0.0;
    do {
        for (int i = 0; i < dim; ++i) u[i] = rng.normal();
        n = norm(u);
    } while (n == 0.0);
    return u * (1.0 / n);
}

std::pair<Point, Point> bounding_box(const Domain& dom) {
    const int d = dom.dim();
    Point lo(d), hi(d);
    for (int i = 0; i < d; ++i) lo[i] = std::numeric_limits<double>::infinity(), hi[i] = -lo[i];
    auto add_ball = [&](const Ball& b) {
        for (int i = 0; i < d; ++i) {
            lo[i] = std::min(lo[i], b.center[i] - b.radius);
            hi[i] = std::max(hi[i], b.center[i] + b.radius);
        }
    };
    if (const auto* b = std::get_if<Ball>(&dom.shape())) add_ball(*b);
    if (const auto* bx = std::get_if<Box>(&dom.shape())) lo = bx->lo, hi = bx->hi;
    if (const auto* u = std::get_if<BallUnion>(&dom.shape()))
        for (const Ball& b : u->balls) add_ball(b);
    return {lo, hi};
}

Point uniform_in(const Domain& dom, const std::pair<Point, Point>& box, Stream& rng) {
    Point p(dom.dim());
    for (int tries = 0; tries < 100000; ++tries) {
        for (int i = 0; i < p.dim; ++i) p[i] = box.first[i] + rng.uniform() * (box.second[i] - box.first[i]);
        if (dom.contains(p)) return p;
    }
    throw DomainError("uniform_in: rejection sampling found no interior point");
}

double increment(const FieldFunction& f, bool use_gradient, const Point& x, const Point& y) {
    if (!use_gradient) return std::abs(f(x) - f(y));
    return distance(f.grad(x), f.grad(y));
}

}  // namespace

std::string to_string(DiniBranch b) {
    return b == DiniBranch::FieldModulus ? "field_modulus" : "gradient_modulus";
}

std::string to_string(DiniVerdict v) {
    switch (v) {
        case DiniVerdict::Finite:
            return "finite";
        case DiniVerdict::Divergent:
            return "divergent";
        case DiniVerdict::Inconclusive:
            return "inconclusive";
    }
    return "?";
}

void to_json(nlohmann::json& j, const DiniReport& r) {
    j = {{"branch", to_string(r.branch)},
         {"verdict", to_string(r.verdict)},
         {"value", r.value},
         {"rate_hint", r.rate_hint},
         {"log_exponent", r.log_exponent},
         {"upper", r.upper},
         {"panels", r.panel_sums.size()},
         {"note", r.note}};
}

DiniReport dini_integral(const std::function<double(double)>& s_eff, const ModulusSpec& omega, double upper) {
    if (!(upper > 0.0)) throw std::invalid_argument("dini_integral: upper limit must be positive");
    DiniReport rep;
    rep.upper = upper;
    bool negative = false;
    auto integrand = [&](double t) {
        const double v = s_eff(t) * omega(t);
        if (v < 0.0) negative = true;
        return v;
    };
    for (int k = 0; k <= 160; ++k) {
        const double t = upper * std::exp2(-0.25 * k);
        rep.t.push_back(t);
        rep.integrand.push_back(integrand(t));
    }
    if (negative) throw std::invalid_argument("dini_integral: integrand changes sign (oscillatory integrands are not supported)");

    quad::PanelOptions po;
    po.max_panels = 300;
    const auto res = quad::integrate_to_zero(integrand, upper, po);
    if (negative) throw std::invalid_argument("dini_integral: integrand changes sign (oscillatory integrands are not supported)");
    rep.panel_sums = res.panel_sums;
    rep.panel_edges = res.panel_edges;
    rep.value = res.value;
    rep.rate_hint = res.growth_rate;
    rep.log_exponent = res.log_exponent;
    rep.note = res.note;

    switch (res.verdict) {
        case quad::Verdict::Finite:
            rep.verdict = DiniVerdict::Finite;
            break;
        case quad::Verdict::Inconclusive:
            rep.verdict = DiniVerdict::Inconclusive;
            break;
        case quad::Verdict::Divergent: {
            // certification: the partial integrals must keep growing over the last 8 panels
            const auto& s = res.panel_sums;
            bool growing = s.size() >= 8;
            for (std::size_t i = s.size() >= 8 ? s.size() - 8 : 0; i < s.size(); ++i)
                growing = growing && s[i] >= 0.0;
            const bool tail_ok = res.growth_rate > po.growth_tol || res.log_exponent >= -1.0 - po.log_tol ||
                                 !std::isfinite(res.value);
            rep.verdict = growing && tail_ok ? DiniVerdict::Divergent : DiniVerdict::Inconclusive;
            if (rep.verdict == DiniVerdict::Inconclusive) rep.note += " (divergence not certified)";
            break;
        }
    }
    return rep;
}

DiniBranch select_branch(const KernelProfile& profile) {
    return profile.branch == GradBranch::GradIntegrable ? DiniBranch::FieldModulus : DiniBranch::GradientModulus;
}

std::function<double(double)> effective_weight(const KernelProfile& profile) {
    const auto S = profile.S;
    const int d = profile.dim;
    return [S, d](double t) { return S(t) * std::pow(t, d - 1); };
}

ModulusSpec estimate_modulus(const FieldFunction& field, const Domain& dom, std::span<const double> t_grid,
                             bool use_gradient, const ModulusOptions& opts) {
    if (use_gradient && !field.grad) throw FieldError("estimate_modulus: gradient requested but the field has none");
    if (t_grid.empty()) throw std::invalid_argument("estimate_modulus: empty grid");
    std::vector<double> ts(t_grid.begin(), t_grid.end());
    std::sort(ts.begin(), ts.end());
    if (!(ts.front() > 0.0)) throw std::invalid_argument("estimate_modulus: grid must be positive");
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    const auto box = bounding_box(dom);
    const int d = dom.dim();
    std::vector<double> w(ts.size(), 0.0);
    double running = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double t = std::min(ts[k], dom.diameter());
        Stream rng(opts.seed, k);
        double best = 0.0;
        Point bx, by;
        for (long i = 0; i < opts.pairs_per_scale; ++i) {
            const Point x = uniform_in(dom, box, rng);
            const double s = t * (0.5 + 0.5 * rng.uniform());
            const Point y = x + random_direction(d, rng) * s;
            if (!dom.contains(y)) continue;
            const double v = increment(field, use_gradient, x, y);
            if (v > best) best = v, bx = x, by = y;
        }
        if (best > 0.0) {
            // local hill climbing around the best pair
            double h = 0.25 * t;
            for (int it = 0; it < opts.refine_iterations; ++it, h *= 0.9) {
                const Point x = bx + random_direction(d, rng) * (h * rng.uniform());
                Point dir = by - bx + random_direction(d, rng) * (h * rng.uniform());
                const double n = norm(dir);
                if (n == 0.0) continue;
                const Point y = x + dir * (std::min(t, n) / n);
                if (!dom.contains(x) || !dom.contains(y)) continue;
                const double v = increment(field, use_gradient, x, y);
                if (v > best) best = v, bx = x, by = y;
            }
        }
        running = std::max(running, best);
        w[k] = running;
    }
    ModulusSpec m = ModulusSpec::tabulated(ts, w);
    m.cap = dom.diameter();
    return m;
}

void to_json(nlohmann::json& j, const RegularityReport& r) {
    j = {{"verdict", r.verdict},
         {"applies", r.applies},
         {"reason", r.reason},
         {"condition_a", r.condition_a},
         {"majorant_growth", r.growth_condition},
         {"kernel_growth", {{"passes", r.growth.passes}, {"kappa", r.growth.kappa}, {"diagnosis", r.growth.diagnosis}}},
         {"branch", to_string(r.branch)},
         {"modulus", r.modulus},
         {"modulus_declared", r.modulus_declared},
         {"dini", r.dini}};
}

RegularityReport classify_regularity(const LevyModel& model, const KernelProfile& profile, const FieldFunction& f,
                                     const Domain& dom) {
    if (model.dim() != dom.dim() || profile.dim != dom.dim())
        throw DomainError("classify_regularity: model, profile and domain dimensions differ");
    RegularityReport rep;
    rep.condition_a = check_condition_A(model).passes;
    rep.growth_condition = model.nu_star_zero() || std::isfinite(model.growth_constant());

    std::vector<double> grid;
    for (double r = 0.9 * std::min(1.0, profile.r0); r > 1e-3; r *= 0.7) grid.push_back(r);
    rep.growth = verify_growth_G(profile, grid);
    rep.branch = select_branch(profile);

    std::vector<std::string> problems;
    if (!rep.condition_a) problems.push_back("smoothness condition on the Levy density fails");
    if (!rep.growth_condition) problems.push_back("majorant tail comparison fails");
    if (!rep.growth.passes) problems.push_back("kernel growth bound not established: " + rep.growth.diagnosis);

    std::optional<ModulusSpec> omega;
    const bool grad_branch = rep.branch == DiniBranch::GradientModulus;
    const auto& declared = grad_branch ? f.declared_gradient_modulus : f.declared_modulus;
    if (declared) {
        omega = declared;
        rep.modulus_declared = true;
    } else if (!grad_branch || f.grad) {
        std::vector<double> ts;
        for (int k = 1; k <= 20; ++k) ts.push_back(dom.diameter() * std::exp2(-k));
        omega = estimate_modulus(f, dom, ts, grad_branch);
    }
    if (!omega) {
        problems.push_back("gradient of f unavailable for the gradient-modulus branch");
    } else {
        rep.modulus = omega->describe();
        rep.dini = dini_integral(effective_weight(profile), *omega, 0.5);
        rep.dini.branch = rep.branch;
        if (rep.dini.verdict == DiniVerdict::Divergent) problems.push_back("Dini integral divergent");
        if (rep.dini.verdict == DiniVerdict::Inconclusive) problems.push_back("Dini integral inconclusive");
    }
    rep.applies = problems.empty();
    rep.verdict = rep.applies ? "applies" : "inconclusive";
    std::ostringstream os;
    for (std::size_t i = 0; i < problems.size(); ++i) os << (i ? "; " : "") << problems[i];
    rep.reason = rep.applies ? "all hypotheses verified (up to multiplicative constants)" : os.str();
    return rep;
}

// ---------------------------------------------------------------------------------
// Kato curve

namespace {

/// rho -> p_t(rho). Stable models use p_t(rho) = t^{-d/alpha} p_1(rho t^{-1/alpha}) with
/// p_1 tabulated once in log-log; other models go through Fourier inversion directly.
class RadialDensity {
public:
    explicit RadialDensity(const LevyModel& model) : model_(model) {
        if (model.family() != Family::Stable) return;
        alpha_ = model.alpha();
        d_ = model.dim();
        std::vector<double> xs, ys;
        for (int i = 0; i <= 20 * 8; ++i) {
            const double x = std::log(1e-4) + i * std::log(10.0) / 20.0;
            xs.push_back(x);
            ys.push_back(std::log(transition_density_radial(model, 1.0, std::exp(x))));
        }
        lo_ = xs.front(), hi_ = xs.back(), y0_ = ys.front(), yn_ = ys.back();
        p1_ = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(xs), std::move(ys));
    }

    double operator()(double t, double rho) const {
        if (!p1_) return transition_density_radial(model_, t, rho);
        const double s = rho * std::pow(t, -1.0 / alpha_);
        const double x = std::log(s);
        double lp;
        if (x <= lo_) lp = y0_;
        else if (x >= hi_) lp = yn_ - (d_ + alpha_) * (x - hi_);
        else lp = (*p1_)(x);
        return std::pow(t, -d_ / alpha_) * std::exp(lp);
    }

private:
    const LevyModel& model_;
    double alpha_ = 1.0;
    int d_ = 1;
    double lo_ = 0.0, hi_ = 0.0, y0_ = 0.0, yn_ = 0.0;
    std::shared_ptr<boost::math::interpolators::pchip<std::vector<double>>> p1_;
};

/// rho -> \int_0^r p_t(rho) dt on a log grid, interpolated in log-log.
class TimeKernel {
public:
    TimeKernel(const LevyModel& model, const RadialDensity& density, double r, double rho_min, double rho_max)
        : lo_(std::log(rho_min)) {
        const int per_decade = 12;
        const int n = std::max(8, int(std::ceil(per_decade * std::log10(rho_max / rho_min)))) + 1;
        step_ = (std::log(rho_max) - lo_) / (n - 1);
        std::vector<double> xs, ys;
        quad::Options o;
        o.abs_tol = 0.0;
        o.rel_tol = 1e-8;
        for (int i = 0; i < n; ++i) {
            const double rho = std::exp(lo_ + i * step_);
            auto p = [&](double t) { return t > 0.0 ? density(t, rho) : 0.0; };
            std::vector<double> breaks;
            for (double b = std::min(r, std::pow(rho, model.alpha())) * 0.5; b > 1e-12 * r; b *= 0.125)
                breaks.push_back(b);
            for (double b = std::pow(rho, model.alpha()); b < r; b *= 4.0) breaks.push_back(b);
            std::sort(breaks.begin(), breaks.end());
            breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [&](double b) { return b <= 0.0 || b >= r; }),
                         breaks.end());
            const double v = quad::integrate(p, 0.0, r, breaks, o).value;
            xs.push_back(lo_ + i * step_);
            ys.push_back(std::log(std::max(v, 1e-300)));
        }
        hi_ = xs.back();
        slope_lo_ = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        y0_ = ys.front();
        yn_ = ys.back();
        slope_hi_ = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
        spline_ = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(xs), std::move(ys));
    }

    double operator()(double rho) const {
        const double x = std::log(rho);
        if (x <= lo_) return std::exp(y0_ + slope_lo_ * (x - lo_));
        if (x >= hi_) return std::exp(yn_ + slope_hi_ * (x - hi_));
        return std::exp((*spline_)(x));
    }

private:
    double lo_, hi_ = 0.0, step_ = 0.0, slope_lo_ = 0.0, slope_hi_ = 0.0, y0_ = 0.0, yn_ = 0.0;
    std::shared_ptr<boost::math::interpolators::pchip<std::vector<double>>> spline_;
};

std::vector<std::pair<double, double>> intervals_1d(const Domain& dom) {
    std::vector<std::pair<double, double>> iv;
    if (const auto* b = std::get_if<Ball>(&dom.shape())) iv.push_back({b->center[0] - b->radius, b->center[0] + b->radius});
    if (const auto* bx = std::get_if<Box>(&dom.shape())) iv.push_back({bx->lo[0], bx->hi[0]});
    if (const auto* u = std::get_if<BallUnion>(&dom.shape()))
        for (const Ball& b : u->balls) iv.push_back({b.center[0] - b.radius, b.center[0] + b.radius});
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& i : iv) {
        if (!merged.empty() && i.first <= merged.back().second) merged.back().second = std::max(merged.back().second, i.second);
        else merged.push_back(i);
    }
    return merged;
}

}  // namespace

KatoCurve kato_curve(const LevyModel& model, const FieldFunction& f, const Domain& dom, std::span<const double> r_grid,
                     std::span<const Point> x_grid) {
    const int d = dom.dim();
    if (model.dim() != d) throw DomainError("kato_curve: model and domain dimensions differ");
    if (d > 2) throw DomainError("kato_curve: spatial quadrature is implemented for d <= 2");
    if (x_grid.empty() || r_grid.empty()) throw std::invalid_argument("kato_curve: empty grid");
    KatoCurve curve;
    std::vector<double> rs(r_grid.begin(), r_grid.end());
    std::sort(rs.begin(), rs.end(), std::greater<>());
    double reach = dom.diameter();
    for (const Point& x : x_grid) reach = std::max(reach, dom.diameter() + dom.dist_to_boundary(x) + norm(x));
    const double rho_min = 1e-7 * dom.diameter(), rho_max = 2.0 * reach;
    auto absf = [&](const Point& y) { return dom.contains(y) ? std::abs(f(y)) : 0.0; };

    quad::Options o;
    o.abs_tol = 1e-13;
    o.rel_tol = 1e-7;
    o.max_intervals = 2000;
    const RadialDensity density(model);
    for (double r : rs) {
        if (!(r > 0.0)) throw std::invalid_argument("kato_curve: radii must be positive");
        if (f.zero) {
            curve.r.push_back(r);
            curve.value.push_back(0.0);
            continue;
        }
        const TimeKernel K(model, density, r, rho_min, rho_max);
        double worst = 0.0;
        for (const Point& x : x_grid) {
            double v = 0.0;
            if (d == 1) {
                for (const auto& [a, b] : intervals_1d(dom)) {
                    std::vector<double> breaks;
                    for (double c : {x[0], 0.0})
                        if (c > a && c < b) breaks.push_back(c);
                    std::sort(breaks.begin(), breaks.end());
                    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
                    auto g = [&](double y) {
                        const double rho = std::abs(y - x[0]);
                        return rho > 0.0 ? K(rho) * absf(Point{y}) : 0.0;
                    };
                    v += quad::integrate(g, a, b, breaks, o).value;
                }
            } else {
                auto radial = [&](double rho) {
                    if (rho <= 0.0) return 0.0;
                    auto ang = [&](double th) { return absf(x + Point{std::cos(th), std::sin(th)} * rho); };
                    quad::Options oa = o;
                    oa.max_intervals = 400;
                    return K(rho) * rho * quad::integrate(ang, 0.0, 2.0 * kPi, oa).value;
                };
                std::vector<double> breaks;
                for (double b = reach; b > 1e-6 * reach; b *= 0.25) breaks.push_back(b);
                std::sort(breaks.begin(), breaks.end());
                v = quad::integrate(radial, 0.0, 2.0 * reach, breaks, o).value;
            }
            worst = std::max(worst, v);
        }
        curve.r.push_back(r);
        curve.value.push_back(worst);
    }
    curve.decreasing = true;
    for (std::size_t i = 1; i < curve.value.size(); ++i)
        curve.decreasing = curve.decreasing && curve.value[i] <= curve.value[i - 1] * (1.0 + 1e-9);
    const std::size_t n = curve.r.size();
    const bool all_zero = std::all_of(curve.value.begin(), curve.value.end(), [](double v) { return v == 0.0; });
    if (n >= 2 && !all_zero) {
        const std::size_t m = std::min<std::size_t>(3, n);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = n - m; i < n; ++i) {
            const double lx = std::log(curve.r[i]), ly = std::log(std::max(curve.value[i], 1e-300));
            sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
        }
        curve.tail_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    curve.consistent = all_zero || (curve.decreasing && curve.tail_slope > 0.05);
    return curve;
}

}  // namespace nld
