#include "nld/dirichlet.hpp"

#include "nld/potential_kernels.hpp"
#include "nld/quadrature.hpp"
#include "nld/special.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <math.h>  // pchip calls unqualified isnan
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace nld {

namespace {

constexpr double kPi = std::numbers::pi;

void check_alpha_dim(double alpha, int dim) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw ModelError("alpha must lie in (0, 2)");
    if (dim < 1 || dim > kMaxDim) throw ModelError("dimension out of range");
}

double stable_alpha(const LevyModel& model) {
    if (model.family() != Family::Stable)
        throw ModelError("exit sampling is available for stable models only (got " + model.label() + ")");
    return model.alpha();
}

void check_point(const Point& x, int dim, const char* what) {
    if (x.dim != dim) throw DomainError(std::string(what) + ": dimension mismatch");
}

double poisson_constant(double alpha, int dim) {
    return std::tgamma(0.5 * dim) * std::sin(0.5 * kPi * alpha) * std::pow(kPi, -0.5 * dim - 1.0);
}

Point random_direction(int dim, Stream& rng) {
    Point u(dim);
    if (dim == 1) {
        u[0] = (rng.next_u32() & 1u) ? 1.0 : -1.0;
        return u;
    }
    double n = 0.0;
    do {
        for (int i = 0; i < dim; ++i) u[i] = rng.normal();
        n = norm(u);
    } while (n == 0.0);
    return u * (1.0 / n);
}

double band_width(const Domain& dom, const McConfig& cfg) {
    return cfg.eps_wos < 0.0 ? 1e-6 * dom.diameter() : cfg.eps_wos;
}

[[noreturn]] void step_cap(const char* what, long cap, const Point& p, double delta) {
    std::ostringstream os;
    os << what << ": walk exceeded the step cap of " << cap << " (last point";
    for (int i = 0; i < p.dim; ++i) os << (i ? ", " : " (") << p[i];
    os << "), distance to boundary " << delta << ")";
    throw McError(os.str());
}

}  // namespace

double poisson_kernel_ball(double alpha, int dim, double r, const Point& x, const Point& z) {
    check_alpha_dim(alpha, dim);
    check_point(x, dim, "poisson_kernel_ball");
    check_point(z, dim, "poisson_kernel_ball");
    const double x2 = norm2(x), z2 = norm2(z), r2 = r * r;
    if (!(r > 0.0) || !(x2 < r2)) throw DomainError("poisson_kernel_ball: x must lie inside the ball");
    if (!(z2 > r2)) throw DomainError("poisson_kernel_ball: z must lie outside the closed ball");
    return poisson_constant(alpha, dim) * std::pow((r2 - x2) / (z2 - r2), 0.5 * alpha) *
           std::pow(distance(x, z), -double(dim));
}

double exit_time_ball_mean(double alpha, int dim, double r, const Point& x) {
    check_alpha_dim(alpha, dim);
    const double x2 = norm2(x), r2 = r * r;
    if (!(x2 < r2)) return 0.0;
    return std::tgamma(0.5 * dim) * std::pow(r2 - x2, 0.5 * alpha) /
           (std::pow(2.0, alpha) * std::tgamma(1.0 + 0.5 * alpha) * std::tgamma(0.5 * (dim + alpha)));
}

Point sample_exit_ball_centred(double alpha, int dim, double r, Stream& rng) {
    const double a = 0.5 * alpha;
    const double u = rng.uniform();
    // invert on the side that keeps the small quantity accurate: V near 0 or 1 - V near 0
    const double rad = u < 0.5 ? r / std::sqrt(boost::math::ibeta_inv(a, 1.0 - a, u))
                               : r / std::sqrt(1.0 - boost::math::ibeta_inv(1.0 - a, a, 1.0 - u));
    Point z = random_direction(dim, rng) * rad;
    while (!(norm(z) > r)) z *= 1.0 + 0x1.0p-52;
    return z;
}

double exit_acceptance_rate(double alpha, int dim, double r, const Point& x) {
    const double xn = norm(x);
    if (!(xn < r)) throw DomainError("exit sampler: start point must lie inside the ball");
    return std::pow(r * r / ((r - xn) * (r + xn)), 0.5 * alpha) * std::pow((r - xn) / r, dim);
}

Point sample_exit_ball(double alpha, int dim, double r, const Point& x, Stream& rng) {
    check_alpha_dim(alpha, dim);
    check_point(x, dim, "sample_exit_ball");
    const double xn = norm(x);
    if (xn == 0.0) return sample_exit_ball_centred(alpha, dim, r, rng);
    const double rate = exit_acceptance_rate(alpha, dim, r, x);
    if (rate < kExitAcceptanceFloor) {
        std::ostringstream os;
        os << "sample_exit_ball: acceptance rate " << rate << " below floor " << kExitAcceptanceFloor
           << " at |x|/r = " << xn / r;
        throw TuningError(os.str());
    }
    const double shrink = (r - xn) / r;
    for (long tries = 0; tries < 100000000L; ++tries) {
        const Point z = sample_exit_ball_centred(alpha, dim, r, rng);
        const double ratio = std::pow(norm(z) * shrink / distance(x, z), dim);
        if (rng.uniform() < ratio) return z;
    }
    throw TuningError("sample_exit_ball: rejection loop did not terminate");
}

Point sample_exit_ball_wos(double alpha, int dim, double r, const Point& x, Stream& rng, double eps,
                           long max_steps) {
    check_alpha_dim(alpha, dim);
    check_point(x, dim, "sample_exit_ball_wos");
    Point p = x;
    for (long step = 0; step < max_steps; ++step) {
        const double pn = norm(p);
        const double delta = r - pn;
        if (delta <= 0.0) return p;
        if (delta < eps * r) {
            Point dir = pn > 0.0 ? p * (1.0 / pn) : Point::unit(dim, dim - 1);
            return dir * (r * (1.0 + 1e-12));
        }
        p += sample_exit_ball_centred(alpha, dim, delta, rng);
    }
    step_cap("sample_exit_ball_wos", max_steps, p, r - norm(p));
}

namespace {

// radial exit density at s = r + gap, with the gap passed separately for accuracy at the sphere
double radius_density_gap(double alpha, int dim, double r, double xn, double gap) {
    const double s = r + gap;
    const double pre = poisson_constant(alpha, dim) * std::pow((r * r - xn * xn) / (gap * (s + r)), 0.5 * alpha);
    if (xn == 0.0) return pre * sphere_area(dim) / s;
    if (dim == 1) return pre * (1.0 / std::abs(s - xn) + 1.0 / (s + xn));
    if (dim == 2) return pre * s * 2.0 * kPi / ((s - xn) * (s + xn));
    throw DomainError("exit radius density: off-centre start needs dim <= 2");
}

}  // namespace

double exit_radius_density(double alpha, int dim, double r, double xn, double s) {
    if (!(s > r)) return 0.0;
    return radius_density_gap(alpha, dim, r, xn, s - r);
}

std::vector<double> exit_radius_cdf(double alpha, int dim, double r, double xn,
                                    std::span<const double> radii) {
    if (xn > 0.0 && dim > 2) throw DomainError("exit_radius_cdf: off-centre start needs dim <= 2");
    // s = r + w^k flattens the (s - r)^{-alpha/2} edge
    const double k = 2.0 / (2.0 - alpha);
    auto integrand = [&](double w) {
        if (w <= 0.0) return 0.0;
        const double gap = std::pow(w, k);
        return radius_density_gap(alpha, dim, r, xn, gap) * k * std::pow(w, k - 1.0);
    };
    std::vector<double> out;
    out.reserve(radii.size());
    double acc = 0.0, w_prev = 0.0;
    quad::Options opts;
    opts.abs_tol = 1e-15;
    opts.rel_tol = 1e-12;
    for (double rho : radii) {
        if (rho <= r) {
            out.push_back(0.0);
            continue;
        }
        const double w = std::pow(rho - r, 1.0 / k);
        while (w > w_prev) {
            // geometric pieces keep long algebraic tails resolved
            const double hi = w_prev > 0.0 ? std::min(w, 2.0 * w_prev) : std::min(w, 1.0);
            acc += quad::integrate(integrand, w_prev, hi, opts).value;
            w_prev = hi;
        }
        out.push_back(std::min(acc, 1.0));
    }
    return out;
}

// ---------------------------------------------------------------------------------
// occupation law of the unit ball

struct OccupationLaw::Inverse {
    boost::math::interpolators::pchip<std::vector<double>> spline;
    Inverse(std::vector<double> c, std::vector<double> x) : spline(std::move(c), std::move(x)) {}
};

OccupationLaw::OccupationLaw(double alpha, int dim) : alpha_(alpha), dim_(dim) {
    kernel_ = potential_profile(make_stable(alpha, dim)).g;
    mean_exit_ = exit_time_ball_mean(alpha, dim, 1.0, Point(dim));
    power_ = alpha < dim ? 1.0 / alpha : 2.0;

    constexpr int kIntervals = 400;
    boost::math::quadrature::gauss<double, 10> gl;
    const double area = sphere_area(dim);
    auto density_x = [&](double x) {
        const double rho = std::pow(x, power_);
        const double drho = power_ * std::pow(x, power_ - 1.0);
        return green_at(rho) * area * std::pow(rho, dim - 1) * drho;
    };
    x_.resize(kIntervals + 1);
    cdf_.assign(kIntervals + 1, 0.0);
    for (int i = 0; i <= kIntervals; ++i) x_[i] = double(i) / kIntervals;
    for (int i = 0; i < kIntervals; ++i) cdf_[i + 1] = cdf_[i] + gl.integrate(density_x, x_[i], x_[i + 1]);
    mass_ = cdf_.back();
    if (!(mass_ > 0.0) || std::abs(mass_ / mean_exit_ - 1.0) > 1e-4) {
        std::ostringstream os;
        os << "occupation law: tabulated mass " << mass_ << " disagrees with E tau = " << mean_exit_;
        throw quad::QuadratureError(os.str(), std::abs(mass_ / mean_exit_ - 1.0));
    }
    for (double& c : cdf_) c /= mass_;
    cdf_.back() = 1.0;
    inverse_ = std::make_shared<Inverse>(cdf_, x_);
}

double OccupationLaw::green_at(double rho) const {
    // G(rho) - E^0 G(|rho e - Z|); r^2/|Z|^2 = V ~ Beta(a, 1 - a)
    const auto& G = kernel_;
    if (!(rho > 0.0 && rho < 1.0)) return 0.0;

    const double a = 0.5 * alpha_;
    const double beta_norm = std::sin(kPi * a) / kPi;
    const int d = dim_;
    const double ang_norm = d >= 2 ? 1.0 / boost::math::beta(0.5, 0.5 * (d - 1)) : 0.0;
    auto angular_mean = [&](double s, double s_minus_1) {
        const double gap = s_minus_1 + (1.0 - rho);  // s - rho, accurate near the sphere
        if (d == 1) return 0.5 * (G(gap) + G(s + rho));
        auto f = [&](double th) {
            const double sh = std::sin(0.5 * th);
            const double dist = std::sqrt(gap * gap + 4.0 * rho * s * sh * sh);
            return G(dist) * std::pow(std::sin(th), d - 2);
        };
        quad::Options o;
        o.abs_tol = 1e-14;
        o.rel_tol = 1e-10;
        return ang_norm * quad::integrate(f, 0.0, kPi, o).value;
    };
    auto outer = [&](double v, double xc) {
        // tanh_sinh passes the signed distance to the nearer endpoint
        const double vc = xc > 0.0 ? xc : 1.0 - v;
        if (v <= 0.0 || vc <= 0.0) return 0.0;
        const double sq = std::sqrt(v);
        const double s = 1.0 / sq;
        const double s_minus_1 = vc / (sq * (1.0 + sq));
        return beta_norm * std::pow(v, a - 1.0) * std::pow(vc, -a) * angular_mean(s, s_minus_1);
    };
    static thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
    const double expectation = ts.integrate(outer, 0.0, 1.0, 1e-10);
    return G(rho) - expectation;
}

const OccupationLaw& OccupationLaw::get(double alpha, int dim) {
    check_alpha_dim(alpha, dim);
    static std::mutex mu;
    static std::map<std::pair<double, int>, std::unique_ptr<OccupationLaw>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{alpha, dim}];
    if (!slot) slot.reset(new OccupationLaw(alpha, dim));
    return *slot;
}

double OccupationLaw::cdf(double rho) const {
    if (rho <= 0.0) return 0.0;
    if (rho >= 1.0) return 1.0;
    const double x = std::pow(rho, 1.0 / power_);
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = std::min<std::size_t>(std::size_t(it - x_.begin()), x_.size() - 1);
    // linear in x between nodes; nodes are exact
    const double u = (x - x_[i - 1]) / (x_[i] - x_[i - 1]);
    return cdf_[i - 1] + u * (cdf_[i] - cdf_[i - 1]);
}

Point OccupationLaw::sample(Stream& rng) const {
    const double u = rng.uniform();
    const double x = std::clamp(inverse_->spline(u), 0.0, 1.0);
    return random_direction(dim_, rng) * std::pow(x, power_);
}

// ---------------------------------------------------------------------------------
// stable increments

double positive_stable(double beta, Stream& rng) {
    const double u = kPi * rng.uniform();
    const double e = rng.exponential();
    const double a = std::pow(std::sin(beta * u) / std::sin(u), 1.0 / (1.0 - beta)) *
                     std::sin((1.0 - beta) * u) / std::sin(beta * u);
    return std::pow(a / e, (1.0 - beta) / beta);
}

Point stable_increment(double alpha, int dim, double dt, Stream& rng) {
    const double beta = 0.5 * alpha;
    const double s = std::pow(dt, 1.0 / beta) * positive_stable(beta, rng);
    const double scale = std::sqrt(2.0 * s);
    Point z(dim);
    for (int i = 0; i < dim; ++i) z[i] = scale * rng.normal();
    return z;
}

// ---------------------------------------------------------------------------------
// walks

WalkSample wos_walk(const LevyModel& model, const Domain& dom, const FieldFunction* f, const Point& x,
                    const McConfig& cfg, Stream& rng) {
    const double alpha = stable_alpha(model);
    const int d = dom.dim();
    const double eps = band_width(dom, cfg);
    const OccupationLaw* occ = (f && !f->zero) ? &OccupationLaw::get(alpha, d) : nullptr;
    WalkSample w;
    Point p = x;
    for (;;) {
        const double delta = dom.dist_to_boundary(p);
        if (delta <= 0.0) break;
        if (delta < eps) {
            p = dom.nearest_exterior(p);
            break;
        }
        if (++w.steps > cfg.max_steps) step_cap("walk-on-spheres", cfg.max_steps, p, delta);
        if (occ) {
            const Point y = p + occ->sample(rng) * delta;
            w.green += std::pow(delta, alpha) * occ->mean_exit_time() * f->draw(y, rng);
        }
        p += sample_exit_ball_centred(alpha, d, delta, rng);
    }
    w.exit = p;
    return w;
}

WalkSample path_walk(const LevyModel& model, const Domain& dom, const FieldFunction* f, const Point& x,
                     const McConfig& cfg, Stream& rng) {
    const double alpha = stable_alpha(model);
    const int d = dom.dim();
    const double eps = band_width(dom, cfg);
    WalkSample w;
    Point p = x;
    double delta = dom.dist_to_boundary(p);
    while (delta > 0.0) {
        if (delta < eps) {
            p = dom.nearest_exterior(p);
            break;
        }
        if (++w.steps > cfg.max_steps) step_cap("path simulation", cfg.max_steps, p, delta);
        const double dt = cfg.path_eta * std::pow(delta, alpha);
        const double fp = f ? f->draw(p, rng) : 0.0;
        const Point q = p + stable_increment(alpha, d, dt, rng);
        const double dq = dom.dist_to_boundary(q);
        // exit inside the step: count half of it
        w.green += (dq > 0.0 ? 1.0 : 0.5) * dt * fp;
        p = q;
        delta = dq;
    }
    w.exit = p;
    return w;
}

namespace {

void check_inputs(const LevyModel& model, const Domain& dom, const Point& x) {
    stable_alpha(model);
    if (model.dim() != dom.dim()) throw DomainError("model and domain dimensions differ");
    check_point(x, dom.dim(), "start point");
}

WalkSample run_walk(const LevyModel& model, const Domain& dom, const FieldFunction* f, const Point& x,
                    const McConfig& cfg, Stream& rng) {
    return cfg.green == GreenMethod::Path ? path_walk(model, dom, f, x, cfg, rng)
                                          : wos_walk(model, dom, f, x, cfg, rng);
}

void warm_tables(const LevyModel& model, const FieldFunction& f, const McConfig& cfg) {
    if (!f.zero && cfg.green == GreenMethod::WalkOnSpheres) OccupationLaw::get(model.alpha(), model.dim());
}

}  // namespace

McEstimate estimate_harmonic_measure(const LevyModel& model, const Domain& dom, const FieldFunction& g,
                                     const Point& x, const McConfig& cfg) {
    check_inputs(model, dom, x);
    return run_walks(cfg.n_samples, cfg.seed, cfg.threads, [&](long, Stream& s) {
        const WalkSample w = wos_walk(model, dom, nullptr, x, cfg, s);
        return g.draw(w.exit, s);
    });
}

McEstimate estimate_green_operator(const LevyModel& model, const Domain& dom, const FieldFunction& f,
                                   const Point& x, const McConfig& cfg) {
    check_inputs(model, dom, x);
    if (f.zero) return McEstimate{0.0, 0.0, cfg.n_samples, cfg.seed};
    warm_tables(model, f, cfg);
    return run_walks(cfg.n_samples, cfg.seed, cfg.threads,
                     [&](long, Stream& s) { return run_walk(model, dom, &f, x, cfg, s).green; });
}

McEstimate estimate_exit_time(const LevyModel& model, const Domain& dom, const Point& x, const McConfig& cfg) {
    return estimate_green_operator(model, dom, constant_field(1.0), x, cfg);
}

McEstimate green_function_ball(const LevyModel& model, double r, const Point& x, const Point& y,
                               const McConfig& cfg) {
    const double alpha = stable_alpha(model);
    const int d = model.dim();
    check_point(x, d, "green_function_ball");
    check_point(y, d, "green_function_ball");
    if (!(r > 0.0)) throw DomainError("green_function_ball: radius must be positive");
    if (!(norm(x) < r) || !(norm(y) < r)) throw DomainError("green_function_ball: points must lie inside the ball");
    const double sep = distance(x, y);
    if (sep == 0.0) throw SingularInputError("green_function_ball: x = y is the diagonal singularity");
    const KernelProfile prof = potential_profile(model);
    const double direct = prof.g(sep);
    const bool rejection = exit_acceptance_rate(alpha, d, r, x) >= kExitAcceptanceFloor;
    return run_walks(cfg.n_samples, cfg.seed, cfg.threads, [&](long, Stream& s) {
        const Point z = rejection ? sample_exit_ball(alpha, d, r, x, s)
                                  : sample_exit_ball_wos(alpha, d, r, x, s, 1e-9, cfg.max_steps);
        return direct - prof.g(distance(y, z));
    });
}

McEstimate solve_dirichlet(const LevyModel& model, const Domain& dom, const FieldFunction& f,
                           const FieldFunction& g, const Point& x, const McConfig& cfg) {
    check_inputs(model, dom, x);
    warm_tables(model, f, cfg);
    return run_walks(cfg.n_samples, cfg.seed, cfg.threads, [&](long, Stream& s) {
        const WalkSample w = run_walk(model, dom, &f, x, cfg, s);
        return -w.green + (g.zero ? 0.0 : g.draw(w.exit, s));
    });
}

McEstimate mean_value_residual(const LevyModel& model, const FieldFunction& u, const Point& x, double rho,
                               const McConfig& cfg) {
    const double alpha = stable_alpha(model);
    const int d = model.dim();
    check_point(x, d, "mean_value_residual");
    if (!(rho > 0.0)) throw DomainError("mean_value_residual: radius must be positive");
    return run_walks(cfg.n_samples, cfg.seed, cfg.threads, [&](long, Stream& s) {
        const Point z = x + sample_exit_ball_centred(alpha, d, rho, s);
        if (!u.random()) return u(x) - u(z);
        Stream s1 = s.split();
        Stream s2 = s.split();
        return u.draw(x, s1) - u.draw(z, s2);
    });
}

FieldFunction solution_field(const LevyModel& model, const Domain& dom, const FieldFunction& f,
                             const FieldFunction& g, const McConfig& cfg) {
    stable_alpha(model);
    if (model.dim() != dom.dim()) throw DomainError("model and domain dimensions differ");
    warm_tables(model, f, cfg);
    FieldFunction u;
    u.name = "solution on " + dom.describe();
    u.eval = [=](const Point& x) {
        if (!dom.contains(x)) return g(x);
        return solve_dirichlet(model, dom, f, g, x, cfg).value;
    };
    u.sample = [=](const Point& x, Stream& s) {
        if (!dom.contains(x)) return g.draw(x, s);
        Stream inner = s.split();
        const WalkSample w = run_walk(model, dom, &f, x, cfg, inner);
        return -w.green + (g.zero ? 0.0 : g.draw(w.exit, inner));
    };
    return u;
}

}  // namespace nld
