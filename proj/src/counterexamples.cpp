#include "nld/counterexamples.hpp"

#include "nld/levy_models.hpp"
#include "nld/special.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nld {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("counterexample: alpha must lie in (0, 2)");
}

quad::Result checked(const quad::Result& r, const char* where, double h) {
    if (!r.converged) {
        std::ostringstream os;
        os << where << ": quadrature did not converge at h = " << h << " (error estimate " << r.error << ")";
        throw quad::QuadratureError(os.str(), r.error);
    }
    return r;
}

/// Breakpoints resolving the scales h 2^k around 0 and -h inside (lo, hi).
std::vector<double> probe_breaks(double h, double lo, double hi) {
    std::vector<double> b{0.0, -h};
    for (int k = -20; k <= 40; ++k) {
        const double s = h * std::exp2(k);
        for (double c : {s, -s, -h + s, -h - s})
            if (s < hi - lo) b.push_back(c);
    }
    std::sort(b.begin(), b.end());
    b.erase(std::remove_if(b.begin(), b.end(), [&](double v) { return v <= lo || v >= hi; }), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

}  // namespace

FieldFunction make_counterexample_f(double alpha, int dim, double beta) {
    check_alpha(alpha);
    if (alpha == 1.0) {
        if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("counterexample: alpha = 1 needs beta in (0, 1)");
        return log_corrected_power(dim, 1.0, beta);
    }
    return log_corrected_power(dim, 2.0 - alpha, 0.0);
}

FieldFunction make_corrected_f(double alpha, int dim, double beta) {
    check_alpha(alpha);
    if (!(beta > 1.0)) throw std::invalid_argument("corrected field: beta must exceed 1");
    return log_corrected_power(dim, 2.0 - alpha, beta);
}

std::vector<double> default_h_sequence() {
    std::vector<double> h;
    for (int k = 4; k <= 16; ++k) h.push_back(std::exp2(-k));
    return h;
}

void to_json(nlohmann::json& j, const ProbeCurve& c) {
    j = {{"label", c.label},
         {"h", c.h},
         {"value", c.value},
         {"log_power", c.log_power},
         {"fit", {{"slope", c.fit.slope}, {"intercept", c.fit.intercept}, {"r_squared", c.fit.r_squared}}}};
}

ProbeCurve second_difference_curve(const KernelProfile& profile, const FieldFunction& f,
                                   std::span<const double> h_seq) {
    const int d = profile.dim;
    std::vector<double> hs(h_seq.begin(), h_seq.end());
    std::sort(hs.begin(), hs.end(), std::greater<>());
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (!(hs[i] > 0.0 && hs[i] < 0.125)) throw std::invalid_argument("second_difference_curve: h must lie in (0, 1/8)");
        if (i > 0 && hs[i] == hs[i - 1]) throw std::invalid_argument("second_difference_curve: repeated h");
    }
    ProbeCurve curve;
    curve.h = hs;
    curve.label = f.name;
    if (f.zero) {
        curve.value.assign(hs.size(), 0.0);
        return curve;
    }

    const auto G = profile.g;
    auto dfd = [&](double s) {
        Point y(d);
        y[d - 1] = s;
        if (f.grad) return f.grad(y)[d - 1];
        const double e = s != 0.0 ? 1e-4 * std::abs(s) : 1e-10;
        y[d - 1] = s + e;
        const double fp = f(y);
        y[d - 1] = s - e;
        return (fp - f(y)) / (2.0 * e);
    };
    constexpr double R = 0.25;
    const double transverse = d >= 2 ? sphere_area(d - 1) : 0.0;

    quad::Options outer;
    outer.abs_tol = 1e-13;
    outer.rel_tol = 1e-10;
    outer.max_intervals = 20000;
    quad::Options inner = outer;

    for (double h : hs) {
        // kernel difference integrated over the slice {y_d = s} of B_{1/4}
        auto slice = [&](double s) -> double {
            if (d == 1) {
                const double a = std::abs(s), b = std::abs(s + h);
                if (a == 0.0 || b == 0.0) return 0.0;
                return G(a) - G(b);
            }
            const double rad = std::sqrt(std::max(0.0, R * R - s * s));
            auto q = [&](double rho) {
                return (G(std::hypot(rho, s)) - G(std::hypot(rho, s + h))) * std::pow(rho, d - 2);
            };
            std::vector<double> br;
            for (double c : {std::abs(s), std::abs(s + h)})
                for (double m = 1.0 / 64.0; m <= 64.0; m *= 4.0)
                    if (c * m > 0.0 && c * m < rad) br.push_back(c * m);
            std::sort(br.begin(), br.end());
            br.erase(std::unique(br.begin(), br.end()), br.end());
            return transverse * checked(quad::integrate(q, 0.0, rad, br, inner), "transverse integral", h).value;
        };
        auto integrand = [&](double s) {
            const double df = dfd(s);
            return df == 0.0 ? 0.0 : slice(s) * df / h;
        };
        const auto br = probe_breaks(h, -R, R);
        curve.value.push_back(checked(quad::integrate(integrand, -R, R, br, outer), "probe integral", h).value);
    }
    return curve;
}

std::string to_string(ProbeVerdict v) {
    switch (v) {
        case ProbeVerdict::Divergent:
            return "divergent";
        case ProbeVerdict::Bounded:
            return "bounded";
        case ProbeVerdict::Inconclusive:
            return "inconclusive";
    }
    return "?";
}

void to_json(nlohmann::json& j, const ProbeReport& r) {
    j = {{"verdict", to_string(r.verdict)},
         {"slope", r.fit.slope},
         {"intercept", r.fit.intercept},
         {"r_squared", r.fit.r_squared},
         {"log_power", r.fit.log_power},
         {"increments_non_decreasing", r.increments_non_decreasing},
         {"differences_shrinking", r.differences_shrinking},
         {"last_difference", r.last_difference},
         {"note", r.note}};
}

ProbeReport divergence_fit(ProbeCurve& curve, double bounded_tol) {
    const std::size_t n = curve.h.size();
    if (n < 8 || curve.value.size() != n) throw std::invalid_argument("divergence_fit: at least 8 points required");
    for (std::size_t i = 1; i < n; ++i)
        if (!(curve.h[i] < curve.h[i - 1])) throw std::invalid_argument("divergence_fit: h must decrease");
    ProbeReport rep;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::pow(std::log(1.0 / curve.h[i]), curve.log_power);
    const auto& y = curve.value;

    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
    mx /= n, my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    rep.fit.log_power = curve.log_power;
    rep.fit.slope = sxy / sxx;
    rep.fit.intercept = my - rep.fit.slope * mx;
    rep.fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 0.0;
    curve.fit = rep.fit;

    std::vector<double> rate(n - 1);
    double mean_rate = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        rate[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        if (i + 8 >= n) mean_rate += std::abs(rate[i]) / 7.0;
    }
    // increments are judged on the 8 smallest h, where the O(h) corrections have died out
    rep.increments_non_decreasing = true;
    for (std::size_t i = n - 8; i + 1 < rate.size(); ++i)
        rep.increments_non_decreasing =
            rep.increments_non_decreasing && rate[i] > 0.0 && rate[i + 1] >= rate[i] - 0.02 * mean_rate;

    const double scale = std::max(1.0, std::abs(y.back()));
    rep.differences_shrinking = true;
    for (std::size_t i = 0; i + 2 < n; ++i) {
        const double a = std::abs(y[i + 1] - y[i]), b = std::abs(y[i + 2] - y[i + 1]);
        rep.differences_shrinking = rep.differences_shrinking && b <= a * (1.0 + 1e-9) + 1e-12 * scale;
    }
    rep.last_difference = std::abs(y[n - 1] - y[n - 2]);

    if (rep.fit.slope > 0.0 && rep.fit.r_squared > 0.99 && rep.increments_non_decreasing) {
        rep.verdict = ProbeVerdict::Divergent;
        rep.note = "linear growth in ln(1/h)^" + std::to_string(curve.log_power);
    } else if (rep.differences_shrinking && rep.last_difference <= bounded_tol * scale) {
        rep.verdict = ProbeVerdict::Bounded;
        rep.note = "successive differences shrink below tolerance";
    } else {
        rep.verdict = ProbeVerdict::Inconclusive;
        rep.note = "neither growth law nor convergence established";
    }
    return rep;
}

ProbeCurve counterexample_curve(double alpha, int dim, bool corrected, double beta, std::span<const double> h_seq) {
    const auto model = make_stable(alpha, dim);
    const auto profile = potential_profile(model);
    const auto f = corrected ? make_corrected_f(alpha, dim, beta) : make_counterexample_f(alpha, dim, beta);
    ProbeCurve c = second_difference_curve(profile, f, h_seq);
    c.log_power = !corrected && alpha == 1.0 ? 1.0 - beta : 1.0;
    return c;
}

quad::ImproperResult cone_lower_bound(double alpha, int dim) {
    check_alpha(alpha);
    if (dim < 1 || dim > 3) throw std::invalid_argument("cone_lower_bound: dimension must be 1, 2 or 3");
    const double a = 0.25 / std::sqrt(double(dim));
    const double e = 0.5 * (dim + 2.0 - alpha);
    quad::Options o;
    o.rel_tol = 1e-10;
    auto slice = [&](double s) -> double {
        const double top = std::pow(s, 2.0 - alpha);
        if (dim == 1) return top * std::pow(s * s, -e);
        if (dim == 2) return quad::integrate([&](double u) { return top * std::pow(u * u + s * s, -e); }, -s, s, o).value;
        auto row = [&](double u) {
            return quad::integrate([&](double v) { return top * std::pow(u * u + v * v + s * s, -e); }, -s, s, o).value;
        };
        return quad::integrate(row, -s, s, o).value;
    };
    quad::PanelOptions po;
    po.max_panels = 60;
    return quad::integrate_to_zero(slice, a, po);
}

}  // namespace nld
