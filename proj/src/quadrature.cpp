#include "nld/quadrature.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

namespace nld::quad {

namespace {

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk21(const Integrand& f, double a, double b, long& evals) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    using G = boost::math::quadrature::gauss<double, 10>;
    const auto& xk = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = G::weights();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    // Node 0 is the centre; the 10-point Gauss nodes are the odd-indexed
    // Kronrod nodes.
    std::array<double, 21> fv{};
    fv[0] = f(c);
    double kron = fv[0] * wk[0];
    double gauss = 0.0;
    for (std::size_t i = 1; i < xk.size(); ++i) {
        const double dx = h * xk[i];
        fv[2 * i - 1] = f(c + dx);
        fv[2 * i] = f(c - dx);
        const double fp = fv[2 * i - 1] + fv[2 * i];
        kron += fp * wk[i];
        if (i % 2 == 1) gauss += fp * wg[i / 2];
    }
    evals += 21;
    // QUADPACK-style error scaling.
    const double mean = 0.5 * kron;
    double resasc = wk[0] * std::abs(fv[0] - mean);
    for (std::size_t i = 1; i < xk.size(); ++i)
        resasc += wk[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
    kron *= h;
    gauss *= h;
    resasc *= std::abs(h);
    double err = std::abs(kron - gauss);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * std::abs(kron));
    if (!std::isfinite(kron)) err = std::numeric_limits<double>::infinity();
    return {a, b, kron, err};
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Finite: return "finite";
        case Verdict::Divergent: return "divergent";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Result integrate(const Integrand& f, double a, double b, const Options& opts) {
    Result res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    std::priority_queue<Segment> heap;
    Segment s = gk21(f, a, b, res.evaluations);
    double total = s.value;
    double total_err = s.error;
    heap.push(s);
    int intervals = 1;
    while (true) {
        const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
        if (total_err <= tol) {
            res.converged = true;
            break;
        }
        if (intervals >= opts.max_intervals) break;
        Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted
        heap.pop();
        Segment l = gk21(f, worst.a, mid, res.evaluations);
        Segment r = gk21(f, mid, worst.b, res.evaluations);
        total += l.value + r.value - worst.value;
        total_err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        ++intervals;
    }
    // Re-sum to shed accumulated cancellation in the running totals.
    double v = 0.0, e = 0.0;
    while (!heap.empty()) {
        v += heap.top().value;
        e += heap.top().error;
        heap.pop();
    }
    res.value = v;
    res.error = e;
    if (!std::isfinite(v)) res.converged = false;
    return res;
}

Result integrate(const Integrand& f, double a, double b, std::span<const double> breaks,
                 const Options& opts) {
    std::vector<double> pts{a};
    for (double x : breaks)
        if (x > std::min(a, b) && x < std::max(a, b)) pts.push_back(x);
    pts.push_back(b);
    if (a < b)
        std::sort(pts.begin(), pts.end());
    else
        std::sort(pts.begin(), pts.end(), std::greater<>());
    Result total;
    total.converged = true;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        Result r = integrate(f, pts[i], pts[i + 1], opts);
        total.value += r.value;
        total.error += r.error;
        total.evaluations += r.evaluations;
        total.converged = total.converged && r.converged;
    }
    return total;
}

namespace {

struct TailFit {
    bool ok = false;
    double A = 0, B = 0, q = 0, c = 0;
};

TailFit fit_tail(const std::vector<double>& sums, std::size_t first, double offset) {
    TailFit fit;
    const std::size_t n = sums.size() - first;
    if (n < 8) return fit;
    Eigen::MatrixXd X(n, 4);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double j = double(first + i) + offset;
        X(i, 0) = 1.0;
        X(i, 1) = j;
        X(i, 2) = std::log(j);
        X(i, 3) = 1.0 / j;
        y(i) = std::log(std::abs(sums[first + i]));
    }
    Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    fit.ok = beta.allFinite();
    fit.A = beta(0);
    fit.B = beta(1);
    fit.q = beta(2);
    fit.c = beta(3);
    return fit;
}

double model_tail(const TailFit& fit, double start_j, double scale_ref) {
    // Sum exp(A + B j + q ln j + c / j) for j >= start_j.
    double tail = 0.0;
    double j = start_j;
    double term = 0.0;
    for (int i = 0; i < 2'000'000; ++i, j += 1.0) {
        term = std::exp(fit.A + fit.B * j + fit.q * std::log(j) + fit.c / j);
        tail += term;
        if (term <= 1e-17 * std::max(std::abs(scale_ref), tail)) return tail;
    }
    // Close the remainder with the continuous approximation of the model.
    if (fit.B < 0) return tail + term * std::exp(fit.B) / (1.0 - std::exp(fit.B));
    if (fit.q < -1) return tail + term * j / (-fit.q - 1.0);
    return std::numeric_limits<double>::infinity();
}

}  // namespace

ImproperResult classify_panels(std::vector<double> sums, double index_offset,
                               const PanelOptions& opts) {
    ImproperResult res;
    res.panels = int(sums.size());
    double total = 0.0;
    for (double s : sums) {
        if (!std::isfinite(s)) {
            res.verdict = Verdict::Divergent;
            res.value = std::numeric_limits<double>::infinity();
            res.growth_rate = std::numeric_limits<double>::infinity();
            res.note = "non-finite panel sum";
            res.panel_sums = std::move(sums);
            return res;
        }
        total += s;
    }
    res.value = total;
    if (std::abs(total) > opts.divergence_bound) {
        res.verdict = Verdict::Divergent;
        res.growth_rate = std::numeric_limits<double>::infinity();
        res.note = "partial sums exceed divergence bound";
        res.panel_sums = std::move(sums);
        return res;
    }
    const std::size_t n = sums.size();
    const std::size_t window = std::max<std::size_t>(8, n / 2);
    if (n < 8) {
        res.note = "fewer than 8 panels";
        res.panel_sums = std::move(sums);
        return res;
    }
    const std::size_t first = n - std::min(window, n);
    bool all_zero = true;
    int pos = 0, neg = 0;
    for (std::size_t i = first; i < n; ++i) {
        if (sums[i] != 0.0) all_zero = false;
        if (sums[i] > 0) ++pos;
        if (sums[i] < 0) ++neg;
    }
    if (all_zero) {
        res.verdict = Verdict::Finite;
        res.note = "integrand vanishes on tail panels";
        res.panel_sums = std::move(sums);
        return res;
    }
    if ((pos > 0 && neg > 0) || pos + neg < int(n - first)) {
        double tail_mag = 0.0;
        for (std::size_t i = n - 4; i < n; ++i) tail_mag += std::abs(sums[i]);
        if (tail_mag <= opts.tail_rel_tol * std::abs(total) + opts.inner.abs_tol) {
            res.verdict = Verdict::Finite;
            res.error = tail_mag;
            res.note = "sign-changing tail below tolerance";
        } else {
            res.note = "sign-changing tail; cannot certify";
        }
        res.panel_sums = std::move(sums);
        return res;
    }
    const double sign = pos > 0 ? 1.0 : -1.0;
    TailFit fit = fit_tail(sums, first, index_offset);
    if (!fit.ok) {
        res.note = "tail regression failed";
        res.panel_sums = std::move(sums);
        return res;
    }
    res.growth_rate = fit.B;
    res.log_exponent = fit.q;
    const bool divergent = fit.B > opts.growth_tol ||
                           (std::abs(fit.B) <= opts.growth_tol && fit.q >= -1.0 - opts.log_tol);
    if (divergent) {
        res.verdict = Verdict::Divergent;
        res.note = fit.B > opts.growth_tol ? "power-type growth of panel sums"
                                            : "logarithmic growth of partial sums";
        res.panel_sums = std::move(sums);
        return res;
    }
    TailFit model = fit;
    if (std::abs(model.B) <= opts.growth_tol) model.B = 0.0;
    const double start = double(n) + index_offset;
    const double tail = sign * model_tail(model, start, total);
    // Second opinion from a shorter window gauges the extrapolation error.
    double alt = tail;
    const std::size_t first2 = n - std::max<std::size_t>(8, (n - first) / 2);
    if (first2 > first) {
        TailFit f2 = fit_tail(sums, first2, index_offset);
        if (f2.ok && f2.B < opts.growth_tol) {
            if (std::abs(f2.B) <= opts.growth_tol) f2.B = 0.0;
            if (f2.B < 0 || f2.q < -1) alt = sign * model_tail(f2, start, total);
        }
    }
    res.verdict = Verdict::Finite;
    res.value = total + tail;
    res.error = std::abs(tail - alt);
    res.note = "tail extrapolated from fitted panel model";
    res.panel_sums = std::move(sums);
    return res;
}

namespace {

ImproperResult panel_driver(const Integrand& f, double start, bool toward_zero,
                            const PanelOptions& opts) {
    std::vector<double> sums;
    std::vector<double> edges{start};
    double total = 0.0;
    double err = 0.0;
    double edge = start;
    const double offset = toward_zero ? std::max(1.0, -std::log2(start) + 1.0)
                                      : std::max(1.0, std::log2(start) + 1.0);
    auto finish = [&](ImproperResult r) {
        r.panel_edges = edges;
        r.panels = int(sums.size());
        if (r.panel_sums.empty()) r.panel_sums = sums;
        r.error += err;
        return r;
    };
    for (int k = 0; k < opts.max_panels; ++k) {
        const double next = toward_zero ? edge * 0.5 : edge * 2.0;
        if (toward_zero ? next < 1e-300 : next > 1e300) break;
        Result r = toward_zero ? integrate(f, next, edge, opts.inner) : integrate(f, edge, next, opts.inner);
        // Orientation: to-zero panels are [next, edge]; the sum is positive for positive f.
        sums.push_back(r.value);
        edges.push_back(next);
        total += r.value;
        err += r.error;
        edge = next;
        if (!std::isfinite(r.value) || std::abs(total) > opts.divergence_bound) {
            ImproperResult out = classify_panels(sums, offset, opts);
            out.verdict = Verdict::Divergent;
            return finish(out);
        }
        const int m = int(sums.size());
        if (m < opts.min_panels || opts.force_fit) continue;
        // Vanishing integrand.
        bool zeros = true;
        for (int i = m - 6; i < m; ++i) zeros = zeros && sums[i] == 0.0;
        if (zeros) {
            ImproperResult out;
            out.verdict = Verdict::Finite;
            out.value = total;
            out.note = "integrand vanishes on tail panels";
            return finish(out);
        }
        bool same_sign = true;
        for (int i = m - 8; i < m; ++i)
            same_sign = same_sign && sums[i] != 0.0 && (sums[i] > 0) == (sums[m - 1] > 0);
        if (!same_sign) continue;
        double rmin = 1e300, rmax = 0.0;
        for (int i = m - 6; i < m; ++i) {
            const double ratio = sums[i] / sums[i - 1];
            rmin = std::min(rmin, ratio);
            rmax = std::max(rmax, ratio);
        }
        // Exact geometric decay (pure power integrand): sum the tail in closed form.
        if (rmax < 0.999 && (rmax - rmin) <= 1e-7 * rmax) {
            ImproperResult out;
            out.verdict = Verdict::Finite;
            out.value = total + sums.back() * rmax / (1.0 - rmax);
            out.growth_rate = std::log(rmax);
            out.note = "geometric panel decay";
            return finish(out);
        }
        // Fast decay: remaining tail below tolerance.
        if (rmax <= 0.8) {
            const double tail = sums.back() * rmax / (1.0 - rmax);
            if (std::abs(tail) <= opts.tail_rel_tol * std::abs(total) + opts.inner.abs_tol) {
                ImproperResult out;
                out.verdict = Verdict::Finite;
                out.value = total + tail;
                out.error = std::abs(tail);
                out.growth_rate = std::log(rmax);
                out.note = "panel sums decay geometrically";
                return finish(out);
            }
        }
        // Sustained growth well past the range where log factors can mimic it.
        if (m >= 40) {
            bool growing = true;
            for (int i = m - 8; i < m; ++i) growing = growing && sums[i] / sums[i - 1] >= 1.2;
            if (growing) {
                ImproperResult out = classify_panels(sums, offset, opts);
                out.verdict = Verdict::Divergent;
                return finish(out);
            }
        }
    }
    return finish(classify_panels(sums, offset, opts));
}

}  // namespace

ImproperResult integrate_to_zero(const Integrand& f, double b, const PanelOptions& opts) {
    return panel_driver(f, b, true, opts);
}

ImproperResult integrate_to_infinity(const Integrand& f, double a, const PanelOptions& opts) {
    return panel_driver(f, a, false, opts);
}

Result wynn_epsilon(std::span<const double> s) {
    Result res;
    const std::size_t n = s.size();
    if (n == 0) return res;
    res.value = s.back();
    res.error = n > 1 ? std::abs(s[n - 1] - s[n - 2]) : std::numeric_limits<double>::infinity();
    if (n < 3) return res;
    std::vector<double> prev(n + 1, 0.0);
    std::vector<double> cur(s.begin(), s.end());
    for (int col = 1; cur.size() > 1; ++col) {
        std::vector<double> next(cur.size() - 1);
        bool ok = true;
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const double diff = cur[i + 1] - cur[i];
            if (diff == 0.0 || !std::isfinite(diff)) {
                ok = false;
                break;
            }
            next[i] = prev[i + 1] + 1.0 / diff;
        }
        if (!ok) break;
        if (col % 2 == 0 && next.size() >= 2) {
            const double err = std::abs(next.back() - next[next.size() - 2]);
            if (err < res.error) {
                res.value = next.back();
                res.error = err;
            }
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    res.converged = std::isfinite(res.value);
    return res;
}

Result integrate_oscillatory(const Integrand& f, double a, double half_period,
                             const OscillatoryOptions& opts) {
    Result res;
    std::vector<double> partial;
    double sum = 0.0;
    double panel_err = 0.0;
    double prev_est = std::numeric_limits<double>::quiet_NaN();
    int agree = 0;
    for (int k = 0; k < opts.max_cycles; ++k) {
        const double lo = a + k * half_period;
        Result r = integrate(f, lo, lo + half_period, opts.inner);
        res.evaluations += r.evaluations;
        sum += r.value;
        panel_err += r.error;
        partial.push_back(sum);
        if (int(partial.size()) < opts.min_cycles) continue;
        // Extrapolate from a bounded trailing window to keep the table small.
        const std::size_t w = std::min<std::size_t>(partial.size(), 40);
        Result ext = wynn_epsilon(std::span<const double>(partial).subspan(partial.size() - w));
        const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(ext.value));
        if (std::abs(ext.value - prev_est) <= tol && ext.error <= 10 * tol) {
            if (++agree >= 2) {
                res.value = ext.value;
                res.error = std::abs(ext.value - prev_est) + panel_err;
                res.converged = true;
                return res;
            }
        } else {
            agree = 0;
        }
        prev_est = ext.value;
        res.value = ext.value;
        res.error = ext.error + panel_err;
    }
    res.converged = false;
    return res;
}

}  // namespace nld::quad
