#include "nld/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace nld {

McEstimate combine(const McEstimate& a, const McEstimate& b, double sign) {
    McEstimate r;
    r.value = a.value + sign * b.value;
    r.std_error = std::hypot(a.std_error, b.std_error);
    r.n_samples = std::min(a.n_samples, b.n_samples);
    r.seed = a.seed;
    return r;
}

double z_score(const McEstimate& a, const McEstimate& b) {
    const double diff = std::abs(a.value - b.value);
    const double s = std::hypot(a.std_error, b.std_error);
    if (s == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / s;
}

void to_json(nlohmann::json& j, const McEstimate& e) {
    j = {{"value", e.value}, {"std_error", e.std_error}, {"n", e.n_samples}, {"seed", e.seed}};
}

std::string to_string(GreenMethod m) { return m == GreenMethod::Path ? "path" : "wos"; }

void to_json(nlohmann::json& j, const McConfig& c) {
    j = {{"n_samples", c.n_samples}, {"seed", c.seed},         {"eps_wos", c.eps_wos},
         {"threads", c.threads},     {"max_steps", c.max_steps}, {"path_eta", c.path_eta},
         {"green", to_string(c.green)}};
}

McConfig mc_config_from_json(const nlohmann::json& j) {
    McConfig c;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k == "n_samples") c.n_samples = it->get<long>();
        else if (k == "seed") c.seed = it->get<std::uint64_t>();
        else if (k == "eps_wos") c.eps_wos = it->get<double>();
        else if (k == "threads") c.threads = it->get<int>();
        else if (k == "max_steps") c.max_steps = it->get<long>();
        else if (k == "path_eta") c.path_eta = it->get<double>();
        else if (k == "green") {
            const auto s = it->get<std::string>();
            if (s == "wos") c.green = GreenMethod::WalkOnSpheres;
            else if (s == "path") c.green = GreenMethod::Path;
            else throw std::invalid_argument("mc config: green must be 'wos' or 'path'");
        } else {
            throw std::invalid_argument("mc config: unknown key '" + k + "'");
        }
    }
    if (c.n_samples < 2) throw std::invalid_argument("mc config: n_samples must be >= 2");
    if (c.threads < 1) throw std::invalid_argument("mc config: threads must be >= 1");
    if (!(c.path_eta > 0.0 && c.path_eta < 1.0)) throw std::invalid_argument("mc config: path_eta must lie in (0, 1)");
    return c;
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 16) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t h = v.size() / 2;
    return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

McEstimate run_walks(long n, std::uint64_t seed, int threads,
                     const std::function<double(long, Stream&)>& walk) {
    if (n < 2) throw std::invalid_argument("run_walks: need at least two samples");
    std::vector<double> values(std::size_t(n), 0.0);
    const int workers = std::max(1, std::min<int>(threads, int(std::min<long>(n, 256))));
    auto chunk = [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i) {
            Stream s(seed, std::uint64_t(i));
            values[std::size_t(i)] = walk(i, s);
        }
    };
    if (workers == 1) {
        chunk(0, n);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            const long lo = n * w / workers, hi = n * (w + 1) / workers;
            pool.emplace_back([&, w, lo, hi] {
                try {
                    chunk(lo, hi);
                } catch (...) {
                    errors[std::size_t(w)] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    McEstimate est;
    est.n_samples = n;
    est.seed = seed;
    est.value = pairwise_sum(values) / double(n);
    for (double& v : values) v = (v - est.value) * (v - est.value);
    const double var = pairwise_sum(values) / double(n - 1);
    est.std_error = std::sqrt(var / double(n));
    return est;
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test_sorted(std::span<const double> cdf) {
    KsResult r;
    r.n = long(cdf.size());
    if (cdf.empty()) throw std::invalid_argument("ks test: no samples");
    const double n = double(cdf.size());
    double d = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        d = std::max(d, double(i + 1) / n - cdf[i]);
        d = std::max(d, cdf[i] - double(i) / n);
    }
    r.statistic = d;
    const double sn = std::sqrt(n);
    r.p_value = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
    return r;
}

}  // namespace nld
