#pragma once

#include "nld/rng.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace nld {

/// Numerical failure of a stochastic estimator (step cap, rejection floor, ...).
class McError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rejection sampling would fall below its acceptance floor.
class TuningError : public McError {
public:
    using McError::McError;
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long n_samples = 0;
    std::uint64_t seed = 0;
};

/// a + sign * b with independent errors combined in quadrature.
McEstimate combine(const McEstimate& a, const McEstimate& b, double sign = 1.0);
/// |a - b| in units of the combined standard error (inf when both errors vanish and a != b).
double z_score(const McEstimate& a, const McEstimate& b);

void to_json(nlohmann::json& j, const McEstimate& e);

enum class GreenMethod { WalkOnSpheres, Path };

std::string to_string(GreenMethod m);

struct McConfig {
    long n_samples = 10000;
    std::uint64_t seed = 1;
    double eps_wos = -1.0;  ///< boundary band; < 0 means 1e-6 * diam
    int threads = 1;
    long max_steps = 100000;
    double path_eta = 0.01;  ///< path step = path_eta * dist^alpha
    GreenMethod green = GreenMethod::WalkOnSpheres;
};

void to_json(nlohmann::json& j, const McConfig& c);
McConfig mc_config_from_json(const nlohmann::json& j);

/// Runs walk(i, stream_i) for i < n with stream_i = Stream(seed, i) and reduces the
/// values in index order, so the result does not depend on the thread count.
McEstimate run_walks(long n, std::uint64_t seed, int threads,
                     const std::function<double(long, Stream&)>& walk);

/// Pairwise (cascade) sum in fixed order.
double pairwise_sum(std::span<const double> v);

/// P(K > lambda) for the Kolmogorov limit distribution.
double kolmogorov_survival(double lambda);

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
    long n = 0;
};

/// One-sample Kolmogorov-Smirnov test; cdf_sorted[i] is the model CDF at the i-th
/// smallest sample. Uses the Stephens small-sample correction of the statistic.
KsResult ks_test_sorted(std::span<const double> cdf_sorted);

}  // namespace nld
