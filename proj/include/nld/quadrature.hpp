#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nld::quad {

using Integrand = std::function<double(double)>;

struct Options {
    double abs_tol = 1e-13;
    double rel_tol = 1e-11;
    int max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
    long evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod (G10/K21) quadrature on a finite interval.
/// Integrable endpoint singularities are fine; interior ones should be split by
/// the caller.
Result integrate(const Integrand& f, double a, double b, const Options& opts = {});

/// Like integrate(), but first splits [a, b] at the given interior breakpoints.
Result integrate(const Integrand& f, double a, double b, std::span<const double> breaks,
                 const Options& opts = {});

enum class Verdict { Finite, Divergent, Inconclusive };

std::string to_string(Verdict v);

/// Outcome of an improper integral computed on geometric (dyadic) panels.
///
/// Panel sums S_k are fitted against ln|S_k| = A + B k + q ln k + c/k on the
/// tail window. B is the per-panel exponential growth rate (B > 0 means a
/// power-type divergence), q the logarithmic exponent (relevant when B = 0:
/// the panel series diverges iff q >= -1).
struct ImproperResult {
    Verdict verdict = Verdict::Inconclusive;
    double value = 0.0;  ///< partial sum (+ extrapolated tail when Finite)
    double error = 0.0;
    double growth_rate = 0.0;   ///< fitted B
    double log_exponent = 0.0;  ///< fitted q
    int panels = 0;
    std::vector<double> panel_sums;
    std::vector<double> panel_edges;  ///< edges[k], edges[k+1] bound panel k
    std::string note;
};

struct PanelOptions {
    Options inner{};
    int min_panels = 10;
    int max_panels = 300;
    double tail_rel_tol = 1e-12;
    /// Partial sums beyond this magnitude are treated as divergent.
    double divergence_bound = 1e250;
    /// |B| below this is treated as zero (logarithmic regime).
    double growth_tol = 2e-3;
    /// In the logarithmic regime the series is declared divergent iff q >= -1 - log_tol.
    double log_tol = 0.1;
    /// Skip the geometric early exit and always run the full tail fit.
    bool force_fit = false;
};

/// \int_0^b f(t) dt on panels [b 2^{-k-1}, b 2^{-k}], k = 0, 1, ...
ImproperResult integrate_to_zero(const Integrand& f, double b, const PanelOptions& opts = {});

/// \int_a^\infty f(t) dt on panels [a 2^k, a 2^{k+1}], k = 0, 1, ...
ImproperResult integrate_to_infinity(const Integrand& f, double a, const PanelOptions& opts = {});

/// Classifies an already computed sequence of panel sums. `index_offset` maps
/// panel k to the regression abscissa j = k + index_offset (>= 1).
ImproperResult classify_panels(std::vector<double> sums, double index_offset,
                               const PanelOptions& opts);

/// Wynn epsilon extrapolation of a sequence of partial sums; returns the best
/// estimate and an error indicator.
Result wynn_epsilon(std::span<const double> partial_sums);

struct OscillatoryOptions {
    Options inner{};
    int min_cycles = 12;
    int max_cycles = 400;
    double abs_tol = 1e-13;
    double rel_tol = 1e-11;
};

/// \int_a^\infty f(t) dt for an integrand that oscillates with (asymptotic)
/// half period `half_period`, summed over half-period panels and accelerated
/// with the epsilon algorithm.
Result integrate_oscillatory(const Integrand& f, double a, double half_period,
                             const OscillatoryOptions& opts = {});

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}
    [[nodiscard]] double achieved_tolerance() const { return achieved_; }

private:
    double achieved_;
};

}  // namespace nld::quad
