#pragma once

#include "nld/point.hpp"
#include "nld/rng.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace nld {

class FieldError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Modulus of continuity t -> omega(t), held constant beyond the cap.
struct ModulusSpec {
    enum class Form { PowerLog, Tabulated, Callable };

    Form form = Form::PowerLog;
    double a = 1.0, b = 0.0;  ///< PowerLog: t^a ln^b(1 + 1/t)
    double scale = 1.0;
    std::vector<double> t, w;  ///< Tabulated, t increasing, w non-decreasing
    std::function<double(double)> fn;
    double cap = std::numeric_limits<double>::infinity();

    static ModulusSpec power_log(double a, double b, double scale = 1.0);
    static ModulusSpec tabulated(std::vector<double> t, std::vector<double> w);
    static ModulusSpec callable(std::function<double(double)> fn);

    double operator()(double t) const;
    [[nodiscard]] std::string describe() const;
};

void to_json(nlohmann::json& j, const ModulusSpec& m);
ModulusSpec modulus_from_json(const nlohmann::json& j);

/// Scalar field on R^d with optional gradient, declared moduli and, for fields that
/// are themselves Monte Carlo estimates, an unbiased single-draw sampler.
struct FieldFunction {
    std::string name = "field";
    std::function<double(const Point&)> eval;
    std::function<Point(const Point&)> grad;
    std::optional<ModulusSpec> declared_modulus;           ///< of f
    std::optional<ModulusSpec> declared_gradient_modulus;  ///< of grad f
    std::function<double(const Point&, Stream&)> sample;
    bool zero = false;  ///< identically zero (lets estimators skip work)

    double operator()(const Point& x) const { return eval(x); }
    double draw(const Point& x, Stream& s) const { return sample ? sample(x, s) : eval(x); }
    [[nodiscard]] bool random() const { return bool(sample); }
};

FieldFunction constant_field(double c);

/// Largest relative central-difference mismatch of grad over the given points
/// (step 1e-6 scaled to |x|).
double gradient_mismatch(const FieldFunction& f, const std::vector<Point>& points);

/// Builds a library field by name:
///   {"name":"constant","value":c}
///   {"name":"polynomial","coefficients":[c0,c1,..],"axis":k}      sum c_i y_k^i (axis defaults to the last)
///   {"name":"radial_polynomial","coefficients":[c0,c1,..]}        sum c_i |y|^{2i}
///   {"name":"power","exponent":p}                                  ((y_d)_+)^p
///   {"name":"log_corrected","exponent":p,"beta":b}                 ((y_d)_+)^p ln^{-b}(1 + 1/(y_d)_+)
///   {"name":"radial_power","exponent":p}                           |y|^p
///   {"name":"indicator","set":"half_space","offset":c}             1{y_d > c}
///   {"name":"indicator","set":"outside_ball","radius":r}           1{|y| > r}
///   {"name":"indicator","set":"ball","radius":r}                   1{|y| < r}
FieldFunction make_field(const nlohmann::json& spec, int dim);

/// ((y_d)_+)^p ln^{-beta}(1 + 1/(y_d)_+) with its gradient; beta = 0 gives the pure power.
FieldFunction log_corrected_power(int dim, double p, double beta);

}  // namespace nld
