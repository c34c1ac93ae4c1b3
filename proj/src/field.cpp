#include "nld/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nld {

namespace {

double logfac(double t, double b) { return b == 0.0 ? 1.0 : std::pow(std::log1p(1.0 / t), b); }

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> keys, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
            throw FieldError(where + ": unknown key '" + it.key() + "'");
}

}  // namespace

ModulusSpec ModulusSpec::power_log(double a, double b, double scale) {
    if (!(a >= 0.0) || !std::isfinite(b) || !(scale >= 0.0)) throw FieldError("power-log modulus needs a >= 0, scale >= 0");
    if (a == 0.0 && b > 0.0) throw FieldError("power-log modulus with a = 0 needs b <= 0");
    ModulusSpec m;
    m.form = Form::PowerLog;
    m.a = a;
    m.b = b;
    m.scale = scale;
    return m;
}

ModulusSpec ModulusSpec::tabulated(std::vector<double> t, std::vector<double> w) {
    if (t.size() != w.size() || t.size() < 2) throw FieldError("tabulated modulus needs >= 2 matching points");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0) || !(w[i] >= 0.0)) throw FieldError("tabulated modulus needs t > 0, w >= 0");
        if (i > 0 && !(t[i] > t[i - 1])) throw FieldError("tabulated modulus: t must increase");
        if (i > 0 && w[i] < w[i - 1]) throw FieldError("tabulated modulus: w must be non-decreasing");
    }
    ModulusSpec m;
    m.form = Form::Tabulated;
    m.t = std::move(t);
    m.w = std::move(w);
    return m;
}

ModulusSpec ModulusSpec::callable(std::function<double(double)> fn) {
    ModulusSpec m;
    m.form = Form::Callable;
    m.fn = std::move(fn);
    return m;
}

double ModulusSpec::operator()(double s) const {
    if (!(s > 0.0)) return 0.0;
    s = std::min(s, cap);
    switch (form) {
        case Form::PowerLog:
            return scale * std::pow(s, a) * logfac(s, b);
        case Form::Callable:
            return scale * fn(s);
        case Form::Tabulated: {
            if (s >= t.back()) return scale * w.back();
            if (s <= t.front()) {
                // power-law continuation through the first two nodes
                double slope = 1.0;
                if (w[0] > 0.0 && w[1] > w[0]) slope = std::log(w[1] / w[0]) / std::log(t[1] / t[0]);
                return scale * w[0] * std::pow(s / t[0], slope);
            }
            const auto it = std::upper_bound(t.begin(), t.end(), s);
            const std::size_t i = std::size_t(it - t.begin());
            const double u = (s - t[i - 1]) / (t[i] - t[i - 1]);
            return scale * (w[i - 1] + u * (w[i] - w[i - 1]));
        }
    }
    return 0.0;
}

std::string ModulusSpec::describe() const {
    std::ostringstream os;
    switch (form) {
        case Form::PowerLog:
            if (scale != 1.0) os << scale << "*";
            os << "t^" << a;
            if (b != 0.0) os << "*ln^" << b << "(1+1/t)";
            break;
        case Form::Tabulated:
            os << "tabulated(" << t.size() << " points)";
            break;
        case Form::Callable:
            os << "callable";
            break;
    }
    return os.str();
}

void to_json(nlohmann::json& j, const ModulusSpec& m) {
    switch (m.form) {
        case ModulusSpec::Form::PowerLog:
            j = {{"form", "power_log"}, {"a", m.a}, {"b", m.b}, {"scale", m.scale}};
            break;
        case ModulusSpec::Form::Tabulated:
            j = {{"form", "tabulated"}, {"t", m.t}, {"w", m.w}, {"scale", m.scale}};
            break;
        case ModulusSpec::Form::Callable:
            j = {{"form", "callable"}};
            break;
    }
    if (std::isfinite(m.cap)) j["cap"] = m.cap;
}

ModulusSpec modulus_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw FieldError("modulus: object expected");
    try {
        const std::string form = j.value("form", std::string("power_log"));
        ModulusSpec m;
        if (form == "power_log") {
            reject_unknown(j, {"form", "a", "b", "scale", "cap"}, "modulus");
            m = ModulusSpec::power_log(j.at("a").get<double>(), j.value("b", 0.0), j.value("scale", 1.0));
        } else if (form == "tabulated") {
            reject_unknown(j, {"form", "t", "w", "scale", "cap"}, "modulus");
            m = ModulusSpec::tabulated(j.at("t").get<std::vector<double>>(), j.at("w").get<std::vector<double>>());
            m.scale = j.value("scale", 1.0);
        } else {
            throw FieldError("modulus: unknown form '" + form + "'");
        }
        if (j.contains("cap")) m.cap = j.at("cap").get<double>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw FieldError(std::string("modulus: ") + e.what());
    }
}

FieldFunction constant_field(double c) {
    FieldFunction f;
    f.name = "constant(" + std::to_string(c) + ")";
    f.eval = [c](const Point&) { return c; };
    f.grad = [](const Point& x) { return Point(x.dim); };
    f.declared_modulus = ModulusSpec::power_log(1.0, 0.0, 0.0);
    f.declared_gradient_modulus = ModulusSpec::power_log(1.0, 0.0, 0.0);
    f.zero = (c == 0.0);
    return f;
}

double gradient_mismatch(const FieldFunction& f, const std::vector<Point>& points) {
    if (!f.grad) throw FieldError("gradient_mismatch: field has no gradient");
    double worst = 0.0;
    for (const Point& x : points) {
        const Point g = f.grad(x);
        const double h = 1e-6 * std::max(1.0, norm(x));
        double scale = 1.0;
        for (int i = 0; i < x.dim; ++i) scale = std::max(scale, std::abs(g[i]));
        for (int i = 0; i < x.dim; ++i) {
            Point xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double fd = (f(xp) - f(xm)) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - g[i]) / scale);
        }
    }
    return worst;
}

FieldFunction log_corrected_power(int dim, double p, double beta) {
    if (!(p > 0.0) || !(beta >= 0.0)) throw FieldError("log-corrected power needs p > 0 and beta >= 0");
    FieldFunction f;
    std::ostringstream os;
    os << "((y_d)_+)^" << p;
    if (beta != 0.0) os << "*ln^-" << beta << "(1+1/(y_d)_+)";
    f.name = os.str();
    f.eval = [p, beta](const Point& y) {
        const double s = y.last();
        return s > 0.0 ? std::pow(s, p) * logfac(s, -beta) : 0.0;
    };
    if (p >= 1.0) {
        f.grad = [p, beta, dim](const Point& y) {
            Point g(dim);
            const double s = y.last();
            if (s > 0.0) {
                const double L = std::log1p(1.0 / s);
                g[dim - 1] = std::pow(s, p - 1.0) * std::pow(L, -beta) * (p + beta / ((1.0 + s) * L));
            }
            return g;
        };
    }
    if (p <= 1.0) {
        f.declared_modulus = ModulusSpec::power_log(p, -beta);
        if (p == 1.0 && beta > 0.0) f.declared_gradient_modulus = ModulusSpec::power_log(0.0, -beta);
    } else {
        f.declared_modulus = ModulusSpec::power_log(1.0, 0.0, p);
        f.declared_gradient_modulus = ModulusSpec::power_log(p - 1.0, -beta, p);
    }
    return f;
}

FieldFunction make_field(const nlohmann::json& spec, int dim) {
    if (dim < 1 || dim > kMaxDim) throw FieldError("field: dimension out of range");
    if (spec.is_number()) return constant_field(spec.get<double>());
    if (!spec.is_object() || !spec.contains("name")) throw FieldError("field: object with a 'name' key expected");
    try {
        const std::string name = spec.at("name").get<std::string>();
        if (name == "constant") {
            reject_unknown(spec, {"name", "value"}, "constant field");
            return constant_field(spec.at("value").get<double>());
        }
        if (name == "polynomial") {
            reject_unknown(spec, {"name", "coefficients", "axis"}, "polynomial field");
            const auto c = spec.at("coefficients").get<std::vector<double>>();
            const int axis = spec.value("axis", dim - 1);
            if (axis < 0 || axis >= dim) throw FieldError("polynomial field: axis out of range");
            FieldFunction f;
            f.name = "polynomial";
            f.eval = [c, axis](const Point& y) {
                double v = 0.0;
                for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * y[axis] + *it;
                return v;
            };
            f.grad = [c, axis](const Point& y) {
                Point g(y.dim);
                double v = 0.0;
                for (std::size_t k = c.size(); k-- > 1;) v = v * y[axis] + double(k) * c[k];
                g[axis] = v;
                return g;
            };
            f.zero = std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; });
            return f;
        }
        if (name == "radial_polynomial") {
            reject_unknown(spec, {"name", "coefficients"}, "radial_polynomial field");
            const auto c = spec.at("coefficients").get<std::vector<double>>();
            FieldFunction f;
            f.name = "radial_polynomial";
            f.eval = [c](const Point& y) {
                const double s = norm2(y);
                double v = 0.0;
                for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
                return v;
            };
            f.grad = [c](const Point& y) {
                const double s = norm2(y);
                double v = 0.0;
                for (std::size_t k = c.size(); k-- > 1;) v = v * s + double(k) * c[k];
                return y * (2.0 * v);
            };
            return f;
        }
        if (name == "power") {
            reject_unknown(spec, {"name", "exponent"}, "power field");
            return log_corrected_power(dim, spec.at("exponent").get<double>(), 0.0);
        }
        if (name == "log_corrected") {
            reject_unknown(spec, {"name", "exponent", "beta"}, "log_corrected field");
            return log_corrected_power(dim, spec.at("exponent").get<double>(), spec.at("beta").get<double>());
        }
        if (name == "radial_power") {
            reject_unknown(spec, {"name", "exponent"}, "radial_power field");
            const double p = spec.at("exponent").get<double>();
            FieldFunction f;
            f.name = "|y|^" + std::to_string(p);
            f.eval = [p](const Point& y) { return std::pow(norm(y), p); };
            f.grad = [p](const Point& y) {
                const double r = norm(y);
                return r > 0.0 ? y * (p * std::pow(r, p - 2.0)) : Point(y.dim);
            };
            if (p > 0.0 && p <= 1.0) f.declared_modulus = ModulusSpec::power_log(p, 0.0);
            return f;
        }
        if (name == "indicator") {
            reject_unknown(spec, {"name", "set", "offset", "radius"}, "indicator field");
            const std::string set = spec.at("set").get<std::string>();
            FieldFunction f;
            if (set == "half_space") {
                const double c = spec.value("offset", 0.0);
                f.name = "1{y_d > " + std::to_string(c) + "}";
                f.eval = [c](const Point& y) { return y.last() > c ? 1.0 : 0.0; };
            } else if (set == "outside_ball" || set == "ball") {
                const double r = spec.at("radius").get<double>();
                if (!(r > 0.0)) throw FieldError("indicator field: radius must be positive");
                const bool outside = set == "outside_ball";
                f.name = std::string(outside ? "1{|y| > " : "1{|y| < ") + std::to_string(r) + "}";
                f.eval = [r, outside](const Point& y) { return (norm(y) > r) == outside ? 1.0 : 0.0; };
            } else {
                throw FieldError("indicator field: unknown set '" + set + "'");
            }
            return f;
        }
        throw FieldError("field: unknown name '" + name + "'");
    } catch (const nlohmann::json::exception& e) {
        throw FieldError(std::string("field: ") + e.what());
    }
}

}  // namespace nld
