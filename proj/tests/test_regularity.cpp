#include <doctest.h>

#include "nld/regularity.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace nld;

namespace {

constexpr double kPi = std::numbers::pi;

std::function<double(double)> power_weight(double c) {
    return [c](double t) { return std::pow(t, c); };
}

// Finite iff a + c > -1, or a + c = -1 and b < -1.
DiniVerdict dini_rule(double a, double b, double c) {
    const double e = a + c;
    if (std::abs(e + 1.0) < 1e-12) return b < -1.0 ? DiniVerdict::Finite : DiniVerdict::Divergent;
    return e > -1.0 ? DiniVerdict::Finite : DiniVerdict::Divergent;
}

std::vector<double> dyadic(double top, int k0, int k1) {
    std::vector<double> g;
    for (int k = k0; k <= k1; ++k) g.push_back(top * std::exp2(-k));
    return g;
}

}  // namespace

TEST_CASE("dini integral: reference examples") {
    const double alpha = 0.5;
    auto s_eff = power_weight(alpha - 2.0);
    CHECK(dini_integral(s_eff, ModulusSpec::power_log(1.0 - alpha, -2.0)).verdict == DiniVerdict::Finite);
    const auto div = dini_integral(s_eff, ModulusSpec::power_log(1.0 - alpha, 0.0));
    CHECK(div.verdict == DiniVerdict::Divergent);
    const double eps = 0.1;
    const auto fin = dini_integral(s_eff, ModulusSpec::power_log(1.0 - alpha + eps, 0.0));
    REQUIRE(fin.verdict == DiniVerdict::Finite);
    CHECK(fin.value == doctest::Approx(std::pow(0.5, eps) / eps).epsilon(1e-6));
    CHECK(fin.t.size() == fin.integrand.size());

    auto zero = dini_integral(s_eff, ModulusSpec::power_log(1.0, 0.0, 0.0));
    CHECK(zero.verdict == DiniVerdict::Finite);
    CHECK(zero.value == 0.0);

    CHECK_THROWS_AS(dini_integral([](double t) { return std::sin(1.0 / t) / t; }, ModulusSpec::power_log(0.5, 0.0)),
                    std::invalid_argument);
}

TEST_CASE("dini integral: power-log grid matches the convergence rule") {
    int n = 0, mismatches = 0;
    for (double a : {0.1, 0.25, 0.5, 1.0, 1.5, 2.0})
        for (double e : {-1.5, -1.2, -1.0, -0.8, -0.5})
            for (double b : {-3.0, -2.0, -1.5, -0.5, 0.0, 0.5, 1.0}) {
                const double c = e - a;
                const auto rep = dini_integral(power_weight(c), ModulusSpec::power_log(a, b));
                ++n;
                if (rep.verdict != dini_rule(a, b, c)) {
                    ++mismatches;
                    MESSAGE("a=" << a << " b=" << b << " c=" << c << " got " << to_string(rep.verdict) << " "
                                 << rep.note);
                }
            }
    CHECK(n >= 200);
    CHECK(mismatches == 0);
}

TEST_CASE("branch selection for stable models") {
    for (double alpha : {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75})
        for (int d : {1, 2, 3}) {
            const auto profile = potential_profile(make_stable(alpha, d));
            const auto want = alpha <= 1.0 ? DiniBranch::GradientModulus : DiniBranch::FieldModulus;
            CHECK_MESSAGE(select_branch(profile) == want, "alpha=" << alpha << " d=" << d);
        }
}

TEST_CASE("modulus estimation") {
    const auto ball = Domain::unit_ball(2);
    const auto grid = dyadic(1.0, 1, 10);
    SUBCASE("square root of the positive part") {
        const auto f = log_corrected_power(2, 0.5, 0.0);
        const auto w = estimate_modulus(f, ball, grid, false);
        for (double t : grid) {
            CHECK(w(t) / std::sqrt(t) >= 0.5);
            CHECK(w(t) / std::sqrt(t) <= 2.0);
        }
        for (std::size_t i = 1; i < w.w.size(); ++i) CHECK(w.w[i] >= w.w[i - 1]);
    }
    SUBCASE("trivial cases") {
        const auto w0 = estimate_modulus(constant_field(3.0), ball, grid, false);
        for (double t : grid) CHECK(w0(t) == 0.0);
        const auto lin = make_field({{"name", "polynomial"}, {"coefficients", {1.0, 2.0}}}, 2);
        const auto w1 = estimate_modulus(lin, ball, grid, true);
        for (double t : grid) CHECK(w1(t) == 0.0);
        const auto ind = make_field({{"name", "indicator"}, {"set", "ball"}, {"radius", 0.5}}, 2);
        CHECK_THROWS_AS(estimate_modulus(ind, ball, grid, true), FieldError);
    }
}

TEST_CASE("regularity classification") {
    SUBCASE("log-corrected modulus in the plane applies") {
        const auto model = make_stable(1.5, 2);
        const auto rep = classify_regularity(model, potential_profile(model), log_corrected_power(2, 0.5, 2.0),
                                             Domain::unit_ball(2));
        CHECK(rep.applies);
        CHECK(rep.branch == DiniBranch::FieldModulus);
        CHECK(rep.dini.verdict == DiniVerdict::Finite);
    }
    SUBCASE("critical power on the line is inconclusive") {
        const auto model = make_stable(1.5, 1);
        const auto rep = classify_regularity(model, potential_profile(model), log_corrected_power(1, 0.5, 0.0),
                                             Domain::unit_ball(1));
        CHECK_FALSE(rep.applies);
        CHECK(rep.verdict == "inconclusive");
        CHECK(rep.dini.verdict == DiniVerdict::Divergent);
    }
    SUBCASE("smooth fields apply for every stable index") {
        const auto f = make_field({{"name", "radial_polynomial"}, {"coefficients", {1.0, -0.5, 0.25}}}, 2);
        for (double alpha : {0.5, 1.0, 1.5}) {
            const auto model = make_stable(alpha, 2);
            const auto rep = classify_regularity(model, potential_profile(model), f, Domain::unit_ball(2));
            CHECK_MESSAGE(rep.applies, "alpha=" << alpha << ": " << rep.reason);
            CHECK_FALSE(rep.modulus_declared);
        }
    }
    SUBCASE("missing gradient on the gradient branch") {
        const auto model = make_stable(0.5, 1);
        FieldFunction f = make_field({{"name", "indicator"}, {"set", "half_space"}, {"offset", 0.0}}, 1);
        const auto rep = classify_regularity(model, potential_profile(model), f, Domain::unit_ball(1));
        CHECK_FALSE(rep.applies);
        CHECK(rep.reason.find("gradient") != std::string::npos);
    }
}

TEST_CASE("kato curve") {
    const auto cauchy = make_stable(1.0, 1);
    const auto ball = Domain::unit_ball(1);
    const std::vector<double> rs{1e-1, 1e-2, 1e-3};
    const std::vector<Point> xs{Point{0.0}, Point{0.5}, Point{-0.9}};

    SUBCASE("zero field") {
        const auto c = kato_curve(cauchy, constant_field(0.0), ball, rs, xs);
        for (double v : c.value) CHECK(v == 0.0);
        CHECK(c.consistent);
    }
    SUBCASE("bounded field is below r sup|f|") {
        const auto c = kato_curve(cauchy, constant_field(2.0), ball, rs, xs);
        for (std::size_t i = 0; i < c.r.size(); ++i) CHECK(c.value[i] <= 2.0 * c.r[i] * (1.0 + 1e-6));
        CHECK(c.consistent);
    }
    SUBCASE("integrable singularity") {
        const auto f = make_field({{"name", "radial_power"}, {"exponent", -0.2}}, 1);
        const auto c = kato_curve(cauchy, f, ball, rs, xs);
        CHECK(c.decreasing);
        CHECK(c.value.back() < 1e-2);
        CHECK(c.consistent);
        // Cauchy time kernel in closed form: \int_0^r p_t(rho) dt = ln(1 + r^2/rho^2) / (2 pi)
        for (std::size_t i = 0; i < c.r.size(); ++i) {
            const double r = c.r[i];
            auto g = [r](double y) { return std::log1p(r * r / (y * y)) / (2.0 * kPi) * std::pow(y, -0.2); };
            const double oracle = 2.0 * quad::integrate(g, 0.0, 1.0, std::vector<double>{r}).value;
            CHECK(c.value[i] == doctest::Approx(oracle).epsilon(1e-4));
        }
    }
    SUBCASE("finite Dini integral implies a vanishing curve") {
        const auto model = make_stable(1.0, 2);
        const auto f = log_corrected_power(2, 1.0, 2.0);
        const auto dom = Domain::unit_ball(2);
        const auto rep = classify_regularity(model, potential_profile(model), f, dom);
        REQUIRE(rep.dini.verdict == DiniVerdict::Finite);
        const std::vector<Point> xs2{Point{0.0, 0.0}, Point{0.3, -0.4}};
        const auto c = kato_curve(model, f, dom, rs, xs2);
        CHECK(c.consistent);
        CHECK_THROWS_AS(kato_curve(make_stable(1.0, 3), f, Domain::unit_ball(3), rs, {}), std::invalid_argument);
    }
}
