#include <doctest.h>

#include "nld/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace nld::quad;

TEST_CASE("finite interval integrals") {
    auto r = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));

    // Integrable endpoint singularity.
    r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));

    std::vector<double> brk{0.3};
    r = integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, brk);
    CHECK(r.value == doctest::Approx(0.5 * 0.09 + 0.5 * 0.49).epsilon(1e-13));
}

TEST_CASE("dyadic panels toward zero") {
    SUBCASE("pure power converges to the closed form") {
        const double eps = 0.1;
        auto r = integrate_to_zero([&](double t) { return std::pow(t, eps - 1.0); }, 0.5);
        CHECK(r.verdict == Verdict::Finite);
        CHECK(r.value == doctest::Approx(std::pow(0.5, eps) / eps).epsilon(1e-9));
    }
    SUBCASE("1/t diverges") {
        auto r = integrate_to_zero([](double t) { return 1.0 / t; }, 0.5);
        CHECK(r.verdict == Verdict::Divergent);
    }
    SUBCASE("1/(t ln^2) converges, 1/(t ln^0.5) diverges") {
        auto fin = integrate_to_zero(
            [](double t) { return 1.0 / (t * std::pow(std::log(1.0 + 1.0 / t), 2.0)); }, 0.5);
        CHECK(fin.verdict == Verdict::Finite);
        // Reference from 30-digit quadrature after substituting t = e^{-s}.
        CHECK(fin.value == doctest::Approx(1.0630295436288534).epsilon(1e-6));
        auto div = integrate_to_zero(
            [](double t) { return 1.0 / (t * std::sqrt(std::log(1.0 + 1.0 / t))); }, 0.5);
        CHECK(div.verdict == Verdict::Divergent);
    }
    SUBCASE("exactly critical log power diverges") {
        auto r = integrate_to_zero([](double t) { return 1.0 / (t * std::log(1.0 + 1.0 / t)); }, 0.5);
        CHECK(r.verdict == Verdict::Divergent);
    }
    SUBCASE("vanishing integrand") {
        auto r = integrate_to_zero([](double t) { return t > 0.1 ? 1.0 : 0.0; }, 0.5);
        CHECK(r.verdict == Verdict::Finite);
        CHECK(r.value == doctest::Approx(0.4).epsilon(1e-6));
    }
}

TEST_CASE("dyadic panels toward infinity") {
    auto r = integrate_to_infinity([](double t) { return 1.0 / (t * t); }, 1.0);
    CHECK(r.verdict == Verdict::Finite);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-11));

    r = integrate_to_infinity([](double t) { return 1.0 / (1.0 + t); }, 1.0);
    CHECK(r.verdict == Verdict::Divergent);

    r = integrate_to_infinity([](double t) { return std::exp(-t); }, 1.0);
    CHECK(r.verdict == Verdict::Finite);
    CHECK(r.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-11));
}

TEST_CASE("epsilon algorithm and oscillatory tails") {
    std::vector<double> partial;
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
        s += (k % 2 ? 1.0 : -1.0) / k;
        partial.push_back(s);
    }
    auto w = wynn_epsilon(partial);
    CHECK(w.value == doctest::Approx(std::log(2.0)).epsilon(1e-10));

    auto r = integrate_oscillatory([](double t) { return std::sin(t) / t; }, 1e-300, std::numbers::pi);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(std::numbers::pi / 2).epsilon(1e-10));

    // Slowly decaying amplitude: \int_1^\infty cos(t) t^{-0.1} dt.
    auto slow = integrate_oscillatory([](double t) { return std::cos(t) * std::pow(t, -0.1); }, 1.0,
                                      std::numbers::pi);
    auto ref = integrate([](double t) { return std::cos(t) * std::pow(t, -0.1) * std::exp(-1e-4 * t); },
                         1.0, 4e5, Options{1e-12, 1e-12, 200000});
    CHECK(slow.converged);
    CHECK(slow.value == doctest::Approx(ref.value).epsilon(1e-3));
}
