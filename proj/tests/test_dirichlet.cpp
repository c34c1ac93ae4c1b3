#include <doctest.h>

#include "nld/dirichlet.hpp"
#include "nld/quadrature.hpp"
#include "nld/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace nld;

namespace {

constexpr double kPi = std::numbers::pi;

// Riesz formula for the Green function of B(0, r), used only as an oracle.
double ball_green_exact(double alpha, int d, double r, const Point& x, const Point& y) {
    const double kappa = std::tgamma(0.5 * d) /
                         (std::pow(2.0, alpha) * std::pow(kPi, 0.5 * d) * std::pow(std::tgamma(0.5 * alpha), 2));
    const double sep = distance(x, y);
    const double w = (r * r - norm2(x)) * (r * r - norm2(y)) / (r * r * sep * sep);
    auto f = [&](double s) { return std::pow(s, 0.5 * alpha - 1.0) * std::pow(1.0 + s, -0.5 * d); };
    return kappa * std::pow(sep, alpha - d) * quad::integrate(f, 0.0, w).value;
}

McConfig config(long n, std::uint64_t seed = 5) {
    McConfig c;
    c.n_samples = n;
    c.seed = seed;
    return c;
}

Point on_axis(int d, double t) {
    Point p(d);
    p[d - 1] = t;
    return p;
}

}  // namespace

TEST_CASE("philox known answers and stream replay") {
    using A = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) == A{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});

    Stream a(42, 7), b(42, 7), c(42, 8);
    bool differ = false;
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK((u > 0.0 && u < 1.0));
        differ = differ || (u != c.uniform());
    }
    CHECK(differ);
    Stream s(1, 0);
    double m = 0.0, v = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        m += z;
        v += z * z;
    }
    CHECK(std::abs(m / n) < 0.01);
    CHECK(v / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("domains") {
    auto ball = Domain::unit_ball(2);
    CHECK(ball.contains(Point{0.5, 0.5}));
    CHECK_FALSE(ball.contains(Point{1.0, 0.0}));
    CHECK(ball.dist_to_boundary(Point{0.3, 0.4}) == doctest::Approx(0.5));
    CHECK(ball.diameter() == 2.0);

    auto box = Domain::box(Point{0.0, 0.0}, Point{2.0, 1.0});
    CHECK(box.dist_to_boundary(Point{0.5, 0.2}) == doctest::Approx(0.2));
    CHECK(box.dist_to_boundary(Point{3.0, 0.2}) == 0.0);
    CHECK(box.inscribed_ball(Point{1.0, 0.5}).radius == doctest::Approx(0.5));
    CHECK_FALSE(box.contains(box.nearest_exterior(Point{1.0, 0.999})));

    auto u = Domain::ball_union({Ball{Point{0.0}, 1.0}, Ball{Point{1.5}, 1.0}});
    CHECK(u.diameter() == doctest::Approx(3.5));
    CHECK(u.contains(Point{1.2}));
    CHECK(u.dist_to_boundary(Point{0.75}) == doctest::Approx(0.25));  // certified lower bound
    CHECK_FALSE(u.contains(u.nearest_exterior(Point{0.75})));
    CHECK(distance(u.nearest_exterior(Point{1.9}), Point{1.9}) == doctest::Approx(0.6));
    CHECK_FALSE(u.contains(Point{2.6}));

    nlohmann::json j = u;
    auto back = domain_from_json(j);
    CHECK(back.diameter() == u.diameter());
    CHECK_THROWS_AS(domain_from_json({{"type", "ball"}, {"center", {0.0}}, {"radius", 1.0}, {"colour", 1}}),
                    DomainError);
    CHECK_THROWS_AS(domain_from_json({{"type", "ball"}, {"center", {0.0}}, {"radius", -1.0}}), DomainError);
    CHECK_THROWS_AS(Domain::box(Point{0.0}, Point{0.0}), DomainError);
}

TEST_CASE("field library") {
    auto p = make_field({{"name", "power"}, {"exponent", 0.5}}, 2);
    CHECK(p(Point{0.3, 0.25}) == doctest::Approx(0.5));
    CHECK(p(Point{0.3, -0.25}) == 0.0);
    CHECK(p.declared_modulus->a == 0.5);

    Stream s(3, 0);
    std::vector<Point> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(Point{2 * s.uniform() - 1, 2 * s.uniform() - 1});
    for (const auto& spec : {nlohmann::json{{"name", "polynomial"}, {"coefficients", {1.0, -2.0, 0.5, 3.0}}},
                             nlohmann::json{{"name", "radial_polynomial"}, {"coefficients", {0.0, 1.0, -0.3}}},
                             nlohmann::json{{"name", "log_corrected"}, {"exponent", 1.5}, {"beta", 0.5}}}) {
        auto f = make_field(spec, 2);
        CHECK(gradient_mismatch(f, pts) < 1e-4);
    }
    auto ind = make_field({{"name", "indicator"}, {"set", "outside_ball"}, {"radius", 2.0}}, 1);
    CHECK(ind(Point{2.5}) == 1.0);
    CHECK(ind(Point{-1.5}) == 0.0);
    CHECK_THROWS_AS(make_field({{"name", "wavelet"}}, 1), FieldError);
    CHECK_THROWS_AS(make_field({{"name", "power"}, {"exponent", 0.5}, {"shift", 1}}, 1), FieldError);

    auto m = ModulusSpec::tabulated({0.1, 0.2, 0.4}, {0.1, 0.15, 0.3});
    CHECK(m(0.3) == doctest::Approx(0.225));
    CHECK(m(1.0) == 0.3);
    CHECK_THROWS_AS(ModulusSpec::tabulated({0.1, 0.2}, {0.2, 0.1}), FieldError);
    nlohmann::json mj = ModulusSpec::power_log(0.5, -2.0);
    CHECK(modulus_from_json(mj)(0.01) == doctest::Approx(std::pow(0.01, 0.5) * std::pow(std::log(101.0), -2.0)));
}

TEST_CASE("Poisson kernel of the ball") {
    CHECK(poisson_kernel_ball(1.0, 1, 1.0, Point{0.0}, Point{2.0}) ==
          doctest::Approx(std::sqrt(1.0 / 3.0) / (2.0 * kPi)).epsilon(1e-14));
    CHECK(poisson_kernel_ball(1.0, 1, 1.0, Point{0.0}, Point{2.0}) == doctest::Approx(0.0919).epsilon(1e-3));
    for (double alpha : {0.5, 1.0, 1.5})
        for (int d : {1, 2, 3}) {
            const double big = 1e7;
            std::vector<double> radii{big};
            const double mass = exit_radius_cdf(alpha, d, 1.0, 0.0, radii)[0];
            // tail beyond big ~ c big^{-alpha}
            const double tail = std::sin(0.5 * kPi * alpha) / kPi * 2.0 / alpha * std::pow(big, -alpha) *
                                std::tgamma(0.5 * d) * sphere_area(d) / (2.0 * std::pow(kPi, 0.5 * d));
            CHECK(mass + tail == doctest::Approx(1.0).epsilon(1e-6));
        }
    CHECK(poisson_kernel_ball(0.7, 2, 1.0, Point{0.0, 0.0}, Point{0.0, 1.7}) ==
          poisson_kernel_ball(0.7, 2, 1.0, Point{0.0, 0.0}, Point{1.7, 0.0}));
    CHECK_THROWS_AS(poisson_kernel_ball(1.0, 1, 1.0, Point{0.0}, Point{0.5}), DomainError);
    CHECK(exit_time_ball_mean(1.0, 1, 1.0, Point{0.0}) == doctest::Approx(1.0));
}

TEST_CASE("exit sampler matches the kernel law") {
    const long n = 20000;
    for (double alpha : {0.5, 1.0, 1.5})
        for (int d : {1, 2})
            for (double xn : {0.0, 0.4}) {
                Stream s(17, std::uint64_t(100 * alpha + 10 * d + 10 * xn));
                const Point x = on_axis(d, xn);
                std::vector<double> radii(n);
                Point mean(d);
                for (long i = 0; i < n; ++i) {
                    const Point z = sample_exit_ball(alpha, d, 1.0, x, s);
                    radii[std::size_t(i)] = norm(z);
                    if (xn == 0.0) mean += z * (1.0 / norm(z));
                }
                CHECK(*std::min_element(radii.begin(), radii.end()) > 1.0);
                std::sort(radii.begin(), radii.end());
                const auto cdf = exit_radius_cdf(alpha, d, 1.0, xn, radii);
                const auto ks = ks_test_sorted(cdf);
                INFO("alpha=" << alpha << " d=" << d << " |x|=" << xn << " D=" << ks.statistic);
                CHECK(ks.p_value > 0.01);
                if (xn == 0.0) CHECK(norm(mean) / n < 0.03);
            }

    // P(|Z| > 2) for alpha = 1.5, d = 1
    Stream s(99, 0);
    const long m = 100000;
    long hits = 0;
    for (long i = 0; i < m; ++i) hits += norm(sample_exit_ball(1.5, 1, 1.0, Point{0.0}, s)) > 2.0;
    std::vector<double> two{2.0};
    const double p = 1.0 - exit_radius_cdf(1.5, 1, 1.0, 0.0, two)[0];
    const double se = std::sqrt(p * (1.0 - p) / m);
    CHECK(std::abs(double(hits) / m - p) < 3.0 * se);

    Stream t(1, 1);
    CHECK_THROWS_AS(sample_exit_ball(1.0, 2, 1.0, Point{0.0, 0.97}, t), TuningError);
    const Point z = sample_exit_ball_wos(1.0, 2, 1.0, Point{0.0, 0.97}, t);
    CHECK(norm(z) > 1.0);
}

TEST_CASE("occupation law of the ball") {
    for (double alpha : {0.5, 1.0, 1.5})
        for (int d : {1, 2}) {
            const auto& law = OccupationLaw::get(alpha, d);
            CHECK(law.tabulated_mass() == doctest::Approx(law.mean_exit_time()).epsilon(1e-5));
            for (double rho : {0.05, 0.5, 0.9})
                CHECK(law.green_at(rho) ==
                      doctest::Approx(ball_green_exact(alpha, d, 1.0, Point(d), on_axis(d, rho))).epsilon(1e-8));
            CHECK(law.cdf(0.5) > 0.0);
            CHECK(law.cdf(0.5) < 1.0);
        }
    // empirical CDF of sampled radii
    const auto& law = OccupationLaw::get(1.5, 2);
    Stream s(4, 4);
    const int n = 20000;
    int below = 0;
    for (int i = 0; i < n; ++i) below += norm(law.sample(s)) < 0.5;
    CHECK(std::abs(double(below) / n - law.cdf(0.5)) < 4.0 * std::sqrt(0.25 / n));
}

TEST_CASE("harmonic measure") {
    auto m = make_stable(1.0, 1);
    auto dom = Domain::unit_ball(1);
    auto one = estimate_harmonic_measure(m, dom, constant_field(1.0), Point{0.3}, config(5000));
    CHECK(one.value == 1.0);
    CHECK(one.std_error == 0.0);
    auto c = estimate_harmonic_measure(m, dom, constant_field(-2.5), Point{0.3}, config(2000));
    CHECK(c.value == -2.5);

    auto far = make_field({{"name", "indicator"}, {"set", "outside_ball"}, {"radius", 2.0}}, 1);
    auto est = estimate_harmonic_measure(m, dom, far, Point{0.0}, config(100000));
    std::vector<double> two{2.0};
    const double exact = 1.0 - exit_radius_cdf(1.0, 1, 1.0, 0.0, two)[0];
    CHECK(exact == doctest::Approx(2.0 / kPi * std::asin(0.5)).epsilon(1e-9));
    CHECK(std::abs(est.value - exact) < 3.0 * est.std_error);

    // walks on a box and a union
    auto box = Domain::box(Point{-1.0, -1.0}, Point{1.0, 1.0});
    auto h = estimate_harmonic_measure(make_stable(1.5, 2), box, constant_field(1.0), Point{0.2, 0.9}, config(2000));
    CHECK(h.value == 1.0);
    auto uni = Domain::ball_union({Ball{Point{0.0}, 1.0}, Ball{Point{1.5}, 1.0}});
    auto hu = estimate_harmonic_measure(m, uni, constant_field(1.0), Point{0.75}, config(2000));
    CHECK(hu.value == 1.0);
}

TEST_CASE("Green operator and exit times") {
    for (double alpha : {0.5, 1.5})
        for (int d : {1, 2}) {
            auto m = make_stable(alpha, d);
            const Point x = on_axis(d, 0.4);
            auto e = estimate_exit_time(m, Domain::unit_ball(d), x, config(40000));
            const double exact = exit_time_ball_mean(alpha, d, 1.0, x);
            INFO("alpha=" << alpha << " d=" << d);
            CHECK(std::abs(e.value - exact) < 3.0 * e.std_error);
        }
    auto cauchy = make_stable(1.0, 1);
    auto b1 = Domain::unit_ball(1);
    auto zero = estimate_green_operator(cauchy, b1, constant_field(0.0), Point{0.1}, config(100));
    CHECK(zero.value == 0.0);

    // walk-on-spheres vs path estimator, f = 1 at the centre
    McConfig path = config(40000, 21);
    path.green = GreenMethod::Path;
    path.path_eta = 0.004;
    auto a = estimate_exit_time(cauchy, b1, Point{0.0}, path);
    auto b = estimate_exit_time(cauchy, b1, Point{0.0}, config(1000, 22));
    CHECK(b.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(z_score(a, b) < 3.0);

    // a non-constant source
    auto f = make_field({{"name", "radial_polynomial"}, {"coefficients", {1.0, -1.0}}}, 1);
    McConfig pc = config(20000, 31);
    pc.green = GreenMethod::Path;
    pc.path_eta = 0.004;
    auto ga = estimate_green_operator(cauchy, b1, f, Point{0.2}, pc);
    auto gb = estimate_green_operator(cauchy, b1, f, Point{0.2}, config(40000, 32));
    CHECK(z_score(ga, gb) < 3.0);

    // domain monotonicity
    auto pw = make_field({{"name", "power"}, {"exponent", 0.5}}, 2);
    auto m2 = make_stable(1.5, 2);
    auto small = estimate_green_operator(m2, Domain::ball(Point{0.0, 0.0}, 0.6), pw, Point{0.0, 0.2}, config(20000, 1));
    auto large = estimate_green_operator(m2, Domain::unit_ball(2), pw, Point{0.0, 0.2}, config(20000, 2));
    CHECK(small.value <= large.value + 3.0 * std::hypot(small.std_error, large.std_error));
}

TEST_CASE("Green function of the ball") {
    auto m = make_stable(1.5, 1);
    auto g = green_function_ball(m, 1.0, Point{0.0}, Point{0.5}, config(100000));
    const double exact = ball_green_exact(1.5, 1, 1.0, Point{0.0}, Point{0.5});
    CHECK(g.value > 0.0);
    CHECK(std::abs(g.value - exact) < 3.0 * g.std_error);

    auto m2 = make_stable(0.8, 2);
    const Point x{0.1, 0.3}, y{-0.4, 0.2};
    auto gxy = green_function_ball(m2, 1.0, x, y, config(100000, 1));
    auto gyx = green_function_ball(m2, 1.0, y, x, config(100000, 2));
    CHECK(z_score(gxy, gyx) < 3.0);
    CHECK(gxy.value > -3.0 * gxy.std_error);
    CHECK(std::abs(gxy.value - ball_green_exact(0.8, 2, 1.0, x, y)) < 3.0 * gxy.std_error);

    auto c = make_stable(1.0, 1);
    auto gc = green_function_ball(c, 1.0, Point{0.2}, Point{-0.5}, config(100000, 3));
    CHECK(std::abs(gc.value - ball_green_exact(1.0, 1, 1.0, Point{0.2}, Point{-0.5})) < 3.0 * gc.std_error);

    CHECK_THROWS_AS(green_function_ball(m, 1.0, Point{0.3}, Point{0.3}, config(10)), SingularInputError);
    CHECK_THROWS_AS(green_function_ball(make_truncated_stable(1.5, 1), 1.0, Point{0.0}, Point{0.5}, config(10)),
                    ModelError);
}

TEST_CASE("solver") {
    auto m = make_stable(1.0, 1);
    auto dom = Domain::unit_ball(1);
    auto one = solve_dirichlet(m, dom, constant_field(0.0), constant_field(1.0), Point{0.5}, config(1000));
    CHECK(one.value == 1.0);

    auto tau = solve_dirichlet(m, dom, constant_field(-1.0), constant_field(0.0), Point{0.0}, config(1000));
    CHECK(tau.value == doctest::Approx(exit_time_ball_mean(1.0, 1, 1.0, Point{0.0})).epsilon(1e-12));

    auto m2 = make_stable(1.5, 2);
    auto dom2 = Domain::unit_ball(2);
    auto f = make_field({{"name", "polynomial"}, {"coefficients", {0.5, 1.0}}}, 2);
    auto g = make_field({{"name", "indicator"}, {"set", "half_space"}, {"offset", 0.0}}, 2);
    const Point x{0.2, -0.1};
    auto both = solve_dirichlet(m2, dom2, f, g, x, config(40000, 1));
    auto fonly = solve_dirichlet(m2, dom2, f, constant_field(0.0), x, config(40000, 2));
    auto gonly = solve_dirichlet(m2, dom2, constant_field(0.0), g, x, config(40000, 3));
    const McEstimate sum = combine(fonly, gonly);
    CHECK(z_score(both, sum) < 3.0);

    // replay and thread independence
    McConfig c = config(5000, 77);
    auto r1 = solve_dirichlet(m2, dom2, f, g, x, c);
    c.threads = 3;
    auto r2 = solve_dirichlet(m2, dom2, f, g, x, c);
    CHECK(r1.value == r2.value);
    CHECK(r1.std_error == r2.std_error);

    McConfig capped = config(10);
    capped.max_steps = 1;
    capped.eps_wos = 1e-300;
    CHECK_THROWS_AS(solve_dirichlet(m2, dom2, f, g, Point{0.0, 0.99}, capped), McError);
}

TEST_CASE("mean-value residual") {
    auto m = make_stable(1.0, 1);
    auto cst = mean_value_residual(m, constant_field(2.0), Point{0.1}, 0.5, config(1000));
    CHECK(cst.value == 0.0);
    CHECK(cst.std_error == 0.0);

    auto g = make_field({{"name", "indicator"}, {"set", "half_space"}, {"offset", 1.5}}, 1);
    auto u = solution_field(m, Domain::unit_ball(1), constant_field(0.0), g, config(100));
    auto res = mean_value_residual(m, u, Point{0.0}, 0.5, config(40000));
    CHECK(std::abs(res.value) < 3.0 * res.std_error);

    auto half = make_field({{"name", "indicator"}, {"set", "half_space"}, {"offset", 0.0}}, 1);
    auto bad = mean_value_residual(m, half, Point{0.1}, 0.5, config(20000));
    CHECK(std::abs(bad.value) > 5.0 * bad.std_error);
}
