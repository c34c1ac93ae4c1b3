#include <doctest.h>

#include "nld/potential_kernels.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace nld;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("Cauchy transition density") {
    auto m = make_stable(1.0, 1);
    for (double t : {0.01, 0.1, 1.0, 5.0})
        for (double x : {0.0, 0.03, 0.5, 2.0, 10.0}) {
            const double exact = t / (kPi * (t * t + x * x));
            CHECK(transition_density_radial(m, t, x) == doctest::Approx(exact).epsilon(1e-6));
        }
    std::vector<double> a{0.7}, b{-0.7};
    CHECK(transition_density(m, 0.3, a) == transition_density(m, 0.3, b));
}

TEST_CASE("transition density has unit mass") {
    for (double alpha : {0.7, 1.5}) {
        auto m = make_stable(alpha, 1);
        const double t = 0.5;
        auto f = [&](double r) { return 2.0 * transition_density_radial(m, t, r); };
        auto head = quad::integrate(f, 0.0, 1.0);
        auto tail = quad::integrate_to_infinity(f, 1.0);
        CHECK(head.value + tail.value == doctest::Approx(1.0).epsilon(1e-6));
    }
    auto tr = make_truncated_stable(1.5, 1);
    CHECK_THROWS_AS(transition_density_radial(tr, -1.0, 0.3), ModelError);
}

TEST_CASE("kernel case selector") {
    for (double alpha : {0.5, 1.0, 1.5, 1.9})
        for (int d : {1, 2, 3}) {
            auto tag = kernel_case(make_stable(alpha, d));
            KernelCase want = KernelCase::TransientU;
            if (!(alpha < d)) want = alpha > 1.0 ? KernelCase::CompensatedW0 : KernelCase::CompensatedW1;
            CHECK(tag.kernel_case == want);
        }
    auto w1 = kernel_case(make_stable(1.0, 1));
    CHECK(w1.x0[0] == 1.0);
    CHECK(w1.resolvent_verdict == quad::Verdict::Divergent);
    CHECK(kernel_case(make_truncated_stable(1.5, 3)).kernel_case == KernelCase::TransientU);
    CHECK(kernel_case(make_truncated_stable(1.5, 1)).kernel_case == KernelCase::CompensatedW0);
    CHECK(kernel_case(make_truncated_stable(0.8, 1)).kernel_case == KernelCase::CompensatedW1);
}

TEST_CASE("compensated kernels") {
    auto cauchy = make_stable(1.0, 1);
    for (double x : {0.25, 0.5, 2.0})
        CHECK(compensated_W_radial(cauchy, 1.0, x) == doctest::Approx(std::log(1.0 / x) / kPi).epsilon(1e-6));
    CHECK(compensated_W_radial(cauchy, 1.0, 1.0) == 0.0);

    auto s = make_stable(1.5, 1);
    const double w1 = compensated_W_radial(s, 0.0, 0.4);
    const double w2 = compensated_W_radial(s, 0.0, 0.8);
    CHECK(w2 / w1 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-5));
    CHECK(w1 == doctest::Approx(recurrent_stable_constant(1.5) * std::pow(0.4, 0.5)).epsilon(1e-6));
    CHECK(w1 < 0.0);
    std::vector<double> zero{0.0}, x{0.3};
    CHECK_THROWS_AS(compensated_W(s, x, zero), ModelError);
}

TEST_CASE("lambda potentials") {
    auto m = make_stable(1.0, 1);
    std::vector<double> one{1.0};
    double prev = 1e300;
    for (double lam : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const double v = lam * lambda_potential(m, lam, one);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < 0.05);
    for (double r : {0.3, 1.0, 3.0})
        CHECK(lambda_potential(m, 0.5, std::vector<double>{r}) ==
              doctest::Approx(lambda_potential_time(m, 0.5, r)).epsilon(1e-5));
    CHECK(lambda_potential(m, 0.1, one) > lambda_potential(m, 0.2, one));

    auto t3 = make_stable(0.5, 3);
    std::vector<double> e3{0.0, 0.0, 1.0};
    CHECK(lambda_potential(t3, 1e-6, e3) == doctest::Approx(riesz_constant(0.5, 3)).epsilon(1e-4));
}

TEST_CASE("potential profiles of stable models") {
    auto p = potential_profile(make_stable(0.5, 3));
    CHECK(p.closed_form);
    CHECK(p.kernel_case == KernelCase::TransientU);
    CHECK(p.branch == GradBranch::GradDivergent);
    std::vector<double> grid;
    for (double r = 0.9; r > 1e-3; r *= 0.7) grid.push_back(r);
    auto rep = verify_growth_G(p, grid);
    CHECK(rep.passes);
    CHECK(rep.kappa == doctest::Approx(3.5).epsilon(1e-12));

    auto q = potential_profile(make_stable(1.5, 3));
    CHECK(q.branch == GradBranch::GradIntegrable);
    CHECK(verify_growth_G(q, grid).passes);

    auto c = potential_profile(make_stable(1.0, 1));
    CHECK(c.kernel_case == KernelCase::CompensatedW1);
    CHECK(c.g(0.5) == doctest::Approx(std::log(2.0) / kPi));
    CHECK(c.branch == GradBranch::GradDivergent);

    for (double alpha : {0.5, 1.0, 1.5})
        for (int d : {1, 2, 3}) {
            auto pr = potential_profile(make_stable(alpha, d));
            CHECK((pr.branch == GradBranch::GradDivergent) == (alpha <= 1.0));
        }
}

TEST_CASE("numeric profiles match closed forms") {
    auto m = make_stable(1.5, 3);
    auto closed = potential_profile(m);
    auto num = potential_profile(m, ProfileOptions{true});
    CHECK_FALSE(num.closed_form);
    CHECK(num.branch == closed.branch);
    for (double r : {0.2, 0.7}) {
        CHECK(num.g(r) == doctest::Approx(closed.g(r)).epsilon(1e-6));
        CHECK(num.g1(r) == doctest::Approx(closed.g1(r)).epsilon(1e-6));
        CHECK(num.g2(r) == doctest::Approx(closed.g2(r)).epsilon(1e-6));
    }
    auto w = make_stable(1.5, 1);
    auto wc = potential_profile(w);
    auto wn = potential_profile(w, ProfileOptions{true});
    for (double r : {0.3, 0.8})
        CHECK(wn.g1(r) == doctest::Approx(wc.g1(r)).epsilon(1e-6));
}

TEST_CASE("subordinate Green function") {
    std::vector<double> grid{0.1, 0.2, 0.4, 0.7, 1.0};
    auto rep = subordinate_green_recursion_check(stable_subordinator(1.2), 3, grid);
    CHECK(rep.passes);
    CHECK(rep.max_rel_residual < 1e-4);
    CHECK(rep.gradient_verdict == quad::Verdict::Finite);

    auto geo = subordinate_green_recursion_check(geometric_stable_subordinator(1.0), 3, grid);
    CHECK(geo.passes);
    CHECK(geo.gradient_verdict == quad::Verdict::Divergent);

    SubordinatorSpec bare;
    bare.laplace_exponent = [](double l) { return std::sqrt(l); };
    CHECK_THROWS_AS(subordinate_green_recursion_check(bare, 3, grid), ModelError);
    CHECK_THROWS_AS(subordinate_green_recursion_check(stable_subordinator(1.2), 2, grid), ModelError);

    auto model = make_subordinate_bm(geometric_stable_subordinator(1.0), 3);
    auto prof = potential_profile(model);
    CHECK(prof.branch == GradBranch::GradDivergent);
    std::vector<double> g2;
    for (double r = 0.5; r > 1e-3; r *= 0.5) g2.push_back(r);
    auto gr = verify_growth_G(prof, g2);
    CHECK(std::isfinite(gr.log_derivative_bound));
    CHECK(gr.log_derivative_bound < 3.5);
}
