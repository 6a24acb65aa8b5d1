#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "blowup/iteration.hpp"

using namespace blowup;

TEST_CASE("critical exponents") {
    const auto e3 = iteration::strauss_exponent(3);
    CHECK(e3.p0 == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::abs(e3.gamma_at_p0) <= 1e-12);

    const auto e2 = iteration::strauss_exponent(2);
    CHECK(e2.p0 == doctest::Approx(0.5 * (3.0 + std::sqrt(17.0))).epsilon(1e-14));
    CHECK(std::abs(e2.gamma_at_p0) <= 1e-12);

    for (int n = 2; n <= 10; ++n) {
        const auto e = iteration::strauss_exponent(n);
        CHECK(e.p0 > 1.0);
        CHECK(std::abs(iteration::strauss_gamma(e.p0, n)) <= 1e-12);
        // the combination that collapses the averaged inequality equals 1
        CHECK(iteration::critical_exponent_combination(n, e.p0) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("slicing sequences") {
    const double p = 1.0 + std::sqrt(2.0);
    auto s = iteration::IterationSchedule::build(p, {0.01, 0.1, 0.02}, 0.5, 30);

    CHECK(s.l[0] == doctest::Approx(1.5));
    CHECK(s.l[1] == doctest::Approx(1.75));
    CHECK(s.l[5] == doctest::Approx(2.0 - std::pow(2.0, -6.0)).epsilon(1e-15));
    CHECK(s.a[1] == doctest::Approx(p + 1.0).epsilon(1e-13));
    CHECK(s.b[1] == doctest::Approx(p - 1.0).epsilon(1e-13));

    for (int j = 0; j + 1 <= 30; ++j) {
        CHECK(s.l[j + 1] > s.l[j]);
        CHECK(s.l[j + 1] - s.l[j] == doctest::Approx(std::pow(2.0, -(j + 2))).epsilon(1e-12));
        CHECK(s.a[j + 1] == doctest::Approx(p * s.a[j] + 1.0).epsilon(1e-12));
        CHECK(s.b[j + 1] == doctest::Approx(p * s.b[j] + (p - 1.0)).epsilon(1e-12));
        // slicing gap used by the recursion step
        CHECK(1.0 - s.l[j] / s.l[j + 1] >= std::pow(2.0, -(j + 3)) - 1e-15);
    }
    CHECK(s.l[30] < 2.0);

    // S_j converges to p/(p-1)^2
    CHECK(s.s_limit == doctest::Approx(p / ((p - 1.0) * (p - 1.0))).epsilon(1e-14));
    CHECK(s.s_limit == doctest::Approx(1.2071067811865475).epsilon(1e-12));
    CHECK(s.s_partial[30] <= s.s_limit);
    CHECK(s.s_limit - s.s_partial[30] <= 1e-9);
}

TEST_CASE("scaled log-recursion equals the closed form") {
    for (double p : {1.0 + std::sqrt(2.0), 2.0, 3.5}) {
        auto s = iteration::IterationSchedule::build(p, {0.003, 0.07, 0.011}, 0.37, 30);
        for (int j = 1; j <= 30; ++j) {
            CHECK(std::abs(s.z_recursion[j] - s.z_closed[j]) <= 1e-9);
            // reconstructed log C_j agrees relatively as well
            const double a = s.log_c(j), b = s.log_c_closed(j);
            CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)));
        }
    }
}

TEST_CASE("envelope and first step") {
    const double p = 1.0 + std::sqrt(2.0);
    const double eps = 0.5;
    auto s = iteration::IterationSchedule::build(p, {0.01, 0.1, 0.02}, eps, 20);

    // j-th bound vanishes at t = l_j
    CHECK(s.envelope(s.l[1], 1) == 0.0);
    CHECK_THROWS_AS((void)s.envelope(1.0, 1), std::domain_error);

    // first step has the closed form M eps^p log(2t/3)
    const double m = std::exp(s.log_m);
    for (double t : {1.5, 2.0, 10.0, 100.0}) {
        CHECK(s.first_step(t) ==
              doctest::Approx(m * std::pow(eps, p) * std::log(2.0 * t / 3.0)).epsilon(1e-12));
    }

    // envelope j+1 eventually overtakes envelope j; crossing is finite
    for (int j = 1; j <= 3; ++j) {
        const double log_t_star = s.crossing_log_t(j);
        CHECK(std::isfinite(log_t_star));
        CHECK(s.envelope_log_t(1.05 * log_t_star, j + 1) >=
              s.envelope_log_t(1.05 * log_t_star, j));
        CHECK(s.envelope_log_t(0.95 * log_t_star, j + 1) <=
              s.envelope_log_t(0.95 * log_t_star, j));
    }
}

TEST_CASE("lifespan bound") {
    const double p = 1.0 + std::sqrt(2.0);
    auto s = iteration::IterationSchedule::build(p, {0.01, 0.1, 0.02}, 0.5, 20);

    // monotone: bound increases as eps decreases; log T exactly linear in
    // eps^{-p(p-1)}
    const auto b1 = iteration::lifespan_bound(s, 0.5);
    const auto b2 = iteration::lifespan_bound(s, 0.4);
    const auto b3 = iteration::lifespan_bound(s, 0.3);
    CHECK(b2.log_t_bound > b1.log_t_bound);
    CHECK(b3.log_t_bound > b2.log_t_bound);
    const double pw = -p * (p - 1.0);
    const double slope12 =
        (b2.log_t_bound - b1.log_t_bound) / (std::pow(0.4, pw) - std::pow(0.5, pw));
    const double slope23 =
        (b3.log_t_bound - b2.log_t_bound) / (std::pow(0.3, pw) - std::pow(0.4, pw));
    CHECK(slope12 == doctest::Approx(b1.k_eff).epsilon(1e-12));
    CHECK(slope23 == doctest::Approx(b1.k_eff).epsilon(1e-12));

    // the divergence trigger is positive just past the bound
    for (double eps : {0.5, 0.2}) {
        const auto lb = iteration::lifespan_bound(s, eps);
        if (eps <= lb.eps0) {
            for (double delta : {1e-6, 0.1, 2.0}) {
                const double log_t = lb.log_t_bound + std::log1p(delta);
                CHECK(iteration::blowup_trigger_logt(s, eps, log_t) > 0.0);
            }
            // and nonpositive at the bound itself
            CHECK(iteration::blowup_trigger_logt(s, eps, lb.log_t_bound) ==
                  doctest::Approx(0.0).epsilon(1e-9));
        }
    }

    // eps0 definition: exp{K eps0^{-p(p-1)}} = 4
    CHECK(b1.k_eff * std::pow(b1.eps0, pw) == doctest::Approx(std::log(4.0)).epsilon(1e-10));
}
