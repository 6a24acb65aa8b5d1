#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "blowup/metric.hpp"

using namespace blowup;

TEST_CASE("flat metric") {
    const auto m = metric::make_metric_flat(3);
    CHECK(m.gamma == 1.0);
    for (double r : {0.0, 1.0, 10.0}) {
        CHECK(m.alpha(r) == 1.0);
        CHECK(m.alpha_prime(r) == 0.0);
    }
    std::vector<double> rs{0.0, 1.0, 5.0, 20.0};
    const auto rep = metric::verify_hypotheses(m, rs);
    CHECK(rep.gamma_observed == 1.0);
    CHECK(rep.k_g_observed == 0.0);
    CHECK(rep.pass);
}

TEST_CASE("exponentially perturbed metric") {
    const auto m = metric::make_metric_exp(3, 0.5, 1.0);
    CHECK(m.gamma == doctest::Approx(0.5));
    CHECK(m.alpha(0.0) == doctest::Approx(0.5));
    // approach to 1 at rate e^{-r}
    CHECK(std::abs(m.alpha(10.0) - 1.0) <= 0.5 * std::exp(-10.0) * (1.0 + 1e-12));

    std::vector<double> rs;
    for (int i = 0; i <= 120; ++i) rs.push_back(0.1 * i);
    const auto rep = metric::verify_hypotheses(m, rs);
    CHECK(rep.pass);
    CHECK(rep.gamma_observed >= 0.5);
    // |alpha-1| = 0.5 e^{-r}, |alpha'| = 0.5 e^{-r} -> envelope constant 1.0
    CHECK(rep.k_g_observed <= 1.0 + 1e-9);
    CHECK(rep.k_g_observed == doctest::Approx(1.0));

    // further out, alpha(r)-1 sits below double resolution; the envelope
    // proxy must still pass with its rounding slack
    for (int i = 121; i <= 300; ++i) rs.push_back(0.1 * i);
    CHECK(metric::verify_hypotheses(m, rs).pass);
}

TEST_CASE("pointwise sandwich gamma <= alpha <= 1 and monotone approach") {
    const auto m = metric::make_metric_exp(2, 0.25, 2.0);
    double prev_gap = 1.0;
    for (double r = 0.0; r <= 30.0; r += 0.5) {
        CHECK(m.alpha(r) >= m.gamma - 1e-15);
        CHECK(m.alpha(r) <= 1.0);
        const double gap = std::abs(m.alpha(r) - 1.0);
        CHECK(gap <= prev_gap + 1e-15);
        prev_gap = gap;
    }
}

TEST_CASE("constructor rejects inadmissible parameters") {
    CHECK_THROWS_AS((void)metric::make_metric_exp(3, 1.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)metric::make_metric_exp(3, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)metric::make_metric_exp(3, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)metric::make_metric_exp(1, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)metric::make_metric_flat(1), std::invalid_argument);
}
