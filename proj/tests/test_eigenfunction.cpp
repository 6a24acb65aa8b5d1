#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "blowup/eigenfunction.hpp"
#include "blowup/special_functions.hpp"

using namespace blowup;

namespace {
const metric::MetricField kExp = metric::make_metric_exp(3, 0.5, 1.0);
}

TEST_CASE("flat metric has zero correction") {
    const auto m = metric::make_metric_flat(3);
    const auto s = eigen::solve_correction(m, 0.1);
    CHECK(s.sup_norm == 0.0);
    for (double v : s.psi) CHECK(v == 0.0);
}

TEST_CASE("solver rejects lambda outside (0, beta/2]") {
    CHECK_THROWS_AS((void)eigen::solve_correction(kExp, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)eigen::solve_correction(kExp, 0.6), std::invalid_argument);
    CHECK_NOTHROW((void)eigen::solve_correction(kExp, 0.5));
}

TEST_CASE("perturbation source limits") {
    // f(0) = (alpha(0)-1) lambda^2 phi(0) after the r->0 cancellations
    const double lam = 0.1;
    const double expected = (kExp.alpha(0.0) - 1.0) * lam * lam * special::phi_flat(3, 0.0);
    CHECK(eigen::perturbation_source(kExp, lam, 0.0) ==
          doctest::Approx(expected).epsilon(1e-12));
    // decay: the source inherits e^{-(beta-lambda) r}
    const double f5 = std::abs(eigen::perturbation_source(kExp, lam, 5.0));
    const double f15 = std::abs(eigen::perturbation_source(kExp, lam, 15.0));
    CHECK(f15 < f5 * std::exp(-(kExp.beta - lam) * 9.0) * 2.0);
}

TEST_CASE("correction norm follows the lambda^theta law on the ladder") {
    std::vector<double> lambdas{0.1, 0.05, 0.025, 0.0125};
    std::vector<double> sups;
    for (double lam : lambdas) sups.push_back(eigen::solve_correction(kExp, lam).sup_norm);
    // monotone decrease as lambda -> 0
    for (std::size_t i = 0; i + 1 < sups.size(); ++i) CHECK(sups[i + 1] < sups[i]);
    const auto fit = eigen::fit_power_law(lambdas, sups);
    CHECK(fit.slope > 0.0);
    CHECK(fit.slope >= 0.5);
    CHECK(fit.max_dev <= 0.05);  // clean power law over this decade
}

TEST_CASE("truncation independence: doubling r_max leaves the bulk unchanged") {
    const double lam = 0.05;
    eigen::SolveOptions o1, o2;
    o1.r_max = 16.0 / lam;
    o2.r_max = 32.0 / lam;
    const auto s1 = eigen::solve_correction(kExp, lam, o1);
    const auto s2 = eigen::solve_correction(kExp, lam, o2);
    double diff = 0.0;
    for (std::size_t i = 0; i < s1.grid.size / 2; ++i)
        diff = std::max(diff, std::abs(s1.psi[i] - s2.psi[i]));
    CHECK(diff <= 1e-6 * s1.sup_norm);
}

TEST_CASE("discrete eigen-equation residual is second order away from the axis") {
    const double lam = 0.1;
    double prev = 0.0;
    for (double dr : {0.02, 0.01}) {
        eigen::SolveOptions opt;
        opt.dr = dr;
        const auto s = eigen::solve_correction(kExp, lam, opt);
        std::vector<double> phi(s.grid.size);
        for (std::size_t i = 0; i < phi.size(); ++i)
            phi[i] = special::phi_flat(3, lam * s.grid.r(i)) + s.psi[i];
        const auto res = eigen::apply_discrete_operator(kExp, lam, s.grid, phi);
        double mx = 0.0;
        for (std::size_t i = 0; i < s.grid.size; ++i) {
            const double r = s.grid.r(i);
            if (r < 0.1 || r > 60.0) continue;
            mx = std::max(mx, std::abs(res[i]));
        }
        if (prev > 0.0) CHECK(prev / mx > 3.5);  // ~4x per dr halving
        prev = mx;
    }
}

TEST_CASE("table construction and invariants") {
    eigen::TableOptions opt;
    opt.ladder_points = 24;  // smaller ladder keeps the unit test quick
    const auto tab = eigen::build_table(kExp, opt);

    CHECK(tab.lambda0 == doctest::Approx(0.25));
    CHECK(tab.lambda_grid.front() == doctest::Approx(0.25 / 200.0));
    CHECK(std::is_sorted(tab.lambda_grid.begin(), tab.lambda_grid.end()));
    CHECK(tab.theta_fit > 0.0);
    CHECK(tab.d0 > 0.0);
    CHECK(tab.d1 >= tab.d0);
    CHECK(std::isfinite(tab.d1));
    CHECK(tab.continuity_modulus > 0.0);
    CHECK(std::isfinite(tab.continuity_modulus));

    // phi_lambda = phi(lambda r) + psi entrywise, and positive
    for (std::size_t k = 0; k < tab.lambda_grid.size(); k += 5) {
        for (std::size_t i = 0; i < tab.r_grid.size; i += 700) {
            const double lam = tab.lambda_grid[k];
            const double r = tab.r_grid.r(i);
            CHECK(tab.phi_lambda[k][i] ==
                  doctest::Approx(special::phi_flat(3, lam * r) + tab.psi[k][i])
                      .epsilon(1e-12));
            CHECK(tab.phi_lambda[k][i] > 0.0);
        }
    }

    // two-sided envelope holds with the recorded constants over the table
    for (std::size_t k = 0; k < tab.lambda_grid.size(); ++k) {
        for (std::size_t i = 0; i < tab.r_grid.size; i += 101) {
            const double z = tab.lambda_grid[k] * tab.r_grid.r(i);
            const double env = std::exp(z) / (3.0 + z);
            const double ratio = tab.phi_lambda[k][i] / env;
            CHECK(ratio >= tab.d0 * (1.0 - 1e-9));
            CHECK(ratio <= tab.d1 * (1.0 + 1e-9));
        }
    }

    // ladder sup-norms decrease toward small lambda
    for (std::size_t k = 0; k + 1 < tab.lambda_grid.size(); ++k)
        CHECK(tab.psi_sup[k] <= tab.psi_sup[k + 1] * (1.0 + 1e-9));
}

TEST_CASE("table evaluation: ladder nodes, interpolation, continuations") {
    eigen::TableOptions opt;
    opt.ladder_points = 24;
    const auto tab = eigen::build_table(kExp, opt);

    // exact at a ladder node / table radius
    const std::size_t k = 7;
    const double lam = tab.lambda_grid[k];
    const double r = tab.r_grid.r(1500);
    CHECK(tab.psi_value(lam, r) == doctest::Approx(tab.psi[k][1500]).epsilon(1e-9));

    // between ladder nodes: value lies near the neighbouring rows
    const double mid = std::sqrt(tab.lambda_grid[k] * tab.lambda_grid[k + 1]);
    const double v = tab.psi_value(mid, 0.0);
    const double lo = std::min(tab.psi[k][0], tab.psi[k + 1][0]);
    const double hi = std::max(tab.psi[k][0], tab.psi[k + 1][0]);
    const double pad = 0.05 * (hi - lo) + 1e-12;
    CHECK(v >= lo - pad);
    CHECK(v <= hi + pad);

    // below the ladder: the lambda^theta model, vanishing as lambda -> 0
    const double lmin = tab.lambda_grid.front();
    CHECK(std::abs(tab.psi_value(lmin / 4.0, 0.0)) < std::abs(tab.psi_value(lmin, 0.0)));
    CHECK(std::abs(tab.psi_value(lmin / 1e3, 0.0)) < 1e-3 * std::abs(tab.psi_value(lmin, 0.0)));

    // beyond the table radius: decaying continuation
    const double rt = tab.r_grid.r_max();
    CHECK(std::abs(tab.psi_value(lam, 2.0 * rt)) < std::abs(tab.psi_value(lam, rt)));

    // scaled evaluation never overflows and stays positive far out
    for (double rr : {0.0, 10.0, 500.0, 2000.0}) {
        const double w = tab.phi_scaled(0.25, rr);
        CHECK(std::isfinite(w));
        CHECK(w > 0.0);
    }
}

TEST_CASE("continuity in lambda on adjacent ladder nodes") {
    eigen::TableOptions opt;
    opt.ladder_points = 24;
    const auto tab = eigen::build_table(kExp, opt);
    // ||psi_l - psi_m||_inf <= C |l - m| with a modest constant for this metric
    CHECK(tab.continuity_modulus < 10.0);
}

TEST_CASE("flat table: psi identically zero, closed-form values") {
    eigen::TableOptions opt;
    opt.ladder_points = 12;
    const auto tab = eigen::build_table(metric::make_metric_flat(3), opt);
    for (const auto& row : tab.psi)
        for (double v : row) CHECK(v == 0.0);
    // phi_lambda(r) = 4 pi sinh(lambda r) / (lambda r)
    const double lam = tab.lambda_grid.back();
    const double r = 10.0;
    const double closed = 4.0 * M_PI * std::sinh(lam * r) / (lam * r);
    CHECK(tab.phi_scaled(lam, r) * std::exp(lam * r) ==
          doctest::Approx(closed).epsilon(1e-10));
}
