#include "blowup/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace blowup::special {

namespace {

constexpr double kPi = std::numbers::pi;
// exp(x) overflows IEEE double just above x = 709.78.
constexpr double kExpSaturation = 705.0;
constexpr double kSeriesAsymptoticCrossover = 30.0;

void check_bessel_args(double nu, double x) {
    if (!(nu >= 0.0)) throw std::invalid_argument("bessel_i: order must be >= 0");
    if (!(x >= 0.0)) throw std::invalid_argument("bessel_i: argument must be >= 0");
}

// Ascending series sum_{k} (x/2)^{2k+nu} / (k! Gamma(nu+k+1)).
// All terms are positive, so there is no cancellation at any x; used
// below the asymptotic crossover where the largest term is representable.
double bessel_i_series(double nu, double x) {
    const double xh = 0.5 * x;
    double term = std::exp(nu * std::log(xh) - std::lgamma(nu + 1.0));
    if (x == 0.0) term = (nu == 0.0) ? 1.0 : 0.0;
    double sum = term;
    const double x2 = xh * xh;
    for (int k = 1; k < 400; ++k) {
        term *= x2 / (k * (k + nu));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

// e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} [1 - (mu-1)/(8x) + ...], mu = 4 nu^2.
// Terms alternate and eventually diverge; stop at the smallest one.
double bessel_i_scaled_asymptotic(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    double prev = std::numeric_limits<double>::max();
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (8.0 * k * x);
        if (std::abs(term) >= prev) break;
        sum += term;
        prev = std::abs(term);
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum / std::sqrt(2.0 * kPi * x);
}

// g_nu(r) = r^{-nu} I_nu(r), the entire-in-r^2 normalization that stays
// finite at r = 0 (value 1 / (2^nu Gamma(nu+1))).
double bessel_g(double nu, double r) {
    if (r < 0.5) {
        double term = std::exp(-nu * std::numbers::ln2 - std::lgamma(nu + 1.0));
        double sum = term;
        const double q = 0.25 * r * r;
        for (int k = 1; k < 40; ++k) {
            term *= q / (k * (k + nu));
            sum += term;
            if (term < sum * 1e-17) break;
        }
        return sum;
    }
    return bessel_i(nu, r) / std::pow(r, nu);
}

double bessel_g_scaled(double nu, double r) {
    if (r < 0.5) return std::exp(-r) * bessel_g(nu, r);
    return bessel_i_scaled(nu, r) / std::pow(r, nu);
}

double two_pi_pow_half_n(int n) { return std::pow(2.0 * kPi, 0.5 * n); }

void check_dim(int n) {
    if (n < 2) throw std::invalid_argument("dimension must be >= 2");
}

} // namespace

double sphere_area(int n) {
    check_dim(n);
    return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

double bessel_i_scaled(double nu, double x) {
    check_bessel_args(nu, x);
    if (x < kSeriesAsymptoticCrossover) return std::exp(-x) * bessel_i_series(nu, x);
    return bessel_i_scaled_asymptotic(nu, x);
}

double bessel_i(double nu, double x) {
    check_bessel_args(nu, x);
    if (x > kExpSaturation)
        throw std::overflow_error("bessel_i: e^x exceeds double range; use bessel_i_scaled");
    if (x < kSeriesAsymptoticCrossover) return bessel_i_series(nu, x);
    return std::exp(x) * bessel_i_scaled_asymptotic(nu, x);
}

double phi_flat_scaled(int n, double r) {
    check_dim(n);
    if (!(r >= 0.0)) throw std::invalid_argument("phi_flat: r must be >= 0");
    const double nu = 0.5 * (n - 2);
    return two_pi_pow_half_n(n) * bessel_g_scaled(nu, r);
}

double phi_flat(int n, double r) {
    if (r > kExpSaturation)
        throw std::overflow_error("phi_flat: e^r exceeds double range; use phi_flat_scaled");
    return std::exp(r) * phi_flat_scaled(n, r);
}

double phi_flat_deriv_over_r_scaled(int n, double r) {
    check_dim(n);
    if (!(r >= 0.0)) throw std::invalid_argument("phi_flat: r must be >= 0");
    // d/dr [r^{-nu} I_nu(r)] = r^{-nu} I_{nu+1}(r), so phi'(r)/r uses g_{nu+1}.
    const double nu = 0.5 * (n - 2);
    return two_pi_pow_half_n(n) * bessel_g_scaled(nu + 1.0, r);
}

double phi_flat_deriv_scaled(int n, double r) {
    return r * phi_flat_deriv_over_r_scaled(n, r);
}

double phi_flat_deriv(int n, double r) {
    if (r > kExpSaturation)
        throw std::overflow_error("phi_flat: e^r exceeds double range; use phi_flat_deriv_scaled");
    return std::exp(r) * phi_flat_deriv_scaled(n, r);
}

double phi_flat_dderiv_scaled(int n, double r) {
    return phi_flat_scaled(n, r) - (n - 1) * phi_flat_deriv_over_r_scaled(n, r);
}

double phi_flat_asymptotic_constant(int n) {
    check_dim(n);
    return std::pow(2.0 * kPi, 0.5 * (n - 1));
}

double phi_flat_asymptotic(int n, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("phi_flat_asymptotic: r must be > 0");
    if (r > kExpSaturation)
        throw std::overflow_error("phi_flat_asymptotic: e^r exceeds double range");
    return phi_flat_asymptotic_constant(n) * std::pow(r, -0.5 * (n - 1)) * std::exp(r);
}

} // namespace blowup::special
