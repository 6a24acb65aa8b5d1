#pragma once

namespace blowup::special {

/// Surface area of the unit sphere S^{n-1} in R^n.
double sphere_area(int n);

/// Modified Bessel function of the first kind, I_nu(x), for nu >= 0, x >= 0.
/// Throws std::overflow_error once e^x saturates the double range.
double bessel_i(double nu, double x);

/// Exponentially scaled variant e^{-x} I_nu(x); valid for all x >= 0.
double bessel_i_scaled(double nu, double x);

// Radial eigenfunction of the flat Laplacian: the unique smooth radial
// solution of  phi'' + ((n-1)/r) phi' = phi  with phi(0) = |S^{n-1}|.
// Closed form: phi(r) = (2*pi)^{n/2} r^{-(n-2)/2} I_{(n-2)/2}(r).
// Grows like e^r, so the e^{-r}-scaled versions are the workhorses.

double phi_flat(int n, double r);
double phi_flat_scaled(int n, double r);        // e^{-r} phi(r)
double phi_flat_deriv(int n, double r);
double phi_flat_deriv_scaled(int n, double r);  // e^{-r} phi'(r)
/// e^{-r} phi'(r)/r, finite at r = 0 (limit phi(0)/n).
double phi_flat_deriv_over_r_scaled(int n, double r);
/// e^{-r} phi''(r), from the radial ODE phi'' = phi - (n-1) phi'/r.
double phi_flat_dderiv_scaled(int n, double r);

/// Leading large-r form c_n r^{-(n-1)/2} e^r with c_n = (2*pi)^{(n-1)/2}.
/// Requires r > 0.
double phi_flat_asymptotic(int n, double r);
double phi_flat_asymptotic_constant(int n);

} // namespace blowup::special
