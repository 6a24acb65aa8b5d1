#pragma once

#include <cstddef>
#include <vector>

#include "blowup/metric.hpp"

namespace blowup::eigen {

struct UniformGrid {
    double dr = 0.02;
    std::size_t size = 0;
    double r(std::size_t i) const { return dr * static_cast<double>(i); }
    double r_max() const { return size ? r(size - 1) : 0.0; }
};

struct SolveOptions {
    double dr = 0.02;
    // 0 means automatic: max(r_min_domain, domain_lambda_factor / lambda),
    // large enough that the truncation boundary cannot contaminate the bulk.
    double r_max = 0.0;
    double r_min_domain = 90.0;
    double domain_lambda_factor = 16.0;
};

struct CorrectionSolve {
    UniformGrid grid;
    std::vector<double> psi;
    double residual = 0.0;   // relative residual of the tridiagonal solve
    double sup_norm = 0.0;
};

// Source term f_lambda = (Delta_g - Delta) applied to phi(lambda r).
double perturbation_source(const metric::MetricField& m, double lambda, double r);

/// Solves the radial two-point problem
///   r^{1-n} (r^{n-1} alpha psi')' - lambda^2 psi = -f_lambda,
/// with psi'(0) = 0 and the decaying Robin condition psi' + lambda psi = 0
/// at the (automatically sized) truncation radius.
CorrectionSolve solve_correction(const metric::MetricField& m, double lambda,
                                 const SolveOptions& opt = {});

/// Applies the discrete operator Delta_g - lambda^2 to samples of a smooth
/// function on the interior of a grid (used for residual diagnostics).
std::vector<double> apply_discrete_operator(const metric::MetricField& m, double lambda,
                                            const UniformGrid& grid,
                                            const std::vector<double>& values);

struct TableOptions {
    double lambda0 = 0.0;          // 0 -> beta/4
    std::size_t ladder_points = 48;
    double lambda_min_factor = 1.0 / 200.0;  // ladder bottom = lambda0 * factor
    double dr_table = 0.02;
    double r_table = 80.0;
    SolveOptions solve;
    bool parallel = true;
};

struct ThetaFit {
    double slope = 0.0;      // fitted exponent of ||psi_lambda|| ~ lambda^theta
    double intercept = 0.0;  // log prefactor
    double max_dev = 0.0;    // max |log residual| of the fit
};

ThetaFit fit_power_law(const std::vector<double>& lambdas, const std::vector<double>& sups);

// Sampled family phi_lambda = phi(lambda r) + psi_lambda on a fixed radial
// grid and a geometric lambda ladder.  Evaluation below the ladder falls
// back to the measured lambda^theta law; beyond r_table the correction is
// continued by its decaying far-field profile.  Both continuations are
// deterministic, so quadratures over the table converge as plain rules.
class EigenfunctionTable {
public:
    metric::MetricField metric;
    std::vector<double> lambda_grid;            // ascending, <= lambda0
    UniformGrid r_grid;
    std::vector<std::vector<double>> psi;        // [lambda][r]
    std::vector<std::vector<double>> phi_lambda; // [lambda][r], = phi(lambda r) + psi
    double lambda0 = 0.0;
    double theta_fit = 0.0;
    double d0 = 0.0, d1 = 0.0;       // measured two-sided envelope constants
    double continuity_modulus = 0.0; // max ||psi_l - psi_m||_inf / |l - m|
    std::vector<double> psi_sup;     // sup |psi_lambda| per ladder row

    /// e^{-lambda r} phi_lambda(r) for lambda in (0, lambda0], any r >= 0.
    double phi_scaled(double lambda, double r) const;
    /// psi_lambda(r) through the ladder interpolant and its continuations.
    double psi_value(double lambda, double r) const;

private:
    double psi_row_at(std::size_t row, double r) const;
    friend EigenfunctionTable build_table(const metric::MetricField&, const TableOptions&);
};

EigenfunctionTable build_table(const metric::MetricField& m, const TableOptions& opt = {});

} // namespace blowup::eigen
