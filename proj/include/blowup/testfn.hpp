#pragma once

#include <memory>
#include <span>
#include <vector>

#include "blowup/eigenfunction.hpp"

namespace blowup::testfn {

/// Bracket used by every bound in this module: <s> = 3 + |s|.
inline double bracket(double s) { return 3.0 + std::abs(s); }

struct EvaluatorOptions {
    double q = 0.5;            // moment exponent, q > -1
    double support_radius = 2; // R >= R_0
    // Composite quadrature in u = log(lambda): Simpson panels over
    // [lambda0 * floor_factor, lambda0], plus an analytic moment for the
    // remaining [0, floor] tail where the integrand is lambda^q * smooth.
    std::size_t log_panels = 2048;
    double floor_factor = 1e-7;
};

// Quadrature engine for the two moment integrals over (0, lambda0]
//   xi(x,t)    = int e^{-l(t+R)} cosh(l t)                 phi_l(x) l^q dl
//   eta(x,t,s) = int e^{-l(t+R)} sinh(l(t-s))/(l(t-s))     phi_l(x) l^q dl
// evaluated against an EigenfunctionTable.  All kernels are folded with the
// e^{l|x|} growth of phi_l so no intermediate factor overflows.
class TestFunctionEvaluator {
public:
    TestFunctionEvaluator(std::shared_ptr<const eigen::EigenfunctionTable> table,
                          const EvaluatorOptions& opt);

    double xi(double x, double t) const;
    double eta(double x, double t, double s) const;

    double q() const { return q_; }
    double support_radius() const { return support_radius_; }
    double lambda0() const { return lambda0_; }
    const eigen::EigenfunctionTable& table() const { return *table_; }

    /// Same value as xi/eta but with the panel count overridden (used by
    /// the grid-doubling stability checks).
    double xi_with_panels(double x, double t, std::size_t panels) const;
    double eta_with_panels(double x, double t, double s, std::size_t panels) const;

    // Bulk path: shares one w(lambda, x) tableau across many (t, s) pairs.
    // Intended for the spatial quadratures of the averaged functional where
    // profiles over a whole radial grid are needed per time pair.
    struct BulkWorkspace {
        std::vector<double> x;
        std::vector<double> nodes, weights;   // lambda nodes and Simpson weights
        std::vector<double> w;                // [node][x] scaled eigenfunction
        std::size_t panels = 0;
        double floor_lambda = 0.0;
    };
    BulkWorkspace make_bulk(std::span<const double> x_grid,
                            std::size_t panels = 512) const;
    /// out[i] = eta(x[i], t, s); entries with x[i] > s + R are skipped
    /// (left 0) unless `all` is set, matching the support of the averaged
    /// solution.
    void eta_profile(const BulkWorkspace& ws, double t, double s,
                     std::span<double> out, bool all = false) const;
    void xi_profile(const BulkWorkspace& ws, double t, std::span<double> out) const;

private:
    std::shared_ptr<const eigen::EigenfunctionTable> table_;
    double q_;
    double support_radius_;
    double lambda0_;
    std::size_t panels_;
    double floor_factor_;

    double integrate_xi(double x, double t, std::size_t panels) const;
    double integrate_eta(double x, double t, double s, std::size_t panels) const;
};

struct BoundSampleSpec {
    std::vector<double> t_grid = {0.0, 0.5, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0};
    std::size_t x_points = 7;   // per region slice
    std::size_t s_points = 5;   // interior s fractions per t for bound (ii)
};

struct BoundConstants {
    double a0 = 0.0;   // inf xi over |x| <= R, t >= 0
    double b0 = 0.0;   // inf eta(x,t,0) <t>
    double b1 = 0.0;   // inf eta(x,t,s) <t> <s>^q
    double b2 = 0.0;   // sup eta(x,t,t) <t>^{(n-1)/2} <t-|x|>^{q-(n-3)/2}
    bool pass = false;
    double stability = 0.0;  // max relative change under lambda-grid doubling
    BoundSampleSpec spec;
};

/// Fits the four bound constants of the test-function estimates over the
/// sampled regions and verifies positivity/finiteness.  Requires q > 0 for
/// the lower bounds and q > (n-3)/2 for the decay bound.
BoundConstants fit_bound_constants(const TestFunctionEvaluator& ev,
                                   const BoundSampleSpec& spec = {});

} // namespace blowup::testfn
