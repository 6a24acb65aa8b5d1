#pragma once

#include <span>
#include <vector>

#include "blowup/testfn.hpp"
#include "blowup/wavesolver.hpp"

namespace blowup::functional {

/// F(t) = area(S^{n-1}) * int u(r,t) eta_q(r,t,t) r^{n-1} dr on a uniform
/// radial grid (trapezoid), with eta from a prepared bulk workspace.
double compute_F(std::span<const double> r, std::span<const double> u, double t,
                 const testfn::TestFunctionEvaluator& ev,
                 const testfn::TestFunctionEvaluator::BulkWorkspace& ws);

/// Convenience form for a single state; builds a throwaway workspace.
double compute_F(const wave::WaveState& state, const testfn::TestFunctionEvaluator& ev);

/// Fills the f_value column of the record's series from its snapshots.
void attach_functional_series(wave::RunRecord& rec, const testfn::TestFunctionEvaluator& ev,
                              std::size_t bulk_panels = 512);

struct IdentityOptions {
    std::size_t check_points = 8;   // spread over (0, T]
    double tol = 0.02;
    std::size_t bulk_panels = 512;
    std::size_t min_snapshots = 5;  // refuse coarser cadence
};

struct IdentityReport {
    std::vector<double> times;
    std::vector<double> lhs, rhs;      // F(t) and the averaged right side
    std::vector<double> residuals;     // |lhs-rhs| / |rhs|
    double max_residual = 0.0;
    double tol = 0.0;
    bool pass = false;
};

/// Verifies the exact averaging identity
///   F(t) = eps int u0 xi(.,t) + eps t int u1 eta(.,t,0)
///          + int_0^t (t-s) int |u|^p eta(.,t,s) dx ds
/// on the recorded snapshots (trapezoid in s over the snapshot cadence).
IdentityReport check_identity(const wave::RunRecord& rec,
                              const testfn::TestFunctionEvaluator& ev,
                              const IdentityOptions& opt = {});

struct FrameReport {
    double c_frame = 0.0;          // largest C with the inequality holding
    bool pass = false;
    bool degenerate = false;       // zero or too-short F series (0 >= 0 holds)
    double exponent_gap = 0.0;     // |(n-1)p/2 - (n-1)/2 - 1/p - 1|
    std::vector<double> times, ratios;
};

/// Fits the largest C with
///   F(t) >= (C/<t>) int_0^t ((t-s)/<s>) F(s)^p / (log<s>)^{p-1} ds
/// over the recorded F series; requires the critical q = (n-1)/2 - 1/p.
FrameReport check_frame_inequality(const wave::RunRecord& rec, double q_used);

struct LpBoundReport {
    double c0 = 0.0;      // largest C0 with int|u|^p dx >= C0 eps^p <t>^{n-1-(n-1)p/2}
    bool pass = false;
    bool degenerate = false;
    std::vector<double> times, ratios;
};

LpBoundReport check_lp_lower_bound(const wave::RunRecord& rec);

} // namespace blowup::functional
