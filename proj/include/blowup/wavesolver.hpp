#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blowup/eigenfunction.hpp"
#include "blowup/metric.hpp"

namespace blowup::wave {

// Compactly supported nonnegative radial data (u, u_t)|_{t=0} = eps (u0, u1).
struct InitialData {
    double eps = 1.0;  // >= 0; zero gives the trivial flow
    double r0 = 1.5;   // support radius, > 1
    bool with_velocity = true;   // u1 = u0 profile when set, else u1 = 0
    double profile_scale = 1.0;  // bump amplitude; eps stays the theorem's eps

    /// Polynomial bump scale * (1 - (r/r0)^2)^4 on r < r0; C^3 at the edge.
    double u0(double r) const;
    double u1(double r) const;
    void validate() const;
};

struct SolverConfig {
    double dr = 0.02;
    double cfl = 0.7;            // dt = cfl * dr / sqrt(max alpha), <= 0.9
    double t_max = 30.0;
    double blowup_threshold = 1e6;
    double snapshot_dt = 0.2;
    double support_radius = 2.0; // R >= r0, for the cone bookkeeping
    double domain_margin = 4.0;  // grid length = t_max + R + margin
    bool nonlinear = true;
    std::size_t max_snapshot_points = 4096;
};

struct WaveState {
    double t = 0.0;
    eigen::UniformGrid grid;
    std::vector<double> u, v;  // v = u_t
    metric::MetricField metric;
    double p = 2.0;
    bool nonlinear = true;
    double max_abs_u() const;
};

WaveState make_state(const InitialData& data, const metric::MetricField& m, double p,
                     const SolverConfig& cfg);

/// One explicit leapfrog (velocity form) step of
///   u_tt = r^{1-n}(r^{n-1} alpha u_r)_r + |u|^p
/// with the symmetry condition u_r(0) = 0 and u = 0 at the far boundary.
/// Non-finite values are tolerated; the caller watches for them.
WaveState step(const WaveState& state, double dt);

struct SeriesPoint {
    double t = 0.0;
    double max_u = 0.0;
    double l2 = 0.0;
    double lp_integral = 0.0;      // int |u|^p dx
    double f_value = -1.0;         // filled by the functional pass, -1 = unset
    double support_excess = 0.0;   // max |u| outside r = t + R
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> u;  // on the strided snapshot grid
};

struct BlowupInfo {
    bool detected = false;
    double t_cross = 0.0;          // threshold crossing at the run's dt
    double t_lo = 0.0, t_hi = 0.0; // bracket from dt-halving reruns
};

struct RunRecord {
    int n = 3;
    double p = 0.0;
    double eps = 0.0;
    metric::MetricField metric;
    SolverConfig config;
    InitialData data;
    std::string termination;  // "blowup" | "no-blowup-within-horizon"
    BlowupInfo blowup;
    std::vector<SeriesPoint> series;
    std::vector<double> snapshot_r;
    std::vector<Snapshot> snapshots;
    double dt = 0.0;
};

/// Integrates until max|u| crosses the threshold or t_max is reached.  On
/// blow-up the final window is re-run at dt/2 and dt/4 from the last
/// checkpoint to bracket the crossing time.
RunRecord run_until_blowup(const InitialData& data, const metric::MetricField& m, double p,
                           const SolverConfig& cfg);

/// Discrete energy (1/2) int (u_t^2 + alpha u_r^2) r^{n-1} dr of the state
/// (angular factor omitted); conserved to O(dr^2) drift by the linear flow.
double energy(const WaveState& state);

} // namespace blowup::wave
