#include "blowup/functional.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "blowup/iteration.hpp"
#include "blowup/special_functions.hpp"

namespace blowup::functional {

namespace {

using testfn::bracket;

// Trapezoid over a uniform radial grid with measure r^{n-1} dr.
double radial_integral(std::span<const double> r, std::span<const double> f, int n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double w = (i == 0 || i + 1 == r.size()) ? 0.5 : 1.0;
        acc += w * f[i] * std::pow(r[i], n - 1);
    }
    return acc * (r.size() > 1 ? r[1] - r[0] : 0.0);
}

} // namespace

double compute_F(std::span<const double> r, std::span<const double> u, double t,
                 const testfn::TestFunctionEvaluator& ev,
                 const testfn::TestFunctionEvaluator::BulkWorkspace& ws) {
    if (r.size() != u.size() || r.size() != ws.x.size())
        throw std::invalid_argument("compute_F: grid mismatch");
    std::vector<double> eta(r.size());
    ev.eta_profile(ws, t, t, eta, /*all=*/true);
    std::vector<double> integrand(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) integrand[i] = u[i] * eta[i];
    const int n = ev.table().metric.n;
    return special::sphere_area(n) * radial_integral(r, integrand, n);
}

double compute_F(const wave::WaveState& state, const testfn::TestFunctionEvaluator& ev) {
    std::vector<double> r(state.grid.size);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = state.grid.r(i);
    const auto ws = ev.make_bulk(r);
    return compute_F(r, state.u, state.t, ev, ws);
}

void attach_functional_series(wave::RunRecord& rec, const testfn::TestFunctionEvaluator& ev,
                              std::size_t bulk_panels) {
    const auto ws = ev.make_bulk(rec.snapshot_r, bulk_panels);
    for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
        rec.series[k].f_value =
            compute_F(rec.snapshot_r, rec.snapshots[k].u, rec.snapshots[k].t, ev, ws);
    }
}

IdentityReport check_identity(const wave::RunRecord& rec,
                              const testfn::TestFunctionEvaluator& ev,
                              const IdentityOptions& opt) {
    if (rec.snapshots.size() < opt.min_snapshots)
        throw std::runtime_error(
            "check_identity: snapshot cadence too coarse for the s-integral");
    const int n = rec.n;
    const double area = special::sphere_area(n);
    const auto& r = rec.snapshot_r;
    const std::size_t nx = r.size();
    const auto ws = ev.make_bulk(r, opt.bulk_panels);

    std::vector<double> scratch(nx), u0(nx), u1(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        u0[i] = rec.data.u0(r[i]);
        u1[i] = rec.data.u1(r[i]);
    }

    // |u|^p spatial integrals against eta(., t, s) are the expensive part;
    // the snapshot times serve as the s-nodes of the outer trapezoid.
    const std::size_t ns = rec.snapshots.size();

    IdentityReport rep;
    rep.tol = opt.tol;
    std::vector<std::size_t> checks;
    for (std::size_t c = 1; c <= opt.check_points; ++c) {
        const std::size_t k =
            std::min(ns - 1, c * (ns - 1) / opt.check_points);
        if (k > 0 && (checks.empty() || checks.back() != k)) checks.push_back(k);
    }

    std::vector<double> eta(nx), xi(nx), up(nx);
    for (std::size_t k : checks) {
        const double t = rec.snapshots[k].t;

        double lhs = rec.series[k].f_value;
        if (lhs < 0.0)
            lhs = compute_F(r, rec.snapshots[k].u, t, ev, ws);

        ev.xi_profile(ws, t, xi);
        for (std::size_t i = 0; i < nx; ++i) scratch[i] = u0[i] * xi[i];
        double rhs = rec.eps * area * radial_integral(r, scratch, n);

        ev.eta_profile(ws, t, 0.0, eta);
        for (std::size_t i = 0; i < nx; ++i) scratch[i] = u1[i] * eta[i];
        rhs += rec.eps * t * area * radial_integral(r, scratch, n);

        if (rec.config.nonlinear) {
            double source = 0.0;
            for (std::size_t j = 0; j <= k; ++j) {
                const double s = rec.snapshots[j].t;
                const double s_next = rec.snapshots[std::min(j + 1, k)].t;
                const double s_prev = rec.snapshots[j > 0 ? j - 1 : 0].t;
                const double w = 0.5 * (s_next - s_prev);
                if (w == 0.0 || t == s) continue;  // (t - s) factor vanishes
                ev.eta_profile(ws, t, s, eta);
                const auto& us = rec.snapshots[j].u;
                for (std::size_t i = 0; i < nx; ++i)
                    up[i] = std::pow(std::abs(us[i]), rec.p) * eta[i];
                source += w * (t - s) * area * radial_integral(r, up, n);
            }
            rhs += source;
        }

        rep.times.push_back(t);
        rep.lhs.push_back(lhs);
        rep.rhs.push_back(rhs);
        const double denom = std::max(std::abs(rhs), 1e-300);
        rep.residuals.push_back(std::abs(lhs - rhs) / denom);
    }
    rep.max_residual = rep.residuals.empty()
                           ? 0.0
                           : *std::max_element(rep.residuals.begin(), rep.residuals.end());
    rep.pass = rep.max_residual <= opt.tol;
    return rep;
}

FrameReport check_frame_inequality(const wave::RunRecord& rec, double q_used) {
    FrameReport rep;
    const double p = rec.p;
    rep.exponent_gap =
        std::abs(iteration::critical_exponent_combination(rec.n, p) - 1.0);
    const double q_crit = 0.5 * (rec.n - 1) - 1.0 / p;
    if (std::abs(q_used - q_crit) > 1e-9)
        throw std::invalid_argument("check_frame_inequality: q must be (n-1)/2 - 1/p");

    std::vector<double> t, F;
    for (const auto& pt : rec.series) {
        if (pt.f_value < 0.0) continue;
        t.push_back(pt.t);
        F.push_back(pt.f_value);
    }
    if (t.size() < 4) {
        rep.degenerate = true;
        return rep;
    }

    double fmax = 0.0;
    for (double f : F) fmax = std::max(fmax, f);
    if (fmax <= 0.0) {
        rep.degenerate = true;  // the inequality holds trivially (0 >= 0)
        return rep;
    }
    const double den_floor = 1e-10 * std::pow(fmax, p);

    double cmin = std::numeric_limits<double>::max();
    for (std::size_t k = 2; k < t.size(); ++k) {
        double den = 0.0;
        for (std::size_t j = 0; j <= k; ++j) {
            const double s = t[j];
            const double w = 0.5 * (t[std::min(j + 1, k)] - t[j > 0 ? j - 1 : 0]);
            den += w * (t[k] - s) / bracket(s) * std::pow(F[j], p) /
                   std::pow(std::log(bracket(s)), p - 1.0);
        }
        den /= bracket(t[k]);
        if (den < den_floor) continue;
        const double ratio = F[k] / den;
        rep.times.push_back(t[k]);
        rep.ratios.push_back(ratio);
        cmin = std::min(cmin, ratio);
    }
    if (!rep.ratios.empty()) {
        rep.c_frame = cmin;
        rep.pass = cmin > 0.0 && std::isfinite(cmin);
    }
    return rep;
}

LpBoundReport check_lp_lower_bound(const wave::RunRecord& rec) {
    LpBoundReport rep;
    const double p = rec.p;
    const double power = rec.n - 1 - 0.5 * (rec.n - 1) * p;
    double lp_max = 0.0;
    for (const auto& pt : rec.series) lp_max = std::max(lp_max, pt.lp_integral);
    if (lp_max <= 0.0) {
        rep.degenerate = true;
        return rep;
    }
    double cmin = std::numeric_limits<double>::max();
    for (const auto& pt : rec.series) {
        const double ratio = pt.lp_integral /
                             (std::pow(rec.eps, p) * std::pow(bracket(pt.t), power));
        rep.times.push_back(pt.t);
        rep.ratios.push_back(ratio);
        cmin = std::min(cmin, ratio);
    }
    rep.c0 = cmin;
    rep.pass = cmin > 0.0 && std::isfinite(cmin);
    return rep;
}

} // namespace blowup::functional
