#include "blowup/wavesolver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "blowup/special_functions.hpp"

namespace blowup::wave {

namespace {

// r^{1-n}(r^{n-1} alpha u_r)_r + |u|^p, flux form in the interior and the
// regularized n*alpha(0)*u_rr stencil at the origin.
void acceleration(const WaveState& st, std::vector<double>& acc) {
    const auto& g = st.grid;
    const auto& u = st.u;
    const int n = st.metric.n;
    const double dr = g.dr;
    const std::size_t N = g.size;
    acc.assign(N, 0.0);
    acc[0] = 2.0 * n * st.metric.alpha(0.0) * (u[1] - u[0]) / (dr * dr);
    for (std::size_t i = 1; i + 1 < N; ++i) {
        const double r = g.r(i);
        const double w = std::pow(r, n - 1) * dr * dr;
        const double gp = std::pow(r + 0.5 * dr, n - 1) * st.metric.alpha(r + 0.5 * dr);
        const double gm = std::pow(r - 0.5 * dr, n - 1) * st.metric.alpha(r - 0.5 * dr);
        acc[i] = (gp * (u[i + 1] - u[i]) - gm * (u[i] - u[i - 1])) / w;
    }
    // acc at the last node stays 0 together with u (cone never reaches it).
    if (st.nonlinear) {
        for (std::size_t i = 0; i + 1 < N; ++i)
            acc[i] += std::pow(std::abs(u[i]), st.p);
    }
}

double radial_weight(int n, double r) { return std::pow(r, n - 1); }

struct Monitors {
    double max_u = 0.0, l2 = 0.0, lp = 0.0, support_excess = 0.0;
};

Monitors measure(const WaveState& st, double support_radius) {
    Monitors m;
    const int n = st.metric.n;
    const double dr = st.grid.dr;
    const double area = special::sphere_area(n);
    const double cone = st.t + support_radius;
    double l2 = 0.0, lp = 0.0;
    for (std::size_t i = 0; i < st.grid.size; ++i) {
        const double r = st.grid.r(i);
        const double a = std::abs(st.u[i]);
        m.max_u = std::max(m.max_u, a);
        const double w = radial_weight(n, r) * dr * (i == 0 || i + 1 == st.grid.size ? 0.5 : 1.0);
        l2 += w * a * a;
        lp += w * std::pow(a, st.p);
        if (r > cone) m.support_excess = std::max(m.support_excess, a);
    }
    m.l2 = std::sqrt(area * l2);
    m.lp = area * lp;
    return m;
}

} // namespace

double InitialData::u0(double r) const {
    if (r >= r0) return 0.0;
    const double s = 1.0 - (r / r0) * (r / r0);
    return profile_scale * s * s * s * s;
}

double InitialData::u1(double r) const { return with_velocity ? u0(r) : 0.0; }

void InitialData::validate() const {
    if (!(eps >= 0.0)) throw std::invalid_argument("InitialData: eps must be >= 0");
    if (!(r0 > 1.0)) throw std::invalid_argument("InitialData: support radius must be > 1");
    if (!(profile_scale > 0.0))
        throw std::invalid_argument("InitialData: profile_scale must be > 0");
}

double WaveState::max_abs_u() const {
    double m = 0.0;
    for (double x : u) m = std::max(m, std::abs(x));
    return m;
}

WaveState make_state(const InitialData& data, const metric::MetricField& m, double p,
                     const SolverConfig& cfg) {
    data.validate();
    if (!(p > 1.0)) throw std::invalid_argument("make_state: p must be > 1");
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 0.9))
        throw std::invalid_argument("make_state: cfl factor must lie in (0, 0.9]");
    if (!(cfg.support_radius >= data.r0))
        throw std::invalid_argument("make_state: support radius R must be >= r0");
    WaveState st;
    st.metric = m;
    st.p = p;
    st.nonlinear = cfg.nonlinear;
    st.grid.dr = cfg.dr;
    const double length = cfg.t_max + cfg.support_radius + cfg.domain_margin;
    st.grid.size = static_cast<std::size_t>(std::ceil(length / cfg.dr)) + 1;
    st.u.resize(st.grid.size);
    st.v.resize(st.grid.size);
    for (std::size_t i = 0; i < st.grid.size; ++i) {
        const double r = st.grid.r(i);
        st.u[i] = data.eps * data.u0(r);
        st.v[i] = data.eps * data.u1(r);
    }
    return st;
}

WaveState step(const WaveState& state, double dt) {
    WaveState next = state;
    std::vector<double> acc;
    acceleration(state, acc);
    const std::size_t N = state.grid.size;
    for (std::size_t i = 0; i < N; ++i)
        next.u[i] = state.u[i] + dt * state.v[i] + 0.5 * dt * dt * acc[i];
    next.u[N - 1] = 0.0;
    next.t = state.t + dt;
    std::vector<double> acc_next;
    acceleration(next, acc_next);
    for (std::size_t i = 0; i < N; ++i)
        next.v[i] = state.v[i] + 0.5 * dt * (acc[i] + acc_next[i]);
    return next;
}

double energy(const WaveState& st) {
    const int n = st.metric.n;
    const double dr = st.grid.dr;
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < st.grid.size; ++i) {
        const double rm = st.grid.r(i) + 0.5 * dr;
        const double du = (st.u[i + 1] - st.u[i]) / dr;
        const double vm = 0.5 * (st.v[i] + st.v[i + 1]);
        e += 0.5 * (vm * vm + st.metric.alpha(rm) * du * du) * radial_weight(n, rm) * dr;
    }
    return e;
}

namespace {

struct CrossResult {
    bool crossed = false;
    double t_cross = 0.0;
    double dt = 0.0;
};

// Sub-step estimate of the threshold crossing, interpolating log max|u|
// between the straddling steps.
double interpolate_crossing(double t_prev, double m_prev, double t_cur, double m_cur,
                            double threshold) {
    if (!std::isfinite(m_cur) || !(m_prev > 0.0)) return t_cur;
    const double num = std::log(threshold) - std::log(m_prev);
    const double den = std::log(m_cur) - std::log(m_prev);
    if (!(den > 0.0)) return t_cur;
    return t_prev + (t_cur - t_prev) * std::clamp(num / den, 0.0, 1.0);
}

// Advance from `st` until threshold crossing or t_end; non-finite values
// count as a crossing at the previous step.
CrossResult integrate_until(WaveState st, double dt, double t_end, double threshold,
                            const std::function<void(const WaveState&)>& on_step) {
    CrossResult res;
    res.dt = dt;
    while (st.t < t_end - 0.5 * dt) {
        const double m_prev = st.max_abs_u();
        st = step(st, dt);
        const double m = st.max_abs_u();
        if (!std::isfinite(m) || m > threshold) {
            res.crossed = true;
            res.t_cross = interpolate_crossing(st.t - dt, m_prev, st.t, m, threshold);
            return res;
        }
        if (on_step) on_step(st);
    }
    return res;
}

} // namespace

RunRecord run_until_blowup(const InitialData& data, const metric::MetricField& m, double p,
                           const SolverConfig& cfg) {
    RunRecord rec;
    rec.n = m.n;
    rec.p = p;
    rec.eps = data.eps;
    rec.metric = m;
    rec.config = cfg;
    rec.data = data;

    WaveState st = make_state(data, m, p, cfg);
    const double dt = cfg.cfl * cfg.dr;  // max alpha <= 1 for admissible metrics
    rec.dt = dt;

    const std::size_t stride =
        std::max<std::size_t>(1, st.grid.size / cfg.max_snapshot_points + 1);
    for (std::size_t i = 0; i < st.grid.size; i += stride)
        rec.snapshot_r.push_back(st.grid.r(i));

    auto record_snapshot = [&](const WaveState& s) {
        const Monitors mon = measure(s, cfg.support_radius);
        SeriesPoint pt;
        pt.t = s.t;
        pt.max_u = mon.max_u;
        pt.l2 = mon.l2;
        pt.lp_integral = mon.lp;
        pt.support_excess = mon.support_excess;
        rec.series.push_back(pt);
        Snapshot snap;
        snap.t = s.t;
        snap.u.reserve(rec.snapshot_r.size());
        for (std::size_t i = 0; i < s.grid.size; i += stride) snap.u.push_back(s.u[i]);
        rec.snapshots.push_back(std::move(snap));
    };

    record_snapshot(st);

    // Rolling checkpoint for the dt-halving reruns of the final window.
    WaveState checkpoint = st;
    const double checkpoint_dt = std::max(1.0, cfg.snapshot_dt);
    double next_checkpoint = checkpoint_dt;
    double next_snapshot = cfg.snapshot_dt;

    bool crossed = false;
    double t_cross = 0.0;
    while (st.t < cfg.t_max - 0.5 * dt) {
        const double m_prev = st.max_abs_u();
        st = step(st, dt);
        const double mx = st.max_abs_u();
        if (!std::isfinite(mx) || mx > cfg.blowup_threshold) {
            crossed = true;
            t_cross = interpolate_crossing(st.t - dt, m_prev, st.t, mx, cfg.blowup_threshold);
            break;
        }
        if (st.t >= next_snapshot - 0.5 * dt) {
            record_snapshot(st);
            next_snapshot += cfg.snapshot_dt;
        }
        if (st.t >= next_checkpoint - 0.5 * dt) {
            checkpoint = st;
            next_checkpoint += checkpoint_dt;
        }
    }

    if (!crossed) {
        rec.termination = "no-blowup-within-horizon";
        return rec;
    }

    rec.termination = "blowup";
    rec.blowup.detected = true;
    rec.blowup.t_cross = t_cross;
    double lo = t_cross, hi = t_cross;
    double finest_dt = dt;
    for (int halvings = 1; halvings <= 2; ++halvings) {
        const double fine_dt = dt / std::pow(2.0, halvings);
        finest_dt = fine_dt;
        const CrossResult r = integrate_until(checkpoint, fine_dt, cfg.t_max,
                                              cfg.blowup_threshold, nullptr);
        if (r.crossed) {
            lo = std::min(lo, r.t_cross);
            hi = std::max(hi, r.t_cross);
        }
    }
    rec.blowup.t_lo = lo - 0.5 * finest_dt;
    rec.blowup.t_hi = hi + 0.5 * finest_dt;
    return rec;
}

} // namespace blowup::wave
