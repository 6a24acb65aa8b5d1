#include "blowup/iteration.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace blowup::iteration {

double strauss_gamma(double p, int n) {
    return 2.0 + (n + 1) * p - (n - 1) * p * p;
}

StraussExponent strauss_exponent(int n) {
    if (n < 2) throw std::invalid_argument("strauss_exponent: n must be >= 2");
    StraussExponent s;
    s.n = n;
    const double a = static_cast<double>(n - 1);
    const double b = static_cast<double>(n + 1);
    s.p0 = (b + std::sqrt(b * b + 8.0 * a)) / (2.0 * a);
    s.gamma_at_p0 = strauss_gamma(s.p0, n);
    return s;
}

double critical_exponent_combination(int n, double p) {
    return 0.5 * (n - 1) * p - 0.5 * (n - 1) - 1.0 / p;
}

IterationSchedule IterationSchedule::build(double p, const ScheduleConstants& c, double eps,
                                           int j_max) {
    if (!(p > 1.0)) throw std::invalid_argument("IterationSchedule: p must be > 1");
    if (!(c.c_frame > 0.0 && c.c0 > 0.0 && c.b1 > 0.0))
        throw std::invalid_argument("IterationSchedule: constants must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument("IterationSchedule: eps must be > 0");
    if (j_max < 2) throw std::invalid_argument("IterationSchedule: j_max must be >= 2");

    IterationSchedule s;
    s.p = p;
    s.eps = eps;
    s.constants = c;
    s.j_max = j_max;
    s.log_m = std::log(c.c0) + std::log(c.b1) - std::log(27.0);
    s.log_n = std::log(c.c_frame) + p * s.log_m - std::log(63.0 * (p + 1.0));
    s.log_e = std::log(c.c_frame) + std::log(p - 1.0) - std::log(72.0 * p * p);
    s.log_c1 = s.log_n + p * p * std::log(eps);
    s.s_limit = p / ((p - 1.0) * (p - 1.0));

    s.l.resize(j_max + 1);
    s.a.resize(j_max + 1);
    s.b.resize(j_max + 1);
    s.s_partial.resize(j_max + 1, 0.0);
    for (int j = 0; j <= j_max; ++j) {
        s.l[j] = 2.0 - std::pow(2.0, -(j + 1));
        s.a[j] = (std::pow(p, j + 1) - 1.0) / (p - 1.0);
        s.b[j] = std::pow(p, j) - 1.0;
    }
    for (int j = 2; j <= j_max; ++j)
        s.s_partial[j] = s.s_partial[j - 1] + static_cast<double>(j - 1) / std::pow(p, j - 1);

    // Scaled recursion z_{j+1} = z_j - (j/p^j) log(2p); closed form
    // z_j = log C_1 + Y - S_j log(2p) with Y = log(E)/(p-1).
    const double y = s.log_e / (p - 1.0);
    const double log2p = std::log(2.0 * p);
    s.z_recursion.resize(j_max + 1, 0.0);
    s.z_closed.resize(j_max + 1, 0.0);
    s.z_recursion[1] = s.log_c1 + y;
    s.z_closed[1] = s.log_c1 + y;
    for (int j = 1; j < j_max; ++j) {
        s.z_recursion[j + 1] =
            s.z_recursion[j] - static_cast<double>(j) / std::pow(p, j) * log2p;
        s.z_closed[j + 1] = s.log_c1 + y - s.s_partial[j + 1] * log2p;
    }
    return s;
}

double IterationSchedule::log_c(int j) const {
    if (j < 1 || j > j_max) throw std::domain_error("log_c: j out of range");
    return std::pow(p, j - 1) * z_recursion[j] - log_e / (p - 1.0);
}

double IterationSchedule::log_c_closed(int j) const {
    if (j < 1 || j > j_max) throw std::domain_error("log_c_closed: j out of range");
    return std::pow(p, j - 1) * z_closed[j] - log_e / (p - 1.0);
}

double IterationSchedule::envelope_log_t(double log_t, int j) const {
    if (j < 1 || j > j_max) throw std::domain_error("envelope: j out of range");
    const double log_lj = std::log(l[j]);
    if (!(log_t >= log_lj)) throw std::domain_error("envelope: t must be >= l_j");
    if (log_t == log_lj) return -std::numeric_limits<double>::infinity();
    // log(3+t) = log_t + log1p(3 e^{-log_t}), safe for any magnitude of log_t
    const double log_bracket =
        log_t > 700.0 ? log_t : std::log(3.0 + std::exp(log_t));
    return log_c(j) - b[j] * std::log(log_bracket) + a[j] * std::log(log_t - log_lj);
}

double IterationSchedule::envelope_log(double t, int j) const {
    if (!(t > 0.0)) throw std::domain_error("envelope: t must be > 0");
    return envelope_log_t(std::log(t), j);
}

double IterationSchedule::envelope(double t, int j) const {
    const double lg = envelope_log(t, j);
    if (lg > 700.0) return std::numeric_limits<double>::infinity();
    return std::exp(lg);
}

double IterationSchedule::first_step(double t) const {
    if (!(t >= 1.5)) throw std::domain_error("first_step: t must be >= 3/2");
    return std::exp(log_m + p * std::log(eps)) * std::log(t / 1.5);
}

double IterationSchedule::crossing_log_t(int j) const {
    if (j < 1 || j + 1 > j_max) throw std::domain_error("crossing_log_t: j out of range");
    // Solve envelope_log_t(., j+1) = envelope_log_t(., j); the gap is
    // increasing for large t since a_{j+1} - a_j beats b_{j+1} - b_j.
    auto gap = [&](double log_t) {
        return envelope_log_t(log_t, j + 1) - envelope_log_t(log_t, j);
    };
    double lo = std::log(l[j + 1] + 1e-9);
    double hi = std::max(2.0 * lo + 2.0, 4.0);
    int guard = 0;
    while (gap(hi) < 0.0) {
        hi *= 2.0;
        if (++guard > 80) throw std::runtime_error("crossing_log_t: no crossing found");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

LifespanBound lifespan_bound(const IterationSchedule& s, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("lifespan_bound: eps must be > 0");
    const double p = s.p;
    LifespanBound out;
    out.log_b = s.log_n - s.s_limit * std::log(2.0 * p) +
                p * (1.0 - 2.0 * p) / (p - 1.0) * std::log(2.0) + s.log_e / (p - 1.0);
    out.k_eff = std::exp(-(p - 1.0) / p * out.log_b);
    out.log_t_bound = out.k_eff * std::pow(eps, -p * (p - 1.0));
    out.t_bound = out.log_t_bound > 700.0 ? std::numeric_limits<double>::infinity()
                                          : std::exp(out.log_t_bound);
    out.eps0 = std::pow(out.k_eff / std::log(4.0), 1.0 / (p * (p - 1.0)));
    out.within_guarantee = eps <= out.eps0;
    return out;
}

double blowup_trigger_logt(const IterationSchedule& s, double eps, double log_t) {
    if (!(log_t > 0.0)) throw std::domain_error("blowup_trigger: t must be > 1");
    const double p = s.p;
    const double log_b = lifespan_bound(s, eps).log_b;
    return log_b + p * p * std::log(eps) + p / (p - 1.0) * std::log(log_t);
}

double blowup_trigger(const IterationSchedule& s, double eps, double t) {
    return blowup_trigger_logt(s, eps, std::log(t));
}

} // namespace blowup::iteration
