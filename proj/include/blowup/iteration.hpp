#pragma once

#include <vector>

namespace blowup::iteration {

/// gamma(p, n) = 2 + (n+1) p - (n-1) p^2, whose positive root is the
/// critical exponent separating global existence from blow-up.
double strauss_gamma(double p, int n);

struct StraussExponent {
    int n = 0;
    double p0 = 0.0;
    double gamma_at_p0 = 0.0;  // residual of the quadratic at the root
};

StraussExponent strauss_exponent(int n);

/// Exponent combination (n-1)p/2 - (n-1)/2 - 1/p; equals 1 exactly at the
/// critical p, which is what collapses the averaged inequality to its
/// scale-invariant form.
double critical_exponent_combination(int n, double p);

struct ScheduleConstants {
    double c_frame = 1.0;  // constant of the integral inequality
    double c0 = 1.0;       // L^p lower-bound constant
    double b1 = 1.0;       // test-function lower-bound constant
};

// Slicing sequences and constants:
//   l_j = 2 - 2^{-(j+1)},   a_j = (p^{j+1}-1)/(p-1),   b_j = p^j - 1,
//   C_{j+1} = E C_j^p / (2p)^j  with  C_1 = N eps^{p^2}.
// C_j is doubly exponential in j, so everything is carried in the scaled
// variable z_j = (log C_j + Y) / p^{j-1}, Y = log(E)/(p-1), for which the
// recursion is simply z_{j+1} = z_j - (j/p^j) log(2p).
class IterationSchedule {
public:
    static IterationSchedule build(double p, const ScheduleConstants& c, double eps,
                                   int j_max = 30);

    double p = 0.0;
    double eps = 0.0;
    ScheduleConstants constants;
    int j_max = 0;

    double log_m = 0.0;  // M = C0 B1 / 27
    double log_n = 0.0;  // N = C M^p / (63 (p+1))
    double log_e = 0.0;  // E = C (p-1) / (72 p^2)
    double log_c1 = 0.0; // C_1 = N eps^{p^2}
    double s_limit = 0.0;               // S = p/(p-1)^2
    std::vector<double> l, a, b;        // index j = 0..j_max
    std::vector<double> s_partial;      // S_j = sum_{i=1}^{j-1} i/p^i
    std::vector<double> z_recursion;    // scaled log C_j via the recursion
    std::vector<double> z_closed;       // scaled log C_j via the closed form

    /// log C_j reconstructed from the scaled recursion (j >= 1).
    double log_c(int j) const;
    double log_c_closed(int j) const;

    /// log of the j-th lower bound C_j (log<t>)^{-b_j} (log(t/l_j))^{a_j};
    /// requires t >= l_j (t > l_j for a nonzero value).
    double envelope_log(double t, int j) const;
    double envelope(double t, int j) const;
    /// Same bound with t passed as log t, usable far beyond double range.
    double envelope_log_t(double log_t, int j) const;

    /// First-step bound M eps^p log(t / (3/2)) for t >= 3/2.
    double first_step(double t) const;

    /// log t at which bound j+1 overtakes bound j (finite; the later bound
    /// grows with a higher power of log t).
    double crossing_log_t(int j) const;
};

struct LifespanBound {
    double log_b = 0.0;
    double k_eff = 0.0;       // B^{-(p-1)/p}
    double log_t_bound = 0.0; // K_eff * eps^{-p(p-1)}
    double t_bound = 0.0;     // exp of the above, +inf once it saturates
    double eps0 = 0.0;        // largest eps with exp{K_eff eps^{-p(p-1)}} >= 4
    bool within_guarantee = false;
};

/// Lifespan upper bound T <= exp(B^{-(p-1)/p} eps^{-p(p-1)}) with
/// B = N (2p)^{-S} 2^{p(1-2p)/(p-1)} E^{1/(p-1)}.
LifespanBound lifespan_bound(const IterationSchedule& sched, double eps);

/// Divergence trigger K(t) = log{ B eps^{p^2} (log t)^{p/(p-1)} }; the
/// iterated bounds diverge once K(t) > 0.  The bound times are typically
/// far beyond double range, hence the log-t entry point.
double blowup_trigger_logt(const IterationSchedule& sched, double eps, double log_t);
double blowup_trigger(const IterationSchedule& sched, double eps, double t);

} // namespace blowup::iteration
